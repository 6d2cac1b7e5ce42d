//
// Copyright 2026 The TabPerturb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "tabperturb/csv.h"
#include "test_util.h"

namespace tabperturb::cli {
namespace {

namespace fs = std::filesystem;
using testing::DataPath;
using testing::TempDir;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = Run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string Slurp(const fs::path& p) { return *ReadFile(p); }

TEST(CliTest, IdentityPerturbWritesAllArtifacts) {
  TempDir dir;
  const fs::path output = dir / "out.csv";
  auto o = RunCli({"perturb", "--input", DataPath("sample_loans.csv"),
                   "--config", DataPath("identity_config.json"), "--output",
                   output.string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(Slurp(output), Slurp(DataPath("sample_loans.csv")));
  for (const char* suffix : {".manifest.json", ".manifest.txt", ".report.json",
                             ".report.txt"}) {
    EXPECT_TRUE(fs::exists(output.string() + suffix)) << suffix;
  }
  auto report = nlohmann::json::parse(Slurp(output.string() + ".report.json"));
  for (const auto& col : report["numeric"]) {
    EXPECT_EQ(col["ks_statistic"].get<double>(), 0.0);
  }
}

TEST(CliTest, OverBudgetExitsThreeWithoutArtifacts) {
  TempDir dir;
  const fs::path output = dir / "out.csv";
  auto o = RunCli({"perturb", "--input", DataPath("sample_loans.csv"),
                   "--config", DataPath("over_budget_config.json"), "--output",
                   output.string()});
  EXPECT_EQ(o.code, kExitBudget) << o.err;
  EXPECT_TRUE(fs::is_empty(dir.path()));
  EXPECT_TRUE(o.out.empty());
  EXPECT_NE(o.err.find("budget"), std::string::npos);
}

TEST(CliTest, FullRunIsDeterministicAndLeavesInputAlone) {
  TempDir dir;
  const std::string input_before = Slurp(DataPath("sample_loans.csv"));
  std::vector<std::string> outputs;
  for (const char* workers : {"1", "6"}) {
    const fs::path output = dir / (std::string("out") + workers + ".csv");
    auto o = RunCli({"perturb", "--input", DataPath("sample_loans.csv"),
                     "--config", DataPath("sample_config.json"), "--output",
                     output.string(), "--workers", workers, "--key-file",
                     DataPath("demo_pii.key")});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    outputs.push_back(Slurp(output));
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(Slurp(DataPath("sample_loans.csv")), input_before);
}

TEST(CliTest, KeyFromEnvironmentAndMissingKey) {
  TempDir dir;
  const std::vector<std::string> base = {
      "perturb", "--input", DataPath("sample_loans.csv"), "--config",
      DataPath("sample_config.json"), "--output", (dir / "o.csv").string()};
  ::unsetenv(kKeyEnvVar);
  EXPECT_EQ(RunCli(base).code, kExitValidation);
  ::setenv(kKeyEnvVar, "000102030405060708090a0b0c0d0e0f", 1);
  EXPECT_EQ(RunCli(base).code, kExitOk);
  ::unsetenv(kKeyEnvVar);
}

TEST(CliTest, KeyIsNeverAcceptedAsAFlag) {
  TempDir dir;
  auto o = RunCli({"perturb", "--input", DataPath("sample_loans.csv"),
                   "--config", DataPath("sample_config.json"), "--output",
                   (dir / "o.csv").string(), "--key",
                   "000102030405060708090a0b0c0d0e0f"});
  EXPECT_EQ(o.code, kExitValidation);
  EXPECT_TRUE(fs::is_empty(dir.path()));
}

TEST(CliTest, OutputMustNotOverwriteInput) {
  TempDir dir;
  const fs::path copy = dir / "in.csv";
  fs::copy_file(DataPath("sample_loans.csv"), copy);
  const std::string before = Slurp(copy);
  auto o = RunCli({"perturb", "--input", copy.string(), "--config",
                   DataPath("identity_config.json"), "--output",
                   copy.string()});
  EXPECT_EQ(o.code, kExitValidation);
  EXPECT_EQ(Slurp(copy), before);
}

TEST(CliTest, ValidateExitCodes) {
  EXPECT_EQ(RunCli({"validate", "--input", DataPath("sample_loans.csv"),
                    "--config", DataPath("sample_config.json")})
                .code,
            kExitOk);
  EXPECT_EQ(RunCli({"validate", "--input", DataPath("sample_loans.csv"),
                    "--config", DataPath("over_budget_config.json")})
                .code,
            kExitBudget);
  TempDir dir;
  const fs::path bad = dir / "bad.json";
  ASSERT_TRUE(WriteFile(bad, R"({"version": 1, "budget": {"epsilon": 1},
      "columns": [{"column": "nope", "steps": []}]})").ok());
  auto o = RunCli({"validate", "--input", DataPath("sample_loans.csv"),
                   "--config", bad.string()});
  EXPECT_EQ(o.code, kExitValidation);
  EXPECT_NE(o.out.find("nope"), std::string::npos);
  EXPECT_EQ(RunCli({"validate", "--input", (dir / "missing.csv").string(),
                    "--config", bad.string()})
                .code,
            kExitIo);
}

TEST(CliTest, QueryWithVanishingNoise) {
  TempDir dir;
  const fs::path csv = dir / "v.csv";
  ASSERT_TRUE(WriteFile(csv, "v\n2\n4\n").ok());
  auto o = RunCli({"query", "--input", csv.string(), "--kind", "mean",
                   "--column", "v", "--bounds", "0,10", "--epsilon", "1e9",
                   "--seed", "5"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  auto j = nlohmann::json::parse(o.out);
  EXPECT_NEAR(j["result"].get<double>(), 3.0, 1e-6);
  EXPECT_EQ(j["public_n"].get<int>(), 2);
}

TEST(CliTest, PersistedLedgerEventuallyRefuses) {
  TempDir dir;
  const fs::path ledger = dir / "budget.ledger";
  const std::vector<std::string> base = {
      "query", "--input", DataPath("sample_loans.csv"), "--kind", "count",
      "--where", "age>=30", "--epsilon", "0.4", "--ledger", ledger.string(),
      "--budget-epsilon", "1.0"};
  EXPECT_EQ(RunCli(base).code, kExitOk);
  EXPECT_EQ(RunCli(base).code, kExitOk);
  const std::string before = Slurp(ledger);
  auto third = RunCli(base);
  EXPECT_EQ(third.code, kExitBudget);
  EXPECT_TRUE(third.out.empty());
  EXPECT_EQ(Slurp(ledger), before);
}

TEST(CliTest, LedgerLockContentionIsExitFour) {
  TempDir dir;
  const fs::path ledger = dir / "budget.ledger";
  const std::string lock_path = ledger.string() + ".lock";
  const int fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0600);
  ASSERT_GE(fd, 0);
  ASSERT_EQ(::flock(fd, LOCK_EX | LOCK_NB), 0);
  auto o = RunCli({"query", "--input", DataPath("sample_loans.csv"), "--kind",
                   "count", "--epsilon", "0.1", "--ledger", ledger.string(),
                   "--budget-epsilon", "1"});
  EXPECT_EQ(o.code, kExitIo) << o.err;
  ::flock(fd, LOCK_UN);
  ::close(fd);
  EXPECT_FALSE(fs::exists(ledger));
}

TEST(CliTest, MalformedQueryFileNamesTheKey) {
  TempDir dir;
  const fs::path q = dir / "q.json";
  ASSERT_TRUE(WriteFile(q, R"({"kind": "count", "epsilon": 1, "colour": 2})").ok());
  auto o = RunCli({"query", "--input", DataPath("sample_loans.csv"),
                   "--query-file", q.string()});
  EXPECT_EQ(o.code, kExitValidation);
  EXPECT_NE(o.err.find("colour"), std::string::npos);
}

TEST(CliTest, QueryFileHistogram) {
  auto o = RunCli({"query", "--input", DataPath("sample_loans.csv"),
                   "--query-file", DataPath("credit_histogram_query.json"),
                   "--seed", "3"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  auto j = nlohmann::json::parse(o.out);
  EXPECT_EQ(j["histogram"].size(), 6u);
}

TEST(CliTest, ReportSubcommand) {
  auto self = RunCli({"report", "--original", DataPath("sample_loans.csv"),
                      "--processed", DataPath("sample_loans.csv")});
  ASSERT_EQ(self.code, kExitOk) << self.err;
  auto j = nlohmann::json::parse(self.out);
  for (const auto& c : j["numeric"]) EXPECT_EQ(c["ks_statistic"].get<double>(), 0.0);

  TempDir dir;
  const fs::path fewer = dir / "fewer.csv";
  ASSERT_TRUE(WriteFile(fewer, "age\n30\n").ok());
  EXPECT_EQ(RunCli({"report", "--original", DataPath("sample_loans.csv"),
                    "--processed", fewer.string()})
                .code,
            kExitValidation);

  const fs::path a = dir / "a.csv", b = dir / "b.csv";
  ASSERT_TRUE(WriteFile(a, "credit\n600\n700\n820\n").ok());
  ASSERT_TRUE(WriteFile(b, "credit\nFair\nGood\nExcellent\n").ok());
  const fs::path schemes = dir / "schemes.json";
  ASSERT_TRUE(
      WriteFile(schemes, R"({"credit": {"preset": "credit_score"}})").ok());
  auto binned = RunCli({"report", "--original", a.string(), "--processed",
                        b.string(), "--schemes", schemes.string(), "--format",
                        "text"});
  EXPECT_EQ(binned.code, kExitOk) << binned.err;
  EXPECT_NE(binned.out.find("credit"), std::string::npos);
}

TEST(CliTest, PiiScanPrintsCountsOnly) {
  auto o = RunCli({"pii-scan", "--input", DataPath("sample_loans.csv"),
                   "--column", "notes"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  auto table = LoadCsv(DataPath("sample_loans.csv"));
  ASSERT_TRUE(table.ok());
  const Column* phone = table->Find("phone");
  for (size_t i = 0; i < 50; ++i) {
    if (phone->text()[i]) {
      EXPECT_EQ(o.out.find(*phone->text()[i]), std::string::npos);
    }
  }
  auto corpus = RunCli({"pii-scan", "--corpus", DataPath("pii_corpus.tsv")});
  ASSERT_EQ(corpus.code, kExitOk) << corpus.err;
  EXPECT_NE(corpus.out.find("recall"), std::string::npos);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(RunCli({}).code, kExitValidation);
  EXPECT_EQ(RunCli({"frobnicate"}).code, kExitValidation);
  EXPECT_EQ(RunCli({"--help"}).code, kExitOk);
}

}  // namespace
}  // namespace tabperturb::cli
