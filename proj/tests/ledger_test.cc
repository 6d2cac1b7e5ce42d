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

#include "tabperturb/ledger.h"

#include <string>
#include <thread>
#include <vector>

#include "gtest/gtest.h"

namespace tabperturb {
namespace {

TEST(PrivacyLedgerTest, RejectsChargeBeyondBudget) {
  PrivacyLedger ledger({1.0, 0.0});
  EXPECT_TRUE(ledger.Charge("a", 0.4, 0).ok());
  EXPECT_TRUE(ledger.Charge("b", 0.4, 0).ok());
  const absl::Status third = ledger.Charge("c", 0.4, 0);
  EXPECT_EQ(third.code(), absl::StatusCode::kResourceExhausted);
  EXPECT_NE(third.message().find("'c'"), std::string::npos);
  EXPECT_NE(third.message().find("remaining"), std::string::npos);
  EXPECT_DOUBLE_EQ(ledger.spent_epsilon(), 0.8);
  EXPECT_EQ(ledger.entries().size(), 2u);
}

TEST(PrivacyLedgerTest, AcceptsExactlyAtBoundary) {
  PrivacyLedger ledger({1.0, 1e-5});
  EXPECT_TRUE(ledger.Charge("all", 1.0, 1e-5).ok());
  EXPECT_FALSE(ledger.CanAfford(1e-9, 0));
  EXPECT_FALSE(ledger.Charge("more", 0, 1e-9).ok());
  EXPECT_TRUE(ledger.Charge("free", 0, 0).ok());
}

TEST(PrivacyLedgerTest, SumsSequentially) {
  PrivacyLedger ledger({1.0, 1e-4});
  ASSERT_TRUE(ledger.Charge("a", 0.2, 1e-5).ok());
  ASSERT_TRUE(ledger.Charge("b", 0.3, 0).ok());
  ASSERT_TRUE(ledger.Charge("c", 0.1, 2e-5).ok());
  EXPECT_NEAR(ledger.spent_epsilon(), 0.6, 1e-15);
  EXPECT_NEAR(ledger.spent_delta(), 3e-5, 1e-20);
}

TEST(PrivacyLedgerTest, DecimalChargesFillTheirBudget) {
  // 0.1 + 0.1 + 0.1 rounds above 0.3 in binary.
  PrivacyLedger ledger({0.3, 0.0});
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(ledger.Charge("q", 0.1, 0).ok());
  EXPECT_FALSE(ledger.Charge("q", 0.001, 0).ok());
}

TEST(PrivacyLedgerTest, RejectsInvalidCharges) {
  PrivacyLedger ledger({1.0, 0.0});
  EXPECT_EQ(ledger.Charge("neg", -0.1, 0).code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(ledger.Charge("nan", NAN, 0).ok());
  EXPECT_FALSE(ledger.Charge("inf", 0, INFINITY).ok());
  EXPECT_TRUE(ledger.entries().empty());
}

TEST(PrivacyLedgerTest, PrefixesOfAcceptedSequencesAreAccepted) {
  const std::vector<double> charges = {0.05, 0.3, 0.12, 0.2, 0.08, 0.25};
  PrivacyLedger full({1.0, 0.0});
  for (double c : charges) ASSERT_TRUE(full.Charge("x", c, 0).ok());
  for (size_t k = 0; k <= charges.size(); ++k) {
    PrivacyLedger prefix({1.0, 0.0});
    for (size_t i = 0; i < k; ++i) {
      EXPECT_TRUE(prefix.Charge("x", charges[i], 0).ok());
    }
  }
}

TEST(PrivacyLedgerTest, RejectionIsAtomic) {
  PrivacyLedger ledger({1.0, 1e-5});
  ASSERT_TRUE(ledger.Charge("a", 0.5, 5e-6).ok());
  const std::string before = ledger.Serialize();
  // Epsilon fits but delta does not: neither coordinate may move.
  EXPECT_FALSE(ledger.Charge("b", 0.1, 1e-5).ok());
  EXPECT_EQ(ledger.Serialize(), before);
}

TEST(PrivacyLedgerTest, ConcurrentChargesNeverOverspend) {
  PrivacyLedger ledger({10.0, 0.0});
  std::vector<std::jthread> threads;
  std::atomic<int> accepted{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 500; ++i) {
        if (ledger.Charge("t", 0.01, 0).ok()) ++accepted;
      }
    });
  }
  threads.clear();
  EXPECT_LE(ledger.spent_epsilon(), 10.0 * (1 + 1e-12));
  EXPECT_EQ(static_cast<size_t>(accepted.load()), ledger.entries().size());
  EXPECT_GE(accepted.load(), 999);
}

TEST(PrivacyLedgerTest, SerializeRoundTrip) {
  PrivacyLedger ledger({2.0, 1e-5});
  ASSERT_TRUE(ledger.Charge("query:count(age)", 0.3, 0).ok());
  ASSERT_TRUE(ledger.Charge("income#0:gaussian\tmechanism", 0.7, 1e-6).ok());
  auto back = PrivacyLedger::Deserialize(ledger.Serialize());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->Serialize(), ledger.Serialize());
  EXPECT_EQ(back->spent_epsilon(), ledger.spent_epsilon());
  EXPECT_EQ(back->entries()[1].label, "income#0:gaussian mechanism");
}

TEST(PrivacyLedgerTest, DetectsTamperedFiles) {
  PrivacyLedger ledger({2.0, 0.0});
  ASSERT_TRUE(ledger.Charge("a", 0.5, 0).ok());
  ASSERT_TRUE(ledger.Charge("b", 0.5, 0).ok());
  std::string text = ledger.Serialize();
  // Lower the first entry without fixing the running totals.
  const size_t pos = text.find("a\t0.5");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 5, "a\t0.1");
  EXPECT_FALSE(PrivacyLedger::Deserialize(text).ok());
  EXPECT_FALSE(PrivacyLedger::Deserialize("").ok());
  EXPECT_FALSE(PrivacyLedger::Deserialize("a\t1\t0\t1\t0\n").ok());
  // Entries that overspend the recorded budget are inconsistent.
  EXPECT_FALSE(
      PrivacyLedger::Deserialize("# budget\t1\t0\nx\t2\t0\t2\t0\n").ok());
}

}  // namespace
}  // namespace tabperturb
