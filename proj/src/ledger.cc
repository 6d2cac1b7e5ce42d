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

#include <cmath>

#include "absl/strings/str_cat.h"
#include "tabperturb/text_util.h"

namespace tabperturb {
namespace {

std::string SanitizeLabel(std::string_view label) {
  std::string out(label);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

// Sums of decimal charges carry binary rounding (0.1 + 0.2 > 0.3), so the
// cap gets a relative slack far below any meaningful epsilon.
bool WithinCap(double total, double cap) {
  return total <= cap + cap * 1e-12;
}

}  // namespace

PrivacyLedger::PrivacyLedger(PrivacyBudget budget) : budget_(budget) {}

PrivacyLedger::PrivacyLedger(const PrivacyLedger& other) {
  std::lock_guard<std::mutex> lock(other.mu_);
  budget_ = other.budget_;
  entries_ = other.entries_;
  spent_epsilon_ = other.spent_epsilon_;
  spent_delta_ = other.spent_delta_;
}

PrivacyLedger& PrivacyLedger::operator=(const PrivacyLedger& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  budget_ = other.budget_;
  entries_ = other.entries_;
  spent_epsilon_ = other.spent_epsilon_;
  spent_delta_ = other.spent_delta_;
  return *this;
}

absl::Status PrivacyLedger::Charge(std::string_view label, double epsilon,
                                   double delta) {
  if (!(epsilon >= 0.0) || !(delta >= 0.0) || !std::isfinite(epsilon) ||
      !std::isfinite(delta)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "charge for '", std::string(label),
        "' must have finite non-negative epsilon and delta"));
  }
  std::lock_guard<std::mutex> lock(mu_);
  const double next_epsilon = spent_epsilon_ + epsilon;
  const double next_delta = spent_delta_ + delta;
  if (!WithinCap(next_epsilon, budget_.epsilon) ||
      !WithinCap(next_delta, budget_.delta)) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "privacy budget exhausted: operation '", std::string(label),
        "' requests epsilon=", FormatDouble(epsilon),
        " delta=", FormatDouble(delta),
        " but remaining is epsilon=",
        FormatDouble(budget_.epsilon - spent_epsilon_),
        " delta=", FormatDouble(budget_.delta - spent_delta_)));
  }
  entries_.push_back({SanitizeLabel(label), epsilon, delta});
  spent_epsilon_ = next_epsilon;
  spent_delta_ = next_delta;
  return absl::OkStatus();
}

bool PrivacyLedger::CanAfford(double epsilon, double delta) const {
  std::lock_guard<std::mutex> lock(mu_);
  return WithinCap(spent_epsilon_ + epsilon, budget_.epsilon) &&
         WithinCap(spent_delta_ + delta, budget_.delta);
}

PrivacyBudget PrivacyLedger::budget() const {
  std::lock_guard<std::mutex> lock(mu_);
  return budget_;
}

double PrivacyLedger::spent_epsilon() const {
  std::lock_guard<std::mutex> lock(mu_);
  return spent_epsilon_;
}

double PrivacyLedger::spent_delta() const {
  std::lock_guard<std::mutex> lock(mu_);
  return spent_delta_;
}

std::vector<LedgerEntry> PrivacyLedger::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

std::string PrivacyLedger::ToAuditLog() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::string out;
  double cumulative_epsilon = 0.0;
  double cumulative_delta = 0.0;
  for (const LedgerEntry& e : entries_) {
    cumulative_epsilon += e.epsilon;
    cumulative_delta += e.delta;
    absl::StrAppend(&out, e.label, "\t", FormatDouble(e.epsilon), "\t",
                    FormatDouble(e.delta), "\t",
                    FormatDouble(cumulative_epsilon), "\t",
                    FormatDouble(cumulative_delta), "\n");
  }
  return out;
}

std::string PrivacyLedger::Serialize() const {
  const PrivacyBudget b = budget();
  return absl::StrCat("# budget\t", FormatDouble(b.epsilon), "\t",
                      FormatDouble(b.delta), "\n", ToAuditLog());
}

absl::StatusOr<PrivacyLedger> PrivacyLedger::Deserialize(
    std::string_view text) {
  std::vector<std::string_view> lines =
      SplitString(text, '\n', /*skip_empty=*/true);
  if (lines.empty()) {
    return absl::InvalidArgumentError("ledger file is empty");
  }
  std::vector<std::string_view> header = SplitString(lines[0], '\t');
  if (header.size() != 3 || header[0] != "# budget") {
    return absl::InvalidArgumentError(
        "ledger file must start with a '# budget' header line");
  }
  const auto budget_epsilon = ParseDouble(header[1]);
  const auto budget_delta = ParseDouble(header[2]);
  if (!budget_epsilon || !budget_delta) {
    return absl::InvalidArgumentError("ledger budget is not numeric");
  }
  PrivacyLedger ledger({*budget_epsilon, *budget_delta});
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string_view> fields = SplitString(lines[i], '\t');
    if (fields.size() != 5) {
      return absl::InvalidArgumentError(
          absl::StrCat("ledger line ", i + 1, " must have 5 fields"));
    }
    const auto epsilon = ParseDouble(fields[1]);
    const auto delta = ParseDouble(fields[2]);
    const auto cumulative_epsilon = ParseDouble(fields[3]);
    const auto cumulative_delta = ParseDouble(fields[4]);
    if (!epsilon || !delta || !cumulative_epsilon || !cumulative_delta) {
      return absl::InvalidArgumentError(
          absl::StrCat("ledger line ", i + 1, " has a non-numeric field"));
    }
    if (absl::Status s = ledger.Charge(fields[0], *epsilon, *delta); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("ledger line ", i + 1, " is inconsistent: ",
                       s.message()));
    }
    if (ledger.spent_epsilon_ != *cumulative_epsilon ||
        ledger.spent_delta_ != *cumulative_delta) {
      return absl::InvalidArgumentError(absl::StrCat(
          "ledger line ", i + 1, " cumulative totals do not match entries"));
    }
  }
  return ledger;
}

}  // namespace tabperturb
