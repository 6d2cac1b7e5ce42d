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

#ifndef TABPERTURB_LEDGER_H_
#define TABPERTURB_LEDGER_H_

#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace tabperturb {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;
};

struct LedgerEntry {
  std::string label;
  double epsilon = 0.0;
  double delta = 0.0;
};

// Running (epsilon, delta) account under basic sequential composition. A
// charge is accepted only if the new totals stay within the budget in both
// coordinates; a rejected charge leaves the ledger untouched. Charges are
// serialized internally, so one ledger may be shared between threads.
class PrivacyLedger {
 public:
  explicit PrivacyLedger(PrivacyBudget budget);
  PrivacyLedger(const PrivacyLedger& other);
  PrivacyLedger& operator=(const PrivacyLedger& other);

  // Fails with ResourceExhausted naming the operation and the remaining
  // budget when the charge does not fit.
  absl::Status Charge(std::string_view label, double epsilon, double delta);

  bool CanAfford(double epsilon, double delta) const;

  PrivacyBudget budget() const;
  double spent_epsilon() const;
  double spent_delta() const;
  std::vector<LedgerEntry> entries() const;

  // One line per entry:
  //   label<TAB>epsilon<TAB>delta<TAB>cumulative_epsilon<TAB>cumulative_delta
  std::string ToAuditLog() const;

  // ToAuditLog() preceded by a "# budget<TAB>epsilon<TAB>delta" header, the
  // form persisted between CLI invocations.
  std::string Serialize() const;
  static absl::StatusOr<PrivacyLedger> Deserialize(std::string_view text);

 private:
  mutable std::mutex mu_;
  PrivacyBudget budget_;
  std::vector<LedgerEntry> entries_;
  double spent_epsilon_ = 0.0;
  double spent_delta_ = 0.0;
};

}  // namespace tabperturb

#endif  // TABPERTURB_LEDGER_H_
