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

#ifndef TABPERTURB_MASK_H_
#define TABPERTURB_MASK_H_

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/table.h"

namespace tabperturb {

// Regex rewrite that keeps the character count of every match.
//
// The replacement template is literal text plus two directives:
//   $n  copies capture group n
//   %n  writes one 'X' per character of capture group n
// '$$' and '%%' produce a literal '$' or '%'. For example the phone rule
//   (\d{3})([.\- ])(\d{3})\2(\d{4})  =>  $1$2%3$2%4
// maps "555.192.9277" to "555.XXX.XXXX".
class MaskRule {
 public:
  static absl::StatusOr<MaskRule> Create(std::string name, std::string pattern,
                                         std::string replacement_template);

  const std::string& name() const { return name_; }
  const std::string& pattern() const { return pattern_; }
  const std::string& replacement_template() const { return template_; }

  // Rewritten cell, or nullopt when the pattern does not match. Fails with
  // an internal error if a rewrite would change a match's length.
  absl::StatusOr<std::optional<std::string>> Apply(std::string_view cell) const;

 private:
  struct Token {
    enum class Type { kLiteral, kCopy, kFill } type;
    std::string literal;
    size_t group = 0;
  };

  MaskRule() = default;

  std::string name_;
  std::string pattern_;
  std::string template_;
  std::regex regex_;
  std::vector<Token> tokens_;
};

// Parses a rule library, one rule per line:
//   name = pattern => template
// Blank lines and lines starting with '#' are ignored.
absl::StatusOr<std::vector<MaskRule>> ParseMaskRules(std::string_view text);

// phone, credit_card and street_number.
const std::vector<MaskRule>& DefaultMaskRules();

absl::StatusOr<MaskRule> FindMaskRule(const std::vector<MaskRule>& rules,
                                      std::string_view name);

struct MaskResult {
  TextCells cells;
  size_t matched_cells = 0;
  size_t unmatched_cells = 0;
};

absl::StatusOr<MaskResult> Mask(const TextCells& column, const MaskRule& rule);

}  // namespace tabperturb

#endif  // TABPERTURB_MASK_H_
