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

#include "tabperturb/mask.h"

#include <cctype>
#include <utility>

#include "absl/strings/str_cat.h"
#include "embedded_data.h"
#include "tabperturb/status_macros.h"
#include "tabperturb/text_util.h"

namespace tabperturb {

absl::StatusOr<MaskRule> MaskRule::Create(std::string name, std::string pattern,
                                          std::string replacement_template) {
  MaskRule rule;
  try {
    rule.regex_ = std::regex(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mask rule '", name, "': pattern does not compile: ", e.what()));
  }
  const size_t groups = rule.regex_.mark_count();
  const std::string& t = replacement_template;
  for (size_t i = 0; i < t.size();) {
    const char c = t[i];
    if ((c == '$' || c == '%') && i + 1 < t.size() && t[i + 1] == c) {
      rule.tokens_.push_back({Token::Type::kLiteral, std::string(1, c), 0});
      i += 2;
      continue;
    }
    if ((c == '$' || c == '%') && i + 1 < t.size() &&
        std::isdigit(static_cast<unsigned char>(t[i + 1]))) {
      size_t j = i + 1;
      size_t group = 0;
      while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) {
        group = group * 10 + static_cast<size_t>(t[j] - '0');
        ++j;
      }
      if (group == 0 || group > groups) {
        return absl::InvalidArgumentError(absl::StrCat(
            "mask rule '", name, "': template references group ", group,
            " but the pattern has ", groups));
      }
      rule.tokens_.push_back(
          {c == '$' ? Token::Type::kCopy : Token::Type::kFill, "", group});
      i = j;
      continue;
    }
    if (!rule.tokens_.empty() &&
        rule.tokens_.back().type == Token::Type::kLiteral) {
      rule.tokens_.back().literal.push_back(c);
    } else {
      rule.tokens_.push_back({Token::Type::kLiteral, std::string(1, c), 0});
    }
    ++i;
  }
  rule.name_ = std::move(name);
  rule.pattern_ = std::move(pattern);
  rule.template_ = std::move(replacement_template);
  return rule;
}

absl::StatusOr<std::optional<std::string>> MaskRule::Apply(
    std::string_view cell) const {
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  std::string out;
  const char* copied_to = begin;
  bool matched = false;
  for (std::cregex_iterator it(begin, end, regex_), last; it != last; ++it) {
    const std::cmatch& m = *it;
    if (m.length(0) == 0) continue;
    matched = true;
    out.append(copied_to, m[0].first);
    std::string replacement;
    for (const Token& token : tokens_) {
      switch (token.type) {
        case Token::Type::kLiteral:
          replacement += token.literal;
          break;
        case Token::Type::kCopy:
          if (m[token.group].matched) replacement += m[token.group].str();
          break;
        case Token::Type::kFill:
          if (m[token.group].matched) {
            replacement.append(CodePointCount(m[token.group].str()), 'X');
          }
          break;
      }
    }
    const std::string_view original(m[0].first,
                                    static_cast<size_t>(m.length(0)));
    if (CodePointCount(replacement) != CodePointCount(original)) {
      return absl::InternalError(absl::StrCat(
          "mask rule '", name_, "' changed the length of a match (",
          CodePointCount(original), " -> ", CodePointCount(replacement),
          " characters)"));
    }
    out += replacement;
    copied_to = m[0].second;
  }
  if (!matched) return std::optional<std::string>();
  out.append(copied_to, end);
  return std::optional<std::string>(std::move(out));
}

absl::StatusOr<std::vector<MaskRule>> ParseMaskRules(std::string_view text) {
  std::vector<MaskRule> rules;
  size_t line_number = 0;
  for (std::string_view line : SplitString(text, '\n')) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view stripped = StripWhitespace(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const size_t eq = stripped.find(" = ");
    const size_t arrow = stripped.rfind(" => ");
    if (eq == std::string_view::npos || arrow == std::string_view::npos ||
        arrow <= eq) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mask rules line ", line_number,
          ": expected 'name = pattern => template'"));
    }
    std::string name(StripWhitespace(stripped.substr(0, eq)));
    std::string pattern(stripped.substr(eq + 3, arrow - eq - 3));
    std::string replacement(stripped.substr(arrow + 4));
    if (name.empty() || pattern.empty() || replacement.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mask rules line ", line_number, ": empty name, pattern or template"));
    }
    for (const MaskRule& existing : rules) {
      if (existing.name() == name) {
        return absl::InvalidArgumentError(absl::StrCat(
            "mask rules line ", line_number, ": duplicate rule '", name, "'"));
      }
    }
    auto rule = MaskRule::Create(std::move(name), std::move(pattern),
                                 std::move(replacement));
    if (!rule.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mask rules line ", line_number, ": ", rule.status().message()));
    }
    rules.push_back(*std::move(rule));
  }
  return rules;
}

const std::vector<MaskRule>& DefaultMaskRules() {
  static const auto* rules =
      new std::vector<MaskRule>(*ParseMaskRules(embedded::kMaskRules));
  return *rules;
}

absl::StatusOr<MaskRule> FindMaskRule(const std::vector<MaskRule>& rules,
                                      std::string_view name) {
  for (const MaskRule& rule : rules) {
    if (rule.name() == name) return rule;
  }
  return absl::NotFoundError(
      absl::StrCat("no mask rule named '", std::string(name), "'"));
}

absl::StatusOr<MaskResult> Mask(const TextCells& column, const MaskRule& rule) {
  MaskResult result{column, 0, 0};
  for (auto& cell : result.cells) {
    if (!cell) continue;
    TP_ASSIGN_OR_RETURN(std::optional<std::string> rewritten, rule.Apply(*cell));
    if (rewritten) {
      cell = std::move(*rewritten);
      ++result.matched_cells;
    } else {
      ++result.unmatched_cells;
    }
  }
  return result;
}

}  // namespace tabperturb
