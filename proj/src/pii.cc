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

#include "tabperturb/pii.h"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <utility>

#include "absl/strings/str_cat.h"
#include "embedded_data.h"
#include "tabperturb/status_macros.h"
#include "tabperturb/text_util.h"

namespace tabperturb {
namespace {

constexpr int kFeistelRounds = 4;
constexpr int kMaxFauxAttempts = 256;

bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }
bool IsLower(char c) { return c >= 'a' && c <= 'z'; }
bool IsNameChar(char c) { return IsUpper(c) || IsLower(c) || c == '\''; }

uint64_t KeyedHash(const PiiKey& key, std::string_view message) {
  static const bool initialized = sodium_init() >= 0;
  (void)initialized;
  unsigned char out[crypto_shorthash_BYTES];
  crypto_shorthash(out, reinterpret_cast<const unsigned char*>(message.data()),
                   message.size(), key.data());
  uint64_t value = 0;
  for (int i = crypto_shorthash_BYTES - 1; i >= 0; --i) value = (value << 8) | out[i];
  return value;
}

uint64_t FeistelRound(const PiiKey& key, std::string_view domain, int round,
                      uint64_t half) {
  std::string message(domain);
  message.push_back('\0');
  message.push_back(static_cast<char>(round));
  for (int i = 0; i < 8; ++i) {
    message.push_back(static_cast<char>((half >> (8 * i)) & 0xff));
  }
  return KeyedHash(key, message);
}

// Keyed permutation of [0, n) by a balanced Feistel network over the
// smallest even bit width covering n, with cycle walking.
class KeyedPermutation {
 public:
  KeyedPermutation(const PiiKey& key, std::string_view domain, uint64_t n)
      : key_(key), domain_(domain), n_(n) {
    int bits = std::max(2, static_cast<int>(std::bit_width(n - 1)));
    if (bits % 2 != 0) ++bits;
    half_bits_ = bits / 2;
    mask_ = (uint64_t{1} << half_bits_) - 1;
  }

  uint64_t Forward(uint64_t x) const {
    do {
      uint64_t left = x >> half_bits_;
      uint64_t right = x & mask_;
      for (int r = 0; r < kFeistelRounds; ++r) {
        const uint64_t next = left ^ (FeistelRound(key_, domain_, r, right) & mask_);
        left = right;
        right = next;
      }
      x = (left << half_bits_) | right;
    } while (x >= n_);
    return x;
  }

  uint64_t Inverse(uint64_t x) const {
    do {
      uint64_t left = x >> half_bits_;
      uint64_t right = x & mask_;
      for (int r = kFeistelRounds - 1; r >= 0; --r) {
        const uint64_t prev = right ^ (FeistelRound(key_, domain_, r, left) & mask_);
        right = left;
        left = prev;
      }
      x = (left << half_bits_) | right;
    } while (x >= n_);
    return x;
  }

 private:
  const PiiKey& key_;
  std::string domain_;
  uint64_t n_;
  int half_bits_ = 1;
  uint64_t mask_ = 1;
};

absl::StatusOr<std::vector<std::string>> ParseNameList(std::string_view text,
                                                       std::string_view what) {
  std::vector<std::string> names;
  for (std::string_view line : SplitString(text, '\n')) {
    line = StripWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    for (char c : line) {
      if (!IsNameChar(c)) {
        return absl::InvalidArgumentError(
            absl::StrCat(std::string(what), " entry '", std::string(line),
                         "' has a character outside [A-Za-z']"));
      }
    }
    names.emplace_back(line);
  }
  if (names.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(what), " needs at least two names"));
  }
  return names;
}

std::string ApplyCasePattern(std::string_view original, std::string_view name) {
  const bool has_upper = std::any_of(original.begin(), original.end(), IsUpper);
  const bool has_lower = std::any_of(original.begin(), original.end(), IsLower);
  std::string out(name);
  if (has_upper && !has_lower && original.size() > 1) {
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (has_lower && !has_upper) {
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  } else {
    for (size_t i = 0; i < out.size(); ++i) {
      const auto u = static_cast<unsigned char>(out[i]);
      out[i] = static_cast<char>(i == 0 ? std::toupper(u) : std::tolower(u));
    }
  }
  return out;
}

std::string NormalizeSurface(PiiKind kind, std::string_view surface) {
  switch (kind) {
    case PiiKind::kPhone:
    case PiiKind::kCreditCard:
    case PiiKind::kStreetAddress: {
      std::string digits;
      for (char c : surface) {
        if (IsDigit(c)) digits.push_back(c);
      }
      return digits;
    }
    case PiiKind::kPersonName:
    case PiiKind::kEmail:
      return ToLowerAscii(surface);
  }
  return std::string(surface);
}

char RandomDigit(RandomSource& src, char lowest = '0') {
  return static_cast<char>(lowest + src.NextBelow(static_cast<uint64_t>('9' - lowest + 1)));
}

absl::StatusOr<std::string> FauxPhone(std::string_view surface,
                                      RandomSource& src) {
  std::vector<size_t> positions;
  for (size_t i = 0; i < surface.size(); ++i) {
    if (IsDigit(surface[i])) positions.push_back(i);
  }
  if (positions.empty()) {
    return absl::InvalidArgumentError(
        "cannot satisfy phone format: the value has no digits");
  }
  // Area and exchange codes never start with 0 or 1.
  const bool plan_digits = positions.size() >= 7;
  for (int attempt = 0; attempt < kMaxFauxAttempts; ++attempt) {
    std::string out(surface);
    for (size_t k = 0; k < positions.size(); ++k) {
      out[positions[k]] = RandomDigit(src, plan_digits && k == 0 ? '2' : '0');
    }
    if (out != surface) return out;
  }
  return absl::InternalError("phone generation did not produce a new value");
}

absl::StatusOr<std::string> FauxCard(std::string_view surface,
                                     RandomSource& src) {
  std::vector<size_t> positions;
  for (size_t i = 0; i < surface.size(); ++i) {
    if (IsDigit(surface[i])) positions.push_back(i);
  }
  if (positions.size() < 12 || positions.size() > 19) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot satisfy card format: needs 12 to 19 digits, got ",
        positions.size()));
  }
  for (int attempt = 0; attempt < kMaxFauxAttempts; ++attempt) {
    std::string digits(kFauxCardPrefix);
    while (digits.size() + 1 < positions.size()) digits.push_back(RandomDigit(src));
    digits.push_back(static_cast<char>('0' + LuhnCheckDigit(digits)));
    std::string out(surface);
    for (size_t k = 0; k < positions.size(); ++k) out[positions[k]] = digits[k];
    if (out != surface) return out;
  }
  return absl::InternalError("card generation did not produce a new value");
}

absl::StatusOr<std::string> FauxStreetNumber(std::string_view surface,
                                             RandomSource& src) {
  std::vector<size_t> positions;
  for (size_t i = 0; i < surface.size(); ++i) {
    if (IsDigit(surface[i])) positions.push_back(i);
  }
  if (positions.empty()) {
    return absl::InvalidArgumentError(
        "cannot satisfy street number format: the value has no digits");
  }
  for (int attempt = 0; attempt < kMaxFauxAttempts; ++attempt) {
    std::string out(surface);
    for (size_t k = 0; k < positions.size(); ++k) {
      out[positions[k]] = RandomDigit(src, k == 0 ? '1' : '0');
    }
    if (out != surface) return out;
  }
  return absl::InternalError(
      "street number generation did not produce a new value");
}

absl::StatusOr<std::string> FauxEmail(std::string_view surface,
                                      RandomSource& src) {
  // The top-level domain is kept.
  const size_t at = surface.find('@');
  const size_t last_dot = surface.rfind('.');
  const size_t keep_from =
      (at != std::string_view::npos && last_dot != std::string_view::npos &&
       last_dot > at)
          ? last_dot
          : surface.size();
  bool any = false;
  for (size_t i = 0; i < keep_from; ++i) {
    const char c = surface[i];
    any = any || IsDigit(c) || IsUpper(c) || IsLower(c);
  }
  if (!any) {
    return absl::InvalidArgumentError(
        "cannot satisfy email format: no letters or digits to replace");
  }
  for (int attempt = 0; attempt < kMaxFauxAttempts; ++attempt) {
    std::string out(surface);
    for (size_t i = 0; i < keep_from; ++i) {
      char& c = out[i];
      if (IsDigit(c)) {
        c = RandomDigit(src);
      } else if (IsLower(c)) {
        c = static_cast<char>('a' + src.NextBelow(26));
      } else if (IsUpper(c)) {
        c = static_cast<char>('A' + src.NextBelow(26));
      }
    }
    if (out != surface) return out;
  }
  return absl::InternalError("email generation did not produce a new value");
}

absl::StatusOr<std::string> FauxName(std::string_view surface,
                                     const FauxMapping& mapping,
                                     const NameDictionary& names,
                                     RandomSource& src) {
  std::vector<std::string_view> tokens = SplitString(surface, ' ');
  std::string out;
  for (size_t t = 0; t < tokens.size(); ++t) {
    const std::string_view token = tokens[t];
    if (t > 0) out.push_back(' ');
    if (token.empty()) continue;
    const bool given = t == 0;
    const std::vector<std::string>& list =
        given ? names.first_names() : names.last_names();
    const std::optional<size_t> index =
        given ? names.FirstIndex(token) : names.LastIndex(token);
    const uint64_t n = list.size();
    size_t pick = 0;
    if (index && mapping.mode == FauxMode::kConsistent) {
      pick = KeyedDerangement(mapping.key, given ? "first" : "last", *index, n);
    } else if (index) {
      pick = src.NextBelow(n - 1);
      if (pick >= *index) ++pick;
    } else {
      pick = src.NextBelow(n);
    }
    // An unlisted token can still coincide with a listed spelling.
    if (ToLowerAscii(list[pick]) == ToLowerAscii(token)) pick = (pick + 1) % n;
    out += ApplyCasePattern(token, list[pick]);
  }
  return out;
}

}  // namespace

std::string_view PiiKindName(PiiKind kind) {
  switch (kind) {
    case PiiKind::kPersonName:
      return "person_name";
    case PiiKind::kPhone:
      return "phone";
    case PiiKind::kCreditCard:
      return "credit_card";
    case PiiKind::kStreetAddress:
      return "street_address";
    case PiiKind::kEmail:
      return "email";
  }
  return "unknown";
}

absl::StatusOr<PiiKind> ParsePiiKind(std::string_view name) {
  for (PiiKind kind : {PiiKind::kPersonName, PiiKind::kPhone,
                       PiiKind::kCreditCard, PiiKind::kStreetAddress,
                       PiiKind::kEmail}) {
    if (PiiKindName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown PII kind '", std::string(name), "'"));
}

absl::StatusOr<NameDictionary> NameDictionary::Parse(
    std::string_view first_names, std::string_view last_names) {
  NameDictionary dict;
  TP_ASSIGN_OR_RETURN(dict.first_, ParseNameList(first_names, "given-name list"));
  TP_ASSIGN_OR_RETURN(dict.last_, ParseNameList(last_names, "surname list"));
  for (size_t i = 0; i < dict.first_.size(); ++i) {
    if (!dict.first_index_.emplace(ToLowerAscii(dict.first_[i]), i).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate given name '", dict.first_[i], "'"));
    }
  }
  for (size_t i = 0; i < dict.last_.size(); ++i) {
    if (!dict.last_index_.emplace(ToLowerAscii(dict.last_[i]), i).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate surname '", dict.last_[i], "'"));
    }
  }
  return dict;
}

std::shared_ptr<const NameDictionary> NameDictionary::Default() {
  static const auto* dict = new std::shared_ptr<const NameDictionary>(
      std::make_shared<const NameDictionary>(
          *Parse(embedded::kFirstNames, embedded::kLastNames)));
  return *dict;
}

std::optional<size_t> NameDictionary::FirstIndex(std::string_view token) const {
  const auto it = first_index_.find(ToLowerAscii(token));
  if (it == first_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> NameDictionary::LastIndex(std::string_view token) const {
  const auto it = last_index_.find(ToLowerAscii(token));
  if (it == last_index_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<DetectorSet> DetectorSet::Parse(
    std::string_view definitions, std::shared_ptr<const NameDictionary> names) {
  DetectorSet set;
  set.names_ = names ? std::move(names) : NameDictionary::Default();
  size_t line_number = 0;
  for (std::string_view line : SplitString(definitions, '\n')) {
    ++line_number;
    line = StripWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find(" = ");
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "detector line ", line_number, ": expected 'kind = pattern'"));
    }
    auto kind = ParsePiiKind(StripWhitespace(line.substr(0, eq)));
    if (!kind.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "detector line ", line_number, ": ", kind.status().message()));
    }
    const std::string pattern(StripWhitespace(line.substr(eq + 3)));
    if (pattern == "@dictionary") {
      if (*kind != PiiKind::kPersonName) {
        return absl::InvalidArgumentError(absl::StrCat(
            "detector line ", line_number,
            ": @dictionary is only valid for person_name"));
      }
      set.detectors_.push_back({*kind, pattern, std::nullopt});
      continue;
    }
    try {
      set.detectors_.push_back(
          {*kind, pattern, std::regex(pattern, std::regex::ECMAScript)});
    } catch (const std::regex_error& e) {
      return absl::InvalidArgumentError(absl::StrCat(
          "detector line ", line_number, ": pattern does not compile: ",
          e.what()));
    }
  }
  return set;
}

const DetectorSet& DetectorSet::Default() {
  static const auto* set =
      new DetectorSet(*Parse(embedded::kPiiDetectors, nullptr));
  return *set;
}

DetectorSet DetectorSet::OnlyKinds(std::span<const PiiKind> kinds) const {
  DetectorSet set;
  set.names_ = names_;
  for (const Detector& d : detectors_) {
    if (std::find(kinds.begin(), kinds.end(), d.kind) != kinds.end()) {
      set.detectors_.push_back(d);
    }
  }
  return set;
}

void DetectorSet::DetectNames(
    std::string_view cell, size_t order,
    std::vector<std::pair<PiiEntity, size_t>>& out) const {
  struct Token {
    size_t begin;
    size_t end;
  };
  std::vector<Token> tokens;
  for (size_t i = 0; i < cell.size();) {
    if (!IsNameChar(cell[i]) || (i > 0 && IsNameChar(cell[i - 1]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < cell.size() && IsNameChar(cell[j])) ++j;
    // Tokens glued to digits are identifiers, not names.
    const bool glued = (i > 0 && IsDigit(cell[i - 1])) ||
                       (j < cell.size() && IsDigit(cell[j]));
    if (!glued) tokens.push_back({i, j});
    i = j;
  }
  for (size_t t = 0; t < tokens.size(); ++t) {
    const std::string_view word =
        cell.substr(tokens[t].begin, tokens[t].end - tokens[t].begin);
    if (!IsUpper(word.front()) || !names_->FirstIndex(word)) continue;
    size_t end = tokens[t].end;
    if (t + 1 < tokens.size() && tokens[t + 1].begin == end + 1 &&
        cell[end] == ' ') {
      const std::string_view next = cell.substr(
          tokens[t + 1].begin, tokens[t + 1].end - tokens[t + 1].begin);
      if (IsUpper(next.front()) && names_->LastIndex(next)) {
        end = tokens[t + 1].end;
      }
    }
    out.push_back({PiiEntity{PiiKind::kPersonName, tokens[t].begin, end,
                             std::string(cell.substr(tokens[t].begin,
                                                     end - tokens[t].begin))},
                   order});
  }
}

std::vector<PiiEntity> DetectorSet::Detect(std::string_view cell) const {
  std::vector<std::pair<PiiEntity, size_t>> candidates;
  const char* base = cell.data();
  for (size_t order = 0; order < detectors_.size(); ++order) {
    const Detector& d = detectors_[order];
    if (!d.regex) {
      DetectNames(cell, order, candidates);
      continue;
    }
    for (std::cregex_iterator it(base, base + cell.size(), *d.regex), last;
         it != last; ++it) {
      if (it->length(0) == 0) continue;
      const size_t begin = static_cast<size_t>(it->position(0));
      const size_t end = begin + static_cast<size_t>(it->length(0));
      candidates.push_back(
          {PiiEntity{d.kind, begin, end, std::string(cell.substr(begin, end - begin))},
           order});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) {
              if (a.first.begin != b.first.begin) return a.first.begin < b.first.begin;
              const size_t la = a.first.end - a.first.begin;
              const size_t lb = b.first.end - b.first.begin;
              if (la != lb) return la > lb;
              return a.second < b.second;
            });
  std::vector<PiiEntity> entities;
  size_t covered_to = 0;
  for (auto& [entity, order] : candidates) {
    if (!entities.empty() && entity.begin < covered_to) continue;
    covered_to = entity.end;
    entities.push_back(std::move(entity));
  }
  return entities;
}

absl::StatusOr<PiiKey> ParsePiiKey(std::string_view hex) {
  hex = StripWhitespace(hex);
  if (hex.size() != 32) {
    return absl::InvalidArgumentError(
        absl::StrCat("PII key must be 32 hexadecimal digits, got ", hex.size(),
                     " characters"));
  }
  PiiKey key{};
  for (size_t i = 0; i < 32; ++i) {
    const char c = hex[i];
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      return absl::InvalidArgumentError("PII key has a non-hexadecimal digit");
    }
    key[i / 2] = static_cast<uint8_t>((key[i / 2] << 4) | v);
  }
  return key;
}

uint64_t KeyedDerangement(const PiiKey& key, std::string_view domain,
                          uint64_t index, uint64_t n) {
  // pi^-1((pi(x) + 1) mod n) is a single n-cycle: bijective, no fixed points.
  const KeyedPermutation pi(key, domain, n);
  return pi.Inverse((pi.Forward(index) + 1) % n);
}

absl::StatusOr<std::string> GenerateFaux(const PiiEntity& entity,
                                         const FauxMapping& mapping,
                                         RandomSource& src) {
  RandomSource keyed(0, 0);
  RandomSource* stream = &src;
  if (mapping.mode == FauxMode::kConsistent) {
    const std::string kind(PiiKindName(entity.kind));
    const uint64_t seed = KeyedHash(
        mapping.key, absl::StrCat("faux", std::string(1, '\0'), kind,
                                  std::string(1, '\0'),
                                  NormalizeSurface(entity.kind, entity.surface)));
    keyed = RandomSource(seed, static_cast<uint64_t>(entity.kind));
    stream = &keyed;
  }
  switch (entity.kind) {
    case PiiKind::kPhone:
      return FauxPhone(entity.surface, *stream);
    case PiiKind::kCreditCard:
      return FauxCard(entity.surface, *stream);
    case PiiKind::kStreetAddress:
      return FauxStreetNumber(entity.surface, *stream);
    case PiiKind::kEmail:
      return FauxEmail(entity.surface, *stream);
    case PiiKind::kPersonName: {
      const std::shared_ptr<const NameDictionary> names =
          mapping.names ? mapping.names : NameDictionary::Default();
      return FauxName(entity.surface, mapping, *names, *stream);
    }
  }
  return absl::InvalidArgumentError("unsupported PII kind");
}

absl::StatusOr<CellTransform> TransformCell(std::string_view cell,
                                            const DetectorSet& detectors,
                                            const FauxMapping& mapping,
                                            RandomSource& src) {
  CellTransform result;
  size_t copied_to = 0;
  for (const PiiEntity& entity : detectors.Detect(cell)) {
    TP_ASSIGN_OR_RETURN(std::string faux, GenerateFaux(entity, mapping, src));
    result.cell.append(cell.substr(copied_to, entity.begin - copied_to));
    result.cell += faux;
    copied_to = entity.end;
    result.audit.push_back({entity.kind, entity.begin, entity.end});
  }
  result.cell.append(cell.substr(copied_to));
  return result;
}

absl::StatusOr<double> InformationLoss(const TextCells& original,
                                       const TextCells& transformed) {
  if (original.size() != transformed.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "information loss needs equal-length columns, got ", original.size(),
        " and ", transformed.size()));
  }
  size_t altered = 0;
  size_t total = 0;
  for (size_t i = 0; i < original.size(); ++i) {
    const std::vector<std::string_view> a =
        SplitCodePoints(original[i] ? std::string_view(*original[i]) : "");
    const std::vector<std::string_view> b =
        SplitCodePoints(transformed[i] ? std::string_view(*transformed[i]) : "");
    const size_t common = std::min(a.size(), b.size());
    for (size_t k = 0; k < common; ++k) altered += a[k] != b[k] ? 1 : 0;
    altered += std::max(a.size(), b.size()) - common;
    total += std::max(a.size(), b.size());
  }
  if (total == 0) return 0.0;
  return static_cast<double>(altered) / static_cast<double>(total);
}

bool LuhnValid(std::string_view number) {
  int sum = 0;
  int count = 0;
  for (size_t i = number.size(); i-- > 0;) {
    if (!IsDigit(number[i])) continue;
    int d = number[i] - '0';
    if (count % 2 == 1) {
      d *= 2;
      if (d > 9) d -= 9;
    }
    sum += d;
    ++count;
  }
  return count >= 2 && sum % 10 == 0;
}

int LuhnCheckDigit(std::string_view payload) {
  int sum = 0;
  int count = 0;
  for (size_t i = payload.size(); i-- > 0;) {
    if (!IsDigit(payload[i])) continue;
    int d = payload[i] - '0';
    // The check digit will sit at position 0, so payload digits at even
    // offsets from the right are the doubled ones.
    if (count % 2 == 0) {
      d *= 2;
      if (d > 9) d -= 9;
    }
    sum += d;
    ++count;
  }
  return (10 - sum % 10) % 10;
}

}  // namespace tabperturb
