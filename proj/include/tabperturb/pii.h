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

#ifndef TABPERTURB_PII_H_
#define TABPERTURB_PII_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/random.h"
#include "tabperturb/table.h"

namespace tabperturb {

enum class PiiKind { kPersonName, kPhone, kCreditCard, kStreetAddress, kEmail };

std::string_view PiiKindName(PiiKind kind);
absl::StatusOr<PiiKind> ParsePiiKind(std::string_view name);

// A detected span. Offsets are byte offsets into the cell; `surface` is the
// cell text in [begin, end).
struct PiiEntity {
  PiiKind kind = PiiKind::kPhone;
  size_t begin = 0;
  size_t end = 0;
  std::string surface;
};

// Given-name and surname lists. Lookups are ASCII case-insensitive.
class NameDictionary {
 public:
  // One name per line; '#' starts a comment line.
  static absl::StatusOr<NameDictionary> Parse(std::string_view first_names,
                                              std::string_view last_names);
  static std::shared_ptr<const NameDictionary> Default();

  std::optional<size_t> FirstIndex(std::string_view token) const;
  std::optional<size_t> LastIndex(std::string_view token) const;
  const std::vector<std::string>& first_names() const { return first_; }
  const std::vector<std::string>& last_names() const { return last_; }

 private:
  std::vector<std::string> first_;
  std::vector<std::string> last_;
  std::unordered_map<std::string, size_t> first_index_;
  std::unordered_map<std::string, size_t> last_index_;
};

// Ordered pattern and dictionary detectors.
class DetectorSet {
 public:
  // Definitions are "kind = pattern" lines (see data/pii_detectors.txt);
  // "person_name = @dictionary" enables dictionary name detection.
  static absl::StatusOr<DetectorSet> Parse(
      std::string_view definitions,
      std::shared_ptr<const NameDictionary> names);
  static const DetectorSet& Default();

  // Copy keeping only detectors of the listed kinds.
  DetectorSet OnlyKinds(std::span<const PiiKind> kinds) const;

  // Non-overlapping entities in order of position. Among overlapping
  // candidates the earliest start wins, then the longest, then the detector
  // listed first.
  std::vector<PiiEntity> Detect(std::string_view cell) const;

  const std::shared_ptr<const NameDictionary>& names() const { return names_; }

 private:
  struct Detector {
    PiiKind kind;
    std::string pattern;
    std::optional<std::regex> regex;  // nullopt: dictionary names
  };

  void DetectNames(std::string_view cell, size_t order,
                   std::vector<std::pair<PiiEntity, size_t>>& out) const;

  std::vector<Detector> detectors_;
  std::shared_ptr<const NameDictionary> names_;
};

using PiiKey = std::array<uint8_t, 16>;

// 32 hexadecimal digits; surrounding whitespace is ignored.
absl::StatusOr<PiiKey> ParsePiiKey(std::string_view hex);

enum class FauxMode {
  // Keyed: equal (key, kind, surface) always yields the same faux value.
  kConsistent,
  // Each occurrence draws from the caller's stream.
  kIndependent,
};

struct FauxMapping {
  PiiKey key{};
  FauxMode mode = FauxMode::kConsistent;
  // Faux-name source; the default dictionary when null.
  std::shared_ptr<const NameDictionary> names;
};

// Leading digits of every faux card number. Not an assigned issuer range.
inline constexpr std::string_view kFauxCardPrefix = "99";

// Plausible replacement for `entity.surface` that keeps its format: digits
// stay digits and punctuation stays in place for phone, card, street and
// email values; faux cards pass the Luhn check and start with
// kFauxCardPrefix; names come from the dictionary with the original case
// pattern. The result always differs from the surface. In consistent mode,
// names listed in the dictionary map injectively.
absl::StatusOr<std::string> GenerateFaux(const PiiEntity& entity,
                                         const FauxMapping& mapping,
                                         RandomSource& src);

// Kind and original span of one replaced entity. Never carries the surface.
struct PiiAuditEntry {
  PiiKind kind = PiiKind::kPhone;
  size_t begin = 0;
  size_t end = 0;
};

struct CellTransform {
  std::string cell;
  std::vector<PiiAuditEntry> audit;
};

// Replaces every detected entity in place; all other bytes are unchanged.
absl::StatusOr<CellTransform> TransformCell(std::string_view cell,
                                            const DetectorSet& detectors,
                                            const FauxMapping& mapping,
                                            RandomSource& src);

// Fraction of characters altered between two equally long columns:
// position-wise code point differences plus length differences, over the sum
// of the longer length of each pair. Missing cells count as empty.
absl::StatusOr<double> InformationLoss(const TextCells& original,
                                       const TextCells& transformed);

// Luhn checksum over the digits of `number`; other characters are skipped.
bool LuhnValid(std::string_view number);

// Check digit that makes `payload` followed by it Luhn-valid.
int LuhnCheckDigit(std::string_view payload);

// Injective keyed map of [0, n) onto itself without fixed points (n >= 2),
// used for consistent name substitution. `domain` separates independent
// permutations under one key.
uint64_t KeyedDerangement(const PiiKey& key, std::string_view domain,
                          uint64_t index, uint64_t n);

}  // namespace tabperturb

#endif  // TABPERTURB_PII_H_
