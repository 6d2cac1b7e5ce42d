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

#ifndef TABPERTURB_TEXT_UTIL_H_
#define TABPERTURB_TEXT_UTIL_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tabperturb {

// Shortest decimal text that parses back to exactly `value`.
std::string FormatDouble(double value);

// Parses the whole of `text` as a double; nullopt on any trailing garbage.
std::optional<double> ParseDouble(std::string_view text);

// Splits on every occurrence of `sep`; views alias `text`.
std::vector<std::string_view> SplitString(std::string_view text, char sep,
                                          bool skip_empty = false);

// Removes leading and trailing ASCII whitespace.
std::string_view StripWhitespace(std::string_view text);

std::string ToLowerAscii(std::string_view text);

// Number of UTF-8 code points in `text` (bytes that are not continuation
// bytes).
size_t CodePointCount(std::string_view text);

// `text` split into UTF-8 code points.
std::vector<std::string_view> SplitCodePoints(std::string_view text);

}  // namespace tabperturb

#endif  // TABPERTURB_TEXT_UTIL_H_
