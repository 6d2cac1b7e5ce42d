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

#ifndef TABPERTURB_SRC_EMBEDDED_DATA_H_
#define TABPERTURB_SRC_EMBEDDED_DATA_H_

#include <string_view>

// Copies of the files under data/, compiled in as defaults.
namespace tabperturb::embedded {

extern const std::string_view kMaskRules;
extern const std::string_view kPiiDetectors;
extern const std::string_view kFirstNames;
extern const std::string_view kLastNames;

}  // namespace tabperturb::embedded

#endif  // TABPERTURB_SRC_EMBEDDED_DATA_H_
