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

#ifndef TABPERTURB_DIGEST_H_
#define TABPERTURB_DIGEST_H_

#include <string>
#include <string_view>

namespace tabperturb {

// "blake2b-256:" followed by the lowercase hex BLAKE2b-256 of `bytes`.
std::string ContentDigest(std::string_view bytes);

}  // namespace tabperturb

#endif  // TABPERTURB_DIGEST_H_
