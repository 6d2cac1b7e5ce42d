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

#ifndef TABPERTURB_RANDOM_H_
#define TABPERTURB_RANDOM_H_

#include <cstdint>
#include <string_view>

namespace tabperturb {

// Counter-based pseudorandom stream. The n-th output is a pure function of
// (master_seed, stream_id, n), so a stream can be recreated anywhere and
// distinct stream ids never share a sequence offset. Not cryptographically
// secure.
//
// A RandomSource is a value type; copying it forks the cursor. Confine each
// instance to one thread at a time.
class RandomSource {
 public:
  RandomSource(uint64_t master_seed, uint64_t stream_id);

  uint64_t NextU64();

  // Uniform on [0, 1) with 53 bits of resolution.
  double NextUniform();

  // Uniform on the open interval (0, 1).
  double NextOpenUniform();

  // Uniform integer in [0, bound). Requires bound > 0.
  uint64_t NextBelow(uint64_t bound);

  uint64_t master_seed() const { return master_seed_; }
  uint64_t stream_id() const { return stream_id_; }
  uint64_t position() const { return counter_; }

 private:
  uint64_t master_seed_;
  uint64_t stream_id_;
  uint64_t key_;
  uint64_t counter_ = 0;
};

// 64-bit mixing finalizer (SplitMix64).
uint64_t Mix64(uint64_t x);

// Stream id for step `step_index` of the chain bound to `name`. Depends only
// on its arguments, so column order and worker scheduling cannot change it.
uint64_t StableHash(std::string_view name, uint64_t step_index);

}  // namespace tabperturb

#endif  // TABPERTURB_RANDOM_H_
