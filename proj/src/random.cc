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

#include "tabperturb/random.h"

namespace tabperturb {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

uint64_t Fmix64(uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

}  // namespace

uint64_t Mix64(uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(uint64_t master_seed, uint64_t stream_id)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      key_(Mix64(master_seed ^ Fmix64(stream_id + kGolden))) {}

uint64_t RandomSource::NextU64() {
  const uint64_t c = counter_++;
  const uint64_t y = Mix64(Fmix64(c * kGolden) ^ key_);
  return Mix64(y + key_);
}

double RandomSource::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RandomSource::NextOpenUniform() {
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

uint64_t RandomSource::NextBelow(uint64_t bound) {
  // Rejection keeps the result exactly uniform.
  const uint64_t limit = -bound % bound;
  for (;;) {
    const uint64_t r = NextU64();
    if (r >= limit) return r % bound;
  }
}

uint64_t StableHash(std::string_view name, uint64_t step_index) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(h ^ Mix64(step_index + kGolden));
}

}  // namespace tabperturb
