// Copyright 2026 The qauction Authors
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

#ifndef QAUCTION_RANDOM_HPP_
#define QAUCTION_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace qauction {

// SplitMix64 finalizer. Used only to derive independent sub-seeds.
constexpr std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Purpose labels for sub-streams of one run.
enum class StreamPurpose : std::uint64_t {
  kExploration = 1,
  kTieBreak = 2,
  kFringe = 3,
};

constexpr std::uint64_t DeriveSeed(std::uint64_t run_seed, StreamPurpose purpose,
                                   std::uint64_t index = 0) {
  return MixSeed(MixSeed(MixSeed(run_seed) ^ static_cast<std::uint64_t>(purpose)) ^
                 index);
}

// Thin wrapper over mt19937_64 with distribution code written out so draws
// are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of precision.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double low, double high) { return low + (high - low) * Uniform(); }

  // Uniform integer on [0, n). Rejection sampling removes modulo bias.
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qauction

#endif  // QAUCTION_RANDOM_HPP_
