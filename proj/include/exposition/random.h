/*
 * Copyright 2026 The Exposition Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Seeded random streams.
//
// Every stochastic step draws from a substream keyed by (seed, tag, indices),
// so results never depend on evaluation order or thread scheduling. Only the
// engine (std::mt19937_64) comes from the standard library; the integer
// reductions below are written out because the standard distributions are
// implementation-defined and would break cross-platform reproducibility.

#ifndef EXPOSITION_RANDOM_H_
#define EXPOSITION_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace exposition {

// Stream tags. Values are part of the reproducibility contract.
enum class StreamTag : std::uint64_t {
  kBackground = 1,
  kOrdering = 2,
  kRowSample = 3,
  kPermutation = 4,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Substream for (seed, tag, keys...).
  static Rng substream(std::uint64_t seed, StreamTag tag,
                       std::initializer_list<std::uint64_t> keys = {});

  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, StreamTag tag,
                       std::initializer_list<std::uint64_t> keys);

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(values[i - 1], values[j]);
  }
}

// Random permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

// `k` distinct indices from 0..n-1, returned in ascending order. When k >= n
// all indices are returned and no randomness is consumed.
std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                    std::size_t k, Rng& rng);

}  // namespace exposition

#endif  // EXPOSITION_RANDOM_H_
