/*
 * Copyright 2026 The xaieval Authors.
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

#ifndef XAIEVAL_RANDOM_H_
#define XAIEVAL_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace xaieval {

// Fixed 64-bit finalizer (splitmix64). Stable across platforms and compilers.
std::uint64_t Mix64(std::uint64_t x);

// FNV-1a over raw bytes.
std::uint64_t Fnv1a64(std::string_view bytes);

// Combines a master seed with any number of stream identifiers. The result
// depends only on the values and their order, so parallel tasks can derive
// their streams independently of scheduling.
std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::uint64_t> parts);

// Stream identifiers used when deriving seeds.
namespace stage {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kTuneSplit = 2;
inline constexpr std::uint64_t kTuneTrial = 3;
inline constexpr std::uint64_t kFinalFit = 4;
inline constexpr std::uint64_t kSampling = 5;
inline constexpr std::uint64_t kExplain = 6;
inline constexpr std::uint64_t kSensitivity = 7;
}  // namespace stage

// Deterministic generator built on std::mt19937_64. The engine's output
// sequence is fixed by the standard; the distributions below are written out
// by hand because the std:: distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);
  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = UniformInt(i);
      std::swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    Shuffle(std::span<T>(items));
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace xaieval

#endif  // XAIEVAL_RANDOM_H_
