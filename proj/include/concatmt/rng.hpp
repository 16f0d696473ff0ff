// Copyright 2026 The concatmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace concatmt {

// Seeded randomness that yields the same stream on every conforming
// platform. std::mt19937_64 and std::seed_seq are bit-specified by the
// standard; the std distributions are not, so bounded draws are done here
// with Lemire's multiply-and-reject method.
class Rng {
 public:
  /// Identifier recorded in metadata sidecars next to every seed.
  static constexpr std::string_view kAlgorithm = "mt19937_64/seed_seq/lemire-v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Stream identifiers keep the draws of different stages independent even
/// when a user reuses one seed everywhere.
namespace streams {
inline constexpr std::uint64_t kSample = 1;
inline constexpr std::uint64_t kSplit = 2;
inline constexpr std::uint64_t kConcat = 3;
inline constexpr std::uint64_t kShuffle = 4;
inline constexpr std::uint64_t kConcatPseudo = 5;
}  // namespace streams

}  // namespace concatmt
