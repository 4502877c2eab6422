/* Copyright 2026 The f1thresh Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef F1THRESH_RNG_HPP_
#define F1THRESH_RNG_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace f1thresh {

// xoshiro256** seeded through splitmix64. Every random draw in the library
// (fold shuffling, dichotomic proposals, synthetic data) goes through this
// generator so that a seed fully determines a run. The derived samplers below
// are specified exactly so other implementations can reproduce the streams:
//
//   uniform01()    (next() >> 11) * 2^-53, in [0, 1)
//   below(bound)   rejection on next() < (2^64 - bound) % bound, then % bound
//   normal()       Box-Muller cosine branch: u1 = 1 - uniform01(),
//                  u2 = uniform01(), sqrt(-2 ln u1) * cos(2 pi u2)
//   shuffle(span)  Fisher-Yates from the back, j = below(i + 1)
class Xoshiro256 {
 public:
  static constexpr const char* kName = "xoshiro256**/splitmix64";

  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t below(std::uint64_t bound);
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace f1thresh

#endif  // F1THRESH_RNG_HPP_
