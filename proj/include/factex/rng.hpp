// Copyright 2026 The Factex Authors.
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

#ifndef FACTEX_RNG_HPP_
#define FACTEX_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

namespace factex {

// Deterministic splitmix64 generator. The standard <random> distributions are
// implementation-defined, so everything that must be byte-reproducible across
// platforms (init, shuffling, dropout) draws from this instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Box-Muller; one draw per call, the pair's second half is discarded so the
  // stream position stays a simple function of the call count.
  double normal(double mean, double stddev) {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Stateless mix of several keys into one seed, used to derive per-instance
// streams that do not depend on scheduling order.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b,
                              std::uint64_t c = 0, std::uint64_t d = 0) {
  Rng r(a ^ 0x6a09e667f3bcc908ull);
  std::uint64_t s = r.next_u64();
  s ^= Rng(b ^ s).next_u64();
  s ^= Rng(c ^ s).next_u64();
  s ^= Rng(d ^ s).next_u64();
  return s;
}

}  // namespace factex

#endif  // FACTEX_RNG_HPP_
