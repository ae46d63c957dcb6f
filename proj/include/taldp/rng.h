// Copyright 2026 The taldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TALDP_RNG_H_
#define TALDP_RNG_H_

#include <cstdint>
#include <random>

namespace taldp {

// Seeded random stream whose derived draws are bit-identical on every
// platform: uniforms come straight from the 64-bit Mersenne Twister output
// (whose sequence the standard fixes), never from <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1) with 53-bit resolution.
  double Uniform();

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi);

  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale);

  // Standard normal via Box-Muller.
  double Normal();

  // Uniform integer in [0, n).
  std::uint64_t Index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Mixes a base seed with a stream index into an independent child seed.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace taldp

#endif  // TALDP_RNG_H_
