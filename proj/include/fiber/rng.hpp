// Copyright 2026 The FIBER Authors.
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

// Counter-based random streams.
//
// Every random draw in the library comes from a stream addressed by
// (seed, step, purpose, substream). Two streams with different addresses are
// statistically independent, and a stream can be re-created at any point
// without replaying earlier draws. Paired replicas exploit this: they share the
// seed used for data order and initialization while using distinct seeds for
// the DP noise purpose.

#ifndef FIBER_RNG_HPP_
#define FIBER_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace fiber {

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter Encrypt(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

enum class Purpose : std::uint32_t {
  kDpNoise = 1,
  kMinibatch = 2,
  kInit = 3,
  kProbe = 4,
  kData = 5,
  kDrift = 6,
  kMonteCarlo = 7,
};

// A UniformRandomBitGenerator over one Philox stream. The counter layout is
// {block, purpose | substream << 8, step_lo, step_hi}; the key is the seed.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t step, Purpose purpose,
             std::uint32_t substream = 0)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(static_cast<std::uint32_t>(purpose) | (substream << 8)),
        step_(step) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (lane_ == 2) Refill();
    const std::uint64_t lo = block_[2 * lane_];
    const std::uint64_t hi = block_[2 * lane_ + 1];
    ++lane_;
    return lo | (hi << 32);
  }

 private:
  void Refill() {
    block_ = Philox4x32::Encrypt(
        {block_index_++, stream_, static_cast<std::uint32_t>(step_),
         static_cast<std::uint32_t>(step_ >> 32)},
        key_);
    lane_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t stream_;
  std::uint64_t step_;
  std::uint32_t block_index_ = 0;
  Philox4x32::Counter block_{};
  int lane_ = 2;
};

// Fills `out` with i.i.d. N(0, stddev^2) draws.
inline void FillGaussian(CounterRng& rng, double stddev, std::span<double> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : out) x = stddev * normal(rng);
}

}  // namespace fiber

#endif  // FIBER_RNG_HPP_
