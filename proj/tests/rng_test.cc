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

#include "fiber/rng.hpp"

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

namespace fiber {
namespace {

// Published Philox4x32-10 known-answer vectors.
TEST(Philox4x32, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::Encrypt(C{0, 0, 0, 0}, {0, 0}),
            (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::Encrypt(
                C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                {0xffffffffu, 0xffffffffu}),
            (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::Encrypt(
                C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                {0xa4093822u, 0x299f31d0u}),
            (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, SameAddressSameStream) {
  CounterRng a(42, 7, Purpose::kDpNoise, 3);
  CounterRng b(42, 7, Purpose::kDpNoise, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, DistinctAddressesDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed : {1u, 2u}) {
    for (std::uint64_t step : {0u, 1u, 1u << 20}) {
      for (Purpose p : {Purpose::kDpNoise, Purpose::kMinibatch}) {
        for (std::uint32_t sub : {0u, 1u}) {
          CounterRng rng(seed, step, p, sub);
          firsts.insert(rng());
        }
      }
    }
  }
  EXPECT_EQ(firsts.size(), 24u);
}

TEST(CounterRng, HighStepBitsMatter) {
  CounterRng a(1, 5, Purpose::kData);
  CounterRng b(1, 5 + (std::uint64_t{1} << 32), Purpose::kData);
  EXPECT_NE(a(), b());
}

TEST(FillGaussian, MomentsMatch) {
  CounterRng rng(9, 0, Purpose::kMonteCarlo);
  std::vector<double> x(200000);
  FillGaussian(rng, 2.0, x);
  double mean = 0, var = 0;
  for (double v : x) mean += v;
  mean /= x.size();
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size() - 1;
  EXPECT_NEAR(mean, 0.0, 5 * 2.0 / std::sqrt(x.size()));
  EXPECT_NEAR(var, 4.0, 4.0 * 0.02);
}

}  // namespace
}  // namespace fiber
