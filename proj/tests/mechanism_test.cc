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

#include "fiber/mechanism.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace fiber {
namespace {

ParamVector RandomVector(std::mt19937_64& gen, std::size_t d, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  ParamVector v(d);
  for (double& x : v) x = n(gen);
  return v;
}

TEST(Clip, BelowThresholdUnchanged) {
  const ParamVector u{0.3, 0.4};
  EXPECT_EQ(Clip(u, 1.0), u);
}

TEST(Clip, ScalesToNorm) {
  const ParamVector out = Clip(ParamVector{3.0, 4.0}, 1.0);
  EXPECT_NEAR(out[0], 0.6, 1e-15);
  EXPECT_NEAR(out[1], 0.8, 1e-15);
}

TEST(Clip, ZeroVectorStaysZero) {
  EXPECT_EQ(Clip(ParamVector{0.0, 0.0}, 1.0), (ParamVector{0.0, 0.0}));
  EXPECT_THROW(Clip(ParamVector{1.0}, 0.0), FiberError);
}

TEST(Clip, NormPropertyAndIdempotence) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> cdist(0.01, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const ParamVector u = RandomVector(gen, 1 + i % 17, 1.5);
    const double c = cdist(gen);
    const ParamVector v = Clip(u, c);
    EXPECT_NEAR(L2Norm(v), std::min(L2Norm(u), c), 1e-12);
    const ParamVector w = Clip(v, c);
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(w[k], v[k], 1e-15);
  }
}

TEST(TwoPointWeight, Defaults) {
  EXPECT_NEAR(TwoPointWeight({0.6, 0.7}), 0.4 / (0.6 * 0.7), 1e-15);
  EXPECT_NEAR(TwoPointWeight({0.6, 0.7}), 0.952, 1e-3);
}

TEST(TwoPointWeight, PureLookaheadBoundary) {
  for (double k : {0.3, 0.5, 0.6, 0.9}) {
    EXPECT_DOUBLE_EQ(TwoPointWeight({k, (1 - k) / k}), 1.0);
  }
}

TEST(TwoPointWeight, LimitsAndErrors) {
  EXPECT_EQ(TwoPointWeight({1.0, 0.7}), 0.0);
  EXPECT_LT(TwoPointWeight({0.999999, 0.7}), 1e-5);
  try {
    TwoPointWeight({0.5, 0.5});
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstraintViolation);
  }
  EXPECT_THROW(TwoPointWeight({0.0, 1.0}), FiberError);
  EXPECT_THROW(TwoPointWeight({0.5, -1.0}), FiberError);
}

TEST(DpMechanismConfig, SigmaW) {
  const DpMechanismConfig dp{2.0, 50, 1.5};
  EXPECT_DOUBLE_EQ(dp.sigma_w(), 1.5 * 2.0 / 50.0);
}

TEST(ObserveTwoPoint, NoNoiseZeroWeightIsClippedMean) {
  std::mt19937_64 gen(2);
  GradientBatch cur, look;
  for (int b = 0; b < 8; ++b) {
    cur.push_back(RandomVector(gen, 5, 2.0));
    look.push_back(RandomVector(gen, 5, 2.0));
  }
  const DpMechanismConfig dp{1.0, 8, 0.0};
  CounterRng rng(0, 0, Purpose::kDpNoise);
  const PrivatizedGradient g = ObserveTwoPoint(cur, look, {1.0, 1.0}, dp, rng);
  ParamVector expected(5, 0.0);
  for (const auto& u : cur) {
    const ParamVector c = Clip(u, 1.0);
    for (int i = 0; i < 5; ++i) expected[i] += c[i] / 8;
  }
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(g.value[i], expected[i], 1e-15);
}

TEST(ObserveTwoPoint, EqualPointsIndependentOfWeight) {
  std::mt19937_64 gen(3);
  GradientBatch cur;
  for (int b = 0; b < 4; ++b) cur.push_back(RandomVector(gen, 3, 1.0));
  const DpMechanismConfig dp{0.5, 4, 0.0};
  CounterRng r1(0, 0, Purpose::kDpNoise), r2(0, 0, Purpose::kDpNoise);
  const auto a = ObserveTwoPoint(cur, cur, {0.6, 0.7}, dp, r1);
  const auto b = ObserveTwoPoint(cur, cur, {0.9, 0.2}, dp, r2);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.value[i], b.value[i], 1e-15);
}

TEST(ObserveTwoPoint, ConvexHullNormBound) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    GradientBatch cur, look;
    for (int b = 0; b < 6; ++b) {
      const ParamVector base = RandomVector(gen, 4, 1.0);
      cur.push_back(base);
      look.push_back(base);
      for (double& x : look.back()) x *= 1.1;
    }
    const DpMechanismConfig dp{0.8, 6, 0.0};
    CounterRng rng(0, 0, Purpose::kDpNoise);
    const auto out = ObserveTwoPoint(cur, look, {0.6, 0.7}, dp, rng);
    CounterRng r0(0, 0, Purpose::kDpNoise), r1(0, 0, Purpose::kDpNoise);
    const auto e0 = ObserveSinglePoint(cur, dp, r0);
    const auto e1 = ObserveSinglePoint(look, dp, r1);
    EXPECT_LE(L2Norm(out.value),
              std::max(L2Norm(e0.value), L2Norm(e1.value)) + 1e-12);
  }
}

TEST(ObserveTwoPoint, PureNoiseVariance) {
  const std::size_t d = 10;
  const DpMechanismConfig dp{1.0, 2, 0.6};
  const GradientBatch zeros(2, ParamVector(d, 0.0));
  double ss = 0.0;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    CounterRng rng(5, t, Purpose::kDpNoise);
    const auto g = ObserveTwoPoint(zeros, zeros, {0.6, 0.7}, dp, rng);
    for (double x : g.value) ss += x * x;
  }
  const double var = ss / (draws * d);
  const double s2 = dp.sigma_w() * dp.sigma_w();
  EXPECT_NEAR(var, s2, 0.03 * s2);
}

TEST(ObserveTwoPoint, ShapeErrors) {
  const DpMechanismConfig dp{1.0, 2, 0.0};
  CounterRng rng(0, 0, Purpose::kDpNoise);
  const GradientBatch two(2, ParamVector(3, 1.0));
  const GradientBatch one(1, ParamVector(3, 1.0));
  try {
    ObserveTwoPoint(two, one, {0.6, 0.7}, dp, rng);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBatchShape);
  }
  try {
    ObserveSinglePoint(one, dp, rng);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBatchShape);
  }
  GradientBatch ragged{ParamVector(3, 1.0), ParamVector(2, 1.0)};
  EXPECT_THROW(ObserveSinglePoint(ragged, dp, rng), FiberError);
}

TEST(ObserveSinglePoint, IdentityInsideBall) {
  const DpMechanismConfig dp{10.0, 1, 0.0};
  CounterRng rng(0, 0, Purpose::kDpNoise);
  const GradientBatch g{{0.1, -0.2, 0.3}};
  EXPECT_EQ(ObserveSinglePoint(g, dp, rng).value, g.front());
}

TEST(ObserveSinglePoint, ClippingHomogeneity) {
  std::mt19937_64 gen(6);
  GradientBatch far;
  for (int b = 0; b < 5; ++b) far.push_back(RandomVector(gen, 4, 100.0));
  CounterRng r1(0, 0, Purpose::kDpNoise), r2(0, 0, Purpose::kDpNoise);
  const auto a = ObserveSinglePoint(far, {0.5, 5, 0.0}, r1);
  const auto b = ObserveSinglePoint(far, {1.5, 5, 0.0}, r2);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(b.value[i], 3.0 * a.value[i], 1e-13);
}

TEST(ObserveSinglePoint, SensitivityBound) {
  std::mt19937_64 gen(7);
  const int B = 16;
  const DpMechanismConfig dp{1.0, B, 0.0};
  for (int trial = 0; trial < 200; ++trial) {
    GradientBatch batch;
    for (int b = 0; b < B; ++b) batch.push_back(RandomVector(gen, 6, 3.0));
    GradientBatch swapped = batch;
    swapped[trial % B] = RandomVector(gen, 6, 3.0);
    CounterRng r1(0, 0, Purpose::kDpNoise), r2(0, 0, Purpose::kDpNoise);
    const auto a = ObserveSinglePoint(batch, dp, r1);
    const auto b = ObserveSinglePoint(swapped, dp, r2);
    ParamVector diff(6);
    for (int i = 0; i < 6; ++i) diff[i] = a.value[i] - b.value[i];
    // One example moves the mean by at most 2C/B; the sum's per-example
    // contribution is bounded by C.
    EXPECT_LE(L2Norm(diff), 2.0 * dp.clip_norm / B + 1e-12);
    double own = 0;
    for (int i = 0; i < 6; ++i) {
      own += std::pow(Clip(batch[trial % B], 1.0)[i], 2);
    }
    EXPECT_LE(std::sqrt(own) / B, dp.clip_norm / B + 1e-12);
  }
}

}  // namespace
}  // namespace fiber
