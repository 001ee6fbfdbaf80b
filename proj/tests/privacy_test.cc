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

#include "fiber/privacy.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/rdp_oracle.hpp"

namespace fiber {
namespace {

TEST(RdpSubsampledGaussian, FullBatchIsPlainGaussian) {
  for (double sigma : {0.5, 1.0, 3.0}) {
    for (int alpha : {2, 5, 32}) {
      EXPECT_DOUBLE_EQ(RdpSubsampledGaussian(1.0, sigma, alpha),
                       alpha / (2.0 * sigma * sigma));
    }
  }
}

TEST(RdpSubsampledGaussian, MatchesHighPrecisionOracle) {
  const double expected =
      oracle::RdpHighPrecision(0.1, 1.0, 2).convert_to<double>();
  EXPECT_NEAR(RdpSubsampledGaussian(0.1, 1.0, 2), expected, 1e-14);
  for (double q : {0.001, 0.01, 0.1, 0.5}) {
    for (double sigma : {0.7, 1.0, 2.5}) {
      for (int alpha : {2, 3, 8, 20, 64}) {
        const double ref =
            oracle::RdpHighPrecision(q, sigma, alpha).convert_to<double>();
        EXPECT_NEAR(RdpSubsampledGaussian(q, sigma, alpha), ref,
                    1e-12 * std::max(1.0, std::abs(ref)))
            << "q=" << q << " sigma=" << sigma << " alpha=" << alpha;
      }
    }
  }
}

TEST(RdpSubsampledGaussian, VanishesAsSamplingRateVanishes) {
  double prev = RdpSubsampledGaussian(1e-2, 1.0, 8);
  for (double q : {1e-3, 1e-4, 1e-6}) {
    const double cur = RdpSubsampledGaussian(q, 1.0, 8);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(RdpSubsampledGaussian, RejectsBadArguments) {
  try {
    RdpSubsampledGaussian(0.1, 1.0, 1);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidOrder);
  }
  try {
    RdpSubsampledGaussian(0.1, 1.0, 2.5);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidOrder);
  }
  try {
    RdpSubsampledGaussian(0.1, 0.0, 2);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
  }
  EXPECT_NO_THROW(RdpSubsampledGaussian(0.1, 1.0, 3.0));
}

TEST(RdpSubsampledGaussian, NondecreasingInOrderAndSamplingRate) {
  for (double sigma : {0.8, 1.5}) {
    double prev = 0.0;
    for (int a = 2; a <= 64; ++a) {
      const double cur = RdpSubsampledGaussian(0.05, sigma, a);
      EXPECT_GE(cur, prev * (1 - 1e-12));
      EXPECT_TRUE(std::isfinite(cur));
      prev = cur;
    }
  }
  double prev = 0.0;
  for (double q : {0.001, 0.01, 0.05, 0.2, 0.6, 1.0}) {
    const double cur = RdpSubsampledGaussian(q, 1.0, 10);
    EXPECT_GE(cur, prev);
    prev = cur;
  }
}

TEST(ComposeAndConvert, MatchesBruteForceOracle) {
  const AccountingParams params{0.01, 1000, 1.0, 1e-5};
  const double ref = oracle::EpsilonHighPrecision(0.01, 1.0, 1000, 1e-5,
                                                  DefaultOrders());
  EXPECT_NEAR(ComposeAndConvert(params).epsilon, ref, 1e-10 * ref);
}

TEST(ComposeAndConvert, SingleReleaseLimit) {
  const double delta = 1e-5;
  const EpsilonResult r = ComposeAndConvert({1.0, 1, 1e4, delta});
  const int a = r.order;
  EXPECT_NEAR(r.epsilon, std::log(1 / delta) / (a - 1) + a / (2 * 1e8), 1e-12);
  EXPECT_EQ(a, 64);
}

TEST(ComposeAndConvert, DoublingStepsIncreasesEpsilon) {
  for (long long t : {1LL, 10LL, 100LL, 1000LL}) {
    const double e1 = ComposeAndConvert({0.05, t, 1.1, 1e-5}).epsilon;
    const double e2 = ComposeAndConvert({0.05, 2 * t, 1.1, 1e-5}).epsilon;
    EXPECT_GT(e2, e1);
  }
}

TEST(ComposeAndConvert, EmptyOrdersRejected) {
  try {
    ComposeAndConvert({0.1, 10, 1.0, 1e-5}, {});
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
  }
}

TEST(ComposeAndConvert, ValidatesParams) {
  EXPECT_THROW(ComposeAndConvert({0.0, 10, 1.0, 1e-5}), FiberError);
  EXPECT_THROW(ComposeAndConvert({0.1, 0, 1.0, 1e-5}), FiberError);
  EXPECT_THROW(ComposeAndConvert({0.1, 10, -1.0, 1e-5}), FiberError);
  EXPECT_THROW(ComposeAndConvert({0.1, 10, 1.0, 1.0}), FiberError);
}

TEST(CalibrateNoise, RoundTrip) {
  const CalibrationResult c = CalibrateNoise(2.0, 1e-5, 0.1, 500);
  const double eps = ComposeAndConvert({0.1, 500, c.noise_multiplier, 1e-5})
                         .epsilon;
  EXPECT_LE(eps, 2.0);
  EXPECT_GE(eps, 2.0 * (1 - 1e-3));
  EXPECT_DOUBLE_EQ(eps, c.epsilon);
}

TEST(CalibrateNoise, LargerTargetNeedsLessNoise) {
  double prev = 1e9;
  for (double target : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double s = CalibrateNoise(target, 1e-5, 0.02, 1000).noise_multiplier;
    EXPECT_LE(s, prev);
    prev = s;
  }
}

TEST(CalibrateNoise, SingleReleaseInvertsClosedForm) {
  // q = 1, T = 1: eps(sigma) = min_a a/(2 sigma^2) + log(1/delta)/(a-1).
  const double delta = 1e-5;
  const CalibrationResult c = CalibrateNoise(3.0, delta, 1.0, 1);
  double best = 1e300;
  for (int a = 2; a <= 64; ++a) {
    best = std::min(best, a / (2 * c.noise_multiplier * c.noise_multiplier) +
                              std::log(1 / delta) / (a - 1));
  }
  EXPECT_NEAR(best, 3.0, 3.0 * 1e-4);
}

TEST(CalibrateNoise, UnreachableTargetFails) {
  try {
    CalibrateNoise(1e-4, 1e-5, 1.0, 100000);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCalibrationFailure);
  }
}

TEST(CalibrateNoise, GenerousTargetReturnsLowerBound) {
  const CalibrationResult c = CalibrateNoise(1e6, 1e-5, 0.01, 10);
  EXPECT_EQ(c.noise_multiplier, kMinCalibrationSigma);
}

TEST(DefaultDelta, PowerLaw) {
  EXPECT_NEAR(DefaultDelta(60000), std::pow(60000.0, -1.1), 1e-20);
  EXPECT_THROW(DefaultDelta(0.5), FiberError);
}

}  // namespace
}  // namespace fiber
