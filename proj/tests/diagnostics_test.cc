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

#include "fiber/diagnostics.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace fiber {
namespace {

TEST(GenerateDriftSignal, NoiselessConstantVelocityIsRamp) {
  DriftConfig cfg;
  cfg.dimension = 3;
  cfg.horizon = 50;
  cfg.sigma_w2 = 0.0;
  cfg.initial_drift = 0.4;
  const DriftSignal s = GenerateDriftSignal(cfg);
  for (long t = 0; t < cfg.horizon; ++t) {
    for (double v : s.latent[t]) EXPECT_NEAR(v, 0.4 * (t + 1), 1e-12);
    EXPECT_EQ(s.latent[t], s.observations[t]);
  }
}

TEST(GenerateDriftSignal, NoiselessRandomWalkIsConstant) {
  DriftConfig cfg;
  cfg.model = DriftModel::kRandomWalk;
  cfg.horizon = 30;
  cfg.sigma_w2 = 0.0;
  cfg.initial_drift = 5.0;  // ignored by RW
  const DriftSignal s = GenerateDriftSignal(cfg);
  for (const auto& v : s.latent) {
    for (double x : v) EXPECT_EQ(x, 0.0);
  }
}

TEST(GenerateDriftSignal, ObservationNoiseVariance) {
  DriftConfig cfg;
  cfg.dimension = 4;
  cfg.horizon = 10000;
  cfg.sigma_s2 = 0.1;
  cfg.sigma_r2 = 0.01;
  cfg.sigma_w2 = 2.5;
  cfg.seed = 3;
  const DriftSignal s = GenerateDriftSignal(cfg);
  double ss = 0;
  for (long t = 0; t < cfg.horizon; ++t) {
    for (std::size_t i = 0; i < cfg.dimension; ++i) {
      ss += std::pow(s.observations[t][i] - s.latent[t][i], 2);
    }
  }
  EXPECT_NEAR(ss / (cfg.horizon * cfg.dimension), 2.5, 0.05 * 2.5);
  EXPECT_EQ(GenerateDriftSignal(cfg).observations, s.observations);
}

TEST(GenerateDriftSignal, Validation) {
  DriftConfig cfg;
  cfg.horizon = 0;
  try {
    GenerateDriftSignal(cfg);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyRun);
  }
  cfg.horizon = 5;
  cfg.sigma_s2 = -1;
  EXPECT_THROW(GenerateDriftSignal(cfg), FiberError);
}

TEST(DriftBenchmark, IdenticalFiltersTie) {
  DriftConfig cfg;
  cfg.sigma_s2 = 0.01;
  cfg.seed = 1;
  const DriftSignal s = GenerateDriftSignal(cfg);
  const double a = TrackingMse(InnovationFilter(16, 0.9), s);
  const double b = TrackingMse(InnovationFilter(16, 0.9), s);
  EXPECT_EQ(DriftImprovement(a, b), 0.0);
}

TEST(DriftBenchmark, SignOfImprovementMatchesMseOrder) {
  DriftBenchmarkConfig cfg;
  cfg.horizon = 100;
  const DriftBenchmarkResult r = DriftBenchmark(cfg);
  ASSERT_EQ(r.rows.size(), 2u * 5 * 7);
  ASSERT_EQ(r.win_rates.size(), 10u);
  for (const DriftRow& row : r.rows) {
    EXPECT_EQ(row.win, row.mse_innov < row.mse_ema);
    EXPECT_EQ(row.improvement > 0, row.mse_innov < row.mse_ema);
  }
  int total = 0;
  for (const auto& w : r.win_rates) total += w.wins;
  int wins = 0;
  for (const auto& row : r.rows) wins += row.win;
  EXPECT_EQ(total, wins);
  EXPECT_EQ(DriftBenchmark(cfg).rows.back().mse_ema, r.rows.back().mse_ema);
}

TEST(DriftBenchmark, EmptyRunRejected) {
  DriftBenchmarkConfig cfg;
  cfg.horizon = 0;
  try {
    DriftBenchmark(cfg);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyRun);
  }
}

TEST(DriftBenchmark, DisplayClipping) {
  EXPECT_EQ(ClipImprovementForDisplay(-1225.6), -200.0);
  EXPECT_EQ(ClipImprovementForDisplay(150.0), 100.0);
  EXPECT_EQ(ClipImprovementForDisplay(42.0), 42.0);
}

TEST(ProjectionProbe, UnitAndOrthogonal) {
  const ProjectionProbe p = MakeProjectionProbe(20, 16, 5);
  ASSERT_EQ(p.count(), 16u);
  for (std::size_t a = 0; a < p.count(); ++a) {
    EXPECT_NEAR(L2Norm(p.directions[a]), 1.0, 1e-12);
    for (std::size_t b = 0; b < a; ++b) {
      double dot = 0;
      for (std::size_t i = 0; i < 20; ++i) {
        dot += p.directions[a][i] * p.directions[b][i];
      }
      EXPECT_NEAR(dot, 0.0, 1e-12);
    }
  }
  const ProjectionProbe wide = MakeProjectionProbe(4, 16, 5);
  for (const auto& u : wide.directions) EXPECT_NEAR(L2Norm(u), 1.0, 1e-12);
  EXPECT_EQ(MakeProjectionProbe(20, 16, 5).directions, p.directions);
}

Dataset SmallLogistic() {
  return MakeSynthetic(ModelKind::kLogistic, 400, 8, 2, 0.5);
}

PairedRunConfig SmallPairedRun(double omega) {
  PairedRunConfig cfg;
  cfg.model = {ModelKind::kLogistic, 8};
  cfg.optimizer.kind = OptimizerKind::kFiber;
  cfg.optimizer.omega = omega;
  cfg.optimizer.adam.lr = 1e-3;
  cfg.optimizer.dp = {1.0, 40, 8.0};
  cfg.steps = 400;
  cfg.burn_in = 50;
  return cfg;
}

TEST(PairedRunAttenuation, UnitGainRatioNearOne) {
  const Dataset data = SmallLogistic();
  const ProjectionProbe probe = MakeProjectionProbe(8, 8, 1);
  const PairedRunResult r =
      PairedRunAttenuation(SmallPairedRun(1.0), data, probe);
  EXPECT_NEAR(r.rho_bar, 1.0, 1e-6);
  EXPECT_EQ(r.rho.size(), 400u);
  for (double rho : r.rho) EXPECT_GT(rho, 0.0);
}

TEST(PairedRunAttenuation, TracksClosedForm) {
  const Dataset data = SmallLogistic();
  const ProjectionProbe probe = MakeProjectionProbe(8, 8, 1);
  for (double w : {0.5, 0.7, 0.9}) {
    const PairedRunResult r =
        PairedRunAttenuation(SmallPairedRun(w), data, probe);
    EXPECT_NEAR(r.rho_bar, AInnovation(w), 0.1 * AInnovation(w)) << w;
    EXPECT_NEAR(r.r_bar, 1.0, 0.15) << w;
  }
}

TEST(PairedRunAttenuation, ZeroNoiseIsDegenerate) {
  PairedRunConfig cfg = SmallPairedRun(0.9);
  cfg.optimizer.dp.noise_multiplier = 0.0;
  try {
    PairedRunAttenuation(cfg, SmallLogistic(), MakeProjectionProbe(8, 8, 1));
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateVariance);
  }
}

TEST(AuditStreams, OpenLoopIsUncorrelated) {
  // Fixed signal stream plus independent noise: s and n are independent.
  const long steps = 4000;
  const double w = 0.9;
  std::vector<double> x(steps), y(steps);
  InnovationFilter f(1, w);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (long t = 0; t < steps; ++t) {
    const double signal = std::sin(0.01 * t);
    y[t] = 0.5 * nd(gen);
    const double g = signal + y[t];
    x[t] = f.Step(std::span<const double>(&g, 1))[0];
  }
  const AuditStatistics s = AuditStreams(x, y, w, 100, 100);
  // The s series is a smooth deterministic curve, so the effective sample
  // size is far below T; 3 / sqrt(T_eff) with T_eff ~ 40 cycles of the
  // autocorrelation of n.
  const double se = 1.0 / std::sqrt((steps - 100) / 10.0);
  EXPECT_LT(std::abs(s.rho_hat), 3 * se);
  EXPECT_GE(s.cross_term_ratio, 0.0);
  EXPECT_GE(s.cv, 0.0);
}

TEST(AuditStreams, ConstantStreamHasZeroCv) {
  const std::vector<double> x(500, 2.0), y(500, 0.0);
  EXPECT_EQ(AuditStreams(x, y, 0.9, 50, 100).cv, 0.0);
  EXPECT_EQ(SlidingWindowCv(x, 10), 0.0);
}

TEST(AuditStreams, WindowErrors) {
  const std::vector<double> x(10, 1.0);
  try {
    AuditStreams(x, x, 0.9, 10, 5);
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidWindow);
  }
  EXPECT_THROW(SlidingWindowCv(x, 11), FiberError);
}

TEST(AssumptionAudit, ClosedLoopReportPopulated) {
  const Dataset data = SmallLogistic();
  AuditConfig cfg;
  cfg.run = SmallPairedRun(0.9);
  cfg.run.optimizer.dp.noise_multiplier = 1.0;
  cfg.run.optimizer.adam.lr = 0.05;
  cfg.run.steps = 300;
  cfg.warmup = 50;
  cfg.window = 50;
  const AuditReport r = AssumptionAudit(cfg, data, MakeProjectionProbe(8, 4, 1));
  EXPECT_EQ(r.steady_steps, 250);
  EXPECT_EQ(r.per_probe.size(), 4u);
  EXPECT_TRUE(std::isfinite(r.headline.rho_hat));
  EXPECT_LE(std::abs(r.headline.rho_hat), 1.0);
  EXPECT_GE(r.headline.cross_term_ratio, 0.0);
  EXPECT_GT(r.headline.cv, 0.0);
  cfg.warmup = 300;
  try {
    AssumptionAudit(cfg, data, MakeProjectionProbe(8, 4, 1));
    FAIL();
  } catch (const FiberError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidWindow);
  }
}

}  // namespace
}  // namespace fiber
