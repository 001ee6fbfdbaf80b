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

// The DP optimizer family as step functions over flat parameter vectors.
//
//   DP-SGD      single-point observation, theta -= lr g
//   DP-AdamW    single-point observation, AdamW on g
//   DiSK        two-point observation, EMA(kappa), AdamW
//   DiSK-CORR   DiSK with v_bar = max(v_hat - kappa/(2-kappa) sigma_w^2, eps_v)
//   FIBER       two-point observation, innovation filter(omega), AdamW with
//               v_bar = max(v_hat - (2-w)/(4-3w) sigma_w^2, eps_v)
//
// plus the FIBER ablations without subtraction (NO_CORR, A = 0) and with the
// unfiltered subtraction of sigma_w^2 (BC_CORR). Bias corrections use
// (1 - beta^(t+1)) with t counted from 0. Every step after the noise draw is
// a deterministic function of the privatized gradient.

#ifndef FIBER_OPTIMIZERS_HPP_
#define FIBER_OPTIMIZERS_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiber/attenuation.hpp"
#include "fiber/error.hpp"
#include "fiber/filters.hpp"
#include "fiber/mechanism.hpp"
#include "fiber/rng.hpp"
#include "fiber/types.hpp"

namespace fiber {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  double variance_floor = 1e-8;  // eps_v
  long warmup_steps = 0;         // linear warmup; 0 disables

  void Validate() const {
    internal::Require(lr >= 0.0, ErrorCode::kInvalidParameter,
                      "learning rate must be >= 0");
    internal::Require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 &&
                          beta2 < 1.0,
                      ErrorCode::kInvalidParameter,
                      "Adam betas must lie in [0, 1)");
    internal::Require(eps > 0.0, ErrorCode::kInvalidParameter,
                      "Adam eps must be positive");
    internal::Require(weight_decay >= 0.0 && variance_floor >= 0.0 &&
                          warmup_steps >= 0,
                      ErrorCode::kInvalidParameter,
                      "weight decay, variance floor and warmup must be >= 0");
  }

  double LearningRate(long step) const {
    if (warmup_steps <= 0 || step >= warmup_steps) return lr;
    return lr * static_cast<double>(step + 1) /
           static_cast<double>(warmup_steps);
  }
};

enum class OptimizerKind {
  kDpSgd,
  kDpAdamW,
  kDisk,
  kDiskCorr,
  kFiber,
  kFiberNoCorr,
  kFiberBcCorr,
};

inline std::string_view OptimizerName(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kDpSgd: return "dp_sgd";
    case OptimizerKind::kDpAdamW: return "dp_adamw";
    case OptimizerKind::kDisk: return "disk";
    case OptimizerKind::kDiskCorr: return "disk_corr";
    case OptimizerKind::kFiber: return "fiber";
    case OptimizerKind::kFiberNoCorr: return "fiber_no_corr";
    case OptimizerKind::kFiberBcCorr: return "fiber_bc_corr";
  }
  return "unknown";
}

inline OptimizerKind ParseOptimizerKind(std::string_view name) {
  for (OptimizerKind k :
       {OptimizerKind::kDpSgd, OptimizerKind::kDpAdamW, OptimizerKind::kDisk,
        OptimizerKind::kDiskCorr, OptimizerKind::kFiber,
        OptimizerKind::kFiberNoCorr, OptimizerKind::kFiberBcCorr}) {
    if (OptimizerName(k) == name) return k;
  }
  throw FiberError(ErrorCode::kInvalidParameter,
                   "unknown optimizer '" + std::string(name) + "'");
}

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kFiber;
  AdamConfig adam;
  DpMechanismConfig dp;
  TwoPointConfig two_point;  // kappa also sets the DiSK EMA gain
  double omega = 0.9;
  // When false, FIBER variants skip the A sigma_w^2 subtraction but keep the
  // floor, i.e. v_bar = max(v_hat, eps_v).
  bool subtract_filtered_variance = true;

  bool UsesTwoPoint() const {
    return kind != OptimizerKind::kDpSgd && kind != OptimizerKind::kDpAdamW;
  }
  bool UsesAdam() const { return kind != OptimizerKind::kDpSgd; }

  void Validate() const {
    adam.Validate();
    dp.Validate();
    if (UsesTwoPoint()) TwoPointWeight(two_point);
    if (kind == OptimizerKind::kFiber || kind == OptimizerKind::kFiberNoCorr ||
        kind == OptimizerKind::kFiberBcCorr) {
      internal::Require(omega > 0.0 && omega <= 1.0, ErrorCode::kDomain,
                        "omega must lie in (0, 1]");
    }
  }
};

// Variance subtracted from v_hat, or a negative value when the method uses
// the uncorrected v_hat without a floor.
inline double FilteredNoiseVariance(const OptimizerConfig& cfg) {
  const double sigma_w2 = cfg.dp.sigma_w() * cfg.dp.sigma_w();
  switch (cfg.kind) {
    case OptimizerKind::kDpSgd:
    case OptimizerKind::kDpAdamW:
    case OptimizerKind::kDisk:
      return -1.0;
    case OptimizerKind::kDiskCorr:
      return AState(cfg.two_point.kappa) * sigma_w2;
    case OptimizerKind::kFiber:
      return cfg.subtract_filtered_variance ? AInnovation(cfg.omega) * sigma_w2
                                            : 0.0;
    case OptimizerKind::kFiberNoCorr:
      return 0.0;
    case OptimizerKind::kFiberBcCorr:
      return sigma_w2;
  }
  return -1.0;
}

using FilterState = std::variant<std::monostate, EmaFilter, InnovationFilter>;

struct OptimizerState {
  ParamVector m;
  ParamVector v;
  long t = 0;
  FilterState filter;
  ParamVector d;               // last displacement theta_{t+1} - theta_t
  double sigma_filt2 = -1.0;   // see FilteredNoiseVariance
};

inline OptimizerState InitOptimizerState(const OptimizerConfig& cfg,
                                         std::size_t dimension) {
  cfg.Validate();
  OptimizerState state;
  state.m.assign(dimension, 0.0);
  state.v.assign(dimension, 0.0);
  state.d.assign(dimension, 0.0);
  switch (cfg.kind) {
    case OptimizerKind::kDisk:
    case OptimizerKind::kDiskCorr:
      state.filter = EmaFilter(dimension, cfg.two_point.kappa);
      break;
    case OptimizerKind::kFiber:
    case OptimizerKind::kFiberNoCorr:
    case OptimizerKind::kFiberBcCorr:
      state.filter = InnovationFilter(dimension, cfg.omega);
      break;
    default:
      break;
  }
  state.sigma_filt2 = FilteredNoiseVariance(cfg);
  return state;
}

// theta <- theta - lr g.
inline void DpSgdStep(std::span<double> theta, std::span<const double> g,
                      double lr) {
  internal::RequireSameSize(theta.size(), g.size(), "DP-SGD step");
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * g[i];
}

struct AdamMoments {
  ParamVector m_hat;
  ParamVector v_hat;
};

// Updates m, v with `g` and advances t; returns the bias-corrected moments
// m_t / (1 - beta1^(t+1)) and v_t / (1 - beta2^(t+1)) for the pre-increment t.
inline AdamMoments AdamWMoments(OptimizerState& state, std::span<const double> g,
                                const AdamConfig& adam) {
  internal::RequireSameSize(g.size(), state.m.size(), "Adam moments");
  const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(state.t + 1));
  const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(state.t + 1));
  AdamMoments out{ParamVector(g.size()), ParamVector(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    state.m[i] = adam.beta1 * state.m[i] + (1.0 - adam.beta1) * g[i];
    state.v[i] = adam.beta2 * state.v[i] + (1.0 - adam.beta2) * g[i] * g[i];
    out.m_hat[i] = state.m[i] / c1;
    out.v_hat[i] = state.v[i] / c2;
  }
  ++state.t;
  return out;
}

// max(v_hat - A sigma_w^2, eps_v), elementwise.
inline ParamVector CorrectSecondMoment(std::span<const double> v_hat,
                                       double attenuation, double sigma_w2,
                                       double eps_v) {
  internal::Require(attenuation >= 0.0 && attenuation <= 1.0,
                    ErrorCode::kDomain, "attenuation must lie in [0, 1]");
  internal::Require(eps_v >= 0.0, ErrorCode::kInvalidParameter,
                    "variance floor must be >= 0");
  const double shift = attenuation * sigma_w2;
  ParamVector out(v_hat.size());
  for (std::size_t i = 0; i < v_hat.size(); ++i) {
    out[i] = std::max(v_hat[i] - shift, eps_v);
  }
  return out;
}

// Fraction of sum |m_hat| carried by coordinates whose v_bar sits at eps_v.
inline double ClampMass(std::span<const double> v_bar,
                        std::span<const double> m_hat, double eps_v) {
  internal::RequireSameSize(v_bar.size(), m_hat.size(), "clamp mass");
  double clamped = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < v_bar.size(); ++i) {
    const double mass = std::abs(m_hat[i]);
    total += mass;
    if (v_bar[i] == eps_v) clamped += mass;
  }
  return total > 0.0 ? clamped / total : 0.0;
}

// Evaluates per-example gradients for the current minibatch at a point.
using BatchGradFn = std::function<GradientBatch(std::span<const double>)>;

struct StepReport {
  PrivatizedGradient observation;  // g_t and w_t
  ParamVector filtered;            // g~_t (equals g_t without a filter)
  ParamVector v_hat;
  ParamVector v_bar;
  double clamp_mass = 0.0;
  int gradient_evaluations = 0;
};

// One optimizer step for any method in the family. Noise for step t is drawn
// from the stream (noise_seed, t, kDpNoise).
inline StepReport OptimizerStep(OptimizerState& state, ParamVector& theta,
                                const BatchGradFn& grads,
                                const OptimizerConfig& cfg,
                                std::uint64_t noise_seed) {
  internal::RequireSameSize(theta.size(), state.m.size(), "optimizer state");
  StepReport report;
  CounterRng rng(noise_seed, static_cast<std::uint64_t>(state.t),
                 Purpose::kDpNoise);

  // (1) DP observation.
  const GradientBatch at_theta = grads(theta);
  if (cfg.UsesTwoPoint()) {
    ParamVector lookahead(theta);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      lookahead[i] += cfg.two_point.gamma * state.d[i];
    }
    const GradientBatch at_lookahead = grads(lookahead);
    report.observation =
        ObserveTwoPoint(at_theta, at_lookahead, cfg.two_point, cfg.dp, rng);
    report.gradient_evaluations = 2;
  } else {
    report.observation = ObserveSinglePoint(at_theta, cfg.dp, rng);
    report.gradient_evaluations = 1;
  }
  const ParamVector& g = report.observation.value;
  internal::RequireSameSize(g.size(), theta.size(), "observed gradient");

  const double lr = cfg.adam.LearningRate(state.t);
  if (!cfg.UsesAdam()) {
    report.filtered = g;
    DpSgdStep(theta, g, lr);
    ++state.t;
    return report;
  }

  // (2) Temporal filter.
  report.filtered = std::visit(
      [&](auto& f) -> ParamVector {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>,
                                     std::monostate>) {
          return g;
        } else {
          return f.Step(g);
        }
      },
      state.filter);

  // (3) Moments, (4) bias and filter-aware correction.
  AdamMoments moments = AdamWMoments(state, report.filtered, cfg.adam);
  report.v_hat = moments.v_hat;
  const double eps_v = cfg.adam.variance_floor;
  if (state.sigma_filt2 < 0.0) {
    report.v_bar = moments.v_hat;
  } else {
    report.v_bar.resize(moments.v_hat.size());
    for (std::size_t i = 0; i < moments.v_hat.size(); ++i) {
      report.v_bar[i] = std::max(moments.v_hat[i] - state.sigma_filt2, eps_v);
    }
  }
  report.clamp_mass = ClampMass(report.v_bar, moments.m_hat, eps_v);

  // (5) Decoupled weight decay and update.
  const double decay = 1.0 - lr * cfg.adam.weight_decay;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double next =
        decay * theta[i] -
        lr * moments.m_hat[i] / (std::sqrt(report.v_bar[i]) + cfg.adam.eps);
    state.d[i] = next - theta[i];
    theta[i] = next;
  }
  return report;
}

namespace internal {

inline void RequireKind(const OptimizerConfig& cfg,
                        std::initializer_list<OptimizerKind> allowed,
                        const char* fn) {
  for (OptimizerKind k : allowed) {
    if (cfg.kind == k) return;
  }
  throw FiberError(ErrorCode::kInvalidParameter,
                   std::string(fn) + " called with optimizer " +
                       std::string(OptimizerName(cfg.kind)));
}

}  // namespace internal

inline StepReport FiberStep(OptimizerState& state, ParamVector& theta,
                            const BatchGradFn& grads, const OptimizerConfig& cfg,
                            std::uint64_t noise_seed) {
  internal::RequireKind(cfg,
                        {OptimizerKind::kFiber, OptimizerKind::kFiberNoCorr,
                         OptimizerKind::kFiberBcCorr},
                        "FiberStep");
  return OptimizerStep(state, theta, grads, cfg, noise_seed);
}

inline StepReport DiskStep(OptimizerState& state, ParamVector& theta,
                           const BatchGradFn& grads, const OptimizerConfig& cfg,
                           std::uint64_t noise_seed) {
  internal::RequireKind(cfg, {OptimizerKind::kDisk}, "DiskStep");
  return OptimizerStep(state, theta, grads, cfg, noise_seed);
}

inline StepReport DiskCorrStep(OptimizerState& state, ParamVector& theta,
                               const BatchGradFn& grads,
                               const OptimizerConfig& cfg,
                               std::uint64_t noise_seed) {
  internal::RequireKind(cfg, {OptimizerKind::kDiskCorr}, "DiskCorrStep");
  return OptimizerStep(state, theta, grads, cfg, noise_seed);
}

inline StepReport DpAdamWStep(OptimizerState& state, ParamVector& theta,
                              const BatchGradFn& grads,
                              const OptimizerConfig& cfg,
                              std::uint64_t noise_seed) {
  internal::RequireKind(cfg, {OptimizerKind::kDpAdamW}, "DpAdamWStep");
  return OptimizerStep(state, theta, grads, cfg, noise_seed);
}

// Checkpoint layout: {"m": [...], "v": [...], "t": n, "g_tilde": [...],
// "r": [...], "d": [...]}. Filter fields are empty arrays when unused.
inline nlohmann::json CheckpointToJson(const OptimizerState& state) {
  nlohmann::json j;
  j["m"] = state.m;
  j["v"] = state.v;
  j["t"] = state.t;
  j["g_tilde"] = ParamVector{};
  j["r"] = ParamVector{};
  if (const auto* ema = std::get_if<EmaFilter>(&state.filter)) {
    j["g_tilde"] = ema->g_tilde();
  } else if (const auto* inn = std::get_if<InnovationFilter>(&state.filter)) {
    j["g_tilde"] = inn->g_tilde();
    j["r"] = inn->r();
  }
  j["d"] = state.d;
  return j;
}

inline OptimizerState CheckpointFromJson(const nlohmann::json& j,
                                         const OptimizerConfig& cfg) {
  try {
    const auto m = j.at("m").get<ParamVector>();
    OptimizerState state = InitOptimizerState(cfg, m.size());
    state.m = m;
    state.v = j.at("v").get<ParamVector>();
    state.t = j.at("t").get<long>();
    state.d = j.at("d").get<ParamVector>();
    internal::RequireSameSize(state.v.size(), m.size(), "checkpoint v");
    internal::RequireSameSize(state.d.size(), m.size(), "checkpoint d");
    auto g_tilde = j.at("g_tilde").get<ParamVector>();
    auto r = j.at("r").get<ParamVector>();
    if (auto* ema = std::get_if<EmaFilter>(&state.filter)) {
      ema->SetState(std::move(g_tilde));
    } else if (auto* inn = std::get_if<InnovationFilter>(&state.filter)) {
      internal::RequireSameSize(g_tilde.size(), m.size(), "checkpoint g_tilde");
      inn->SetState(std::move(g_tilde), std::move(r));
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw FiberError(ErrorCode::kInvalidParameter,
                     std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace fiber

#endif  // FIBER_OPTIMIZERS_HPP_
