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

// Per-example clipping, Gaussian privatization, and the two-point gradient
// observation.
//
// For each example xi in the minibatch the observation forms
//   u(xi) = a * grad f(theta + gamma d; xi) + (1 - a) * grad f(theta; xi),
// with a = (1 - kappa) / (kappa gamma), clips u(xi) to norm C, averages over
// the batch and adds N(0, sigma_w^2 I) with sigma_w = sigma_DP C / B.

#ifndef FIBER_MECHANISM_HPP_
#define FIBER_MECHANISM_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "fiber/error.hpp"
#include "fiber/rng.hpp"
#include "fiber/types.hpp"

namespace fiber {

struct DpMechanismConfig {
  double clip_norm = 1.0;
  int batch_size = 1;
  double noise_multiplier = 0.0;

  // Per-coordinate std of the noise added to the averaged clipped gradient.
  double sigma_w() const {
    return noise_multiplier * clip_norm / static_cast<double>(batch_size);
  }

  void Validate() const {
    internal::Require(clip_norm > 0.0, ErrorCode::kInvalidParameter,
                      "clip norm must be positive");
    internal::Require(batch_size >= 1, ErrorCode::kInvalidParameter,
                      "batch size must be >= 1");
    internal::Require(noise_multiplier >= 0.0, ErrorCode::kInvalidParameter,
                      "noise multiplier must be >= 0");
  }
};

struct TwoPointConfig {
  double kappa = 0.6;
  double gamma = 0.7;
};

// a = (1 - kappa) / (kappa gamma). Rejects a > 1, i.e. gamma < (1-kappa)/kappa,
// which would put a negative weight on the current gradient.
inline double TwoPointWeight(const TwoPointConfig& cfg) {
  internal::Require(cfg.kappa > 0.0 && cfg.kappa <= 1.0, ErrorCode::kDomain,
                    "kappa must lie in (0, 1]");
  internal::Require(cfg.gamma > 0.0, ErrorCode::kDomain,
                    "gamma must be positive");
  const double a = (1.0 - cfg.kappa) / (cfg.kappa * cfg.gamma);
  // Allow rounding at the pure-lookahead boundary gamma = (1-kappa)/kappa.
  if (a > 1.0 + 1e-12) {
    throw FiberError(ErrorCode::kConstraintViolation,
                     "two-point weight a = " + std::to_string(a) +
                         " > 1; need gamma >= (1 - kappa) / kappa");
  }
  return std::min(a, 1.0);
}

inline double L2Norm(std::span<const double> u) {
  double sum = 0.0;
  for (double x : u) sum += x * x;
  return std::sqrt(sum);
}

inline void ClipInPlace(std::span<double> u, double clip_norm) {
  const double norm = L2Norm(u);
  if (norm <= clip_norm) return;
  const double scale = clip_norm / norm;
  for (double& x : u) x *= scale;
}

// u * min{1, C / ||u||}.
inline ParamVector Clip(std::span<const double> u, double clip_norm) {
  internal::Require(clip_norm > 0.0, ErrorCode::kInvalidParameter,
                    "clip norm must be positive");
  ParamVector out(u.begin(), u.end());
  ClipInPlace(out, clip_norm);
  return out;
}

struct PrivatizedGradient {
  ParamVector value;  // g_t
  ParamVector noise;  // w_t, kept for audits
};

namespace internal {

inline std::size_t CheckBatch(const GradientBatch& grads,
                              const DpMechanismConfig& dp) {
  if (grads.empty()) {
    throw FiberError(ErrorCode::kBatchShape, "empty gradient batch");
  }
  if (grads.size() != static_cast<std::size_t>(dp.batch_size)) {
    throw FiberError(ErrorCode::kBatchShape,
                     "batch holds " + std::to_string(grads.size()) +
                         " examples, expected " +
                         std::to_string(dp.batch_size));
  }
  const std::size_t dim = grads.front().size();
  for (const ParamVector& g : grads) {
    RequireSameSize(g.size(), dim, "per-example gradient");
  }
  return dim;
}

inline PrivatizedGradient AddNoise(ParamVector mean,
                                   const DpMechanismConfig& dp,
                                   CounterRng& rng) {
  PrivatizedGradient out{std::move(mean), {}};
  out.noise.assign(out.value.size(), 0.0);
  const double sigma = dp.sigma_w();
  if (sigma > 0.0) {
    FillGaussian(rng, sigma, out.noise);
    for (std::size_t i = 0; i < out.value.size(); ++i) {
      out.value[i] += out.noise[i];
    }
  }
  return out;
}

}  // namespace internal

inline PrivatizedGradient ObserveTwoPoint(const GradientBatch& grads_at_theta,
                                          const GradientBatch& grads_at_lookahead,
                                          const TwoPointConfig& cfg,
                                          const DpMechanismConfig& dp,
                                          CounterRng& rng) {
  dp.Validate();
  const double a = TwoPointWeight(cfg);
  if (grads_at_theta.size() != grads_at_lookahead.size()) {
    throw FiberError(ErrorCode::kBatchShape,
                     "current and lookahead batches differ in length");
  }
  const std::size_t dim = internal::CheckBatch(grads_at_theta, dp);
  internal::RequireSameSize(internal::CheckBatch(grads_at_lookahead, dp), dim,
                            "lookahead gradient");
  ParamVector mean(dim, 0.0);
  ParamVector u(dim);
  for (std::size_t b = 0; b < grads_at_theta.size(); ++b) {
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] = a * grads_at_lookahead[b][i] + (1.0 - a) * grads_at_theta[b][i];
    }
    ClipInPlace(u, dp.clip_norm);
    for (std::size_t i = 0; i < dim; ++i) mean[i] += u[i];
  }
  const double inv_b = 1.0 / static_cast<double>(dp.batch_size);
  for (double& x : mean) x *= inv_b;
  return internal::AddNoise(std::move(mean), dp, rng);
}

inline PrivatizedGradient ObserveSinglePoint(const GradientBatch& grads,
                                             const DpMechanismConfig& dp,
                                             CounterRng& rng) {
  dp.Validate();
  const std::size_t dim = internal::CheckBatch(grads, dp);
  ParamVector mean(dim, 0.0);
  ParamVector u(dim);
  for (const ParamVector& g : grads) {
    std::copy(g.begin(), g.end(), u.begin());
    ClipInPlace(u, dp.clip_norm);
    for (std::size_t i = 0; i < dim; ++i) mean[i] += u[i];
  }
  const double inv_b = 1.0 / static_cast<double>(dp.batch_size);
  for (double& x : mean) x *= inv_b;
  return internal::AddNoise(std::move(mean), dp, rng);
}

}  // namespace fiber

#endif  // FIBER_MECHANISM_HPP_
