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

// Renyi-DP accounting for the subsampled Gaussian mechanism.
//
// Only integer orders are supported. For integer alpha the RDP of the
// Poisson-subsampled Gaussian has the exact binomial expansion
//
//   A_alpha = sum_{k=0}^{alpha} C(alpha,k) (1-q)^(alpha-k) q^k
//             exp((k^2 - k) / (2 sigma^2)),
//   eps_RDP(alpha) = log(A_alpha) / (alpha - 1),
//
// which we evaluate with log-sum-exp. Fixed-size batches drawn without
// replacement are accounted with the same formula at q = B/N.

#ifndef FIBER_PRIVACY_HPP_
#define FIBER_PRIVACY_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fiber/error.hpp"

namespace fiber {

struct AccountingParams {
  double sampling_rate = 1.0;  // q = B / N
  long long steps = 1;         // T
  double noise_multiplier = 1.0;
  double delta = 1e-5;

  void Validate() const {
    internal::Require(sampling_rate > 0.0 && sampling_rate <= 1.0,
                      ErrorCode::kInvalidParameter,
                      "sampling rate must lie in (0, 1]");
    internal::Require(steps >= 1, ErrorCode::kInvalidParameter,
                      "steps must be >= 1");
    internal::Require(noise_multiplier > 0.0, ErrorCode::kInvalidParameter,
                      "noise multiplier must be positive");
    internal::Require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidParameter,
                      "delta must lie in (0, 1)");
  }
};

struct RdpPoint {
  int order;
  double epsilon;
};
using RdpCurve = std::vector<RdpPoint>;

struct EpsilonResult {
  double epsilon;
  int order;  // argmin order
};

struct CalibrationResult {
  double noise_multiplier;
  double epsilon;
  int order;
};

inline constexpr double kMinCalibrationSigma = 0.3;
inline constexpr double kMaxCalibrationSigma = 100.0;

inline std::vector<int> DefaultOrders() {
  std::vector<int> orders;
  for (int a = 2; a <= 64; ++a) orders.push_back(a);
  return orders;
}

// delta = 1 / N^1.1.
inline double DefaultDelta(double dataset_size) {
  internal::Require(dataset_size >= 1.0, ErrorCode::kInvalidParameter,
                    "dataset size must be >= 1");
  return std::pow(dataset_size, -1.1);
}

inline double RdpSubsampledGaussian(double q, double sigma, int alpha) {
  internal::Require(alpha >= 2, ErrorCode::kInvalidOrder,
                    "RDP order must be an integer >= 2");
  internal::Require(sigma > 0.0, ErrorCode::kInvalidParameter,
                    "noise multiplier must be positive");
  internal::Require(q > 0.0 && q <= 1.0, ErrorCode::kInvalidParameter,
                    "sampling rate must lie in (0, 1]");
  const double a = alpha;
  if (q == 1.0) return a / (2.0 * sigma * sigma);

  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double lgamma_a1 = std::lgamma(a + 1.0);
  std::vector<double> terms(alpha + 1);
  for (int k = 0; k <= alpha; ++k) {
    const double kd = k;
    const double log_binom =
        lgamma_a1 - std::lgamma(kd + 1.0) - std::lgamma(a - kd + 1.0);
    terms[k] = log_binom + (a - kd) * log_1mq + kd * log_q +
               (kd * kd - kd) / (2.0 * sigma * sigma);
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  const double log_a = top + std::log(sum);
  // log_a is mathematically >= 0; rounding can push it slightly below.
  return std::max(0.0, log_a / (a - 1.0));
}

// Accepts a real-valued order and rejects anything that is not an integer.
inline double RdpSubsampledGaussian(double q, double sigma, double alpha) {
  internal::Require(std::isfinite(alpha) && alpha == std::floor(alpha) &&
                        alpha >= 2.0,
                    ErrorCode::kInvalidOrder,
                    "RDP order must be an integer >= 2");
  return RdpSubsampledGaussian(q, sigma, static_cast<int>(alpha));
}

inline RdpCurve ComputeRdpCurve(double q, double sigma,
                                const std::vector<int>& orders) {
  RdpCurve curve;
  curve.reserve(orders.size());
  for (int order : orders) {
    curve.push_back({order, RdpSubsampledGaussian(q, sigma, order)});
  }
  return curve;
}

// eps = min_alpha T * eps_RDP(alpha) + log(1/delta) / (alpha - 1).
inline EpsilonResult ComposeAndConvert(const AccountingParams& params,
                                       const std::vector<int>& orders) {
  params.Validate();
  internal::Require(!orders.empty(), ErrorCode::kInvalidParameter,
                    "order list must not be empty");
  EpsilonResult best{std::numeric_limits<double>::infinity(), 0};
  const double log_inv_delta = -std::log(params.delta);
  for (int order : orders) {
    const double rdp = RdpSubsampledGaussian(params.sampling_rate,
                                             params.noise_multiplier, order);
    const double eps = static_cast<double>(params.steps) * rdp +
                       log_inv_delta / (order - 1.0);
    if (eps < best.epsilon) best = {eps, order};
  }
  return best;
}

inline EpsilonResult ComposeAndConvert(const AccountingParams& params) {
  return ComposeAndConvert(params, DefaultOrders());
}

// Smallest noise multiplier in [0.3, 100] meeting the target, by bisection.
inline CalibrationResult CalibrateNoise(double target_epsilon, double delta,
                                        double q, long long steps,
                                        const std::vector<int>& orders) {
  internal::Require(target_epsilon > 0.0, ErrorCode::kInvalidParameter,
                    "target epsilon must be positive");
  auto eps_at = [&](double sigma) {
    return ComposeAndConvert({q, steps, sigma, delta}, orders);
  };
  double lo = kMinCalibrationSigma;
  double hi = kMaxCalibrationSigma;
  EpsilonResult at_hi = eps_at(hi);
  if (at_hi.epsilon > target_epsilon) {
    throw FiberError(ErrorCode::kCalibrationFailure,
                     "target epsilon " + std::to_string(target_epsilon) +
                         " unreachable with noise multiplier <= 100");
  }
  const EpsilonResult at_lo = eps_at(lo);
  if (at_lo.epsilon <= target_epsilon) return {lo, at_lo.epsilon, at_lo.order};
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    const EpsilonResult at_mid = eps_at(mid);
    if (at_mid.epsilon <= target_epsilon) {
      hi = mid;
      at_hi = at_mid;
    } else {
      lo = mid;
    }
  }
  return {hi, at_hi.epsilon, at_hi.order};
}

inline CalibrationResult CalibrateNoise(double target_epsilon, double delta,
                                        double q, long long steps) {
  return CalibrateNoise(target_epsilon, delta, q, steps, DefaultOrders());
}

}  // namespace fiber

#endif  // FIBER_PRIVACY_HPP_
