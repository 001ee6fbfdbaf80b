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

// DP-noise variance attenuation of stable linear filters.
//
// A filter z_t = M z_{t-1} + G w_t, y_t = H z_t driven by i.i.d. noise of
// variance s2 has stationary output variance A * s2, where A is the squared
// l2 gain sum_j h_j^2 = H Sigma H^T / s2 and Sigma solves
// Sigma = M Sigma M^T + s2 G G^T. Three routes are provided (closed form,
// Lyapunov fixed point, impulse-response sum) plus a Monte-Carlo estimate.

#ifndef FIBER_ATTENUATION_HPP_
#define FIBER_ATTENUATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fiber/error.hpp"
#include "fiber/filters.hpp"
#include "fiber/rng.hpp"

namespace fiber {

// (2 - w) / (4 - 3w), the innovation filter's attenuation.
inline double AInnovation(double omega) {
  internal::Require(omega > 0.0 && omega <= 1.0, ErrorCode::kDomain,
                    "omega must lie in (0, 1]");
  return (2.0 - omega) / (4.0 - 3.0 * omega);
}

// k / (2 - k), the gradient-state EMA's attenuation.
inline double AState(double kappa) {
  internal::Require(kappa > 0.0 && kappa <= 1.0, ErrorCode::kDomain,
                    "kappa must lie in (0, 1]");
  return kappa / (2.0 - kappa);
}

inline constexpr double kStabilityMargin = 1e-8;

struct StateSpaceFilter {
  Eigen::MatrixXd transition;  // M
  Eigen::VectorXd noise_input;  // G
  Eigen::RowVectorXd output;    // H

  Eigen::Index order() const { return transition.rows(); }

  double SpectralRadius() const {
    if (transition.size() == 0) return 0.0;
    return transition.eigenvalues().cwiseAbs().maxCoeff();
  }

  // Throws unless the shapes agree and rho(M) < 1 - kStabilityMargin.
  void Validate() const {
    const Eigen::Index n = transition.rows();
    internal::Require(n >= 1 && transition.cols() == n &&
                          noise_input.size() == n && output.size() == n,
                      ErrorCode::kDimensionMismatch,
                      "state-space filter shapes do not agree");
    if (SpectralRadius() >= 1.0 - kStabilityMargin) {
      throw FiberError(ErrorCode::kInstability,
                       "filter is not Schur-stable: spectral radius " +
                           std::to_string(SpectralRadius()));
    }
  }
};

// State z = [g~, r]: M = [[1-w, 1-w], [-w, 1-w]], G = w [1, 1]^T, H = [1, 0].
inline StateSpaceFilter InnovationRealization(double omega) {
  internal::Require(omega > 0.0 && omega <= 1.0, ErrorCode::kDomain,
                    "omega must lie in (0, 1]");
  StateSpaceFilter f;
  f.transition.resize(2, 2);
  f.transition << 1.0 - omega, 1.0 - omega, -omega, 1.0 - omega;
  f.noise_input = Eigen::Vector2d(omega, omega);
  f.output = Eigen::RowVector2d(1.0, 0.0);
  return f;
}

inline StateSpaceFilter EmaRealization(double kappa) {
  internal::Require(kappa > 0.0 && kappa <= 1.0, ErrorCode::kDomain,
                    "kappa must lie in (0, 1]");
  StateSpaceFilter f;
  f.transition = Eigen::MatrixXd::Constant(1, 1, 1.0 - kappa);
  f.noise_input = Eigen::VectorXd::Constant(1, kappa);
  f.output = Eigen::RowVectorXd::Constant(1, 1.0);
  return f;
}

struct StationaryCovariance {
  Eigen::MatrixXd sigma;
  long iterations = 0;
  double residual = 0.0;  // max-norm of Sigma - M Sigma M^T - Q
};

// Fixed-point iteration Sigma <- M Sigma M^T + s2 G G^T from zero until the
// max-norm change drops below `tol`.
inline StationaryCovariance LyapunovSolve(const StateSpaceFilter& filter,
                                          double sigma_w2, double tol = 1e-14,
                                          long max_iterations = 10'000'000) {
  filter.Validate();
  internal::Require(sigma_w2 >= 0.0, ErrorCode::kInvalidNoise,
                    "noise variance must be >= 0");
  const Eigen::MatrixXd& m = filter.transition;
  const Eigen::MatrixXd q =
      sigma_w2 * filter.noise_input * filter.noise_input.transpose();
  StationaryCovariance out;
  out.sigma = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (long it = 1; it <= max_iterations; ++it) {
    Eigen::MatrixXd next = m * out.sigma * m.transpose() + q;
    const double change = (next - out.sigma).cwiseAbs().maxCoeff();
    out.sigma = std::move(next);
    if (change < tol) {
      out.iterations = it;
      out.residual =
          (out.sigma - m * out.sigma * m.transpose() - q).cwiseAbs().maxCoeff();
      return out;
    }
  }
  throw FiberError(ErrorCode::kConvergenceFailure,
                   "Lyapunov iteration did not converge");
}

// A = H Sigma H^T / s2.
inline double AttenuationStateSpace(const StateSpaceFilter& filter,
                                    double sigma_w2 = 1.0) {
  internal::Require(sigma_w2 > 0.0, ErrorCode::kInvalidNoise,
                    "noise variance must be positive");
  const StationaryCovariance cov = LyapunovSolve(filter, sigma_w2);
  const double var = (filter.output * cov.sigma * filter.output.transpose())(0, 0);
  return var / sigma_w2;
}

struct ImpulseGain {
  double attenuation;       // sum of h_j^2 over the truncated response
  double truncation_error;  // bound on the omitted tail
};

inline ImpulseGain AttenuationImpulse(std::span<const double> h,
                                      double tail_bound) {
  internal::Require(tail_bound >= 0.0, ErrorCode::kInvalidParameter,
                    "tail bound must be >= 0");
  double sum = 0.0;
  for (double x : h) sum += x * x;
  return {sum, tail_bound};
}

// Tail estimate for sum_{j>=n} h_j^2 assuming |h_j| <= K decay^j, with K the
// tightest envelope constant seen on the truncated response.
inline double GeometricTailBound(std::span<const double> h, double decay) {
  internal::Require(decay >= 0.0 && decay < 1.0, ErrorCode::kDomain,
                    "decay rate must lie in [0, 1)");
  if (decay == 0.0) return 0.0;
  const double n = static_cast<double>(h.size());
  double envelope = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double scaled =
        h[j] * h[j] * std::pow(decay, 2.0 * (n - static_cast<double>(j)));
    envelope = std::max(envelope, scaled);
  }
  return envelope / (1.0 - decay * decay);
}

// Impulse-sum route for a state-space filter: builds h adaptively and pairs
// the sum with the geometric tail estimate at rate rho(M).
inline ImpulseGain AttenuationImpulse(const StateSpaceFilter& filter,
                                      double tol = 1e-12,
                                      long max_length = 100'000) {
  filter.Validate();
  std::vector<double> h;
  Eigen::VectorXd z = filter.noise_input;
  int quiet = 0;
  while (static_cast<long>(h.size()) < max_length) {
    const double out = filter.output.dot(z);
    h.push_back(out);
    quiet = std::abs(out) < tol ? quiet + 1 : 0;
    if (quiet >= 16) break;
    z = filter.transition * z;
  }
  return AttenuationImpulse(h, GeometricTailBound(h, filter.SpectralRadius()));
}

// Var(g~_t) of the innovation filter driven by i.i.d. noise from the zero
// state, for t = 0..t_max: Sigma_t = M Sigma_{t-1} M^T + Q, Sigma_{-1} = 0.
inline std::vector<double> FiniteTimeVarianceTrace(double omega, long t_max,
                                                   double sigma_w2) {
  internal::Require(omega > 0.0 && omega <= 1.0, ErrorCode::kDomain,
                    "omega must lie in (0, 1]");
  internal::Require(t_max >= 0, ErrorCode::kDomain, "t must be >= 0");
  const double rho = 1.0 - omega;
  Eigen::Matrix2d m;
  m << rho, rho, -omega, rho;
  const Eigen::Matrix2d q =
      Eigen::Matrix2d::Constant(omega * omega * sigma_w2);
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(t_max) + 1);
  for (long t = 0; t <= t_max; ++t) {
    sigma = m * sigma * m.transpose() + q;
    trace.push_back(sigma(0, 0));
  }
  return trace;
}

inline double FiniteTimeVariance(double omega, long t, double sigma_w2) {
  return FiniteTimeVarianceTrace(omega, t, sigma_w2).back();
}

struct MonteCarloOptions {
  long steps = 20'000;
  long burn_in = 1'000;
  int replicas = 16;
  std::size_t dimension = 1;
  std::uint64_t seed = 0;
};

struct MonteCarloEstimate {
  double attenuation;
  double standard_error;
  long effective_samples;
};

// Drives freshly built filters with i.i.d. N(0, s2) and estimates the
// steady-state output variance ratio. Each replica owns its noise stream;
// the standard error comes from the spread of per-replica means.
template <typename Factory>
MonteCarloEstimate MonteCarloAttenuation(Factory make_filter, double sigma_w2,
                                         const MonteCarloOptions& opts) {
  internal::Require(sigma_w2 > 0.0, ErrorCode::kInvalidNoise,
                    "noise variance must be positive");
  internal::Require(opts.replicas >= 2, ErrorCode::kInvalidParameter,
                    "need at least two replicas");
  internal::Require(opts.burn_in >= 0 && opts.burn_in < opts.steps,
                    ErrorCode::kInvalidParameter,
                    "burn-in must be shorter than the run");
  const double sigma = std::sqrt(sigma_w2);
  std::vector<double> replica_means(opts.replicas);
  std::vector<double> noise(opts.dimension);
  for (int rep = 0; rep < opts.replicas; ++rep) {
    auto filter = make_filter(opts.dimension);
    double sum_sq = 0.0;
    for (long t = 0; t < opts.steps; ++t) {
      CounterRng rng(opts.seed, static_cast<std::uint64_t>(t),
                     Purpose::kMonteCarlo, static_cast<std::uint32_t>(rep));
      FillGaussian(rng, sigma, noise);
      const ParamVector& y = filter.Step(noise);
      if (t < opts.burn_in) continue;
      for (double v : y) sum_sq += v * v;
    }
    replica_means[rep] =
        sum_sq / (static_cast<double>(opts.steps - opts.burn_in) *
                  static_cast<double>(opts.dimension));
  }
  double mean = 0.0;
  for (double m : replica_means) mean += m;
  mean /= opts.replicas;
  double ss = 0.0;
  for (double m : replica_means) ss += (m - mean) * (m - mean);
  const double sd = std::sqrt(ss / (opts.replicas - 1));
  return {mean / sigma_w2, sd / std::sqrt(static_cast<double>(opts.replicas)) / sigma_w2,
          static_cast<long>(opts.replicas) * (opts.steps - opts.burn_in) *
              static_cast<long>(opts.dimension)};
}

}  // namespace fiber

#endif  // FIBER_ATTENUATION_HPP_
