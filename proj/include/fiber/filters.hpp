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

// Temporal denoisers for privatized gradient streams.
//
// All filters are coordinate-wise and start from the zero state. The
// innovation filter is the tied-gain constant-gain alpha-beta filter:
//   nu_t = g_t - g~_{t-1},  r_t = (1-w) r_{t-1} + w nu_t,  g~_t = g~_{t-1} + r_t.
// The EMA is g~_t = (1-k) g~_{t-1} + k g_t. The untied time-varying
// alpha-beta Kalman filter with its Riccati covariance recursion is kept for
// diagnostics.

#ifndef FIBER_FILTERS_HPP_
#define FIBER_FILTERS_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fiber/error.hpp"
#include "fiber/types.hpp"

namespace fiber {

template <typename F>
concept LinearFilter = requires(F f, std::span<const double> g) {
  { f.Step(g) } -> std::convertible_to<const ParamVector&>;
  { f.dimension() } -> std::convertible_to<std::size_t>;
};

class InnovationFilter {
 public:
  InnovationFilter(std::size_t dimension, double omega)
      : g_tilde_(dimension, 0.0), r_(dimension, 0.0), omega_(omega) {
    internal::Require(omega > 0.0 && omega <= 1.0, ErrorCode::kDomain,
                      "innovation gain omega must lie in (0, 1]");
  }

  const ParamVector& Step(std::span<const double> g) {
    internal::RequireSameSize(g.size(), g_tilde_.size(), "innovation filter");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double nu = g[i] - g_tilde_[i];
      r_[i] = (1.0 - omega_) * r_[i] + omega_ * nu;
      g_tilde_[i] += r_[i];
    }
    return g_tilde_;
  }

  const ParamVector& g_tilde() const { return g_tilde_; }
  const ParamVector& r() const { return r_; }
  double omega() const { return omega_; }
  std::size_t dimension() const { return g_tilde_.size(); }

  // Restores a checkpointed state.
  void SetState(ParamVector g_tilde, ParamVector r) {
    internal::RequireSameSize(g_tilde.size(), r.size(), "innovation state");
    g_tilde_ = std::move(g_tilde);
    r_ = std::move(r);
  }

 private:
  ParamVector g_tilde_;
  ParamVector r_;
  double omega_;
};

class EmaFilter {
 public:
  EmaFilter(std::size_t dimension, double kappa)
      : g_tilde_(dimension, 0.0), kappa_(kappa) {
    internal::Require(kappa > 0.0 && kappa <= 1.0, ErrorCode::kDomain,
                      "EMA gain kappa must lie in (0, 1]");
  }

  const ParamVector& Step(std::span<const double> g) {
    internal::RequireSameSize(g.size(), g_tilde_.size(), "EMA filter");
    for (std::size_t i = 0; i < g.size(); ++i) {
      g_tilde_[i] = (1.0 - kappa_) * g_tilde_[i] + kappa_ * g[i];
    }
    return g_tilde_;
  }

  const ParamVector& g_tilde() const { return g_tilde_; }
  double kappa() const { return kappa_; }
  std::size_t dimension() const { return g_tilde_.size(); }

  void SetState(ParamVector g_tilde) {
    internal::RequireSameSize(g_tilde.size(), g_tilde_.size(), "EMA state");
    g_tilde_ = std::move(g_tilde);
  }

 private:
  ParamVector g_tilde_;
  double kappa_;
};

// Posterior covariance [[p, c], [c, q]] of the (s, r) constant-velocity state.
struct Covariance2 {
  double p = 0.0;
  double c = 0.0;
  double q = 0.0;
};

struct AlphaBetaNoise {
  double sigma_s2 = 0.0;  // level process noise
  double sigma_r2 = 0.0;  // drift process noise
  double sigma_w2 = 1.0;  // observation noise
};

struct Gains {
  double alpha = 0.0;
  double beta = 0.0;
};

// One step of the Riccati recursion: predict, gain, correct. Returns the
// gains and updates `cov` in place; `predicted` receives P^-.
inline Gains RiccatiStep(const AlphaBetaNoise& noise, Covariance2& cov,
                         Covariance2* predicted = nullptr) {
  const Covariance2 prior{cov.p + 2.0 * cov.c + cov.q + noise.sigma_s2,
                          cov.c + cov.q, cov.q + noise.sigma_r2};
  const double innovation_var = prior.p + noise.sigma_w2;
  const Gains gains{prior.p / innovation_var, prior.c / innovation_var};
  const double shrink = noise.sigma_w2 / innovation_var;
  cov.p = shrink * prior.p;
  cov.c = shrink * prior.c;
  cov.q = prior.q - prior.c * prior.c / innovation_var;
  if (predicted != nullptr) *predicted = prior;
  return gains;
}

struct AlphaBetaOutput {
  double s_hat;
  double alpha;
  double beta;
};

// Scalar time-varying alpha-beta Kalman filter for the constant-velocity model
//   s_t = s_{t-1} + r_{t-1} + eta_t,  r_t = r_{t-1} + zeta_t,  g_t = s_t + w_t.
class AlphaBetaKalman {
 public:
  explicit AlphaBetaKalman(const AlphaBetaNoise& noise,
                           const Covariance2& initial_covariance = {})
      : noise_(noise), cov_(initial_covariance) {
    internal::Require(noise.sigma_w2 > 0.0, ErrorCode::kInvalidNoise,
                      "observation noise variance must be positive");
    internal::Require(noise.sigma_s2 >= 0.0 && noise.sigma_r2 >= 0.0,
                      ErrorCode::kInvalidNoise,
                      "process noise variances must be >= 0");
  }

  AlphaBetaOutput Step(double g) {
    gains_ = RiccatiStep(noise_, cov_, &predicted_);
    const double s_pred = s_hat_ + r_hat_;
    const double e = g - s_pred;
    s_hat_ = s_pred + gains_.alpha * e;
    r_hat_ = r_hat_ + gains_.beta * e;
    return {s_hat_, gains_.alpha, gains_.beta};
  }

  double s_hat() const { return s_hat_; }
  double r_hat() const { return r_hat_; }
  const Covariance2& covariance() const { return cov_; }
  const Covariance2& predicted_covariance() const { return predicted_; }
  Gains gains() const { return gains_; }

 private:
  AlphaBetaNoise noise_;
  Covariance2 cov_;
  Covariance2 predicted_;
  Gains gains_;
  double s_hat_ = 0.0;
  double r_hat_ = 0.0;
};

// Coordinate-wise wrapper. All coordinates share the noise model, so they
// share one covariance recursion.
class AlphaBetaKalmanFilter {
 public:
  AlphaBetaKalmanFilter(std::size_t dimension, const AlphaBetaNoise& noise,
                        const Covariance2& initial_covariance = {})
      : noise_(noise),
        cov_(initial_covariance),
        s_hat_(dimension, 0.0),
        r_hat_(dimension, 0.0) {
    internal::Require(noise.sigma_w2 > 0.0, ErrorCode::kInvalidNoise,
                      "observation noise variance must be positive");
  }

  const ParamVector& Step(std::span<const double> g) {
    internal::RequireSameSize(g.size(), s_hat_.size(), "alpha-beta filter");
    gains_ = RiccatiStep(noise_, cov_);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s_pred = s_hat_[i] + r_hat_[i];
      const double e = g[i] - s_pred;
      s_hat_[i] = s_pred + gains_.alpha * e;
      r_hat_[i] += gains_.beta * e;
    }
    return s_hat_;
  }

  const ParamVector& s_hat() const { return s_hat_; }
  Gains gains() const { return gains_; }
  std::size_t dimension() const { return s_hat_.size(); }

 private:
  AlphaBetaNoise noise_;
  Covariance2 cov_;
  ParamVector s_hat_;
  ParamVector r_hat_;
  Gains gains_;
};

struct SteadyStateGains {
  Gains gains;
  Covariance2 covariance;
  long iterations;
};

// Iterates the Riccati recursion until successive gains move by < tol.
inline SteadyStateGains ComputeSteadyStateGains(
    const AlphaBetaNoise& noise, const Covariance2& initial = {},
    double tol = 1e-12, long max_iterations = 1'000'000) {
  internal::Require(noise.sigma_w2 > 0.0, ErrorCode::kInvalidNoise,
                    "observation noise variance must be positive");
  Covariance2 cov = initial;
  Gains prev = RiccatiStep(noise, cov);
  for (long it = 1; it < max_iterations; ++it) {
    const Gains next = RiccatiStep(noise, cov);
    if (std::abs(next.alpha - prev.alpha) < tol &&
        std::abs(next.beta - prev.beta) < tol) {
      return {next, cov, it + 1};
    }
    prev = next;
  }
  throw FiberError(ErrorCode::kConvergenceFailure,
                   "Riccati recursion did not converge");
}

// Feeds a unit impulse then zeros through a freshly built one-dimensional
// filter and records the outputs h_0..h_{n-1}.
template <LinearFilter Filter>
std::vector<double> ImpulseResponse(Filter filter, std::size_t n) {
  internal::Require(filter.dimension() == 1, ErrorCode::kDimensionMismatch,
                    "impulse response needs a one-dimensional filter");
  std::vector<double> h;
  h.reserve(n);
  double input = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    h.push_back(filter.Step(std::span<const double>(&input, 1))[0]);
    input = 0.0;
  }
  return h;
}

// Like ImpulseResponse but stops once `quiet_run` consecutive outputs fall
// below `tol` in magnitude, or at `max_length` terms.
template <LinearFilter Filter>
std::vector<double> AdaptiveImpulseResponse(Filter filter, double tol = 1e-12,
                                            std::size_t max_length = 100'000,
                                            std::size_t quiet_run = 16) {
  internal::Require(filter.dimension() == 1, ErrorCode::kDimensionMismatch,
                    "impulse response needs a one-dimensional filter");
  std::vector<double> h;
  double input = 1.0;
  std::size_t quiet = 0;
  while (h.size() < max_length) {
    const double out = filter.Step(std::span<const double>(&input, 1))[0];
    input = 0.0;
    h.push_back(out);
    quiet = std::abs(out) < tol ? quiet + 1 : 0;
    if (quiet >= quiet_run) break;
  }
  return h;
}

}  // namespace fiber

#endif  // FIBER_FILTERS_HPP_
