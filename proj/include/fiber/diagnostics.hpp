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

// Empirical checks of the filtering story.
//
// * A synthetic drift benchmark comparing the innovation filter against the
//   EMA on constant-velocity (CV) and random-walk (RW) latent signals.
// * Paired-run differencing: two replicas that differ only in their DP noise
//   stream. Their observation difference is (nearly) pure noise, so the
//   ratio of filtered to raw projected variance estimates the attenuation.
// * An audit of the uncorrelated-signal/noise assumption behind the
//   filter-aware correction.

#ifndef FIBER_DIAGNOSTICS_HPP_
#define FIBER_DIAGNOSTICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fiber/error.hpp"
#include "fiber/filters.hpp"
#include "fiber/models.hpp"
#include "fiber/optimizers.hpp"
#include "fiber/rng.hpp"
#include "fiber/training.hpp"
#include "fiber/types.hpp"

namespace fiber {

// ---------------------------------------------------------------------------
// Drift signals.

enum class DriftModel { kConstantVelocity, kRandomWalk };

inline std::string_view DriftModelName(DriftModel m) {
  return m == DriftModel::kConstantVelocity ? "CV" : "RW";
}

inline DriftModel ParseDriftModel(std::string_view name) {
  if (name == "CV" || name == "cv") return DriftModel::kConstantVelocity;
  if (name == "RW" || name == "rw") return DriftModel::kRandomWalk;
  throw FiberError(ErrorCode::kInvalidParameter,
                   "unknown drift model '" + std::string(name) + "'");
}

// CV:  s_t = s_{t-1} + r_{t-1} + eta_t,  r_t = r_{t-1} + zeta_t
// RW:  s_t = s_{t-1} + eta_t
// with s_0 = 0, eta ~ N(0, sigma_s2), zeta ~ N(0, sigma_r2) and
// r_0 ~ N(initial_drift, initial_drift_var). Observations g_t = s_t + w_t.
struct DriftConfig {
  DriftModel model = DriftModel::kConstantVelocity;
  std::size_t dimension = 16;
  long horizon = 400;
  double sigma_s2 = 0.0;
  double sigma_r2 = 0.0;
  double sigma_w2 = 1.0;
  double initial_drift = 0.0;
  double initial_drift_var = 0.0;
  std::uint64_t seed = 0;

  void Validate() const {
    internal::Require(horizon >= 1, ErrorCode::kEmptyRun,
                      "drift horizon must be >= 1");
    internal::Require(dimension >= 1, ErrorCode::kInvalidParameter,
                      "drift dimension must be >= 1");
    internal::Require(sigma_s2 >= 0.0 && sigma_r2 >= 0.0 && sigma_w2 >= 0.0 &&
                          initial_drift_var >= 0.0,
                      ErrorCode::kInvalidParameter,
                      "drift variances must be >= 0");
  }
};

struct DriftSignal {
  std::vector<ParamVector> latent;        // s_1 .. s_T
  std::vector<ParamVector> observations;  // g_1 .. g_T
};

inline DriftSignal GenerateDriftSignal(const DriftConfig& cfg) {
  cfg.Validate();
  const std::size_t d = cfg.dimension;
  std::normal_distribution<double> normal(0.0, 1.0);
  ParamVector s(d, 0.0);
  ParamVector r(d, 0.0);
  if (cfg.model == DriftModel::kConstantVelocity) {
    CounterRng init(cfg.seed, 0, Purpose::kDrift, /*substream=*/2);
    const double sd = std::sqrt(cfg.initial_drift_var);
    for (double& x : r) x = cfg.initial_drift + sd * normal(init);
  }
  const double sd_s = std::sqrt(cfg.sigma_s2);
  const double sd_r = std::sqrt(cfg.sigma_r2);
  const double sd_w = std::sqrt(cfg.sigma_w2);
  DriftSignal out;
  out.latent.reserve(cfg.horizon);
  out.observations.reserve(cfg.horizon);
  for (long t = 1; t <= cfg.horizon; ++t) {
    CounterRng process(cfg.seed, t, Purpose::kDrift, 0);
    CounterRng noise(cfg.seed, t, Purpose::kDrift, 1);
    for (std::size_t i = 0; i < d; ++i) {
      s[i] += sd_s * normal(process);
      if (cfg.model == DriftModel::kConstantVelocity) {
        s[i] += r[i];
        r[i] += sd_r * normal(process);
      }
    }
    ParamVector g(s);
    for (double& x : g) x += sd_w * normal(noise);
    out.latent.push_back(s);
    out.observations.push_back(std::move(g));
  }
  return out;
}

// (1/T) sum_t ||estimate_t - latent_t||^2 after running `filter` from zero.
template <LinearFilter Filter>
double TrackingMse(Filter filter, const DriftSignal& signal) {
  internal::Require(!signal.observations.empty(), ErrorCode::kEmptyRun,
                    "tracking MSE over an empty run");
  double total = 0.0;
  for (std::size_t t = 0; t < signal.observations.size(); ++t) {
    const ParamVector& est = filter.Step(signal.observations[t]);
    const ParamVector& s = signal.latent[t];
    for (std::size_t i = 0; i < s.size(); ++i) {
      total += (est[i] - s[i]) * (est[i] - s[i]);
    }
  }
  return total / static_cast<double>(signal.observations.size());
}

// 100 (MSE_ema - MSE_innov) / MSE_ema.
inline double DriftImprovement(double mse_ema, double mse_innov) {
  internal::Require(mse_ema > 0.0, ErrorCode::kDegenerateVariance,
                    "reference MSE must be positive");
  return 100.0 * (mse_ema - mse_innov) / mse_ema;
}

// Configuration grid. Noise variance at privacy level eps is 1/eps^2; the
// i-th configuration uses nominal SNR snrs[i] to scale the process noises and
// seed seed_base + i.
struct DriftBenchmarkConfig {
  std::size_t dimension = 16;
  long horizon = 400;
  double omega = 0.9;
  double kappa = 0.6;
  std::vector<double> epsilons{0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> snrs{0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0};
  std::uint64_t seed_base = 0;
  double cv_position_scale = 0.01;
  double cv_drift_scale = 0.001;
  double cv_initial_drift_scale = 0.05;
  double rw_scale = 0.0025;

  DriftConfig Cell(DriftModel model, double eps, std::size_t i) const {
    internal::Require(eps > 0.0, ErrorCode::kInvalidParameter,
                      "privacy level must be positive");
    DriftConfig cfg;
    cfg.model = model;
    cfg.dimension = dimension;
    cfg.horizon = horizon;
    cfg.sigma_w2 = 1.0 / (eps * eps);
    cfg.seed = seed_base + i;
    const double snr = snrs.at(i);
    if (model == DriftModel::kConstantVelocity) {
      cfg.sigma_s2 = cv_position_scale * snr;
      cfg.sigma_r2 = cv_drift_scale * snr;
      cfg.initial_drift_var = cv_initial_drift_scale * snr;
    } else {
      cfg.sigma_s2 = rw_scale * snr;
    }
    return cfg;
  }
};

struct DriftRow {
  DriftModel model;
  double eps;
  double snr;
  std::uint64_t seed;
  double mse_ema;
  double mse_innov;
  double improvement;
  bool win;
};

struct DriftWinRate {
  DriftModel model;
  double eps;
  int wins;
  int configurations;
};

struct DriftBenchmarkResult {
  std::vector<DriftRow> rows;
  std::vector<DriftWinRate> win_rates;
};

inline DriftBenchmarkResult DriftBenchmark(
    const DriftBenchmarkConfig& cfg,
    const std::vector<DriftModel>& models = {DriftModel::kConstantVelocity,
                                             DriftModel::kRandomWalk}) {
  internal::Require(cfg.horizon >= 1, ErrorCode::kEmptyRun,
                    "drift horizon must be >= 1");
  internal::Require(!cfg.snrs.empty() && !cfg.epsilons.empty(),
                    ErrorCode::kInvalidParameter,
                    "drift grid must not be empty");
  DriftBenchmarkResult out;
  for (DriftModel model : models) {
    for (double eps : cfg.epsilons) {
      DriftWinRate rate{model, eps, 0, static_cast<int>(cfg.snrs.size())};
      for (std::size_t i = 0; i < cfg.snrs.size(); ++i) {
        const DriftConfig cell = cfg.Cell(model, eps, i);
        const DriftSignal signal = GenerateDriftSignal(cell);
        const double mse_ema =
            TrackingMse(EmaFilter(cfg.dimension, cfg.kappa), signal);
        const double mse_innov =
            TrackingMse(InnovationFilter(cfg.dimension, cfg.omega), signal);
        const double imp = DriftImprovement(mse_ema, mse_innov);
        out.rows.push_back({model, eps, cfg.snrs[i], cell.seed, mse_ema,
                            mse_innov, imp, imp > 0.0});
        rate.wins += imp > 0.0;
      }
      out.win_rates.push_back(rate);
    }
  }
  return out;
}

// Presentation-only clipping of improvements to [-200, 100] percent.
inline double ClipImprovementForDisplay(double improvement) {
  return std::clamp(improvement, -200.0, 100.0);
}

// ---------------------------------------------------------------------------
// Projection probes.

struct ProjectionProbe {
  std::vector<ParamVector> directions;
  std::uint64_t seed = 0;

  std::size_t count() const { return directions.size(); }
  std::size_t dimension() const {
    return directions.empty() ? 0 : directions.front().size();
  }

  double Project(std::size_t k, std::span<const double> x) const {
    const ParamVector& u = directions.at(k);
    internal::RequireSameSize(u.size(), x.size(), "probe projection");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * x[i];
    return s;
  }
};

// k random unit vectors in R^dim; orthonormal when k <= dim.
inline ProjectionProbe MakeProjectionProbe(std::size_t dimension,
                                           std::size_t k, std::uint64_t seed) {
  internal::Require(dimension >= 1 && k >= 1, ErrorCode::kInvalidParameter,
                    "probe needs dimension >= 1 and k >= 1");
  ProjectionProbe probe;
  probe.seed = seed;
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool orthogonalize = k <= dimension;
  for (std::size_t j = 0; j < k; ++j) {
    CounterRng rng(seed, j, Purpose::kProbe);
    ParamVector u(dimension);
    double norm = 0.0;
    // Re-draw in the (measure-zero) event of a degenerate direction.
    for (std::uint32_t attempt = 0; norm < 1e-6; ++attempt) {
      for (double& x : u) x = normal(rng);
      if (orthogonalize) {
        for (int pass = 0; pass < 2; ++pass) {
          for (const ParamVector& v : probe.directions) {
            double dot = 0.0;
            for (std::size_t i = 0; i < dimension; ++i) dot += u[i] * v[i];
            for (std::size_t i = 0; i < dimension; ++i) u[i] -= dot * v[i];
          }
        }
      }
      norm = L2Norm(u);
      internal::Require(attempt < 64, ErrorCode::kConvergenceFailure,
                        "could not draw a probe direction");
    }
    for (double& x : u) x /= norm;
    probe.directions.push_back(std::move(u));
  }
  return probe;
}

namespace internal {

inline double SampleVariance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

inline double ProbeVariance(const ProjectionProbe& probe,
                            std::span<const double> x) {
  std::vector<double> proj(probe.count());
  for (std::size_t k = 0; k < probe.count(); ++k) proj[k] = probe.Project(k, x);
  return SampleVariance(proj);
}

}  // namespace internal

// ---------------------------------------------------------------------------
// Paired-run attenuation.

struct PairedRunConfig {
  ModelSpec model;
  OptimizerConfig optimizer;  // FIBER variant; omega read from here
  long steps = 800;
  long burn_in = 200;
  std::uint64_t data_seed = 0;
  std::uint64_t noise_seed_a = 1;
  std::uint64_t noise_seed_b = 2;

  void Validate() const {
    optimizer.Validate();
    internal::Require(steps >= 1, ErrorCode::kEmptyRun,
                      "paired run needs >= 1 step");
    internal::Require(burn_in >= 0 && burn_in < steps,
                      ErrorCode::kInvalidWindow,
                      "burn-in must lie in [0, steps)");
    internal::Require(noise_seed_a != noise_seed_b,
                      ErrorCode::kInvalidParameter,
                      "replicas need distinct noise seeds");
    internal::Require(optimizer.dp.sigma_w() > 0.0,
                      ErrorCode::kDegenerateVariance,
                      "paired-run attenuation needs sigma_w > 0");
  }
};

struct PairedRunResult {
  std::vector<double> rho;        // per step
  std::vector<double> r;          // per step
  std::vector<double> var_raw;    // Var_u(u^T dg_t)
  std::vector<double> var_filt;   // Var_u(u^T dg~_t)
  double rho_bar = 0.0;           // ratio of steady-state mean variances
  double r_bar = 0.0;
  double sigma_w2 = 0.0;
};

inline PairedRunResult PairedRunAttenuation(const PairedRunConfig& cfg,
                                            const Dataset& data,
                                            const ProjectionProbe& probe) {
  cfg.Validate();
  internal::Require(probe.count() >= 2, ErrorCode::kInvalidParameter,
                    "paired run needs >= 2 probe directions");
  internal::RequireSameSize(probe.dimension(), cfg.model.ParameterCount(),
                            "probe dimension");
  Trainer a(cfg.model, data, cfg.optimizer, cfg.data_seed, cfg.noise_seed_a);
  Trainer b(cfg.model, data, cfg.optimizer, cfg.data_seed, cfg.noise_seed_b);
  PairedRunResult out;
  const double sw = cfg.optimizer.dp.sigma_w();
  out.sigma_w2 = sw * sw;
  const std::size_t dim = cfg.model.ParameterCount();
  ParamVector dg(dim), dgt(dim);
  double sum_raw = 0.0, sum_filt = 0.0;
  long counted = 0;
  for (long t = 0; t < cfg.steps; ++t) {
    const StepReport ra = a.Step();
    const StepReport rb = b.Step();
    for (std::size_t i = 0; i < dim; ++i) {
      dg[i] = ra.observation.value[i] - rb.observation.value[i];
      dgt[i] = ra.filtered[i] - rb.filtered[i];
    }
    const double v_raw = internal::ProbeVariance(probe, dg);
    const double v_filt = internal::ProbeVariance(probe, dgt);
    out.var_raw.push_back(v_raw);
    out.var_filt.push_back(v_filt);
    out.rho.push_back(v_raw > 0.0 ? v_filt / v_raw : 0.0);
    out.r.push_back(v_raw / (2.0 * out.sigma_w2));
    if (t >= cfg.burn_in) {
      sum_raw += v_raw;
      sum_filt += v_filt;
      ++counted;
    }
  }
  internal::Require(sum_raw > 0.0, ErrorCode::kDegenerateVariance,
                    "replica observations never differed");
  out.rho_bar = sum_filt / sum_raw;
  out.r_bar = sum_raw / static_cast<double>(counted) / (2.0 * out.sigma_w2);
  return out;
}

// ---------------------------------------------------------------------------
// Assumption audit.

struct AuditStatistics {
  double rho_hat = 0.0;           // Pearson correlation of s and n
  double cross_term_ratio = 0.0;  // |mean(s n)| / mean(n^2)
  double cv = 0.0;                // CV of the sliding-window mean of x^2
};

struct AuditReport {
  double omega = 0.0;
  long total_steps = 0;
  long warmup_steps = 0;
  long steady_steps = 0;
  long window = 0;
  AuditStatistics headline;            // projection index 0
  std::vector<AuditStatistics> per_probe;
};

// Coefficient of variation of the length-`window` moving average of x^2.
inline double SlidingWindowCv(std::span<const double> x, long window) {
  internal::Require(window >= 1 && window <= static_cast<long>(x.size()),
                    ErrorCode::kInvalidWindow,
                    "window must lie in [1, series length]");
  std::vector<double> levels;
  double acc = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    acc += x[t] * x[t];
    if (t >= static_cast<std::size_t>(window)) {
      acc -= x[t - window] * x[t - window];
    }
    if (t + 1 >= static_cast<std::size_t>(window)) {
      levels.push_back(acc / static_cast<double>(window));
    }
  }
  double mean = 0.0;
  for (double v : levels) mean += v;
  mean /= static_cast<double>(levels.size());
  if (mean <= 0.0) return 0.0;
  double ss = 0.0;
  for (double v : levels) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(levels.size()));
  // Sub-ulp jitter from the running sum reads as zero.
  return sd <= 1e-12 * mean ? 0.0 : sd / mean;
}

// Statistics from a projected filtered-gradient series x and the matching
// projected raw noise series y. n = innovation_filter(y), s = x - n; all
// statistics use steps [warmup, T).
inline AuditStatistics AuditStreams(std::span<const double> x,
                                    std::span<const double> y, double omega,
                                    long warmup, long window) {
  internal::RequireSameSize(x.size(), y.size(), "audit streams");
  const long total = static_cast<long>(x.size());
  internal::Require(warmup >= 0 && warmup < total, ErrorCode::kInvalidWindow,
                    "warmup must be smaller than the number of steps");
  InnovationFilter filter(1, omega);
  std::vector<double> s, n, xs;
  for (long t = 0; t < total; ++t) {
    const double nt = filter.Step(std::span<const double>(&y[t], 1))[0];
    if (t < warmup) continue;
    n.push_back(nt);
    s.push_back(x[t] - nt);
    xs.push_back(x[t]);
  }
  const double m = static_cast<double>(n.size());
  double ms = 0.0, mn = 0.0, sn = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    ms += s[i];
    mn += n[i];
    sn += s[i] * n[i];
    nn += n[i] * n[i];
  }
  ms /= m;
  mn /= m;
  double cov = 0.0, vs = 0.0, vn = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    cov += (s[i] - ms) * (n[i] - mn);
    vs += (s[i] - ms) * (s[i] - ms);
    vn += (n[i] - mn) * (n[i] - mn);
  }
  AuditStatistics out;
  out.rho_hat = vs > 0.0 && vn > 0.0 ? cov / std::sqrt(vs * vn) : 0.0;
  out.cross_term_ratio = nn > 0.0 ? std::abs(sn / m) / (nn / m) : 0.0;
  out.cv = SlidingWindowCv(xs, std::min<long>(window, static_cast<long>(xs.size())));
  return out;
}

struct AuditConfig {
  PairedRunConfig run;  // replica A's seeds drive the audited run
  long warmup = 100;
  long window = 100;
};

inline AuditReport AssumptionAudit(const AuditConfig& cfg, const Dataset& data,
                                   const ProjectionProbe& probe) {
  internal::Require(cfg.warmup >= 0 && cfg.warmup < cfg.run.steps,
                    ErrorCode::kInvalidWindow,
                    "warmup must be smaller than the number of steps");
  internal::Require(cfg.window >= 1 && cfg.window <= cfg.run.steps - cfg.warmup,
                    ErrorCode::kInvalidWindow,
                    "window must fit in the steady-state segment");
  cfg.run.optimizer.Validate();
  internal::RequireSameSize(probe.dimension(), cfg.run.model.ParameterCount(),
                            "probe dimension");
  Trainer trainer(cfg.run.model, data, cfg.run.optimizer, cfg.run.data_seed,
                  cfg.run.noise_seed_a);
  const std::size_t k = probe.count();
  std::vector<std::vector<double>> xs(k), ys(k);
  for (long t = 0; t < cfg.run.steps; ++t) {
    const StepReport rep = trainer.Step();
    for (std::size_t j = 0; j < k; ++j) {
      xs[j].push_back(probe.Project(j, rep.filtered));
      ys[j].push_back(probe.Project(j, rep.observation.noise));
    }
  }
  AuditReport report;
  report.omega = cfg.run.optimizer.omega;
  report.total_steps = cfg.run.steps;
  report.warmup_steps = cfg.warmup;
  report.steady_steps = cfg.run.steps - cfg.warmup;
  report.window = cfg.window;
  for (std::size_t j = 0; j < k; ++j) {
    report.per_probe.push_back(AuditStreams(xs[j], ys[j], report.omega,
                                            cfg.warmup, cfg.window));
  }
  report.headline = report.per_probe.front();
  return report;
}

}  // namespace fiber

#endif  // FIBER_DIAGNOSTICS_HPP_
