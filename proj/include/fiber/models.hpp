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

// Desk-scale models with exact per-example gradients, synthetic dataset
// generators, and minibatch sampling.
//
//   quadratic  f(theta; xi) = 1/2 ||theta - x||^2
//   linear     f = 1/2 (x^T theta - y)^2
//   logistic   f = BCE(sigmoid(x^T theta), y),  y in {0, 1}
//   mlp        one tanh hidden layer, logit output, BCE loss
//
// MLP parameters are laid out as [W1 (h x p, row-major) | b1 (h) | w2 (h) | b2].

#ifndef FIBER_MODELS_HPP_
#define FIBER_MODELS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiber/error.hpp"
#include "fiber/rng.hpp"
#include "fiber/types.hpp"

namespace fiber {

enum class ModelKind { kQuadratic, kLinear, kLogistic, kMlp };

inline std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kQuadratic: return "quadratic";
    case ModelKind::kLinear: return "linear";
    case ModelKind::kLogistic: return "logistic";
    case ModelKind::kMlp: return "mlp";
  }
  return "unknown";
}

inline ModelKind ParseModelKind(std::string_view name) {
  if (name == "quadratic") return ModelKind::kQuadratic;
  if (name == "linear") return ModelKind::kLinear;
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "mlp") return ModelKind::kMlp;
  throw FiberError(ErrorCode::kInvalidParameter,
                   "unknown model kind '" + std::string(name) + "'");
}

inline constexpr std::size_t kMaxMlpWidth = 32;

struct ModelSpec {
  ModelKind kind = ModelKind::kLogistic;
  std::size_t input_dim = 1;
  std::size_t hidden = 16;  // MLP only

  std::size_t ParameterCount() const {
    if (kind == ModelKind::kMlp) return hidden * input_dim + 2 * hidden + 1;
    return input_dim;
  }

  void Validate() const {
    internal::Require(input_dim >= 1, ErrorCode::kInvalidParameter,
                      "input dimension must be >= 1");
    if (kind == ModelKind::kMlp) {
      internal::Require(hidden >= 1 && hidden <= kMaxMlpWidth,
                        ErrorCode::kInvalidParameter,
                        "MLP hidden width must lie in [1, 32]");
    }
  }
};

struct Dataset {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> features;  // n x p, row-major
  std::vector<double> targets;   // n
  std::string generator;
  std::uint64_t seed = 0;
  ParamVector teacher;  // planted parameters, when known

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * p, p};
  }

  void Validate() const {
    internal::Require(n >= 1 && p >= 1, ErrorCode::kInvalidParameter,
                      "dataset must have n >= 1 and p >= 1");
    internal::Require(features.size() == n * p && targets.size() == n,
                      ErrorCode::kDimensionMismatch,
                      "dataset arrays do not match n and p");
    for (double x : features) {
      internal::Require(std::isfinite(x), ErrorCode::kInvalidParameter,
                        "non-finite feature");
    }
    for (double y : targets) {
      internal::Require(std::isfinite(y), ErrorCode::kInvalidParameter,
                        "non-finite target");
    }
  }
};

namespace internal {

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
inline double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline void CheckModelInputs(const ModelSpec& spec,
                             std::span<const double> theta,
                             const Dataset& data) {
  RequireSameSize(theta.size(), spec.ParameterCount(), "parameter vector");
  RequireSameSize(data.p, spec.input_dim, "dataset feature count");
}

inline void CheckIndex(const Dataset& data, std::size_t i) {
  if (i >= data.n) {
    throw FiberError(ErrorCode::kIndexOutOfRange,
                     "example index " + std::to_string(i) +
                         " out of range for n = " + std::to_string(data.n));
  }
}

struct MlpForward {
  std::vector<double> hidden;  // tanh activations
  double logit;
};

inline MlpForward MlpEval(const ModelSpec& spec, std::span<const double> theta,
                          std::span<const double> x) {
  const std::size_t h = spec.hidden;
  const std::size_t p = spec.input_dim;
  const double* w1 = theta.data();
  const double* b1 = w1 + h * p;
  const double* w2 = b1 + h;
  const double b2 = w2[h];
  MlpForward out{std::vector<double>(h), b2};
  for (std::size_t j = 0; j < h; ++j) {
    double a = b1[j];
    for (std::size_t k = 0; k < p; ++k) a += w1[j * p + k] * x[k];
    out.hidden[j] = std::tanh(a);
    out.logit += w2[j] * out.hidden[j];
  }
  return out;
}

}  // namespace internal

inline double PerExampleLoss(const ModelSpec& spec,
                             std::span<const double> theta, const Dataset& data,
                             std::size_t i) {
  internal::CheckModelInputs(spec, theta, data);
  internal::CheckIndex(data, i);
  const auto x = data.row(i);
  const double y = data.targets[i];
  switch (spec.kind) {
    case ModelKind::kQuadratic: {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        s += (theta[k] - x[k]) * (theta[k] - x[k]);
      }
      return 0.5 * s;
    }
    case ModelKind::kLinear: {
      const double r = internal::Dot(x, theta) - y;
      return 0.5 * r * r;
    }
    case ModelKind::kLogistic: {
      const double z = internal::Dot(x, theta);
      return internal::Softplus(z) - y * z;
    }
    case ModelKind::kMlp: {
      const double z = internal::MlpEval(spec, theta, x).logit;
      return internal::Softplus(z) - y * z;
    }
  }
  return 0.0;
}

inline ParamVector PerExampleGradient(const ModelSpec& spec,
                                      std::span<const double> theta,
                                      const Dataset& data, std::size_t i) {
  internal::CheckModelInputs(spec, theta, data);
  internal::CheckIndex(data, i);
  const auto x = data.row(i);
  const double y = data.targets[i];
  ParamVector g(theta.size());
  switch (spec.kind) {
    case ModelKind::kQuadratic:
      for (std::size_t k = 0; k < x.size(); ++k) g[k] = theta[k] - x[k];
      break;
    case ModelKind::kLinear: {
      const double r = internal::Dot(x, theta) - y;
      for (std::size_t k = 0; k < x.size(); ++k) g[k] = r * x[k];
      break;
    }
    case ModelKind::kLogistic: {
      const double delta = internal::Sigmoid(internal::Dot(x, theta)) - y;
      for (std::size_t k = 0; k < x.size(); ++k) g[k] = delta * x[k];
      break;
    }
    case ModelKind::kMlp: {
      const std::size_t h = spec.hidden;
      const std::size_t p = spec.input_dim;
      const internal::MlpForward fwd = internal::MlpEval(spec, theta, x);
      const double delta = internal::Sigmoid(fwd.logit) - y;
      const double* w2 = theta.data() + h * p + h;
      double* g_w1 = g.data();
      double* g_b1 = g_w1 + h * p;
      double* g_w2 = g_b1 + h;
      for (std::size_t j = 0; j < h; ++j) {
        const double z = fwd.hidden[j];
        const double da = delta * w2[j] * (1.0 - z * z);
        for (std::size_t k = 0; k < p; ++k) g_w1[j * p + k] = da * x[k];
        g_b1[j] = da;
        g_w2[j] = delta * z;
      }
      g_w2[h] = delta;
      break;
    }
  }
  return g;
}

inline GradientBatch PerExampleGradients(const ModelSpec& spec,
                                         std::span<const double> theta,
                                         const Dataset& data,
                                         std::span<const std::size_t> batch) {
  GradientBatch out;
  out.reserve(batch.size());
  for (std::size_t i : batch) {
    out.push_back(PerExampleGradient(spec, theta, data, i));
  }
  return out;
}

// Mean loss over the whole dataset.
inline double Loss(const ModelSpec& spec, std::span<const double> theta,
                   const Dataset& data) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    s += PerExampleLoss(spec, theta, data, i);
  }
  return s / static_cast<double>(data.n);
}

inline double BatchLoss(const ModelSpec& spec, std::span<const double> theta,
                        const Dataset& data,
                        std::span<const std::size_t> batch) {
  double s = 0.0;
  for (std::size_t i : batch) s += PerExampleLoss(spec, theta, data, i);
  return s / static_cast<double>(batch.size());
}

// Fraction of examples whose sign of the logit matches the label.
inline double Accuracy(const ModelSpec& spec, std::span<const double> theta,
                       const Dataset& data) {
  internal::Require(spec.kind == ModelKind::kLogistic ||
                        spec.kind == ModelKind::kMlp,
                    ErrorCode::kInvalidParameter,
                    "accuracy needs a classification model");
  internal::CheckModelInputs(spec, theta, data);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const double z = spec.kind == ModelKind::kLogistic
                         ? internal::Dot(data.row(i), theta)
                         : internal::MlpEval(spec, theta, data.row(i)).logit;
    correct += (z > 0.0) == (data.targets[i] > 0.5);
  }
  return static_cast<double>(correct) / static_cast<double>(data.n);
}

// Gaussian features with a planted teacher. For logistic data the label is
// 1[x^T theta* + noise_level * z > 0]; for linear data y = x^T theta* +
// noise_level * z. Quadratic data uses the features as targets xi.
inline Dataset MakeSynthetic(ModelKind kind, std::size_t n, std::size_t p,
                             std::uint64_t seed, double noise_level) {
  internal::Require(n >= 1 && p >= 1, ErrorCode::kInvalidParameter,
                    "synthetic dataset needs n >= 1 and p >= 1");
  internal::Require(noise_level >= 0.0, ErrorCode::kInvalidParameter,
                    "noise level must be >= 0");
  Dataset data;
  data.n = n;
  data.p = p;
  data.generator = std::string(ModelKindName(kind));
  data.seed = seed;
  data.features.resize(n * p);
  data.targets.assign(n, 0.0);

  std::normal_distribution<double> normal(0.0, 1.0);
  if (kind != ModelKind::kQuadratic) {
    CounterRng teacher_rng(seed, 0, Purpose::kInit, /*substream=*/1);
    data.teacher.resize(p);
    for (double& t : data.teacher) t = normal(teacher_rng);
    if (kind == ModelKind::kLinear) {
      for (double& t : data.teacher) t /= std::sqrt(static_cast<double>(p));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i, Purpose::kData);
    double* x = data.features.data() + i * p;
    for (std::size_t k = 0; k < p; ++k) x[k] = normal(rng);
    if (kind == ModelKind::kQuadratic) continue;
    const double z = internal::Dot(data.row(i), data.teacher) +
                     noise_level * normal(rng);
    data.targets[i] = kind == ModelKind::kLinear ? z : (z > 0.0 ? 1.0 : 0.0);
  }
  return data;
}

// Zeros for the convex models; small scaled Gaussians for the MLP.
inline ParamVector InitialParameters(const ModelSpec& spec,
                                     std::uint64_t seed) {
  spec.Validate();
  ParamVector theta(spec.ParameterCount(), 0.0);
  if (spec.kind != ModelKind::kMlp) return theta;
  CounterRng rng(seed, 0, Purpose::kInit);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t h = spec.hidden;
  const std::size_t p = spec.input_dim;
  const double w1_scale = 1.0 / std::sqrt(static_cast<double>(p));
  const double w2_scale = 1.0 / std::sqrt(static_cast<double>(h));
  for (std::size_t k = 0; k < h * p; ++k) theta[k] = w1_scale * normal(rng);
  for (std::size_t j = 0; j < h; ++j) theta[h * p + h + j] = w2_scale * normal(rng);
  return theta;
}

// Fixed-size batches without replacement: each epoch is a fresh permutation
// keyed by (seed, epoch); a trailing partial batch is dropped.
class EpochSampler {
 public:
  EpochSampler(std::size_t n, std::size_t batch_size, std::uint64_t seed)
      : n_(n), batch_size_(batch_size), seed_(seed) {
    internal::Require(batch_size >= 1 && batch_size <= n,
                      ErrorCode::kInvalidParameter,
                      "batch size must lie in [1, n]");
  }

  std::size_t steps_per_epoch() const { return n_ / batch_size_; }

  std::span<const std::size_t> Batch(std::uint64_t step) {
    const std::uint64_t epoch = step / steps_per_epoch();
    if (epoch != cached_epoch_ || permutation_.empty()) {
      permutation_.resize(n_);
      std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
      CounterRng rng(seed_, epoch, Purpose::kMinibatch);
      std::shuffle(permutation_.begin(), permutation_.end(), rng);
      cached_epoch_ = epoch;
    }
    const std::size_t offset = (step % steps_per_epoch()) * batch_size_;
    return {permutation_.data() + offset, batch_size_};
  }

 private:
  std::size_t n_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::uint64_t cached_epoch_ = 0;
  std::vector<std::size_t> permutation_;
};

namespace internal {

inline std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

}  // namespace internal

// CSV with a leading "# {json}" metadata line, a header row
// x0,...,x{p-1},y, and one row per example.
inline void SaveDatasetCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FiberError(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json meta = {{"generator", data.generator},
                         {"seed", data.seed},
                         {"n", data.n},
                         {"p", data.p}};
  if (!data.teacher.empty()) meta["teacher"] = data.teacher;
  out << "# " << meta.dump() << "\n";
  for (std::size_t k = 0; k < data.p; ++k) out << "x" << k << ",";
  out << "y\n";
  for (std::size_t i = 0; i < data.n; ++i) {
    for (double x : data.row(i)) out << internal::FormatDouble(x) << ",";
    out << internal::FormatDouble(data.targets[i]) << "\n";
  }
}

inline Dataset LoadDatasetCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FiberError(ErrorCode::kIo, "cannot open " + path);
  std::string line;
  Dataset data;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw FiberError(ErrorCode::kIo, path + ": missing JSON header line");
  }
  const nlohmann::json meta = nlohmann::json::parse(line.substr(2), nullptr,
                                                    /*allow_exceptions=*/false);
  if (meta.is_discarded() || !meta.is_object()) {
    throw FiberError(ErrorCode::kIo, path + ": malformed JSON header");
  }
  data.generator = meta.value("generator", std::string("file"));
  data.seed = meta.value("seed", std::uint64_t{0});
  if (meta.contains("teacher")) {
    data.teacher = meta["teacher"].get<std::vector<double>>();
  }
  if (!std::getline(in, line)) {
    throw FiberError(ErrorCode::kIo, path + ": missing column header");
  }
  data.p = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FiberError(ErrorCode::kIo, path + ": bad number '" + cell + "'");
      }
    }
    if (values.size() != data.p + 1) {
      throw FiberError(ErrorCode::kIo, path + ": ragged row");
    }
    data.features.insert(data.features.end(), values.begin(),
                         values.end() - 1);
    data.targets.push_back(values.back());
  }
  data.n = data.targets.size();
  data.Validate();
  return data;
}

}  // namespace fiber

#endif  // FIBER_MODELS_HPP_
