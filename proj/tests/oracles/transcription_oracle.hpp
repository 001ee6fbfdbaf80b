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

// Straight-line transcription of the filtered DP-AdamW loop for the noisy
// quadratic f(theta; xi) = 0.5 ||theta - xi||^2. Written independently of
// the library's step engine: scalar loops, no shared helpers except the
// noise stream, which is treated as an input.

#ifndef FIBER_TESTS_ORACLES_TRANSCRIPTION_ORACLE_HPP_
#define FIBER_TESTS_ORACLES_TRANSCRIPTION_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace fiber::oracle {

enum class Method { kFiber, kDisk, kDiskCorr, kDpAdamW };

struct TranscriptionConfig {
  Method method = Method::kFiber;
  double lr = 1e-2, beta1 = 0.9, beta2 = 0.999, eps = 1e-8, wd = 0.0;
  double eps_v = 1e-8;
  double kappa = 0.6, gamma = 0.7, omega = 0.9;
  double clip = 1.0;
  int batch = 4;
  double noise_multiplier = 0.5;
};

// batches(t) returns the B quadratic targets xi for step t (each of size d);
// noise(t) returns the d Gaussian draws w_t (already scaled).
inline std::vector<double> RunTranscription(
    const TranscriptionConfig& c, std::vector<double> theta, int steps,
    const std::function<std::vector<std::vector<double>>(int)>& batches,
    const std::function<std::vector<double>(int)>& noise) {
  const std::size_t d = theta.size();
  const bool two_point = c.method != Method::kDpAdamW;
  const double a = two_point ? (1 - c.kappa) / (c.kappa * c.gamma) : 0.0;
  const double sw = c.noise_multiplier * c.clip / c.batch;
  double sub = -1;  // negative: no correction, no floor
  if (c.method == Method::kFiber) {
    sub = (2 - c.omega) / (4 - 3 * c.omega) * sw * sw;
  } else if (c.method == Method::kDiskCorr) {
    sub = c.kappa / (2 - c.kappa) * sw * sw;
  }
  std::vector<double> m(d, 0), v(d, 0), gt(d, 0), r(d, 0), dd(d, 0);
  for (int t = 0; t < steps; ++t) {
    const auto xi = batches(t);
    const auto w = noise(t);
    std::vector<double> g(d, 0);
    for (const auto& x : xi) {
      std::vector<double> u(d);
      double nrm = 0;
      for (std::size_t i = 0; i < d; ++i) {
        const double cur = theta[i] - x[i];
        const double look = theta[i] + c.gamma * dd[i] - x[i];
        u[i] = a * look + (1 - a) * cur;
        nrm += u[i] * u[i];
      }
      nrm = std::sqrt(nrm);
      const double s = nrm > c.clip ? c.clip / nrm : 1.0;
      for (std::size_t i = 0; i < d; ++i) g[i] += s * u[i];
    }
    for (std::size_t i = 0; i < d; ++i) g[i] = g[i] / c.batch + w[i];

    for (std::size_t i = 0; i < d; ++i) {
      double f = g[i];
      if (c.method == Method::kFiber) {
        const double nu = g[i] - gt[i];
        r[i] = (1 - c.omega) * r[i] + c.omega * nu;
        gt[i] = gt[i] + r[i];
        f = gt[i];
      } else if (c.method != Method::kDpAdamW) {
        gt[i] = (1 - c.kappa) * gt[i] + c.kappa * g[i];
        f = gt[i];
      }
      m[i] = c.beta1 * m[i] + (1 - c.beta1) * f;
      v[i] = c.beta2 * v[i] + (1 - c.beta2) * f * f;
      const double mh = m[i] / (1 - std::pow(c.beta1, t + 1));
      const double vh = v[i] / (1 - std::pow(c.beta2, t + 1));
      const double vb = sub < 0 ? vh : std::max(vh - sub, c.eps_v);
      const double next =
          (1 - c.lr * c.wd) * theta[i] - c.lr * mh / (std::sqrt(vb) + c.eps);
      dd[i] = next - theta[i];
      theta[i] = next;
    }
  }
  return theta;
}

}  // namespace fiber::oracle

#endif  // FIBER_TESTS_ORACLES_TRANSCRIPTION_ORACLE_HPP_
