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

// Drives one optimizer over a model and dataset. The data order and the
// initial parameters come from `data_seed`; DP noise comes from `noise_seed`,
// so two trainers that share `data_seed` form a paired replica.

#ifndef FIBER_TRAINING_HPP_
#define FIBER_TRAINING_HPP_

#include <cstdint>
#include <span>

#include "fiber/error.hpp"
#include "fiber/models.hpp"
#include "fiber/optimizers.hpp"
#include "fiber/types.hpp"

namespace fiber {

class Trainer {
 public:
  Trainer(const ModelSpec& spec, const Dataset& data,
          const OptimizerConfig& cfg, std::uint64_t data_seed,
          std::uint64_t noise_seed)
      : spec_(spec),
        data_(data),
        cfg_(cfg),
        noise_seed_(noise_seed),
        sampler_(data.n, static_cast<std::size_t>(cfg.dp.batch_size),
                 data_seed),
        theta_(InitialParameters(spec, data_seed)),
        state_(InitOptimizerState(cfg, spec.ParameterCount())) {
    data.Validate();
    internal::Require(spec.input_dim == data.p, ErrorCode::kDimensionMismatch,
                      "model input dimension does not match dataset");
  }

  // Advances one step and returns the step's observation and diagnostics.
  StepReport Step() {
    const std::span<const std::size_t> batch =
        sampler_.Batch(static_cast<std::uint64_t>(step_));
    const BatchGradFn grads = [&](std::span<const double> at) {
      return PerExampleGradients(spec_, at, data_, batch);
    };
    StepReport report = OptimizerStep(state_, theta_, grads, cfg_, noise_seed_);
    gradient_evaluations_ += report.gradient_evaluations;
    ++step_;
    return report;
  }

  double Loss() const { return fiber::Loss(spec_, theta_, data_); }

  const ParamVector& theta() const { return theta_; }
  const OptimizerState& state() const { return state_; }
  const OptimizerConfig& config() const { return cfg_; }
  long step() const { return step_; }
  long gradient_evaluations() const { return gradient_evaluations_; }

 private:
  const ModelSpec spec_;
  const Dataset& data_;
  const OptimizerConfig cfg_;
  std::uint64_t noise_seed_;
  EpochSampler sampler_;
  ParamVector theta_;
  OptimizerState state_;
  long step_ = 0;
  long gradient_evaluations_ = 0;
};

}  // namespace fiber

#endif  // FIBER_TRAINING_HPP_
