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

#ifndef FIBER_ERROR_HPP_
#define FIBER_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fiber {

enum class ErrorCode {
  kInvalidParameter,
  kInvalidOrder,
  kConstraintViolation,
  kBatchShape,
  kDimensionMismatch,
  kInvalidNoise,
  kDomain,
  kIndexOutOfRange,
  kEmptyRun,
  kInvalidWindow,
  kDegenerateVariance,
  kInstability,
  kConvergenceFailure,
  kCalibrationFailure,
  kIo,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid_parameter";
    case ErrorCode::kInvalidOrder: return "invalid_order";
    case ErrorCode::kConstraintViolation: return "constraint_violation";
    case ErrorCode::kBatchShape: return "batch_shape";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kInvalidNoise: return "invalid_noise";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kIndexOutOfRange: return "index_out_of_range";
    case ErrorCode::kEmptyRun: return "empty_run";
    case ErrorCode::kInvalidWindow: return "invalid_window";
    case ErrorCode::kDegenerateVariance: return "degenerate_variance";
    case ErrorCode::kInstability: return "instability";
    case ErrorCode::kConvergenceFailure: return "convergence_failure";
    case ErrorCode::kCalibrationFailure: return "calibration_failure";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

// True for failures of a numerical procedure, as opposed to bad input.
inline bool IsNumericalFailure(ErrorCode code) {
  return code == ErrorCode::kInstability ||
         code == ErrorCode::kConvergenceFailure ||
         code == ErrorCode::kCalibrationFailure ||
         code == ErrorCode::kDegenerateVariance;
}

class FiberError : public std::runtime_error {
 public:
  FiberError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

namespace internal {

inline void Require(bool condition, ErrorCode code, const char* message) {
  if (!condition) throw FiberError(code, message);
}

inline void RequireSameSize(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw FiberError(ErrorCode::kDimensionMismatch,
                     std::string(what) + ": size " + std::to_string(a) +
                         " != " + std::to_string(b));
  }
}

}  // namespace internal
}  // namespace fiber

#endif  // FIBER_ERROR_HPP_
