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

// Umbrella header.

#ifndef FIBER_FIBER_HPP_
#define FIBER_FIBER_HPP_

#include "fiber/attenuation.hpp"
#include "fiber/diagnostics.hpp"
#include "fiber/error.hpp"
#include "fiber/filters.hpp"
#include "fiber/io.hpp"
#include "fiber/mechanism.hpp"
#include "fiber/models.hpp"
#include "fiber/optimizers.hpp"
#include "fiber/privacy.hpp"
#include "fiber/rng.hpp"
#include "fiber/training.hpp"
#include "fiber/types.hpp"

#endif  // FIBER_FIBER_HPP_
