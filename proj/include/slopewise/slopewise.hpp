// Copyright 2026 The Slopewise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SLOPEWISE_SLOPEWISE_HPP_
#define SLOPEWISE_SLOPEWISE_HPP_

#include "slopewise/calibration.hpp"
#include "slopewise/error.hpp"
#include "slopewise/json_io.hpp"
#include "slopewise/path_energy.hpp"
#include "slopewise/planner.hpp"
#include "slopewise/se2.hpp"
#include "slopewise/synthbench.hpp"
#include "slopewise/telemetry.hpp"
#include "slopewise/terrain.hpp"
#include "slopewise/wrench_model.hpp"

#endif  // SLOPEWISE_SLOPEWISE_HPP_
