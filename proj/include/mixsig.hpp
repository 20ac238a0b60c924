// Copyright 2026 The mixsig Authors.
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


// Umbrella header for the mixsig library.

#pragma once

#include "mixsig/core.hpp"
#include "mixsig/em.hpp"
#include "mixsig/experiment.hpp"
#include "mixsig/filters.hpp"
#include "mixsig/graphs.hpp"
#include "mixsig/io.hpp"
#include "mixsig/metrics.hpp"
#include "mixsig/mixture.hpp"
#include "mixsig/solver.hpp"
#include "mixsig/spectral.hpp"
