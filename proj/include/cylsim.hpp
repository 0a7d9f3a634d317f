// Copyright 2026 The cylsim Authors
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

#pragma once

// Umbrella header for the whole library.

#include "cylsim/circuit.hpp"
#include "cylsim/coarse_grain.hpp"
#include "cylsim/cz_decomposition.hpp"
#include "cylsim/geometry.hpp"
#include "cylsim/oracle.hpp"
#include "cylsim/pbs_qudit.hpp"
#include "cylsim/purification.hpp"
#include "cylsim/sampler.hpp"
#include "cylsim/serialize.hpp"
#include "cylsim/simplex.hpp"
