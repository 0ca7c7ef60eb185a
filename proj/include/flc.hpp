// Copyright 2026 The FairLabel Authors
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

#pragma once

#include "flc/app.hpp"
#include "flc/data.hpp"
#include "flc/eval.hpp"
#include "flc/flow.hpp"
#include "flc/lcal.hpp"
#include "flc/lcul.hpp"
#include "flc/metrics.hpp"
#include "flc/model.hpp"
#include "flc/parallel.hpp"
#include "flc/rational.hpp"
#include "flc/report.hpp"
#include "flc/rng.hpp"
#include "flc/solve_report.hpp"
