/*
Copyright 2026 The HetSched Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

/// Umbrella header pulling in the whole library.

#pragma once

#include "hetsched/analysis.hpp"
#include "hetsched/baselines.hpp"
#include "hetsched/config.hpp"
#include "hetsched/error.hpp"
#include "hetsched/meta_sched.hpp"
#include "hetsched/metrics.hpp"
#include "hetsched/model.hpp"
#include "hetsched/platform.hpp"
#include "hetsched/rational.hpp"
#include "hetsched/report.hpp"
#include "hetsched/runtime.hpp"
#include "hetsched/scheduler.hpp"
#include "hetsched/sim.hpp"
#include "hetsched/task_sched.hpp"
#include "hetsched/time.hpp"
#include "hetsched/trace.hpp"
#include "hetsched/version.hpp"

