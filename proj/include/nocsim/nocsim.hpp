/*
 * Copyright 2026 The nocsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "nocsim/common.hpp"
#include "nocsim/ea/cmaes.hpp"
#include "nocsim/ea/decode.hpp"
#include "nocsim/ea/fitness.hpp"
#include "nocsim/ea/optimize.hpp"
#include "nocsim/ea/pepg.hpp"
#include "nocsim/ea/sga.hpp"
#include "nocsim/env.hpp"
#include "nocsim/experiment.hpp"
#include "nocsim/mesh.hpp"
#include "nocsim/network.hpp"
#include "nocsim/rl.hpp"
#include "nocsim/rng.hpp"
#include "nocsim/routing.hpp"
#include "nocsim/sim_config.hpp"
#include "nocsim/stats.hpp"
#include "nocsim/traffic.hpp"
#include "nocsim/vc_allocation.hpp"
