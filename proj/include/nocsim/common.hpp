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

#include <cstdint>
#include <stdexcept>

namespace nocsim {

using Cycle = std::int64_t;

/// Invalid build-time configuration (bad mesh radix, empty buffers, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The caller broke an operation's contract (bad index, out-of-range rate, ...).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// step() was called on an environment whose episode already finished.
struct EpisodeDoneError : ContractError {
  using ContractError::ContractError;
};

/// A runtime self-check (flit conservation, credit accounting, ...) failed.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace nocsim
