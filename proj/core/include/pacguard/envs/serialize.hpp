// Copyright 2026 The pacguard Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "pacguard/envs/nav.hpp"
#include "pacguard/envs/rollout.hpp"

namespace pacguard {

inline constexpr int kEnvironmentFormatVersion = 1;

/// Versioned JSON document of a navigation environment.
std::string nav_environment_to_json(const nav::NavEnvironment& env);
/// Parses the document above; throws std::invalid_argument on a version or
/// schema mismatch.
nav::NavEnvironment nav_environment_from_json(std::string_view text);

/// One CSV row per recorded step: t, d0..d{R-1}, yhat, y, t_fail.
/// `yhat` is empty when the rollout carries no predictions.
void write_rollout_csv(std::ostream& out, const Rollout& rollout, bool header = true);

}  // namespace pacguard
