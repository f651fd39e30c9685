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

#include <cstdint>

namespace pacguard {

/// McAllester gap R = sqrt((KL + log(2·sqrt(N)/δ)) / (2N)).
/// Throws std::invalid_argument for kl < 0, n < 1 or δ ∉ (0, 1).
double mcallester_gap(double kl, std::uint64_t n, double delta);

/// Bernoulli relative entropy kl(q ‖ p), with the 0·log 0 = 0 convention.
double kl_bernoulli(double q, double p);

/// Largest p ∈ [emp_mean, 1] with kl(emp_mean ‖ p) <= log(2/δ_mc)/m, found by
/// bisection to 1e-10 and rounded up (the returned value is never below the
/// exact inverse).
double kl_inverse_bound(double emp_mean, std::uint64_t m, double delta_mc);

}  // namespace pacguard
