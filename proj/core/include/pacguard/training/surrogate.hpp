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

#include <span>

namespace pacguard {

/// Target of step j (1-based): the failure status k steps ahead,
/// y_{min(j+k, T)} with y_t = 1[t >= t_fail].
int step_target(int j, int t_fail, int horizon, int k);

/// Weighted cross-entropy surrogate over the supplied steps,
///
///   -(1/T) Σ_j [ ω·y_{min(j+k,T)}·log p_j + (1 - y_{min(j+k,T)})·log(1 - p_j) ],
///
/// i.e. the negated log-likelihood form. p_fail[j-1] is the failure
/// probability at step j; values are clamped to [1e-7, 1 - 1e-7]. `y` must
/// agree with `t_fail`. `first_step` is the step of p_fail[0], so callers can
/// score a suffix of the rollout; the 1/T normalization is unchanged.
double surrogate_loss(std::span<const double> p_fail, int y, int t_fail, int horizon,
                      double omega, int k, int first_step = 1);

/// Same value; writes ∂loss/∂p_fail[j] into `dloss_dp` (zero inside the clamp).
double surrogate_loss_with_grad(std::span<const double> p_fail, int y, int t_fail,
                                int horizon, double omega, int k, std::span<double> dloss_dp,
                                int first_step = 1);

}  // namespace pacguard
