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

#include "pacguard/training/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pacguard/predictor/network.hpp"

namespace pacguard {

int step_target(int j, int t_fail, int horizon, int k) {
  return std::min(j + k, horizon) >= t_fail ? 1 : 0;
}

namespace {

double evaluate(std::span<const double> p_fail, int y, int t_fail, int horizon, double omega,
                int k, int first_step, std::span<double> dloss_dp) {
  if (horizon < 1) throw std::invalid_argument("surrogate_loss: horizon must be >= 1");
  if (k < 0) throw std::invalid_argument("surrogate_loss: look-ahead k must be >= 0");
  if ((y == 1) != (t_fail <= horizon)) {
    throw std::invalid_argument("surrogate_loss: y disagrees with t_fail");
  }
  if (first_step < 1) throw std::invalid_argument("surrogate_loss: first_step must be >= 1");
  const double inv_t = 1.0 / static_cast<double>(horizon);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < p_fail.size(); ++idx) {
    const int j = static_cast<int>(idx) + first_step;
    const int target = step_target(j, t_fail, horizon, k);
    const double raw = p_fail[idx];
    const double p = std::clamp(raw, kProbabilityFloor, 1.0 - kProbabilityFloor);
    const bool clamped = p != raw;
    double d = 0.0;
    if (target == 1) {
      sum += omega * std::log(p);
      d = clamped ? 0.0 : -inv_t * omega / p;
    } else {
      sum += std::log1p(-p);
      d = clamped ? 0.0 : inv_t / (1.0 - p);
    }
    if (!dloss_dp.empty()) dloss_dp[idx] = d;
  }
  return -inv_t * sum;
}

}  // namespace

double surrogate_loss(std::span<const double> p_fail, int y, int t_fail, int horizon,
                      double omega, int k, int first_step) {
  return evaluate(p_fail, y, t_fail, horizon, omega, k, first_step, {});
}

double surrogate_loss_with_grad(std::span<const double> p_fail, int y, int t_fail,
                                int horizon, double omega, int k, std::span<double> dloss_dp,
                                int first_step) {
  if (dloss_dp.size() != p_fail.size()) {
    throw std::invalid_argument("surrogate_loss_with_grad: gradient buffer size mismatch");
  }
  return evaluate(p_fail, y, t_fail, horizon, omega, k, first_step, dloss_dp);
}

}  // namespace pacguard
