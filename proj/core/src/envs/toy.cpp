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

#include "pacguard/envs/toy.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pacguard::toy {

ToySample toy_sample(double c, Rng& rng) {
  if (!(c >= -2.0 && c <= 2.0)) throw std::domain_error("toy cutoff c outside [-2, 2]");
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ToySample s;
  s.o = unit(rng);
  const double eps = unit(rng);
  s.y = (s.o + eps >= c) ? 1 : 0;
  return s;
}

namespace {

// Closed forms on c ∈ [-1, 0].
ToyAnalytics negative_branch(double c) {
  ToyAnalytics a;
  a.c = c;
  const double c2 = (c + 2.0) * (c + 2.0);
  a.p0 = c2 / 8.0;
  a.p1 = 1.0 - a.p0;
  a.p_joint_10 = 1.0 / 8.0;
  a.p_joint_01 = (1.0 - c * c) / 8.0;
  a.p_err = 0.25 - c * c / 8.0;
  a.p_1given0 = 1.0 / c2;
  a.p_0given1 = (1.0 - c * c) / (8.0 - c2);
  const double denom = (8.0 - c2) * (8.0 - c2);
  a.slope = -(c + 2.0) * c2 * (2.0 * c * c - 3.0 * c + 2.0) / denom;
  return a;
}

}  // namespace

ToyAnalytics toy_analytics(double c) {
  if (!(std::abs(c) <= 1.0)) throw std::domain_error("toy closed forms need |c| <= 1");
  if (c <= 0.0) return negative_branch(c);
  ToyAnalytics m = negative_branch(-c);
  ToyAnalytics a;
  a.c = c;
  a.p0 = m.p1;
  a.p1 = m.p0;
  a.p_joint_10 = m.p_joint_01;
  a.p_joint_01 = m.p_joint_10;
  a.p_err = m.p_err;
  a.p_1given0 = m.p_0given1;
  a.p_0given1 = m.p_1given0;
  // Roles of the two curve coordinates swap, so the slope inverts.
  a.slope = 1.0 / m.slope;
  return a;
}

Rollout toy_rollout(const ToySample& sample) {
  Rollout r;
  r.horizon = kHorizon;
  r.observations = {{sample.o}};
  r.y = sample.y;
  r.t_fail = sample.y ? kHorizon : kHorizon + 1;
  return r;
}

}  // namespace pacguard::toy
