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

#include "pacguard/envs/rollout.hpp"
#include "pacguard/rng.hpp"

namespace pacguard::toy {

/// Horizon used to encode the one-shot toy problem as a rollout: the single
/// observation is taken at step 1 and a failure is realized at step 2.
inline constexpr int kHorizon = 2;

struct ToySample {
  double o = 0.0;  // observation, Uniform(-1, 1)
  int y = 0;       // 1 iff o + eps >= c for a hidden eps ~ Uniform(-1, 1)
};

/// Draws (o, y) at cutoff c ∈ [-2, 2]; throws std::domain_error otherwise.
ToySample toy_sample(double c, Rng& rng);

/// Probabilities of the Bayes-optimal rule `o >= c`, in closed form.
struct ToyAnalytics {
  double c = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  double p_joint_10 = 0.0;  // predict 1, truly 0
  double p_joint_01 = 0.0;  // predict 0, truly 1
  double p_err = 0.0;
  double p_1given0 = 0.0;   // FPR
  double p_0given1 = 0.0;   // FNR
  double slope = 0.0;       // d p_{0|1} / d p_{1|0} along the curve in c
};

/// Exact values for c ∈ [-1, 1]; c > 0 uses the mirror c -> -c with class
/// roles swapped. Throws std::domain_error for |c| > 1.
ToyAnalytics toy_analytics(double c);

/// The optimal classifier in expectation: 1 iff o >= c.
inline int toy_optimal_predict(double o, double c) { return o >= c ? 1 : 0; }

/// Encodes a sample as a two-step rollout (see kHorizon).
Rollout toy_rollout(const ToySample& sample);

}  // namespace pacguard::toy
