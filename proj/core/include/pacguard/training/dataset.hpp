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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pacguard/envs/nav.hpp"
#include "pacguard/envs/rollout.hpp"
#include "pacguard/predictor/objective.hpp"

namespace pacguard {

enum class Partition { kPrior, kBound, kHeldout };

std::string_view to_string(Partition p);

/// Where environments come from: the analytic toy at cutoff c, or the
/// navigation simulator.
struct EnvSource {
  enum class Kind { kToy, kNav };
  Kind kind = Kind::kToy;
  double toy_c = 0.0;
  nav::NavConfig nav;

  static EnvSource toy(double c);
  static EnvSource navigation(nav::NavConfig cfg);

  int default_horizon() const;
  std::size_t observation_dim() const;
  /// Divides raw observations before they reach a network.
  double observation_scale() const;
};

/// Rollouts without predictions, tagged with their partition. Environment i
/// was generated from env_seeds[i].
struct LabeledRolloutSet {
  Partition partition = Partition::kPrior;
  std::uint64_t seed = 0;
  std::vector<Rollout> rollouts;
  std::vector<std::uint64_t> env_seeds;

  std::size_t size() const { return rollouts.size(); }
  std::size_t failures() const;
};

/// Runs `count` fresh environments. The nav source uses `policy` when given
/// and the greedy-clearance policy otherwise; `horizon <= 0` picks the
/// source default. Deterministic in `seed` and independent of thread count.
LabeledRolloutSet collect(const EnvSource& source, const nav::Policy* policy, std::size_t count,
                          int horizon, std::uint64_t seed, Partition partition);

/// Throws std::logic_error when two sets share an environment seed.
void assert_disjoint(std::span<const LabeledRolloutSet* const> sets);

/// Per-step targets min(j+k, T) >= t_fail for every recorded step.
std::vector<int> step_labels(const Rollout& rollout, int k);

/// Stacks the `history` most recent observations (oldest first, padding by
/// repeating the first observation) and scales them.
struct FeatureSpec {
  std::size_t history = 1;
  double scale = 1.0;

  static FeatureSpec for_source(const EnvSource& source, std::size_t history);
  std::size_t input_dim(std::size_t observation_dim) const { return history * observation_dim; }
};

/// Network input at step `index + 1`.
std::vector<double> step_features(const Rollout& rollout, std::size_t index,
                                  const FeatureSpec& spec);
/// Inputs for every step strictly before failure.
std::vector<std::vector<double>> rollout_features(const Rollout& rollout,
                                                  const FeatureSpec& spec);

/// Training sequences; `last_steps > 0` keeps only that many steps before
/// failure (or before the horizon end for successes).
std::vector<LabeledSequence> to_sequences(const LabeledRolloutSet& set, const FeatureSpec& spec,
                                          int last_steps = 0);

}  // namespace pacguard
