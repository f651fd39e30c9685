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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pacguard {

/// One policy execution in one environment.
///
/// Steps are 1-based in the documentation and 0-based in storage:
/// `observations[t-1]` is the observation taken before step t executes.
/// `t_fail` is the first failing step, or `horizon + 1` for a success.
struct Rollout {
  std::vector<std::vector<double>> observations;
  std::vector<int> predictions;  // empty when no predictor was attached
  int y = 0;
  int t_fail = 1;
  int horizon = 1;

  /// Steps strictly before failure that carry an observation.
  std::size_t steps_before_failure() const;
  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

enum class OutcomeKind : std::uint8_t {
  kTruePositive,   // 1 ∩ 1
  kTrueNegative,   // 0 ∩ 0
  kFalsePositive,  // 1 ∩ 0
  kFalseNegative,  // 0 ∩ 1
};

std::string_view to_string(OutcomeKind kind);

/// Rollout-level outcome from the per-step predictions. Only warnings issued
/// strictly before `t_fail` count.
OutcomeKind classify_outcome(std::span<const int> predictions, int y, int t_fail);
OutcomeKind classify_outcome(const Rollout& rollout);

/// Tallies of the four joint events over `environments` × `draws` rollouts.
struct OutcomeCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t environments = 0;  // N
  std::uint64_t draws = 1;         // M posterior samples per environment

  void add(OutcomeKind kind);
  std::uint64_t total() const { return tp + tn + fp + fn; }
  std::uint64_t errors() const { return fp + fn; }

  /// Environments with y = 1 (resp. 0); exact because every environment is
  /// evaluated `draws` times.
  std::uint64_t positives() const;
  std::uint64_t negatives() const;

  double misclassification() const;
  double class1_rate() const;  // p̂_1
  double fnr() const;          // p̂_{0|1}; NaN when no failures
  double fpr() const;          // p̂_{1|0}; NaN when no successes

  /// Throws std::logic_error when the tallies cannot be N × M outcomes.
  void validate() const;
};

OutcomeCounts& operator+=(OutcomeCounts& lhs, const OutcomeCounts& rhs);

}  // namespace pacguard
