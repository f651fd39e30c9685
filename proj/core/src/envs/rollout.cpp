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

#include "pacguard/envs/rollout.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace pacguard {

std::size_t Rollout::steps_before_failure() const {
  const auto before = static_cast<std::size_t>(std::max(t_fail - 1, 0));
  return std::min(before, observations.size());
}

void Rollout::validate() const {
  if (horizon < 1) throw std::invalid_argument("rollout horizon must be >= 1");
  if (t_fail < 1 || t_fail > horizon + 1) {
    throw std::invalid_argument("t_fail " + std::to_string(t_fail) +
                                " outside [1, T+1]");
  }
  if ((y == 1) != (t_fail <= horizon)) {
    throw std::invalid_argument("label y disagrees with t_fail");
  }
  if (observations.size() > static_cast<std::size_t>(horizon)) {
    throw std::invalid_argument("more observations than steps");
  }
  if (!predictions.empty() && predictions.size() != observations.size()) {
    throw std::invalid_argument("predictions and observations differ in length");
  }
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kTruePositive: return "TP";
    case OutcomeKind::kTrueNegative: return "TN";
    case OutcomeKind::kFalsePositive: return "FP";
    case OutcomeKind::kFalseNegative: return "FN";
  }
  return "?";
}

OutcomeKind classify_outcome(std::span<const int> predictions, int y, int t_fail) {
  const auto usable = std::min<std::size_t>(
      predictions.size(), static_cast<std::size_t>(std::max(t_fail - 1, 0)));
  const bool warned = std::any_of(predictions.begin(),
                                  predictions.begin() + static_cast<std::ptrdiff_t>(usable),
                                  [](int p) { return p == 1; });
  if (y == 1) return warned ? OutcomeKind::kTruePositive : OutcomeKind::kFalseNegative;
  return warned ? OutcomeKind::kFalsePositive : OutcomeKind::kTrueNegative;
}

OutcomeKind classify_outcome(const Rollout& rollout) {
  return classify_outcome(rollout.predictions, rollout.y, rollout.t_fail);
}

void OutcomeCounts::add(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kTruePositive: ++tp; break;
    case OutcomeKind::kTrueNegative: ++tn; break;
    case OutcomeKind::kFalsePositive: ++fp; break;
    case OutcomeKind::kFalseNegative: ++fn; break;
  }
}

std::uint64_t OutcomeCounts::positives() const { return draws ? (tp + fn) / draws : 0; }
std::uint64_t OutcomeCounts::negatives() const { return draws ? (tn + fp) / draws : 0; }

double OutcomeCounts::misclassification() const {
  const auto n = total();
  return n ? static_cast<double>(errors()) / static_cast<double>(n) : 0.0;
}

double OutcomeCounts::class1_rate() const {
  const auto n = total();
  return n ? static_cast<double>(tp + fn) / static_cast<double>(n) : 0.0;
}

double OutcomeCounts::fnr() const {
  const auto n1 = tp + fn;
  return n1 ? static_cast<double>(fn) / static_cast<double>(n1)
            : std::numeric_limits<double>::quiet_NaN();
}

double OutcomeCounts::fpr() const {
  const auto n0 = tn + fp;
  return n0 ? static_cast<double>(fp) / static_cast<double>(n0)
            : std::numeric_limits<double>::quiet_NaN();
}

void OutcomeCounts::validate() const {
  if (draws == 0) throw std::logic_error("OutcomeCounts: draws must be >= 1");
  if (total() != environments * draws) {
    throw std::logic_error("OutcomeCounts: tallies do not sum to N*M");
  }
  if ((tp + fn) % draws != 0) {
    throw std::logic_error("OutcomeCounts: class-1 tally not a multiple of M");
  }
}

OutcomeCounts& operator+=(OutcomeCounts& lhs, const OutcomeCounts& rhs) {
  if (lhs.total() == 0) lhs.draws = rhs.draws;
  if (rhs.total() != 0 && lhs.draws != rhs.draws) {
    throw std::logic_error("OutcomeCounts: cannot merge different draw counts");
  }
  lhs.tp += rhs.tp;
  lhs.tn += rhs.tn;
  lhs.fp += rhs.fp;
  lhs.fn += rhs.fn;
  lhs.environments += rhs.environments;
  return lhs;
}

}  // namespace pacguard
