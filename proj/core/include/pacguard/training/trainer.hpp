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
#include <functional>
#include <optional>
#include <vector>

#include "pacguard/bounds/certificate.hpp"
#include "pacguard/envs/rollout.hpp"
#include "pacguard/predictor/gaussian.hpp"
#include "pacguard/predictor/network.hpp"
#include "pacguard/training/dataset.hpp"

namespace pacguard {

struct TrainingConfig {
  double omega = 1.0;        // false-negative weight
  int k = 1;                 // look-ahead steps
  double gamma = 0.05;       // SGD step size
  int epochs = 50;
  std::size_t batch = 64;
  int m_train = 1;           // weight draws per optimizer step
  std::uint64_t seed = 0;    // drives initialization, shuffling and weight draws
  double log_s0 = -6.0;      // prior log-variance
  int last_steps = 0;        // step mask: train on the last L steps only (0 = all)
  bool full_batch = false;   // one step per epoch over the whole set
  double kl_cap = 1e4;       // warn when the final KL exceeds this
  int trace_draws = 4;       // fixed draws used to trace B once per epoch

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PriorResult {
  PosteriorParams prior;
  std::vector<double> loss_trace;  // mean minibatch loss per epoch
};

/// Point-estimate SGD on the surrogate loss; log_s is set to cfg.log_s0.
PriorResult train_prior(const LabeledRolloutSet& set, const FeedForwardNet& net,
                        const FeatureSpec& features, const TrainingConfig& cfg);

struct PosteriorResult {
  PosteriorParams posterior;
  Certificate certificate;
  OutcomeCounts bound_counts;
  /// B at the fixed trace draws: entry 0 before training, then once per epoch.
  std::vector<double> objective_trace;
  std::vector<double> kl_trace;
};

/// Minimizes B = surrogate mean + McAllester gap from the prior (which is
/// never modified), then certifies the 0/1 misclassification cost with
/// budget.m posterior draws on the same bound partition.
PosteriorResult train_posterior(const LabeledRolloutSet& set, const FeedForwardNet& net,
                                const FeatureSpec& features, const PosteriorParams& prior,
                                const TrainingConfig& cfg, const ConfidenceBudget& budget,
                                std::uint64_t certification_seed, std::string prior_id = {});

/// warn(draw, rollout index, step index) decides ŷ at that step.
using WarnFn = std::function<bool(std::size_t draw, std::size_t rollout, std::size_t step)>;

/// Outcome tallies of `draws` predictors over every rollout.
OutcomeCounts tally_outcomes(const LabeledRolloutSet& set, std::size_t draws, const WarnFn& warn);

struct InterventionReport {
  double failures_averted = 0.0;  // warned before t_fail among failures
  double needless_halts = 0.0;    // warned among successes
  std::uint64_t failures = 0;
  std::uint64_t successes = 0;
};

struct EvaluationResult {
  OutcomeCounts counts;
  std::optional<InterventionReport> intervention;
};

/// Deterministic weights evaluated on every rollout; one draw per weight vector.
OutcomeCounts evaluate_weights(const FeedForwardNet& net,
                               const std::vector<std::vector<double>>& weights,
                               const LabeledRolloutSet& set, const FeatureSpec& features);

/// M posterior draws (sampled from `seed`, shared across environments).
EvaluationResult evaluate(const FeedForwardNet& net, const PosteriorParams& posterior,
                          const LabeledRolloutSet& set, const FeatureSpec& features,
                          std::uint64_t m, std::uint64_t seed, bool intervention);

InterventionReport intervention_report(const OutcomeCounts& counts);

}  // namespace pacguard
