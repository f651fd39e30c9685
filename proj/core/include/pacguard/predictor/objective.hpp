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
#include <span>
#include <vector>

#include "pacguard/predictor/gaussian.hpp"
#include "pacguard/predictor/network.hpp"

namespace pacguard {

/// Network inputs of one rollout for the steps that enter the loss, plus the
/// rollout label needed to build per-step targets.
struct LabeledSequence {
  std::vector<std::vector<double>> inputs;  // inputs[i] is step first_step + i, all < t_fail
  int first_step = 1;
  int y = 0;
  int t_fail = 1;
  int horizon = 1;
};

struct ObjectiveSpec {
  double omega = 1.0;      // false-negative weight of the surrogate
  int k = 0;               // look-ahead steps
  std::size_t n_total = 1; // N used by the PAC-Bayes regularizer
  double delta = 0.05;
  bool include_regularizer = true;
};

/// Mean surrogate loss over `batch` at fixed weights; accumulates its
/// gradient with respect to w into `grad_w` (may be empty to skip).
double surrogate_batch_loss(const FeedForwardNet& net, std::span<const double> w,
                            std::span<const LabeledSequence* const> batch,
                            const ObjectiveSpec& spec, std::span<double> grad_w,
                            NetWorkspace& ws);

struct ObjectiveGradient {
  double value = 0.0;           // surrogate mean + regularizer
  double surrogate_mean = 0.0;
  double kl = 0.0;
  double regularizer = 0.0;     // sqrt((KL + log(2√N/δ)) / (2N))
  std::vector<double> grad_mu;
  std::vector<double> grad_log_s;
};

/// Objective B on a minibatch for the recorded noise draw, and its exact
/// gradient with respect to (mu, log_s) through w = mu + exp(log_s/2)·z and
/// the KL closed form. Throws std::domain_error naming the first
/// non-finite gradient entry.
ObjectiveGradient grad_objective(const FeedForwardNet& net, const PosteriorParams& psi,
                                 const PosteriorParams& prior, std::span<const double> noise,
                                 std::span<const LabeledSequence* const> batch,
                                 const ObjectiveSpec& spec);

}  // namespace pacguard
