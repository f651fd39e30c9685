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

#include "pacguard/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pacguard/bounds/pac_bayes.hpp"
#include "pacguard/parallel.hpp"
#include "pacguard/predictor/objective.hpp"
#include "pacguard/rng.hpp"

namespace pacguard {
namespace {

// Sub-streams of TrainingConfig::seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kDrawStream = 3;
constexpr std::uint64_t kTraceStream = 4;

std::vector<std::vector<const LabeledSequence*>> epoch_batches(
    const std::vector<LabeledSequence>& seqs, const TrainingConfig& cfg, Rng& rng) {
  std::vector<std::size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t b = cfg.full_batch ? seqs.size() : std::min(cfg.batch, seqs.size());
  std::vector<std::vector<const LabeledSequence*>> out;
  for (std::size_t start = 0; start < order.size(); start += b) {
    std::vector<const LabeledSequence*> batch;
    for (std::size_t i = start; i < std::min(start + b, order.size()); ++i) {
      batch.push_back(&seqs[order[i]]);
    }
    out.push_back(std::move(batch));
  }
  return out;
}

std::vector<double> standard_normal(std::size_t n, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

void check_features(const FeedForwardNet& net, const LabeledRolloutSet& set,
                    const FeatureSpec& features) {
  if (set.rollouts.empty()) throw std::invalid_argument("training set is empty");
  for (const auto& r : set.rollouts) {
    if (r.observations.empty()) continue;
    if (features.input_dim(r.observations.front().size()) != net.architecture().input_dim()) {
      throw std::invalid_argument("network input width " +
                                  std::to_string(net.architecture().input_dim()) +
                                  " does not match the feature width " +
                                  std::to_string(features.input_dim(r.observations.front().size())));
    }
    return;
  }
}

}  // namespace

void TrainingConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("training." + field + ": " + why);
  };
  if (!(omega >= 0.0) || !std::isfinite(omega)) fail("omega", "must be finite and >= 0");
  if (k < 0) fail("k", "must be >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma", "must be finite and >= 0");
  if (epochs < 0) fail("epochs", "must be >= 0");
  if (batch < 1) fail("batch", "must be >= 1");
  if (m_train < 1) fail("m_train", "must be >= 1");
  if (!std::isfinite(log_s0)) fail("log_s0", "must be finite");
  if (last_steps < 0) fail("last_steps", "must be >= 0");
  if (trace_draws < 1) fail("trace_draws", "must be >= 1");
}

PriorResult train_prior(const LabeledRolloutSet& set, const FeedForwardNet& net,
                        const FeatureSpec& features, const TrainingConfig& cfg) {
  cfg.validate();
  check_features(net, set, features);
  const auto seqs = to_sequences(set, features, cfg.last_steps);
  ObjectiveSpec spec;
  spec.omega = cfg.omega;
  spec.k = cfg.k;
  spec.include_regularizer = false;

  Rng init(derive_seed(cfg.seed, kInitStream));
  Rng shuffle(derive_seed(cfg.seed, kShuffleStream));
  std::vector<double> w = net.initial_weights(init);
  std::vector<double> grad(w.size());
  NetWorkspace ws;
  PriorResult out;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double sum = 0.0;
    const auto batches = epoch_batches(seqs, cfg, shuffle);
    for (const auto& batch : batches) {
      std::fill(grad.begin(), grad.end(), 0.0);
      const double loss = surrogate_batch_loss(net, w, batch, spec, grad, ws);
      if (!std::isfinite(loss)) {
        throw DivergenceError("prior training diverged at epoch " + std::to_string(epoch));
      }
      sum += loss;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.gamma * grad[i];
    }
    out.loss_trace.push_back(sum / static_cast<double>(batches.size()));
  }
  for (double v : w) {
    if (!std::isfinite(v)) throw DivergenceError("prior training produced non-finite weights");
  }
  out.prior = PosteriorParams::around(std::move(w), cfg.log_s0);
  return out;
}

PosteriorResult train_posterior(const LabeledRolloutSet& set, const FeedForwardNet& net,
                                const FeatureSpec& features, const PosteriorParams& prior,
                                const TrainingConfig& cfg, const ConfidenceBudget& budget,
                                std::uint64_t certification_seed, std::string prior_id) {
  cfg.validate();
  budget.validate();
  prior.validate();
  check_features(net, set, features);
  if (prior.size() != net.parameter_count()) {
    throw std::invalid_argument("prior has " + std::to_string(prior.size()) +
                                " parameters, network expects " +
                                std::to_string(net.parameter_count()));
  }
  const auto seqs = to_sequences(set, features, cfg.last_steps);
  std::vector<const LabeledSequence*> all;
  for (const auto& s : seqs) all.push_back(&s);

  ObjectiveSpec spec;
  spec.omega = cfg.omega;
  spec.k = cfg.k;
  spec.n_total = set.size();
  spec.delta = budget.delta;

  Rng shuffle(derive_seed(cfg.seed, kShuffleStream));
  Rng draws(derive_seed(cfg.seed, kDrawStream));
  Rng trace_rng(derive_seed(cfg.seed, kTraceStream));
  std::vector<std::vector<double>> trace_noise;
  for (int d = 0; d < cfg.trace_draws; ++d) {
    trace_noise.push_back(standard_normal(prior.size(), trace_rng));
  }

  PosteriorResult out;
  PosteriorParams psi = prior;
  NetWorkspace ws;
  auto trace = [&]() {
    double s = 0.0;
    for (const auto& z : trace_noise) {
      const auto w = weights_from_noise(psi, z);
      s += surrogate_batch_loss(net, w, all, spec, {}, ws);
    }
    const double kl = kl_gaussians(psi, prior);
    out.kl_trace.push_back(kl);
    out.objective_trace.push_back(s / static_cast<double>(trace_noise.size()) +
                                  mcallester_gap(kl, spec.n_total, spec.delta));
  };
  trace();

  const std::size_t n = psi.size();
  std::vector<double> g_mu(n);
  std::vector<double> g_ls(n);
  const double inv_m = 1.0 / static_cast<double>(cfg.m_train);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& batch : epoch_batches(seqs, cfg, shuffle)) {
      std::fill(g_mu.begin(), g_mu.end(), 0.0);
      std::fill(g_ls.begin(), g_ls.end(), 0.0);
      for (int d = 0; d < cfg.m_train; ++d) {
        const auto z = standard_normal(n, draws);
        ObjectiveGradient g;
        try {
          g = grad_objective(net, psi, prior, z, batch, spec);
        } catch (const std::domain_error& e) {
          throw DivergenceError("posterior training diverged at epoch " +
                                std::to_string(epoch) + ": " + e.what());
        }
        if (!std::isfinite(g.value)) {
          throw DivergenceError("posterior objective is not finite at epoch " +
                                std::to_string(epoch));
        }
        for (std::size_t i = 0; i < n; ++i) {
          g_mu[i] += inv_m * g.grad_mu[i];
          g_ls[i] += inv_m * g.grad_log_s[i];
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        psi.mu[i] -= cfg.gamma * g_mu[i];
        psi.log_s[i] -= cfg.gamma * g_ls[i];
      }
    }
    trace();
  }

  const auto eval = evaluate(net, psi, set, features, budget.m, certification_seed, false);
  out.bound_counts = eval.counts;
  const double kl = kl_gaussians(psi, prior);
  out.certificate = certify_misclassification(eval.counts, kl, budget, std::move(prior_id));
  if (kl > cfg.kl_cap) {
    out.certificate.warnings.push_back("KL " + std::to_string(kl) + " exceeds the cap " +
                                       std::to_string(cfg.kl_cap));
  }
  out.posterior = std::move(psi);
  return out;
}

OutcomeCounts tally_outcomes(const LabeledRolloutSet& set, std::size_t draws,
                             const WarnFn& warn) {
  if (draws < 1) throw std::invalid_argument("tally_outcomes: draws must be >= 1");
  std::vector<OutcomeCounts> slots(set.size());
  parallel_for(set.size(), [&](std::size_t i) {
    const Rollout& r = set.rollouts[i];
    const std::size_t steps = r.steps_before_failure();
    OutcomeCounts& c = slots[i];
    c.draws = draws;
    c.environments = 1;
    for (std::size_t d = 0; d < draws; ++d) {
      bool warned = false;
      for (std::size_t s = 0; s < steps && !warned; ++s) warned = warn(d, i, s);
      if (r.y == 1) {
        c.add(warned ? OutcomeKind::kTruePositive : OutcomeKind::kFalseNegative);
      } else {
        c.add(warned ? OutcomeKind::kFalsePositive : OutcomeKind::kTrueNegative);
      }
    }
  });
  OutcomeCounts total;
  total.draws = draws;
  for (const auto& c : slots) total += c;
  return total;
}

OutcomeCounts evaluate_weights(const FeedForwardNet& net,
                               const std::vector<std::vector<double>>& weights,
                               const LabeledRolloutSet& set, const FeatureSpec& features) {
  if (weights.empty()) throw std::invalid_argument("evaluate: need at least one weight vector");
  std::vector<OutcomeCounts> slots(set.size());
  parallel_for(set.size(), [&](std::size_t i) {
    const Rollout& r = set.rollouts[i];
    const auto inputs = rollout_features(r, features);
    NetWorkspace ws;
    OutcomeCounts& c = slots[i];
    c.draws = weights.size();
    c.environments = 1;
    for (const auto& w : weights) {
      bool warned = false;
      for (std::size_t s = 0; s < inputs.size() && !warned; ++s) {
        warned = net.p_fail(w, inputs[s], ws) > 0.5;
      }
      if (r.y == 1) {
        c.add(warned ? OutcomeKind::kTruePositive : OutcomeKind::kFalseNegative);
      } else {
        c.add(warned ? OutcomeKind::kFalsePositive : OutcomeKind::kTrueNegative);
      }
    }
  });
  OutcomeCounts total;
  total.draws = weights.size();
  for (const auto& c : slots) total += c;
  return total;
}

InterventionReport intervention_report(const OutcomeCounts& c) {
  InterventionReport r;
  r.failures = c.tp + c.fn;
  r.successes = c.tn + c.fp;
  r.failures_averted = r.failures ? static_cast<double>(c.tp) / static_cast<double>(r.failures)
                                  : 0.0;
  r.needless_halts = r.successes ? static_cast<double>(c.fp) / static_cast<double>(r.successes)
                                 : 0.0;
  return r;
}

EvaluationResult evaluate(const FeedForwardNet& net, const PosteriorParams& posterior,
                          const LabeledRolloutSet& set, const FeatureSpec& features,
                          std::uint64_t m, std::uint64_t seed, bool intervention) {
  if (m < 1) throw std::invalid_argument("evaluate: M must be >= 1");
  Rng rng(seed);
  std::vector<std::vector<double>> weights;
  weights.reserve(m);
  for (std::uint64_t d = 0; d < m; ++d) weights.push_back(sample_weights(posterior, rng).w);
  EvaluationResult out;
  out.counts = evaluate_weights(net, weights, set, features);
  if (intervention) out.intervention = intervention_report(out.counts);
  return out;
}

}  // namespace pacguard
