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

#include "pacguard/predictor/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pacguard/bounds/pac_bayes.hpp"
#include "pacguard/training/surrogate.hpp"

namespace pacguard {

double surrogate_batch_loss(const FeedForwardNet& net, std::span<const double> w,
                            std::span<const LabeledSequence* const> batch,
                            const ObjectiveSpec& spec, std::span<double> grad_w,
                            NetWorkspace& ws) {
  if (batch.empty()) return 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  std::vector<double> probs;
  std::vector<double> dp;
  for (const LabeledSequence* seq : batch) {
    probs.resize(seq->inputs.size());
    for (std::size_t j = 0; j < seq->inputs.size(); ++j) {
      probs[j] = net.p_fail(w, seq->inputs[j], ws);
    }
    if (grad_w.empty()) {
      total += surrogate_loss(probs, seq->y, seq->t_fail, seq->horizon, spec.omega, spec.k,
                              seq->first_step);
      continue;
    }
    dp.resize(probs.size());
    total += surrogate_loss_with_grad(probs, seq->y, seq->t_fail, seq->horizon, spec.omega,
                                      spec.k, dp, seq->first_step);
    for (std::size_t j = 0; j < seq->inputs.size(); ++j) {
      if (dp[j] != 0.0) net.backward(w, seq->inputs[j], dp[j] * inv_b, grad_w, ws);
    }
  }
  return total * inv_b;
}

ObjectiveGradient grad_objective(const FeedForwardNet& net, const PosteriorParams& psi,
                                 const PosteriorParams& prior, std::span<const double> noise,
                                 std::span<const LabeledSequence* const> batch,
                                 const ObjectiveSpec& spec) {
  const std::size_t n = psi.size();
  if (prior.size() != n || noise.size() != n || net.parameter_count() != n) {
    throw std::invalid_argument("grad_objective: parameter lengths disagree");
  }
  ObjectiveGradient out;
  out.grad_mu.assign(n, 0.0);
  out.grad_log_s.assign(n, 0.0);

  const auto w = weights_from_noise(psi, noise);
  std::vector<double> grad_w(n, 0.0);
  NetWorkspace ws;
  out.surrogate_mean = surrogate_batch_loss(net, w, batch, spec, grad_w, ws);
  for (std::size_t i = 0; i < n; ++i) {
    out.grad_mu[i] = grad_w[i];
    // ∂w/∂log_s = 0.5·exp(log_s/2)·z
    out.grad_log_s[i] = grad_w[i] * 0.5 * std::exp(0.5 * psi.log_s[i]) * noise[i];
  }

  out.value = out.surrogate_mean;
  if (spec.include_regularizer) {
    out.kl = kl_gaussians(psi, prior);
    out.regularizer = mcallester_gap(out.kl, spec.n_total, spec.delta);
    const double dr_dkl = 1.0 / (4.0 * static_cast<double>(spec.n_total) * out.regularizer);
    accumulate_kl_gradient(psi, prior, dr_dkl, out.grad_mu, out.grad_log_s);
    out.value += out.regularizer;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(out.grad_mu[i])) {
      throw std::domain_error("grad_objective: non-finite gradient in mu at index " +
                              std::to_string(i));
    }
    if (!std::isfinite(out.grad_log_s[i])) {
      throw std::domain_error("grad_objective: non-finite gradient in log_s at index " +
                              std::to_string(i));
    }
  }
  return out;
}

}  // namespace pacguard
