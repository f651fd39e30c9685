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

#include "pacguard/predictor/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pacguard {

PosteriorParams PosteriorParams::around(std::vector<double> mean, double log_variance) {
  PosteriorParams p;
  p.log_s.assign(mean.size(), log_variance);
  p.mu = std::move(mean);
  return p;
}

void PosteriorParams::validate() const {
  if (mu.size() != log_s.size()) throw std::invalid_argument("mu and log_s differ in length");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(mu[i]) || !std::isfinite(log_s[i])) {
      throw std::invalid_argument("non-finite posterior parameter at index " + std::to_string(i));
    }
  }
}

WeightSample sample_weights(const PosteriorParams& psi, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  WeightSample s;
  s.noise.resize(psi.size());
  for (auto& z : s.noise) z = normal(rng);
  s.w = weights_from_noise(psi, s.noise);
  return s;
}

std::vector<double> weights_from_noise(const PosteriorParams& psi, std::span<const double> noise) {
  if (noise.size() != psi.size()) throw std::invalid_argument("noise length mismatch");
  std::vector<double> w(psi.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = psi.mu[i] + std::exp(0.5 * psi.log_s[i]) * noise[i];
  }
  return w;
}

double kl_gaussians(const PosteriorParams& psi, const PosteriorParams& psi0) {
  if (psi.size() != psi0.size() || psi.log_s.size() != psi0.log_s.size()) {
    throw std::invalid_argument("kl_gaussians: parameter lengths differ");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double d = psi.log_s[i] - psi0.log_s[i];
    const double dm = psi.mu[i] - psi0.mu[i];
    // s/s0 - 1 + log(s0/s) written as expm1(d) - d for accuracy near d = 0.
    kl += 0.5 * ((std::expm1(d) - d) + dm * dm * std::exp(-psi0.log_s[i]));
  }
  if (!std::isfinite(kl)) throw std::domain_error("kl_gaussians: non-finite result");
  return kl;
}

void accumulate_kl_gradient(const PosteriorParams& psi, const PosteriorParams& psi0,
                            double scale, std::span<double> grad_mu,
                            std::span<double> grad_log_s) {
  for (std::size_t i = 0; i < psi.size(); ++i) {
    grad_mu[i] += scale * (psi.mu[i] - psi0.mu[i]) * std::exp(-psi0.log_s[i]);
    grad_log_s[i] += scale * 0.5 * std::expm1(psi.log_s[i] - psi0.log_s[i]);
  }
}

}  // namespace pacguard
