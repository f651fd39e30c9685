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

#include <span>
#include <vector>

#include "pacguard/rng.hpp"

namespace pacguard {

/// Diagonal Gaussian over flattened network weights: N(mu, diag(exp(log_s))).
/// `log_s` is the per-weight log-variance.
struct PosteriorParams {
  std::vector<double> mu;
  std::vector<double> log_s;

  std::size_t size() const { return mu.size(); }
  /// Point mass surrogate at `mean` with constant log-variance.
  static PosteriorParams around(std::vector<double> mean, double log_variance);
  /// Throws std::invalid_argument on length mismatch or non-finite entries.
  void validate() const;

  friend bool operator==(const PosteriorParams&, const PosteriorParams&) = default;
};

/// A reparameterized draw: w = mu + exp(log_s / 2) ⊙ noise.
struct WeightSample {
  std::vector<double> w;
  std::vector<double> noise;
};

WeightSample sample_weights(const PosteriorParams& psi, Rng& rng);
/// Rebuilds w from a recorded standard-normal draw.
std::vector<double> weights_from_noise(const PosteriorParams& psi, std::span<const double> noise);

/// KL(psi ‖ psi0) between diagonal Gaussians. Throws std::domain_error when
/// the result is not finite, std::invalid_argument on length mismatch.
double kl_gaussians(const PosteriorParams& psi, const PosteriorParams& psi0);

/// Adds scale · ∂KL/∂(mu, log_s) into the two gradient buffers.
void accumulate_kl_gradient(const PosteriorParams& psi, const PosteriorParams& psi0,
                            double scale, std::span<double> grad_mu,
                            std::span<double> grad_log_s);

}  // namespace pacguard
