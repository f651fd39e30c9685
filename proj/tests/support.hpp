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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pacguard/predictor/objective.hpp"

namespace pacguard::testing {

/// A random network, posterior, prior, noise draw and labeled batch.
struct GradientInstance {
  NetArchitecture arch;
  PosteriorParams psi;
  PosteriorParams prior;
  std::vector<double> noise;
  std::vector<LabeledSequence> sequences;
  ObjectiveSpec spec;

  std::vector<const LabeledSequence*> batch() const {
    std::vector<const LabeledSequence*> b;
    for (const auto& s : sequences) b.push_back(&s);
    return b;
  }
};

/// Up to 3 weight layers, widths <= 16, batch <= 8.
inline GradientInstance random_instance(Rng& rng, Activation activation) {
  std::uniform_int_distribution<int> layers(1, 3), width(1, 16), batch(1, 8), horizon(1, 6);
  std::normal_distribution<double> z(0.0, 1.0);
  GradientInstance g;
  g.arch.activation = activation;
  g.arch.widths.push_back(static_cast<std::size_t>(width(rng)));
  const int hidden = layers(rng) - 1;
  for (int l = 0; l < hidden; ++l) g.arch.widths.push_back(static_cast<std::size_t>(width(rng)));
  g.arch.widths.push_back(2);
  const FeedForwardNet net(g.arch);
  g.prior = PosteriorParams::around(net.initial_weights(rng), -3.0 + z(rng));
  g.psi = g.prior;
  for (auto& m : g.psi.mu) m += 0.3 * z(rng);
  for (auto& s : g.psi.log_s) s += 0.3 * z(rng);
  g.noise.resize(g.psi.size());
  for (auto& x : g.noise) x = z(rng);
  const int b = batch(rng);
  for (int i = 0; i < b; ++i) {
    LabeledSequence s;
    s.horizon = horizon(rng);
    std::uniform_int_distribution<int> tf(1, s.horizon + 1);
    s.t_fail = tf(rng);
    s.y = s.t_fail <= s.horizon ? 1 : 0;
    for (int j = 1; j < s.t_fail && j <= s.horizon; ++j) {
      std::vector<double> x(g.arch.input_dim());
      for (auto& v : x) v = z(rng);
      s.inputs.push_back(std::move(x));
    }
    g.sequences.push_back(std::move(s));
  }
  g.spec.omega = std::uniform_real_distribution<double>(0.2, 4.0)(rng);
  g.spec.k = std::uniform_int_distribution<int>(0, 3)(rng);
  g.spec.n_total = std::uniform_int_distribution<std::size_t>(10, 5000)(rng);
  g.spec.delta = 0.05;
  return g;
}

/// Max over all coordinates of |analytic - fd| / max(|analytic|, |fd|, floor),
/// using central differences of the full objective.
inline double gradient_max_relative_error(const GradientInstance& g, double step = 1e-5,
                                          double floor = 1e-6) {
  const FeedForwardNet net(g.arch);
  const auto batch = g.batch();
  const auto analytic = grad_objective(net, g.psi, g.prior, g.noise, batch, g.spec);
  double worst = 0.0;
  for (int which = 0; which < 2; ++which) {
    for (std::size_t i = 0; i < g.psi.size(); ++i) {
      auto plus = g.psi, minus = g.psi;
      (which ? plus.log_s : plus.mu)[i] += step;
      (which ? minus.log_s : minus.mu)[i] -= step;
      const double fp = grad_objective(net, plus, g.prior, g.noise, batch, g.spec).value;
      const double fm = grad_objective(net, minus, g.prior, g.noise, batch, g.spec).value;
      const double fd = (fp - fm) / (2.0 * step);
      const double an = (which ? analytic.grad_log_s : analytic.grad_mu)[i];
      const double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), floor});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace pacguard::testing
