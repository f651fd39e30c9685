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

#include "pacguard/bounds/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pacguard {

double bernstein_quadratic(double p, double p_hat, double k_coef) {
  return p * p * (1.0 + k_coef) - (2.0 * p_hat + k_coef) * p + p_hat * p_hat;
}

BernsteinResult bernstein_lower(double p_hat, std::uint64_t n, double delta) {
  if (n < 1) throw std::invalid_argument("bernstein_lower: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("bernstein_lower: delta ∉ (0,1)");
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw std::invalid_argument("bernstein_lower: p_hat ∉ [0,1]");
  BernsteinResult r;
  r.p_hat = p_hat;
  r.n = n;
  r.delta = delta;
  const double log_term = std::log(2.0 / delta);
  const double nn = static_cast<double>(n);
  r.k_coef = 100.0 * log_term / (9.0 * nn);
  const double b = 2.0 * p_hat + r.k_coef;
  // Discriminant K² + 4K·p̂(1 - p̂) is never negative.
  const double disc = r.k_coef * r.k_coef + 4.0 * r.k_coef * p_hat * (1.0 - p_hat);
  // Lesser root via c / (a · larger root) to avoid cancellation.
  const double big = b + std::sqrt(disc);
  const double root = big > 0.0 ? 2.0 * p_hat * p_hat / big : 0.0;
  r.p_low = std::clamp(root, 0.0, p_hat);
  r.k_low = 0.6 * std::sqrt(nn * r.p_low / (2.0 * log_term));
  return r;
}

}  // namespace pacguard
