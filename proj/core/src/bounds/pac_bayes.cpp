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

#include "pacguard/bounds/pac_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pacguard {

double mcallester_gap(double kl, std::uint64_t n, double delta) {
  if (!(kl >= 0.0)) throw std::invalid_argument("mcallester_gap: kl must be >= 0");
  if (n < 1) throw std::invalid_argument("mcallester_gap: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("mcallester_gap: delta ∉ (0,1)");
  const double nn = static_cast<double>(n);
  return std::sqrt((kl + std::log(2.0 * std::sqrt(nn) / delta)) / (2.0 * nn));
}

double kl_bernoulli(double q, double p) {
  auto term = [](double a, double b) {
    if (a <= 0.0) return 0.0;
    if (b <= 0.0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b);
  };
  return term(q, p) + term(1.0 - q, 1.0 - p);
}

double kl_inverse_bound(double emp_mean, std::uint64_t m, double delta_mc) {
  if (m < 1) throw std::invalid_argument("kl_inverse_bound: m must be >= 1");
  if (!(delta_mc > 0.0 && delta_mc < 1.0)) {
    throw std::invalid_argument("kl_inverse_bound: delta_mc ∉ (0,1)");
  }
  emp_mean = std::clamp(emp_mean, 0.0, 1.0);
  if (emp_mean >= 1.0) return 1.0;
  const double budget = std::log(2.0 / delta_mc) / static_cast<double>(m);
  double lo = emp_mean;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (kl_bernoulli(emp_mean, mid) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace pacguard
