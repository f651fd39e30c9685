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

#include <cstdint>

namespace pacguard {

/// Certified lower bound on a Bernoulli rate from its empirical frequency.
struct BernsteinResult {
  double p_hat = 0.0;
  double p_low = 0.0;   // lesser root of the Bernstein quadratic, in [0, p_hat]
  double k_low = 0.0;   // ratio bound (3/5)·sqrt(N·p_low / (2·log(2/δ)))
  double k_coef = 0.0;  // K_δN = 100·log(2/δ) / (9N)
  std::uint64_t n = 0;
  double delta = 0.0;
  /// The ratio bound requires K > 1; below that the class is too rare to
  /// certify anything.
  bool insufficient() const { return !(k_low > 1.0); }
};

/// Solves p²(1 + K) - (2p̂ + K)p + p̂² = 0 for its lesser root.
/// Never throws for valid inputs; rare classes are flagged instead.
BernsteinResult bernstein_lower(double p_hat, std::uint64_t n, double delta);

/// Left-hand side of the quadratic at p (used by tests as a residual).
double bernstein_quadratic(double p, double p_hat, double k_coef);

}  // namespace pacguard
