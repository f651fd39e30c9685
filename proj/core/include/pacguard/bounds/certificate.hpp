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
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pacguard/bounds/bernstein.hpp"
#include "pacguard/envs/rollout.hpp"

namespace pacguard {

struct ConfidenceBudget {
  double delta = 0.05;     // PAC-Bayes (and Bernstein) confidence
  double delta_mc = 0.01;  // sample-convergence step over posterior draws
  std::uint64_t m = 100;   // posterior weight draws used for certification
  /// Split δ evenly between the Bernstein and PAC-Bayes events of the
  /// class-conditional bound. Off by default: both events use δ.
  bool strict_delta = false;
  /// Inflate the Monte-Carlo estimate of the posterior-expected cost by
  /// Bernoulli-KL inversion. Disable only for deterministic predictors whose
  /// empirical cost is exact.
  bool sample_convergence = true;

  void validate() const;
};

class CertificationImpossible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CertificateKind { kMisclassification, kConditional, kFnr, kFpr };

std::string_view to_string(CertificateKind kind);
CertificateKind certificate_kind_from_string(std::string_view s);

/// A bound with every ingredient needed to recompute it.
struct Certificate {
  CertificateKind kind = CertificateKind::kMisclassification;
  double bound = 0.0;          // min(bound_preclip, 1)
  double bound_preclip = 0.0;
  double empirical_term = 0.0; // misclassification mean, or Ĉ_S
  double mc_term = 0.0;        // sample-convergence inflation (already scaled)
  double kl = 0.0;
  double regularizer = 0.0;    // McAllester gap R at the PAC-Bayes δ
  double pac_term = 0.0;       // R, or C_λ·R
  double bernstein_term = 0.0; // (5/3)·sqrt((1 - p̲)·log(2/δ) / (N·p̲))
  double chain_bound = 0.0;    // C_λ·(inflated C̃ mean) + C_λ·R
  double c_lambda = 0.0;
  double c_tilde_mean = 0.0;

  std::uint64_t n = 0;  // environments
  std::uint64_t m = 1;  // draws per environment
  std::uint64_t n_class1 = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t errors = 0;
  double delta = 0.0;
  double delta_mc = 0.0;
  double delta_bernstein = 0.0;
  double delta_pac = 0.0;
  bool strict_delta = false;
  bool sample_convergence = true;
  double lambda = 0.0;
  BernsteinResult class0;
  BernsteinResult class1;
  std::string prior_id;
  std::vector<std::string> warnings;
};

/// Reweighted [0,1] cost of one outcome: FP -> λ/(C_λ p̲_0),
/// FN -> (1-λ)/(C_λ p̲_1), TP/TN -> 0. Throws CertificationImpossible when a
/// lower bound is not positive.
double conditional_cost(OutcomeKind outcome, double lambda, double p_low_0, double p_low_1);
/// C_λ = λ/p̲_0 + (1-λ)/p̲_1.
double c_lambda(double lambda, double p_low_0, double p_low_1);

/// Misclassification bound: KL-inverted empirical cost plus the McAllester gap.
Certificate certify_misclassification(const OutcomeCounts& counts, double kl,
                                      const ConfidenceBudget& budget,
                                      std::string prior_id = {});

/// Weighted conditional bound (1-λ)·FNR + λ·FPR; λ = 0 bounds the FNR and
/// λ = 1 the FPR. Throws CertificationImpossible when a class is absent or
/// its Bernstein lower bound is insufficient.
Certificate certify_conditional(const OutcomeCounts& counts, double kl, double lambda,
                                const ConfidenceBudget& budget, std::string prior_id = {});

/// Recomputes the pre-clip bound from the recorded inputs only.
double recompute_bound(const Certificate& cert);

/// Ratio bound used by the over-approximation chain,
/// (3/10)·sqrt(N·p̲ / ((1 - p̲)·log(2/δ))); at the Bernstein root it equals
/// p̲ / (p̂ - p̲).
double chain_ratio_bound(const BernsteinResult& r);

struct SweepPoint {
  double train_weight = 0.0;  // ω used to train this posterior
  OutcomeCounts counts;       // bound-set counts
  double kl = 0.0;
  std::optional<OutcomeCounts> heldout;
};

struct CurveRow {
  double train_weight = 0.0;
  std::optional<Certificate> fnr;
  std::optional<Certificate> fpr;
  std::string fnr_refusal;
  std::string fpr_refusal;
  double empirical_fnr = 0.0;
  double empirical_fpr = 0.0;
};

/// FNR (λ = 0) and FPR (λ = 1) certificates for every sweep point. Empirical
/// rates come from the held-out counts when present. Needs >= 2 points.
std::vector<CurveRow> fnr_fpr_curve(const std::vector<SweepPoint>& points,
                                    const ConfidenceBudget& budget);

std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(std::string_view text);

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);

}  // namespace pacguard
