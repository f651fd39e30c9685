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

#include "pacguard/conformal/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "pacguard/io/format.hpp"
#include "pacguard/parallel.hpp"
#include "pacguard/rng.hpp"

namespace pacguard {

using detail::format_double;

CalibrationSet CalibrationSet::from_labeled(std::span<const double> scores,
                                            std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("calibration: scores and labels differ in length");
  }
  CalibrationSet c;
  c.t_total = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == 1) c.failure_scores.push_back(scores[i]);
  }
  std::sort(c.failure_scores.begin(), c.failure_scores.end());
  return c;
}

void CalibrationSet::validate() const {
  if (failure_scores.size() > t_total) {
    throw std::invalid_argument("calibration: more failures than calibration rollouts");
  }
  if (!std::is_sorted(failure_scores.begin(), failure_scores.end())) {
    throw std::invalid_argument("calibration: failure scores must be sorted");
  }
}

bool CalibrationSet::has_ties() const {
  return std::adjacent_find(failure_scores.begin(), failure_scores.end()) !=
         failure_scores.end();
}

namespace {

bool warn_at_rank(std::size_t below, std::size_t n, double epsilon) {
  const double q = static_cast<double>(below + 1) / static_cast<double>(n + 1);
  return q <= 1.0 - epsilon;
}

}  // namespace

ConformalDecision conformal_warn(const CalibrationSet& calib, double g_test, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
  const auto& a = calib.failure_scores;
  const auto below =
      static_cast<std::size_t>(std::lower_bound(a.begin(), a.end(), g_test) - a.begin());
  ConformalDecision d;
  d.q = static_cast<double>(below + 1) / static_cast<double>(a.size() + 1);
  d.warn = warn_at_rank(below, a.size(), epsilon) ? 1 : 0;
  return d;
}

void ScoreSpec::validate() const {
  if (fail_hi < fail_lo) throw std::invalid_argument("score spec: fail_hi < fail_lo");
  if (success_hi < success_lo) throw std::invalid_argument("score spec: success_hi < success_lo");
  if (!(class_rate > 0.0 && class_rate < 1.0)) {
    throw std::invalid_argument("score spec: class_rate must be in (0,1)");
  }
}

void CoverageConfig::validate() const {
  spec.validate();
  if (draws < 100) throw std::invalid_argument("coverage: draws must be >= 100");
  if (t_total < 1) throw std::invalid_argument("coverage: T must be >= 1");
  if (!(epsilon_star > 0.0 && epsilon_star < 1.0)) {
    throw std::invalid_argument("coverage: epsilon_star must be in (0,1)");
  }
}

double conditional_safety_uniform(const CalibrationSet& calib, double epsilon, double lo,
                                  double hi) {
  const auto& a = calib.failure_scores;
  const std::size_t n = a.size();
  // warn iff |A_<| <= r_max; |A_<| is nondecreasing in g, so the warning
  // region is g <= a[r_max] (or everything when r_max = n).
  std::size_t r = n + 1;
  while (r > 0 && !warn_at_rank(r - 1, n, epsilon)) --r;
  if (r == 0) return 0.0;  // never warns
  if (r == n + 1) return 1.0;
  const double thr = a[r - 1];
  return std::clamp((thr - lo) / (hi - lo), 0.0, 1.0);
}

CoverageReport coverage_experiment(const CoverageConfig& cfg) {
  cfg.validate();
  CoverageReport rep;
  rep.epsilon_star = cfg.epsilon_star;
  if (cfg.spec.degenerate()) {
    rep.degenerate = true;
    return rep;
  }
  rep.conditional_safety.assign(cfg.draws, 0.0);
  rep.calibration_failures.assign(cfg.draws, 0);
  rep.epsilon_used.assign(cfg.draws, 0.0);
  std::vector<double> guarantee(cfg.draws, 0.0);
  parallel_for(cfg.draws, [&](std::size_t d) {
    Rng rng(derive_seed(cfg.seed, d));
    std::bernoulli_distribution fails(cfg.spec.class_rate);
    std::uniform_real_distribution<double> fail_score(cfg.spec.fail_lo, cfg.spec.fail_hi);
    std::uniform_real_distribution<double> ok_score(cfg.spec.success_lo, cfg.spec.success_hi);
    CalibrationSet calib;
    calib.t_total = cfg.t_total;
    for (std::size_t t = 0; t < cfg.t_total; ++t) {
      if (fails(rng)) {
        calib.failure_scores.push_back(fail_score(rng));
      } else {
        (void)ok_score(rng);  // keeps the stream aligned with the mixture
      }
    }
    std::sort(calib.failure_scores.begin(), calib.failure_scores.end());
    const std::size_t n = calib.failure_scores.size();
    double eps = cfg.epsilon_star;
    if (cfg.finite_sample_correction) {
      eps = std::max(cfg.epsilon_star - 1.0 / static_cast<double>(n + 1), 1e-12);
    }
    double safety;
    if (cfg.test_points == 0) {
      safety = conditional_safety_uniform(calib, eps, cfg.spec.fail_lo, cfg.spec.fail_hi);
    } else {
      std::size_t warned = 0;
      for (std::size_t i = 0; i < cfg.test_points; ++i) {
        warned += static_cast<std::size_t>(conformal_warn(calib, fail_score(rng), eps).warn);
      }
      safety = static_cast<double>(warned) / static_cast<double>(cfg.test_points);
    }
    rep.conditional_safety[d] = safety;
    rep.calibration_failures[d] = n;
    rep.epsilon_used[d] = eps;
    guarantee[d] = 1.0 - eps - 1.0 / static_cast<double>(n + 1);
  });
  double sum = 0.0;
  double sq = 0.0;
  std::size_t violations = 0;
  double gsum = 0.0;
  for (std::size_t d = 0; d < cfg.draws; ++d) {
    sum += rep.conditional_safety[d];
    sq += rep.conditional_safety[d] * rep.conditional_safety[d];
    gsum += guarantee[d];
    if (rep.conditional_safety[d] < 1.0 - cfg.epsilon_star) ++violations;
  }
  const double k = static_cast<double>(cfg.draws);
  rep.marginal_safety = sum / k;
  const double var = std::max(0.0, sq / k - rep.marginal_safety * rep.marginal_safety);
  rep.marginal_se = std::sqrt(var * k / (k - 1.0) / k);
  rep.violation_fraction = static_cast<double>(violations) / k;
  rep.mean_guarantee = gsum / k;
  return rep;
}

std::vector<ComparisonRow> pacbayes_vs_conformal(const CoverageReport& conformal,
                                                 std::span<const BoundTrial> pac_bayes,
                                                 double delta) {
  std::vector<ComparisonRow> rows;
  if (!conformal.degenerate && !conformal.conditional_safety.empty()) {
    ComparisonRow r;
    r.method = "conformal";
    r.marginal_error = 1.0 - conformal.marginal_safety;
    r.violation_fraction = conformal.violation_fraction;
    r.draws = conformal.conditional_safety.size();
    r.violation_se = std::sqrt(r.violation_fraction * (1.0 - r.violation_fraction) /
                               static_cast<double>(r.draws));
    r.guarantee = conformal.epsilon_star;
    rows.push_back(r);
  }
  if (!pac_bayes.empty()) {
    ComparisonRow r;
    r.method = "pac_bayes";
    std::size_t bad = 0;
    double err = 0.0;
    for (const auto& t : pac_bayes) {
      bad += t.violated() ? 1 : 0;
      err += t.heldout_error;
    }
    r.draws = pac_bayes.size();
    r.marginal_error = err / static_cast<double>(r.draws);
    r.violation_fraction = static_cast<double>(bad) / static_cast<double>(r.draws);
    r.violation_se = std::sqrt(delta * (1.0 - delta) / static_cast<double>(r.draws));
    r.guarantee = delta;
    rows.push_back(r);
  }
  return rows;
}

void write_coverage_csv(std::ostream& out, const CoverageReport& rep) {
  out << "draw,calibration_failures,epsilon,conditional_safety,violates\n";
  for (std::size_t d = 0; d < rep.conditional_safety.size(); ++d) {
    out << d << ',' << rep.calibration_failures[d] << ',' << format_double(rep.epsilon_used[d])
        << ',' << format_double(rep.conditional_safety[d]) << ','
        << (rep.conditional_safety[d] < 1.0 - rep.epsilon_star ? 1 : 0) << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "method,marginal_error,violation_fraction,violation_se,guarantee,draws\n";
  for (const auto& r : rows) {
    out << r.method << ',' << format_double(r.marginal_error) << ','
        << format_double(r.violation_fraction) << ',' << format_double(r.violation_se) << ','
        << format_double(r.guarantee) << ',' << r.draws << '\n';
  }
}

}  // namespace pacguard
