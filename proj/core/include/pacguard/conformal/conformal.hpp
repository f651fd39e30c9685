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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pacguard {

/// Scores g(Y) of calibration rollouts that truly failed (the set A), sorted
/// ascending, and the total calibration size T.
struct CalibrationSet {
  std::vector<double> failure_scores;
  std::size_t t_total = 0;

  /// Keeps the scores with label 1 and sorts them.
  static CalibrationSet from_labeled(std::span<const double> scores, std::span<const int> labels);
  /// Throws std::invalid_argument unless sorted and |A| <= T.
  void validate() const;
  /// True when two failure scores coincide (continuity assumption broken).
  bool has_ties() const;
};

struct ConformalDecision {
  int warn = 0;
  double q = 1.0;  // (|A_<| + 1) / (|A| + 1)
};

/// warn = 1 iff q <= 1 - ε, where A_< are the failure scores strictly below
/// g_test. Low scores look like failures.
ConformalDecision conformal_warn(const CalibrationSet& calib, double g_test, double epsilon);

/// Failing and succeeding scores are uniform on their intervals; a rollout
/// fails with probability class_rate.
struct ScoreSpec {
  double fail_lo = 0.0;
  double fail_hi = 0.4;
  double success_lo = 0.6;
  double success_hi = 1.0;
  double class_rate = 0.25;  // ε_D

  void validate() const;
  bool degenerate() const { return !(fail_hi > fail_lo); }
};

struct CoverageConfig {
  ScoreSpec spec;
  std::size_t t_total = 500;
  double epsilon_star = 0.015;
  std::size_t draws = 2000;
  std::uint64_t seed = 0;
  /// Run each draw at ε = ε* - 1/(|A|+1) so the marginal guarantee
  /// 1 - ε - 1/(|A|+1) equals the 1 - ε* target; otherwise ε = ε*.
  bool finite_sample_correction = true;
  /// 0: conditional safety from the exact score CDF; otherwise a Monte-Carlo
  /// estimate on this many fresh failing test points per draw.
  std::size_t test_points = 0;

  void validate() const;
};

struct CoverageReport {
  bool degenerate = false;  // ties by construction: flagged, not computed
  double epsilon_star = 0.0;
  std::vector<double> conditional_safety;  // P[warn | failure] per calibration draw
  std::vector<std::size_t> calibration_failures;
  std::vector<double> epsilon_used;
  double marginal_safety = 0.0;  // grand mean
  double marginal_se = 0.0;      // Monte-Carlo standard error of the grand mean
  double violation_fraction = 0.0;  // draws with safety < 1 - ε*
  double mean_guarantee = 0.0;      // mean of 1 - ε_used - 1/(|A|+1)
};

/// Resamples calibration sets and measures the per-draw conditional warning
/// rate on failures. Throws std::invalid_argument when draws < 100.
CoverageReport coverage_experiment(const CoverageConfig& cfg);

/// Exact P[warn | failure] for one calibration set when failing scores are
/// Uniform(lo, hi).
double conditional_safety_uniform(const CalibrationSet& calib, double epsilon, double lo,
                                  double hi);

/// One PAC-Bayes resample: certified bound and the matching held-out error.
struct BoundTrial {
  double bound = 0.0;
  double heldout_error = 0.0;
  bool violated() const { return heldout_error > bound; }
};

struct ComparisonRow {
  std::string method;
  double marginal_error = 0.0;       // mean error across draws
  double violation_fraction = 0.0;   // draws where the declared guarantee failed
  double violation_se = 0.0;
  double guarantee = 0.0;            // declared per-draw failure probability
  std::size_t draws = 0;
};

/// Rows for both methods: conformal "error" is the missed-failure rate, its
/// declared guarantee ε*; PAC-Bayes error is the held-out misclassification
/// and its declared guarantee δ.
std::vector<ComparisonRow> pacbayes_vs_conformal(const CoverageReport& conformal,
                                                 std::span<const BoundTrial> pac_bayes,
                                                 double delta);

void write_coverage_csv(std::ostream& out, const CoverageReport& report);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

}  // namespace pacguard
