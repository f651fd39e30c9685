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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "pacguard/bounds/bernstein.hpp"
#include "pacguard/bounds/certificate.hpp"
#include "pacguard/conformal/conformal.hpp"
#include "pacguard/envs/rollout.hpp"
#include "pacguard/envs/toy.hpp"
#include "pacguard/io/config.hpp"
#include "pacguard/training/pipeline.hpp"
#include "support.hpp"

namespace pacguard {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Toy resamples shared by criteria 2 and 6.
constexpr std::size_t kBoundRuns = 50;
constexpr std::size_t kPacResamples = 200;

PipelineConfig bound_validity_config() {
  auto cfg = default_run_config().pipeline;
  cfg.source = EnvSource::toy(0.0);
  cfg.n_bound = 2000;
  cfg.n_heldout = 20000;
  cfg.budget.delta = 0.05;
  cfg.budget.m = 100;
  return cfg;
}

std::vector<BoundTrial>& toy_trials() {
  static std::vector<BoundTrial> trials = [] {
    const auto cfg = bound_validity_config();
    const auto base = derive_seed(0, StreamTag::kExperiment);
    std::vector<BoundTrial> out;
    for (std::size_t r = 0; r < kPacResamples; ++r) {
      const auto run = run_pipeline(cfg, derive_seed(base, r));
      out.push_back({run.posterior.certificate.bound, run.heldout.misclassification()});
    }
    return out;
  }();
  return trials;
}

// 1. Toy closed forms versus Monte Carlo.
Outcome toy_analytics_check() {
  const double grid[] = {-1.0, -0.75, -0.5, -0.25, 0.0, 0.5, 1.0};
  constexpr std::uint64_t kSamples = 1000000;
  double worst = 0.0;
  for (std::size_t i = 0; i < std::size(grid); ++i) {
    const double c = grid[i];
    const auto a = toy::toy_analytics(c);
    Rng rng(derive_seed(derive_seed(0, StreamTag::kExperiment), i));
    std::uint64_t n0 = 0, n1 = 0, fp = 0, fn = 0;
    for (std::uint64_t k = 0; k < kSamples; ++k) {
      const auto s = toy::toy_sample(c, rng);
      const int yhat = toy::toy_optimal_predict(s.o, c);
      if (s.y) {
        ++n1;
        fn += yhat == 0;
      } else {
        ++n0;
        fp += yhat == 1;
      }
    }
    auto z = [](double est, double p, double n) {
      const double se = std::sqrt(p * (1 - p) / n);
      return se == 0.0 ? (est == p ? 0.0 : INFINITY) : std::abs(est - p) / se;
    };
    worst = std::max({worst, z(double(fp + fn) / kSamples, a.p_err, double(kSamples)),
                      z(double(fp) / double(n0), a.p_1given0, double(n0)),
                      z(double(fn) / double(n1), a.p_0given1, double(n1))});
  }
  const bool spots = toy::toy_analytics(0.0).p_err == 0.25 &&
                     toy::toy_analytics(-1.0).p_1given0 == 1.0 &&
                     toy::toy_analytics(-1.0).p_0given1 == 0.0;
  return {worst <= 3.0 && spots,
          "max |z| = " + fmt("%.3f", worst) + " (limit 3), spot values " +
              (spots ? "exact" : "WRONG")};
}

// 2. Misclassification bound validity over resampled partitions.
Outcome bound_validity_check() {
  const auto& all = toy_trials();
  std::size_t held = 0;
  std::vector<double> bounds;
  for (std::size_t r = 0; r < kBoundRuns; ++r) {
    held += all[r].bound >= all[r].heldout_error;
    bounds.push_back(all[r].bound);
  }
  std::nth_element(bounds.begin(), bounds.begin() + kBoundRuns / 2, bounds.end());
  const double hi = bounds[kBoundRuns / 2];
  std::nth_element(bounds.begin(), bounds.begin() + kBoundRuns / 2 - 1, bounds.end());
  const double median = 0.5 * (hi + bounds[kBoundRuns / 2 - 1]);
  return {held >= 47 && median < 0.5,
          std::to_string(held) + "/50 runs bound >= held-out error (need 47), median bound " +
              fmt("%.4f", median) + " (need < 0.5)"};
}

// 3. Over-approximation chain identity and FNR/FPR certificates across an ω sweep.
Outcome conditional_chain_check() {
  auto cfg = bound_validity_config();
  cfg.n_heldout = 20000;
  const std::vector<double> omegas{0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0};
  const auto sweep = run_omega_sweep(cfg, omegas, derive_seed(0, StreamTag::kExperiment) ^ 3);
  double worst_gap = -INFINITY;  // max of (lhs - rhs) over both inequalities
  std::size_t sets = 0;
  for (const auto& p : sweep.points) {
    for (const OutcomeCounts* counts : {&p.counts, &*p.heldout}) {
      auto budget = cfg.budget;
      budget.m = counts->draws;
      for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        Certificate c;
        try {
          c = certify_conditional(*counts, 0.0, lambda, budget);
        } catch (const CertificationImpossible&) {
          continue;
        }
        ++sets;
        const double nm = static_cast<double>(counts->total());
        const double weighted = lambda * counts->fp / (nm * c.class0.p_low) +
                                (1 - lambda) * counts->fn / (nm * c.class1.p_low);
        const double chat = c.empirical_term;
        const double k = std::min(chain_ratio_bound(c.class0), chain_ratio_bound(c.class1));
        worst_gap = std::max({worst_gap, chat - weighted, weighted - (1 + 1 / k) * chat,
                              std::abs(weighted - c.c_lambda * c.c_tilde_mean)});
      }
    }
  }
  const auto rows = fnr_fpr_curve(sweep.points, cfg.budget);
  int violations = 0, certified = 0;
  for (const auto& r : rows) {
    if (r.fnr) {
      ++certified;
      violations += r.fnr->bound < r.empirical_fnr;
    }
    if (r.fpr) {
      ++certified;
      violations += r.fpr->bound < r.empirical_fpr;
    }
  }
  const bool chain_ok = sets > 0 && worst_gap <= 1e-10;
  return {chain_ok && violations <= 1 && certified == 14,
          "chain holds on " + std::to_string(sets) + " sets (max slack violation " +
              fmt("%.2e", std::max(worst_gap, 0.0)) + ", tol 1e-10); " +
              std::to_string(violations) + " violations among " + std::to_string(certified) +
              "/14 FNR/FPR certificates (allow 1)"};
}

// 4. Bernstein lower-bound coverage and quadratic residual.
Outcome bernstein_coverage_check() {
  constexpr int kTrials = 10000;
  constexpr double kDelta = 0.05;
  double worst_margin = INFINITY;
  double worst_residual = 0.0;
  Rng rng(derive_seed(0, StreamTag::kExperiment) + 4);
  for (double p : {0.1, 0.25, 0.5}) {
    for (std::uint64_t n : {500ull, 5000ull}) {
      std::binomial_distribution<std::uint64_t> draw(n, p);
      int covered = 0;
      for (int t = 0; t < kTrials; ++t) {
        const double p_hat = static_cast<double>(draw(rng)) / static_cast<double>(n);
        const auto r = bernstein_lower(p_hat, n, kDelta);
        covered += r.p_low <= p;
        worst_residual = std::max(worst_residual,
                                  std::abs(bernstein_quadratic(r.p_low, p_hat, r.k_coef)));
      }
      const double rate = static_cast<double>(covered) / kTrials;
      const double floor = 1 - kDelta - 3 * std::sqrt(kDelta * (1 - kDelta) / kTrials);
      worst_margin = std::min(worst_margin, rate - floor);
    }
  }
  return {worst_margin >= 0.0 && worst_residual <= 1e-10,
          "min coverage margin " + fmt("%.4f", worst_margin) + " (need >= 0), max residual " +
              fmt("%.2e", worst_residual) + " (limit 1e-10)"};
}

// 5. Analytic gradient of surrogate + regularizer versus central differences.
Outcome gradient_check() {
  Rng rng(derive_seed(0, StreamTag::kExperiment) + 5);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    worst = std::max(worst, testing::gradient_max_relative_error(
                                testing::random_instance(rng, Activation::kTanh)));
  }
  return {worst <= 1e-4, "max relative error " + fmt("%.3e", worst) + " over 100 instances"};
}

// 6. Conformal marginal versus conditional coverage, and PAC-Bayes per-draw validity.
Outcome conformal_check() {
  CoverageConfig cfg;
  cfg.spec = ScoreSpec{};  // failing U(0,0.4), success U(0.6,1), ε_D = 0.25
  cfg.t_total = 500;
  cfg.epsilon_star = 0.015;
  cfg.draws = 2000;
  cfg.seed = derive_seed(0, StreamTag::kConformal);
  const auto rep = coverage_experiment(cfg);
  const double target = 1 - cfg.epsilon_star - 1.0 / (cfg.t_total + 1);
  const bool marginal = rep.marginal_safety >= target - 3 * rep.marginal_se;
  const bool band = rep.violation_fraction >= 0.05 && rep.violation_fraction <= 0.30;
  const auto& trials = toy_trials();
  std::size_t bad = 0;
  for (const auto& t : trials) bad += t.violated();
  const double frac = static_cast<double>(bad) / trials.size();
  const double limit = 0.05 + 3 * std::sqrt(0.05 * 0.95 / trials.size());
  return {marginal && band && frac <= limit,
          "marginal safety " + fmt("%.4f", rep.marginal_safety) + " (target " +
              fmt("%.4f", target) + " - 3se), conformal violation fraction " +
              fmt("%.4f", rep.violation_fraction) + " (band [0.05, 0.30]), PAC-Bayes " +
              std::to_string(bad) + "/200 violations (limit " + fmt("%.4f", limit) + ")"};
}

// 7. Outcome semantics versus brute-force cost indicator at T = 6.
Outcome outcome_semantics_check() {
  constexpr int kT = 6;
  int disagreements = 0, cases = 0;
  for (int bits = 0; bits < (1 << kT); ++bits) {
    std::vector<int> p(kT);
    for (int t = 0; t < kT; ++t) p[t] = (bits >> t) & 1;
    for (int y = 0; y <= 1; ++y) {
      for (int t_fail = 1; t_fail <= kT + 1; ++t_fail) {
        if ((y == 1) != (t_fail <= kT)) continue;
        ++cases;
        // Cost is 1 iff the largest prediction strictly before failure differs from y.
        int m = 0;
        for (int t = 1; t <= kT; ++t) {
          if (t < t_fail) m = m > p[t - 1] ? m : p[t - 1];
        }
        const auto kind = classify_outcome(p, y, t_fail);
        const int cost = m != y;
        const bool err = kind == OutcomeKind::kFalsePositive || kind == OutcomeKind::kFalseNegative;
        const OutcomeKind expect = m ? (y ? OutcomeKind::kTruePositive : OutcomeKind::kFalsePositive)
                                     : (y ? OutcomeKind::kFalseNegative : OutcomeKind::kTrueNegative);
        disagreements += (err != (cost == 1)) || kind != expect;
      }
    }
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements over " +
                                  std::to_string(cases) + " cases"};
}

// 8. CLI determinism: byte-identical certificates and CSV tables on rerun.
std::map<std::string, std::string> artifacts(const std::filesystem::path& root) {
  std::map<std::string, std::string> m;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), root).generic_string();
    if (rel.rfind("certificates/", 0) == 0 || e.path().extension() == ".csv") {
      std::ifstream f(e.path(), std::ios::binary);
      std::ostringstream s;
      s << f.rdbuf();
      m[rel] = s.str();
    }
  }
  return m;
}

Outcome determinism_check() {
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "pacguard_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::map<std::string, std::string> configs{
      {"toy", R"({"seed": 11, "pipeline": {"n_prior": 500, "n_bound": 500, "n_heldout": 2000},
                  "toy_verify": {"samples": 100000}, "sweep": {"omegas": [0.25, 1, 4]},
                  "conformal": {"draws": 300, "pac_resamples": 3}})"},
      {"nav", R"({"seed": 12, "env": {"kind": "nav"},
                  "pipeline": {"n_prior": 150, "n_bound": 150, "n_heldout": 200, "heldout_m": 5},
                  "prior_training": {"epochs": 3}, "posterior_training": {"epochs": 2},
                  "budget": {"M": 10}, "sweep": {"omegas": [0.5, 2]}})"}};
  const std::vector<std::pair<std::string, std::string>> jobs{
      {"toy", "toy-verify"}, {"toy", "pipeline"}, {"toy", "sweep-lambda"},
      {"toy", "conformal-compare"}, {"nav", "pipeline"}, {"nav", "sweep-lambda"}};
  std::size_t files = 0;
  std::string mismatch;
  for (const auto& [env, cmd] : jobs) {
    const auto cfg_path = root / (env + ".json");
    std::ofstream(cfg_path) << configs.at(env);
    std::map<std::string, std::string> outs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = root / (env + "_" + cmd + "_" + std::to_string(rep));
      const std::string c = cfg_path.string(), o = out.string();
      const char* argv[] = {"pacguard", cmd.c_str(), "--config", c.c_str(), "--out", o.c_str()};
      std::ostringstream sink;
      const int code = cli::main_entry(6, argv, sink, sink);
      if (code == cli::kExitUsage) return {false, cmd + " exited with a usage error"};
      outs[rep] = artifacts(out);
    }
    files += outs[0].size();
    if (outs[0] != outs[1] || outs[0].empty()) mismatch += " " + env + "/" + cmd;
  }
  fs::remove_all(root);
  return {mismatch.empty(), std::to_string(files) + " artifacts compared across 6 commands" +
                                (mismatch.empty() ? "" : "; differing:" + mismatch)};
}

}  // namespace
}  // namespace pacguard

int main() {
  using pacguard::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"toy closed forms vs Monte Carlo", pacguard::toy_analytics_check},
      {"misclassification bound validity", pacguard::bound_validity_check},
      {"class-conditional chain and FNR/FPR sweep", pacguard::conditional_chain_check},
      {"Bernstein coverage", pacguard::bernstein_coverage_check},
      {"gradient fidelity", pacguard::gradient_check},
      {"conformal contrast", pacguard::conformal_check},
      {"outcome semantics", pacguard::outcome_semantics_check},
      {"CLI determinism", pacguard::determinism_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("ACCEPTANCE %zu %s: %s -- %s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL",
                checks[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(checks.size()) - failed,
              checks.size());
  return failed == 0 ? 0 : 1;
}
