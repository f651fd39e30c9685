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

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pacguard/bounds/certificate.hpp"
#include "pacguard/conformal/conformal.hpp"
#include "pacguard/envs/serialize.hpp"
#include "pacguard/envs/toy.hpp"
#include "pacguard/io/format.hpp"
#include "pacguard/parallel.hpp"
#include "pacguard/predictor/checkpoint.hpp"
#include "pacguard/rng.hpp"
#include "pacguard/training/pipeline.hpp"
#include "svg.hpp"

namespace pacguard::cli {

namespace fs = std::filesystem;
using detail::format_double;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string refusal_json(const std::string& kind, const std::string& reason) {
  json j = {{"format", "pacguard.refusal"}, {"kind", kind}, {"reason", reason}};
  return j.dump(2) + "\n";
}

Checkpoint make_checkpoint(const std::string& role, const RunConfig& cfg,
                           const PosteriorParams& params, const PipelineResult& run,
                           const std::string& parent) {
  Checkpoint c;
  c.role = role;
  c.architecture = cfg.pipeline.architecture;
  c.params = params;
  c.master_seed = cfg.seed;
  c.seed_lineage = run.seeds;
  c.parent = parent;
  return c;
}

std::string counts_row(const std::string& name, const OutcomeCounts& c) {
  std::ostringstream o;
  o << name << ',' << c.environments << ',' << c.draws << ',' << c.tp << ',' << c.tn << ','
    << c.fp << ',' << c.fn << ',' << format_double(c.misclassification()) << ','
    << format_double(c.fnr()) << ',' << format_double(c.fpr()) << '\n';
  return o.str();
}

constexpr const char* kCountsHeader =
    "set,environments,draws,tp,tn,fp,fn,misclassification,fnr,fpr\n";

}  // namespace

// --- OutputTree ---------------------------------------------------------------

OutputTree::OutputTree(fs::path root, std::string command, const RunConfig& cfg)
    : root_(std::move(root)),
      command_(std::move(command)),
      config_json_(run_config_to_json(cfg)),
      seed_(cfg.seed),
      threads_(cfg.threads),
      started_(utc_now()) {
  for (const char* d : {"certificates", "checkpoints", "tables", "plots"}) {
    fs::create_directories(root_ / d);
  }
  write_manifest("running");
}

void OutputTree::write(const std::string& relative, const std::string& content) {
  const auto path = root_ / relative;
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
  auto it = std::find_if(files_.begin(), files_.end(),
                         [&](const auto& e) { return e.first == relative; });
  if (it == files_.end()) {
    files_.emplace_back(relative, fnv1a_hex(content));
    sizes_.push_back(content.size());
  } else {
    it->second = fnv1a_hex(content);
    sizes_[static_cast<std::size_t>(it - files_.begin())] = content.size();
  }
}

void OutputTree::set_seeds(const std::map<std::string, std::uint64_t>& seeds) { seeds_ = seeds; }

void OutputTree::add_note(const std::string& key, const std::string& value) {
  notes_[key] = value;
}

void OutputTree::write_manifest(const std::string& status) {
  json j;
  j["format"] = "pacguard.manifest";
  j["version"] = 1;
  j["tool"] = "pacguard";
  j["tool_version"] = kToolVersion;
  j["command"] = command_;
  j["status"] = status;
  j["config_hash"] = fnv1a_hex(config_json_);
  j["master_seed"] = seed_;
  j["threads"] = threads_;
  j["partition_seeds"] = seeds_;
  j["notes"] = notes_;
  j["started_at"] = started_;
  j["updated_at"] = utc_now();
  json files = json::array();
  for (std::size_t i = 0; i < files_.size(); ++i) {
    files.push_back({{"path", files_[i].first}, {"bytes", sizes_[i]}, {"fnv1a", files_[i].second}});
  }
  j["files"] = files;
  j["config"] = json::parse(config_json_);
  std::ofstream f(root_ / "manifest.json", std::ios::binary);
  f << j.dump(2) << "\n";
}

// --- configuration ------------------------------------------------------------

RunConfig resolve_config(const Options& opts) {
  RunConfig cfg = opts.config_path ? load_run_config(*opts.config_path) : default_run_config();
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.threads) cfg.threads = *opts.threads;
  if (opts.strict_delta) cfg.pipeline.budget.strict_delta = true;
  if (cfg.threads == 0) throw ConfigError("threads: must be >= 1", "threads");
  return cfg;
}

// --- toy-verify -----------------------------------------------------------------

int cmd_toy_verify(const RunConfig& cfg, OutputTree& out, std::ostream& log) {
  const auto& tv = cfg.toy_verify;
  std::ostringstream csv;
  csv << "c,p_err,p_1given0,p_0given1,slope,mc_p_err,mc_p_1given0,mc_p_0given1,"
         "z_p_err,z_p_1given0,z_p_0given1,samples\n";
  const auto base = derive_seed(cfg.seed, StreamTag::kExperiment);
  double worst = 0.0;
  std::vector<double> mc_fpr;
  std::vector<double> mc_fnr;
  for (std::size_t idx = 0; idx < tv.c_grid.size(); ++idx) {
    const double c = tv.c_grid[idx];
    const auto a = toy::toy_analytics(c);
    Rng rng(derive_seed(base, idx));
    std::uint64_t n0 = 0, n1 = 0, fp = 0, fn = 0;
    for (std::uint64_t i = 0; i < tv.samples; ++i) {
      const auto s = toy::toy_sample(c, rng);
      const int yhat = toy::toy_optimal_predict(s.o, c);
      if (s.y == 1) {
        ++n1;
        fn += yhat == 0;
      } else {
        ++n0;
        fp += yhat == 1;
      }
    }
    const double n = static_cast<double>(tv.samples);
    const double est_err = static_cast<double>(fp + fn) / n;
    const double est_fpr = n0 ? static_cast<double>(fp) / static_cast<double>(n0) : 0.0;
    const double est_fnr = n1 ? static_cast<double>(fn) / static_cast<double>(n1) : 0.0;
    auto z = [](double est, double p, double count) {
      const double se = count > 0 ? std::sqrt(p * (1.0 - p) / count) : 0.0;
      if (se == 0.0) return est == p ? 0.0 : INFINITY;
      return (est - p) / se;
    };
    const double z_err = z(est_err, a.p_err, n);
    const double z_fpr = z(est_fpr, a.p_1given0, static_cast<double>(n0));
    const double z_fnr = z(est_fnr, a.p_0given1, static_cast<double>(n1));
    worst = std::max({worst, std::abs(z_err), std::abs(z_fpr), std::abs(z_fnr)});
    mc_fpr.push_back(est_fpr);
    mc_fnr.push_back(est_fnr);
    csv << format_double(c) << ',' << format_double(a.p_err) << ',' << format_double(a.p_1given0)
        << ',' << format_double(a.p_0given1) << ',' << format_double(a.slope) << ','
        << format_double(est_err) << ',' << format_double(est_fpr) << ','
        << format_double(est_fnr) << ',' << format_double(z_err) << ','
        << format_double(z_fpr) << ',' << format_double(z_fnr) << ',' << tv.samples << '\n';
    log << "toy-verify: c=" << c << " p_err=" << a.p_err << " mc=" << est_err
        << " |z|max=" << std::max({std::abs(z_err), std::abs(z_fpr), std::abs(z_fnr)}) << "\n";
  }
  out.write("tables/toy_verify.csv", csv.str());
  if (tv.plot) {
    Plot p;
    p.title = "Optimal toy predictors";
    p.x_label = "FPR p(1|0)";
    p.y_label = "FNR p(0|1)";
    p.x_min = 0.0, p.x_max = 1.0, p.y_min = 0.0, p.y_max = 1.0;
    Series curve{"analytic", {}, {}, "#d62728"};
    for (int i = 0; i <= 200; ++i) {
      const auto a = toy::toy_analytics(-1.0 + 2.0 * i / 200.0);
      curve.x.push_back(a.p_1given0);
      curve.y.push_back(a.p_0given1);
    }
    Series mc{"Monte Carlo", mc_fpr, mc_fnr, "#1f77b4"};
    mc.markers = true;
    mc.dashed = true;
    p.series = {curve, mc};
    out.write("plots/toy_roc.svg", render_svg(p));
  }
  if (worst > tv.z_max) {
    log << "toy-verify: FAILED, max |z| = " << worst << " > " << tv.z_max << "\n";
    return kExitCheckFailed;
  }
  log << "toy-verify: ok, max |z| = " << worst << "\n";
  return kExitOk;
}

// --- pipeline -------------------------------------------------------------------

namespace {

void write_conditional(OutputTree& out, const std::string& name, const OutcomeCounts& counts,
                       double kl, double lambda, const ConfidenceBudget& budget,
                       const std::string& prior_id, std::ostream& log) {
  try {
    const auto c = certify_conditional(counts, kl, lambda, budget, prior_id);
    out.write("certificates/" + name + ".json", certificate_to_json(c));
  } catch (const CertificationImpossible& e) {
    log << "pipeline: no " << name << " certificate: " << e.what() << "\n";
    out.write("certificates/" + name + ".json", refusal_json(name, e.what()));
  }
}

void write_sample_rollout(const RunConfig& cfg, const PipelineResult& run, OutputTree& out) {
  const auto& p = cfg.pipeline;
  const auto& nc = p.source.nav;
  const FeedForwardNet net(p.architecture);
  const auto features = FeatureSpec::for_source(p.source, p.history);
  const auto env_seed = derive_seed(run.seeds.at("heldout_data"), 0);
  const auto env = nav::nav_generate(nc, env_seed);
  const auto& mu = run.posterior.posterior.mu;
  const nav::StepPredictor predictor = [&](std::span<const std::vector<double>> history) {
    Rollout r;
    r.observations.assign(history.begin(), history.end());
    return net.p_fail(mu, step_features(r, history.size() - 1, features)) > 0.5 ? 1 : 0;
  };
  const nav::GreedyClearancePolicy greedy(nc);
  const nav::Policy policy = [&](std::span<const double> d) { return greedy(d); };
  const int horizon = p.horizon > 0 ? p.horizon : nc.horizon;
  const auto rollout = nav::nav_rollout(env, nc, policy, &predictor, horizon, splitmix64(env_seed));
  std::ostringstream csv;
  write_rollout_csv(csv, rollout);
  out.write("tables/sample_rollout.csv", csv.str());
  out.write("checkpoints/sample_environment.json", nav_environment_to_json(env));

  Plot plot;
  plot.title = "Sample held-out rollout (y = " + std::to_string(rollout.y) + ")";
  plot.x_label = "x [m]";
  plot.y_label = "y [m]";
  plot.x_min = env.arena_min.x, plot.x_max = env.arena_max.x;
  plot.y_min = env.arena_min.y, plot.y_max = env.arena_max.y;
  plot.equal_aspect = true;
  for (const auto& o : env.obstacles) {
    plot.circles.push_back({o.center.x, o.center.y, o.radius, o.stage == 2 ? "#ff7f0e" : "#888888"});
  }
  Series path{"trajectory", {}, {}, "#1f77b4"};
  path.markers = true;
  for (const auto& pose : nav::nav_trajectory(env, nc, policy, horizon, splitmix64(env_seed))) {
    path.x.push_back(pose.position.x);
    path.y.push_back(pose.position.y);
  }
  plot.series = {path};
  out.write("plots/sample_rollout.svg", render_svg(plot));
}

}  // namespace

int cmd_pipeline(const RunConfig& cfg, OutputTree& out, std::ostream& log) {
  const auto& p = cfg.pipeline;
  out.set_seeds(pipeline_seeds(cfg.seed));
  out.write_manifest("running");
  log << "pipeline: env=" << (p.source.kind == EnvSource::Kind::kToy ? "toy" : "nav")
      << " N_prior=" << p.n_prior << " N=" << p.n_bound << " heldout=" << p.n_heldout << "\n";
  const auto run = run_pipeline(p, cfg.seed);
  const auto& cert = run.posterior.certificate;

  out.write("checkpoints/prior.json",
            checkpoint_to_json(make_checkpoint("prior", cfg, run.prior.prior, run, "")));
  out.write("checkpoints/posterior.json",
            checkpoint_to_json(make_checkpoint("posterior", cfg, run.posterior.posterior, run,
                                               run.prior_id)));
  out.write("certificates/misclassification.json", certificate_to_json(cert));
  write_conditional(out, "fnr", run.posterior.bound_counts, cert.kl, 0.0, p.budget, run.prior_id,
                    log);
  write_conditional(out, "fpr", run.posterior.bound_counts, cert.kl, 1.0, p.budget, run.prior_id,
                    log);

  const auto iv = intervention_report(run.heldout);
  std::ostringstream eval;
  eval << "quantity,value\n";
  eval << "failure_rate," << format_double(static_cast<double>(run.heldout_failures) /
                                           static_cast<double>(p.n_heldout))
       << '\n';
  eval << "misclassification_bound," << format_double(cert.bound) << '\n';
  eval << "misclassification_bound_preclip," << format_double(cert.bound_preclip) << '\n';
  eval << "true_expected_misclassification," << format_double(run.heldout.misclassification())
       << '\n';
  eval << "bound_set_misclassification," << format_double(cert.empirical_term) << '\n';
  eval << "heldout_fnr," << format_double(run.heldout.fnr()) << '\n';
  eval << "heldout_fpr," << format_double(run.heldout.fpr()) << '\n';
  eval << "prior_point_misclassification," << format_double(run.prior_heldout.misclassification())
       << '\n';
  eval << "failures_averted," << format_double(iv.failures_averted) << '\n';
  eval << "needless_halts," << format_double(iv.needless_halts) << '\n';
  eval << "kl," << format_double(cert.kl) << '\n';
  out.write("tables/evaluation.csv", eval.str());

  std::ostringstream counts;
  counts << kCountsHeader << counts_row("bound", run.posterior.bound_counts)
         << counts_row("heldout", run.heldout) << counts_row("heldout_prior_mean", run.prior_heldout);
  out.write("tables/counts.csv", counts.str());

  std::ostringstream trace;
  trace << "epoch,prior_loss,posterior_objective,posterior_kl\n";
  const std::size_t rows = std::max(run.prior.loss_trace.size() + 1,
                                    run.posterior.objective_trace.size());
  for (std::size_t e = 0; e < rows; ++e) {
    trace << e << ',';
    if (e >= 1 && e - 1 < run.prior.loss_trace.size()) {
      trace << format_double(run.prior.loss_trace[e - 1]);
    }
    trace << ',';
    if (e < run.posterior.objective_trace.size()) {
      trace << format_double(run.posterior.objective_trace[e]) << ','
            << format_double(run.posterior.kl_trace[e]);
    } else {
      trace << ',';
    }
    trace << '\n';
  }
  out.write("tables/training_trace.csv", trace.str());

  Plot plot;
  plot.title = "Posterior training objective";
  plot.x_label = "epoch";
  plot.y_label = "B";
  Series b{"B", {}, run.posterior.objective_trace, "#1f77b4"};
  for (std::size_t e = 0; e < b.y.size(); ++e) b.x.push_back(static_cast<double>(e));
  plot.series = {b};
  out.write("plots/training_objective.svg", render_svg(plot));

  if (p.source.kind == EnvSource::Kind::kNav) write_sample_rollout(cfg, run, out);

  const double heldout = run.heldout.misclassification();
  log << "pipeline: bound " << cert.bound << " vs held-out misclassification " << heldout << "\n";
  for (const auto& w : cert.warnings) log << "pipeline: warning: " << w << "\n";
  if (cert.bound < heldout) {
    log << "pipeline: FAILED, certified bound below held-out error\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

// --- sweep-lambda ---------------------------------------------------------------

int cmd_sweep_lambda(const RunConfig& cfg, OutputTree& out, std::ostream& log) {
  const auto& p = cfg.pipeline;
  out.set_seeds(pipeline_seeds(cfg.seed));
  out.write_manifest("running");
  const auto sweep = run_omega_sweep(p, cfg.sweep.omegas, cfg.seed);
  const auto rows = fnr_fpr_curve(sweep.points, p.budget);
  std::ostringstream csv;
  write_curve_csv(csv, rows);
  out.write("tables/fnr_fpr_curve.csv", csv.str());

  std::ostringstream counts;
  counts << kCountsHeader;
  int violations = 0;
  int certified = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string tag = "omega_" + std::to_string(i);
    counts << counts_row(tag + "_bound", sweep.points[i].counts)
           << counts_row(tag + "_heldout", *sweep.points[i].heldout);
    if (r.fnr) {
      out.write("certificates/" + tag + "_fnr.json", certificate_to_json(*r.fnr));
      ++certified;
      violations += r.fnr->bound < r.empirical_fnr;
    } else {
      out.write("certificates/" + tag + "_fnr.json", refusal_json("fnr", r.fnr_refusal));
    }
    if (r.fpr) {
      out.write("certificates/" + tag + "_fpr.json", certificate_to_json(*r.fpr));
      ++certified;
      violations += r.fpr->bound < r.empirical_fpr;
    } else {
      out.write("certificates/" + tag + "_fpr.json", refusal_json("fpr", r.fpr_refusal));
    }
    log << "sweep-lambda: omega=" << r.train_weight << " FNR " << r.empirical_fnr << " <= "
        << (r.fnr ? format_double(r.fnr->bound) : "refused") << ", FPR " << r.empirical_fpr
        << " <= " << (r.fpr ? format_double(r.fpr->bound) : "refused") << "\n";
  }
  out.write("tables/sweep_counts.csv", counts.str());

  Plot plot;
  plot.title = "FNR vs FPR across the false-negative weight";
  plot.x_label = "FPR";
  plot.y_label = "FNR";
  plot.x_min = 0.0, plot.x_max = 1.0, plot.y_min = 0.0, plot.y_max = 1.0;
  Series emp{"empirical", {}, {}, "#1f77b4"};
  emp.dashed = true;
  emp.markers = true;
  Series bnd{"bound", {}, {}, "#d62728"};
  bnd.markers = true;
  for (const auto& r : rows) {
    emp.x.push_back(r.empirical_fpr);
    emp.y.push_back(r.empirical_fnr);
    bnd.x.push_back(r.fpr ? r.fpr->bound : NAN);
    bnd.y.push_back(r.fnr ? r.fnr->bound : NAN);
  }
  plot.series = {emp, bnd};
  out.write("plots/fnr_fpr_curve.svg", render_svg(plot));

  log << "sweep-lambda: " << certified << " certificates, " << violations << " violations\n";
  if (violations > 1) {
    log << "sweep-lambda: FAILED, more than one certificate below its held-out rate\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

// --- conformal-compare ------------------------------------------------------------

int cmd_conformal_compare(const RunConfig& cfg, OutputTree& out, std::ostream& log) {
  auto cov_cfg = cfg.conformal.coverage;
  cov_cfg.seed = derive_seed(cfg.seed, StreamTag::kConformal);
  const auto report = coverage_experiment(cov_cfg);
  if (report.degenerate) {
    log << "conformal-compare: failing scores are all identical; the continuity assumption "
           "fails and coverage is not computed\n";
  }
  std::ostringstream cov;
  write_coverage_csv(cov, report);
  out.write("tables/conformal_coverage.csv", cov.str());

  const auto base = derive_seed(cfg.seed, StreamTag::kExperiment);
  std::vector<BoundTrial> trials;
  std::ostringstream pac;
  pac << "resample,seed,bound,heldout_misclassification,violated\n";
  for (std::size_t r = 0; r < cfg.conformal.pac_resamples; ++r) {
    const auto seed = derive_seed(base, r);
    const auto run = run_pipeline(cfg.pipeline, seed);
    BoundTrial t{run.posterior.certificate.bound, run.heldout.misclassification()};
    trials.push_back(t);
    pac << r << ',' << seed << ',' << format_double(t.bound) << ','
        << format_double(t.heldout_error) << ',' << (t.violated() ? 1 : 0) << '\n';
    if ((r + 1) % 20 == 0) {
      log << "conformal-compare: " << r + 1 << "/" << cfg.conformal.pac_resamples
          << " PAC-Bayes resamples\n";
    }
  }
  out.write("tables/pacbayes_resamples.csv", pac.str());
  const auto rows = pacbayes_vs_conformal(report, trials, cfg.pipeline.budget.delta);
  std::ostringstream cmp;
  write_comparison_csv(cmp, rows);
  out.write("tables/comparison.csv", cmp.str());

  json summary;
  summary["conformal"] = {{"degenerate", report.degenerate},
                          {"marginal_safety", report.marginal_safety},
                          {"marginal_se", report.marginal_se},
                          {"violation_fraction", report.violation_fraction},
                          {"epsilon_star", report.epsilon_star},
                          {"target", 1.0 - report.epsilon_star -
                                         1.0 / static_cast<double>(cov_cfg.t_total + 1)}};
  std::size_t bad = 0;
  for (const auto& t : trials) bad += t.violated();
  summary["pac_bayes"] = {{"resamples", trials.size()},
                          {"violations", bad},
                          {"delta", cfg.pipeline.budget.delta}};
  out.write("tables/conformal_summary.json", summary.dump(2) + "\n");

  if (!report.degenerate) {
    Plot plot;
    plot.title = "Per-calibration conditional safety";
    plot.x_label = "calibration draw (sorted)";
    plot.y_label = "P[warn | failure]";
    auto sorted = report.conditional_safety;
    std::sort(sorted.begin(), sorted.end());
    Series s{"conformal", {}, sorted, "#1f77b4"};
    for (std::size_t i = 0; i < sorted.size(); ++i) s.x.push_back(static_cast<double>(i));
    Series target{"1 - eps*", {0.0, static_cast<double>(sorted.size())},
                  {1.0 - report.epsilon_star, 1.0 - report.epsilon_star}, "#d62728"};
    target.dashed = true;
    plot.series = {s, target};
    out.write("plots/conformal_safety.svg", render_svg(plot));
  }

  bool ok = true;
  if (!report.degenerate) {
    const double target = 1.0 - report.epsilon_star -
                          1.0 / static_cast<double>(cov_cfg.t_total + 1);
    const bool marginal_ok = report.marginal_safety >= target - 3.0 * report.marginal_se;
    log << "conformal-compare: marginal safety " << report.marginal_safety << " (target "
        << target << "), violation fraction " << report.violation_fraction << "\n";
    ok = ok && marginal_ok;
  }
  if (!trials.empty()) {
    const double delta = cfg.pipeline.budget.delta;
    const double frac = static_cast<double>(bad) / static_cast<double>(trials.size());
    const double limit = delta + 3.0 * std::sqrt(delta * (1 - delta) / trials.size());
    log << "conformal-compare: PAC-Bayes violation fraction " << frac << " (limit " << limit
        << ")\n";
    ok = ok && frac <= limit;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

// --- entry points -----------------------------------------------------------------

int run(const Options& opts, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = resolve_config(opts);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  set_default_threads(cfg.threads);
  try {
    OutputTree out(opts.out_dir, opts.command, cfg);
    int code = kExitUsage;
    if (opts.command == "toy-verify") {
      code = cmd_toy_verify(cfg, out, log);
    } else if (opts.command == "pipeline") {
      code = cmd_pipeline(cfg, out, log);
    } else if (opts.command == "sweep-lambda") {
      code = cmd_sweep_lambda(cfg, out, log);
    } else if (opts.command == "conformal-compare") {
      code = cmd_conformal_compare(cfg, out, log);
    } else {
      log << "error: unknown command '" << opts.command << "'\n";
      return kExitUsage;
    }
    out.write_manifest(code == kExitOk ? "ok" : "check_failed");
    return code;
  } catch (const std::exception& e) {
    log << "error: " << opts.command << " (seed " << cfg.seed << "): " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"pacguard: certified failure prediction toolkit"};
  app.set_help_all_flag("--help-all");
  Options opts;
  bool print_defaults = false;
  std::string config;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  auto* config_opt = app.add_option("--config", config, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", opts.out_dir, "output directory");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (>= 1)");
  app.add_flag("--strict-delta", opts.strict_delta,
               "split delta between the Bernstein and PAC-Bayes events");
  app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");
  const std::pair<const char*, const char*> commands[] = {
      {"toy-verify", "check the toy closed forms against Monte Carlo"},
      {"pipeline", "train prior and posterior, certify, evaluate on held-out data"},
      {"sweep-lambda", "sweep the false-negative weight and certify FNR/FPR"},
      {"conformal-compare", "compare conformal coverage with PAC-Bayes bound violations"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  if (print_defaults) {
    out << run_config_to_json(default_run_config());
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    log << "error: a subcommand is required\n" << app.help();
    return kExitUsage;
  }
  opts.command = app.get_subcommands().front()->get_name();
  if (*config_opt) opts.config_path = config;
  if (*seed_opt) opts.seed = seed;
  if (*threads_opt) {
    if (threads == 0) {
      log << "error: --threads must be >= 1\n";
      return kExitUsage;
    }
    opts.threads = threads;
  }
  return run(opts, log);
}

}  // namespace pacguard::cli
