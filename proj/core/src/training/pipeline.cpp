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

#include "pacguard/training/pipeline.hpp"

#include <stdexcept>

#include "pacguard/predictor/checkpoint.hpp"
#include "pacguard/rng.hpp"

namespace pacguard {

PipelineStageError::PipelineStageError(std::string stage, std::uint64_t seed,
                                       const std::string& what)
    : std::runtime_error("stage '" + stage + "' failed (seed " + std::to_string(seed) +
                         "): " + what),
      stage_(std::move(stage)),
      seed_(seed) {}

namespace {

template <typename F>
auto stage(const char* name, std::uint64_t seed, F&& f) {
  try {
    return f();
  } catch (const PipelineStageError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineStageError(name, seed, e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("pipeline." + field + ": " + why);
  };
  if (n_prior < 1) fail("n_prior", "must be >= 1");
  if (n_bound < 1) fail("n_bound", "must be >= 1");
  if (n_heldout < 1) fail("n_heldout", "must be >= 1");
  if (heldout_m < 1) fail("heldout_m", "must be >= 1");
  if (history < 1) fail("history", "must be >= 1");
  architecture.validate();
  const auto want = history * source.observation_dim();
  if (architecture.input_dim() != want) {
    fail("architecture.widths", "input width " + std::to_string(architecture.input_dim()) +
                                    " but history x observation = " + std::to_string(want));
  }
  if (source.kind == EnvSource::Kind::kNav) source.nav.validate();
  prior_training.validate();
  posterior_training.validate();
  budget.validate();
}

std::map<std::string, std::uint64_t> pipeline_seeds(std::uint64_t master) {
  return {
      {"prior_data", derive_seed(master, StreamTag::kPriorData)},
      {"bound_data", derive_seed(master, StreamTag::kBoundData)},
      {"heldout_data", derive_seed(master, StreamTag::kHeldoutData)},
      {"prior_training", derive_seed(master, StreamTag::kPriorTraining)},
      {"posterior_training", derive_seed(master, StreamTag::kPosteriorTraining)},
      {"certification", derive_seed(master, StreamTag::kCertification)},
      {"evaluation", derive_seed(master, StreamTag::kEvaluation)},
  };
}

namespace {

struct Partitions {
  LabeledRolloutSet prior;
  LabeledRolloutSet bound;
  LabeledRolloutSet heldout;
};

Partitions collect_all(const PipelineConfig& cfg, const std::map<std::string, std::uint64_t>& s) {
  auto gather = [&](std::size_t n, const char* key, Partition part) {
    return stage("collect", s.at(key), [&] {
      return collect(cfg.source, nullptr, n, cfg.horizon, s.at(key), part);
    });
  };
  Partitions p{
      gather(cfg.n_prior, "prior_data", Partition::kPrior),
      gather(cfg.n_bound, "bound_data", Partition::kBound),
      gather(cfg.n_heldout, "heldout_data", Partition::kHeldout),
  };
  const LabeledRolloutSet* sets[] = {&p.prior, &p.bound, &p.heldout};
  assert_disjoint(sets);
  return p;
}

PipelineResult train_and_evaluate(const PipelineConfig& cfg, const Partitions& data,
                                  const std::map<std::string, std::uint64_t>& seeds,
                                  double omega) {
  const FeedForwardNet net(cfg.architecture);
  const auto features = FeatureSpec::for_source(cfg.source, cfg.history);
  TrainingConfig prior_cfg = cfg.prior_training;
  prior_cfg.seed = seeds.at("prior_training");
  prior_cfg.omega = omega;
  TrainingConfig post_cfg = cfg.posterior_training;
  post_cfg.seed = seeds.at("posterior_training");
  post_cfg.omega = omega;

  PipelineResult out;
  out.seeds = seeds;
  out.prior_failures = data.prior.failures();
  out.bound_failures = data.bound.failures();
  out.heldout_failures = data.heldout.failures();
  out.prior = stage("train_prior", prior_cfg.seed,
                    [&] { return train_prior(data.prior, net, features, prior_cfg); });
  out.prior_id = params_id(out.prior.prior);
  out.posterior = stage("train_posterior", post_cfg.seed, [&] {
    return train_posterior(data.bound, net, features, out.prior.prior, post_cfg, cfg.budget,
                           seeds.at("certification"), out.prior_id);
  });
  stage("evaluate", seeds.at("evaluation"), [&] {
    out.heldout = evaluate(net, out.posterior.posterior, data.heldout, features, cfg.heldout_m,
                           seeds.at("evaluation"), false)
                      .counts;
    out.prior_heldout = evaluate_weights(net, {out.prior.prior.mu}, data.heldout, features);
    return 0;
  });
  return out;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, std::uint64_t master_seed) {
  cfg.validate();
  const auto seeds = pipeline_seeds(master_seed);
  const auto data = collect_all(cfg, seeds);
  return train_and_evaluate(cfg, data, seeds, cfg.posterior_training.omega);
}

SweepResult run_omega_sweep(const PipelineConfig& cfg, const std::vector<double>& omegas,
                            std::uint64_t master_seed) {
  cfg.validate();
  if (omegas.empty()) throw std::invalid_argument("sweep: omega grid is empty");
  const auto seeds = pipeline_seeds(master_seed);
  const auto data = collect_all(cfg, seeds);
  SweepResult out;
  out.omegas = omegas;
  for (double omega : omegas) {
    auto run = train_and_evaluate(cfg, data, seeds, omega);
    SweepPoint p;
    p.train_weight = omega;
    p.counts = run.posterior.bound_counts;
    p.kl = run.posterior.certificate.kl;
    p.heldout = run.heldout;
    out.points.push_back(p);
    out.runs.push_back(std::move(run));
  }
  return out;
}

}  // namespace pacguard
