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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "pacguard/bounds/pac_bayes.hpp"
#include "pacguard/envs/toy.hpp"
#include "pacguard/io/config.hpp"
#include "pacguard/predictor/checkpoint.hpp"
#include "pacguard/training/dataset.hpp"
#include "pacguard/training/pipeline.hpp"
#include "pacguard/training/surrogate.hpp"
#include "pacguard/training/trainer.hpp"

namespace pacguard {
namespace {

PipelineConfig small_toy(std::size_t n = 500) {
  auto cfg = default_run_config().pipeline;
  cfg.n_prior = n;
  cfg.n_bound = n;
  cfg.n_heldout = 2000;
  return cfg;
}

// --- collection -------------------------------------------------------------------

TEST(Collect, ZeroCountIsRejected) {
  EXPECT_THROW(collect(EnvSource::toy(0.0), nullptr, 0, 2, 1, Partition::kPrior),
               std::invalid_argument);
}

TEST(Collect, ToyFailureShareAtZeroCutoff) {
  constexpr std::size_t kN = 100000;
  const auto set = collect(EnvSource::toy(0.0), nullptr, kN, toy::kHorizon, 3, Partition::kPrior);
  EXPECT_NEAR(static_cast<double>(set.failures()) / kN, 0.5, 3 * std::sqrt(0.25 / kN));
}

TEST(Collect, DeterministicGivenSeed) {
  for (const auto& src : {EnvSource::toy(0.3), EnvSource::navigation(nav::NavConfig{})}) {
    const int h = src.default_horizon();
    const auto a = collect(src, nullptr, 50, h, 9, Partition::kBound);
    const auto b = collect(src, nullptr, 50, h, 9, Partition::kBound);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(a.env_seeds, b.env_seeds);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a.rollouts[i].observations, b.rollouts[i].observations);
      EXPECT_EQ(a.rollouts[i].t_fail, b.rollouts[i].t_fail);
    }
  }
}

TEST(Collect, PipelinePartitionsAreDisjoint) {
  const auto seeds = pipeline_seeds(42);
  const auto src = EnvSource::toy(0.0);
  const auto p = collect(src, nullptr, 1000, 2, seeds.at("prior_data"), Partition::kPrior);
  const auto b = collect(src, nullptr, 1000, 2, seeds.at("bound_data"), Partition::kBound);
  const auto h = collect(src, nullptr, 1000, 2, seeds.at("heldout_data"), Partition::kHeldout);
  const std::vector<const LabeledRolloutSet*> sets{&p, &b, &h};
  EXPECT_NO_THROW(assert_disjoint(sets));
  const std::vector<const LabeledRolloutSet*> dup{&p, &p};
  EXPECT_THROW(assert_disjoint(dup), std::logic_error);
}

TEST(Features, StackHistoryOldestFirstWithPadding) {
  Rollout r;
  r.horizon = 4;
  r.y = 1;
  r.t_fail = 3;
  r.observations = {{1.0}, {2.0}, {3.0}};
  const FeatureSpec spec{3, 2.0};
  EXPECT_EQ(step_features(r, 0, spec), (std::vector<double>{0.5, 0.5, 0.5}));
  EXPECT_EQ(step_features(r, 2, spec), (std::vector<double>{0.5, 1.0, 1.5}));
  // Steps at or after t_fail carry no training signal.
  EXPECT_EQ(rollout_features(r, spec).size(), 2u);
}

TEST(Features, StepLabelsUseLookAhead) {
  Rollout r;
  r.horizon = 5;
  r.y = 1;
  r.t_fail = 4;
  r.observations.assign(3, {0.0});
  EXPECT_EQ(step_labels(r, 0), (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(step_labels(r, 1), (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(step_labels(r, 2), (std::vector<int>{0, 1, 1}));
}

TEST(Features, LastStepsMask) {
  LabeledRolloutSet set;
  Rollout r;
  r.horizon = 6;
  r.y = 0;
  r.t_fail = 7;
  for (int i = 0; i < 6; ++i) r.observations.push_back({static_cast<double>(i)});
  set.rollouts.push_back(r);
  const auto seqs = to_sequences(set, FeatureSpec{1, 1.0}, 3);
  ASSERT_EQ(seqs.size(), 1u);
  EXPECT_EQ(seqs[0].inputs.size(), 3u);
  EXPECT_EQ(seqs[0].first_step, 4);
  EXPECT_EQ(seqs[0].inputs[0], std::vector<double>{3.0});
}

// --- surrogate ---------------------------------------------------------------------

TEST(Surrogate, HandExpandedExample) {
  const std::vector<double> p{0.2, 0.7, 0.9};
  // Targets min(j+1, 3) >= t_fail = 3: (0, 1, 1).
  const double expect = -(std::log(0.8) + 2 * std::log(0.7) + 2 * std::log(0.9)) / 3.0;
  EXPECT_NEAR(surrogate_loss(p, 1, 3, 3, 2.0, 1), expect, 1e-12);
}

TEST(Surrogate, SaturatedPredictionsNearZero) {
  const int t = 6, t_fail = 5, k = 1;
  std::vector<double> p;
  for (int j = 1; j < t_fail; ++j) {
    p.push_back(step_target(j, t_fail, t, k) ? 1 - kProbabilityFloor : kProbabilityFloor);
  }
  const double loss = surrogate_loss(p, 1, t_fail, t, 1.0, k);
  EXPECT_LE(loss, -std::log(1 - kProbabilityFloor) * p.size() / t + 1e-15);
  EXPECT_LT(loss, 1e-6);
}

TEST(Surrogate, ZeroOmegaIgnoresFailureSteps) {
  const std::vector<double> a{0.2, 0.1, 0.05}, b{0.2, 0.9, 0.3};
  // With k = 1 and t_fail = 3 only step 1 has target 0.
  EXPECT_DOUBLE_EQ(surrogate_loss(a, 1, 3, 3, 0.0, 1), surrogate_loss(b, 1, 3, 3, 0.0, 1));
  EXPECT_DOUBLE_EQ(surrogate_loss(a, 1, 3, 3, 0.0, 1), -std::log(0.8) / 3);
}

TEST(Surrogate, GradientMatchesFiniteDifference) {
  const std::vector<double> p{0.3, 0.6, 0.45, 0.8};
  std::vector<double> g(4);
  surrogate_loss_with_grad(p, 1, 5, 5, 1.7, 2, g);
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto hi = p, lo = p;
    hi[i] += 1e-6;
    lo[i] -= 1e-6;
    const double fd =
        (surrogate_loss(hi, 1, 5, 5, 1.7, 2) - surrogate_loss(lo, 1, 5, 5, 1.7, 2)) / 2e-6;
    EXPECT_NEAR(g[i], fd, 1e-6);
  }
}

// Half the sequences follow their look-ahead targets with >= 0.9 confidence,
// half are uniform noise; confident zero-cost sequences beat the median
// surrogate loss of the misclassified ones.
TEST(Surrogate, TracksZeroOneCost) {
  Rng rng(13);
  std::uniform_int_distribution<int> horizon(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr int kLook = 1;
  std::vector<double> good;
  std::vector<double> bad;
  for (int n = 0; n < 200; ++n) {
    const int t = horizon(rng);
    const int t_fail = std::uniform_int_distribution<int>(2, t + 1)(rng);
    const int y = t_fail <= t;
    const bool confident = n % 2 == 0;
    std::vector<double> p;
    for (int j = 1; j < t_fail && j <= t; ++j) {
      const double c = 0.9 + 0.1 * u(rng);
      p.push_back(confident ? (step_target(j, t_fail, t, kLook) ? c : 1.0 - c) : u(rng));
    }
    std::vector<int> yhat;
    for (double v : p) yhat.push_back(v > 0.5);
    const auto kind = classify_outcome(yhat, y, t_fail);
    const bool error = kind == OutcomeKind::kFalsePositive || kind == OutcomeKind::kFalseNegative;
    const double loss = surrogate_loss(p, y, t_fail, t, 1.0, kLook);
    if (!error && confident) good.push_back(loss);
    if (error) bad.push_back(loss);
  }
  ASSERT_GT(good.size(), 50u);
  ASSERT_GT(bad.size(), 20u);
  std::sort(bad.begin(), bad.end());
  const double median = bad[bad.size() / 2];
  for (double g : good) EXPECT_LT(g, median);
}

TEST(Surrogate, RejectsInconsistentLabel) {
  const std::vector<double> p{0.5};
  EXPECT_THROW(surrogate_loss(p, 0, 2, 3, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(surrogate_loss(p, 1, 2, 3, 1.0, -1), std::invalid_argument);
}

// --- training -----------------------------------------------------------------------

struct ToyFixture : public ::testing::Test {
  void SetUp() override {
    cfg = small_toy();
    seeds = pipeline_seeds(5);
    prior_set = collect(cfg.source, nullptr, cfg.n_prior, 2, seeds.at("prior_data"),
                        Partition::kPrior);
    bound_set = collect(cfg.source, nullptr, cfg.n_bound, 2, seeds.at("bound_data"),
                        Partition::kBound);
    heldout = collect(cfg.source, nullptr, 5000, 2, seeds.at("heldout_data"),
                      Partition::kHeldout);
  }
  PipelineConfig cfg;
  std::map<std::string, std::uint64_t> seeds;
  LabeledRolloutSet prior_set, bound_set, heldout;
  FeedForwardNet net{NetArchitecture::toy_default()};
  FeatureSpec features{1, 1.0};
};

TEST_F(ToyFixture, ZeroEpochPriorIsInitialization) {
  auto tc = cfg.prior_training;
  tc.epochs = 0;
  tc.seed = 77;
  const auto r = train_prior(prior_set, net, features, tc);
  Rng init(derive_seed(77, 1));
  EXPECT_EQ(r.prior.mu, net.initial_weights(init));
  EXPECT_TRUE(r.loss_trace.empty());
  for (double v : r.prior.log_s) EXPECT_EQ(v, tc.log_s0);
}

TEST_F(ToyFixture, PriorBeatsCoinAndIsDeterministic) {
  auto tc = cfg.prior_training;
  tc.epochs = 50;
  const auto a = train_prior(prior_set, net, features, tc);
  const auto b = train_prior(prior_set, net, features, tc);
  EXPECT_EQ(a.prior, b.prior);
  const auto counts = evaluate_weights(net, {a.prior.mu}, heldout, features);
  EXPECT_LT(counts.misclassification(), 0.35);
  for (double v : a.loss_trace) EXPECT_TRUE(std::isfinite(v));
}

TEST_F(ToyFixture, ZeroStepPosteriorEqualsPrior) {
  const auto prior = train_prior(prior_set, net, features, cfg.prior_training).prior;
  auto tc = cfg.posterior_training;
  tc.gamma = 0.0;
  const auto r = train_posterior(bound_set, net, features, prior, tc, cfg.budget, 3);
  EXPECT_EQ(r.posterior, prior);
  EXPECT_EQ(r.certificate.kl, 0.0);
  const auto& c = r.certificate;
  const double emp = static_cast<double>(r.bound_counts.errors()) /
                     static_cast<double>(r.bound_counts.total());
  EXPECT_DOUBLE_EQ(c.empirical_term, emp);
  EXPECT_NEAR(c.bound, kl_inverse_bound(emp, cfg.budget.m, cfg.budget.delta_mc) +
                           mcallester_gap(0.0, bound_set.size(), cfg.budget.delta),
              1e-15);
}

TEST_F(ToyFixture, PosteriorIsReproducible) {
  const auto prior = train_prior(prior_set, net, features, cfg.prior_training).prior;
  auto tc = cfg.posterior_training;
  tc.epochs = 5;
  const auto a = train_posterior(bound_set, net, features, prior, tc, cfg.budget, 3, "p");
  const auto b = train_posterior(bound_set, net, features, prior, tc, cfg.budget, 3, "p");
  EXPECT_EQ(a.posterior, b.posterior);
  EXPECT_EQ(certificate_to_json(a.certificate), certificate_to_json(b.certificate));
  EXPECT_EQ(a.objective_trace.size(), 6u);
}

TEST_F(ToyFixture, KlCapWarning) {
  const auto prior = train_prior(prior_set, net, features, cfg.prior_training).prior;
  auto tc = cfg.posterior_training;
  tc.epochs = 2;
  tc.kl_cap = 0.0;
  const auto r = train_posterior(bound_set, net, features, prior, tc, cfg.budget, 3);
  ASSERT_FALSE(r.certificate.warnings.empty());
  EXPECT_NE(r.certificate.warnings.back().find("cap"), std::string::npos);
}

TEST_F(ToyFixture, DivergenceIsReported) {
  auto tc = cfg.prior_training;
  tc.gamma = 1e300;
  tc.epochs = 3;
  const FeedForwardNet relu(NetArchitecture{{1, 16, 16, 2}, Activation::kRelu});
  EXPECT_THROW(train_prior(prior_set, relu, features, tc), DivergenceError);
}

TEST(Training, ObjectiveDecreasesOnAverage) {
  double first = 0.0, last = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto r = run_pipeline(small_toy(), 100 + s);
    const auto& trace = r.posterior.objective_trace;
    for (double v : trace) ASSERT_TRUE(std::isfinite(v));
    first += trace.front();
    last += trace.back();
  }
  EXPECT_LE(last, first);
}

TEST(Training, EndToEndToyCertificate) {
  auto cfg = default_run_config().pipeline;
  cfg.n_heldout = 5000;
  const auto r = run_pipeline(cfg, 2026);
  EXPECT_LT(r.posterior.certificate.bound, 0.5);
  EXPECT_GE(r.posterior.certificate.bound, r.heldout.misclassification());
  EXPECT_EQ(r.prior_id, params_id(r.prior.prior));
}

TEST(Training, OmegaEndpointsOrderFnr) {
  double fnr_low = 0.0, fnr_high = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto cfg = small_toy(400);
    cfg.posterior_training.epochs = 20;
    const auto sweep = run_omega_sweep(cfg, {0.2, 5.0}, 300 + s);
    fnr_low += sweep.points[0].heldout->fnr();
    fnr_high += sweep.points[1].heldout->fnr();
  }
  EXPECT_LE(fnr_high, fnr_low);
}

// --- evaluation --------------------------------------------------------------------

std::vector<double> constant_predictor(const FeedForwardNet& net, double bias) {
  std::vector<double> w(net.parameter_count(), 0.0);
  w.back() = bias;  // failure-class output bias
  return w;
}

TEST(Evaluate, AlwaysAndNeverWarn) {
  const FeedForwardNet net(NetArchitecture::toy_default());
  const FeatureSpec features{1, 1.0};
  const auto set = collect(EnvSource::toy(0.0), nullptr, 2000, 2, 1, Partition::kHeldout);
  const double p1 = static_cast<double>(set.failures()) / 2000;
  const auto always = evaluate(net, PosteriorParams::around(constant_predictor(net, 5.0), -60),
                               set, features, 3, 1, true);
  EXPECT_EQ(always.counts.total(), 2000u * 3);
  EXPECT_DOUBLE_EQ(always.counts.fnr(), 0.0);
  EXPECT_DOUBLE_EQ(always.counts.fpr(), 1.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(always.counts.tp) / always.counts.total(), p1);
  ASSERT_TRUE(always.intervention.has_value());
  EXPECT_DOUBLE_EQ(always.intervention->failures_averted, 1.0);
  EXPECT_DOUBLE_EQ(always.intervention->needless_halts, 1.0);
  const auto never = evaluate(net, PosteriorParams::around(constant_predictor(net, -5.0), -60),
                              set, features, 2, 1, false);
  EXPECT_DOUBLE_EQ(never.counts.fnr(), 1.0);
  EXPECT_DOUBLE_EQ(never.counts.fpr(), 0.0);
  EXPECT_FALSE(never.intervention.has_value());
}

TEST(Evaluate, ParallelMatchesSerial) {
  const auto cfg = small_toy(300);
  const auto r = run_pipeline(cfg, 9);
  const FeedForwardNet net(cfg.architecture);
  const auto set = collect(cfg.source, nullptr, 3000, 2, 4, Partition::kHeldout);
  const auto a = evaluate(net, r.posterior.posterior, set, FeatureSpec{1, 1.0}, 10, 6, false);
  const auto b = evaluate(net, r.posterior.posterior, set, FeatureSpec{1, 1.0}, 10, 6, false);
  EXPECT_EQ(a.counts.fp, b.counts.fp);
  EXPECT_EQ(a.counts.fn, b.counts.fn);
  EXPECT_EQ(a.counts.total(), 30000u);
}

TEST(Pipeline, StageErrorsCarryContext) {
  auto cfg = default_run_config().pipeline;
  cfg.source = EnvSource::navigation(nav::NavConfig{});
  cfg.source.nav.min_obstacles = cfg.source.nav.max_obstacles = 400;
  cfg.source.nav.max_retries = 5;
  cfg.architecture = NetArchitecture::nav_default(1, 32);
  try {
    run_pipeline(cfg, 1);
    FAIL();
  } catch (const PipelineStageError& e) {
    EXPECT_EQ(e.stage(), "collect");
    EXPECT_EQ(e.seed(), pipeline_seeds(1).at("prior_data"));
  }
}

TEST(Pipeline, SeedsAreDistinct) {
  const auto s = pipeline_seeds(0);
  std::set<std::uint64_t> values;
  for (const auto& [k, v] : s) values.insert(v);
  EXPECT_EQ(values.size(), s.size());
}

TEST(Pipeline, ValidateChecksInputWidth) {
  auto cfg = default_run_config().pipeline;
  cfg.history = 2;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace pacguard
