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

#include <benchmark/benchmark.h>

#include <random>

#include "pacguard/bounds/certificate.hpp"
#include "pacguard/bounds/pac_bayes.hpp"
#include "pacguard/conformal/conformal.hpp"
#include "pacguard/envs/nav.hpp"
#include "pacguard/envs/toy.hpp"
#include "pacguard/predictor/objective.hpp"

namespace pacguard {
namespace {

void BM_ForwardToy(benchmark::State& state) {
  const FeedForwardNet net(NetArchitecture::toy_default());
  Rng rng(1);
  const auto w = net.initial_weights(rng);
  const std::vector<double> x{0.3};
  NetWorkspace ws;
  for (auto _ : state) benchmark::DoNotOptimize(net.p_fail(w, x, ws));
}
BENCHMARK(BM_ForwardToy);

void BM_ForwardNav(benchmark::State& state) {
  const FeedForwardNet net(NetArchitecture::nav_default(4, 32));
  Rng rng(1);
  const auto w = net.initial_weights(rng);
  const std::vector<double> x(128, 0.5);
  NetWorkspace ws;
  for (auto _ : state) benchmark::DoNotOptimize(net.p_fail(w, x, ws));
}
BENCHMARK(BM_ForwardNav);

void BM_BackwardNav(benchmark::State& state) {
  const FeedForwardNet net(NetArchitecture::nav_default(4, 32));
  Rng rng(1);
  const auto w = net.initial_weights(rng);
  const std::vector<double> x(128, 0.5);
  std::vector<double> grad(w.size());
  NetWorkspace ws;
  for (auto _ : state) benchmark::DoNotOptimize(net.backward(w, x, 1.0, grad, ws));
}
BENCHMARK(BM_BackwardNav);

void BM_GradObjectiveToyBatch(benchmark::State& state) {
  const FeedForwardNet net(NetArchitecture::toy_default());
  Rng rng(2);
  const auto prior = PosteriorParams::around(net.initial_weights(rng), -6.0);
  std::vector<double> noise(prior.size(), 0.1);
  std::vector<LabeledSequence> seqs(static_cast<std::size_t>(state.range(0)));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    seqs[i].horizon = toy::kHorizon;
    seqs[i].y = static_cast<int>(i % 2);
    seqs[i].t_fail = seqs[i].y ? 2 : 3;
    seqs[i].inputs = {{u(rng)}};
  }
  std::vector<const LabeledSequence*> batch;
  for (const auto& s : seqs) batch.push_back(&s);
  ObjectiveSpec spec;
  spec.k = 1;
  spec.n_total = 2000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grad_objective(net, prior, prior, noise, batch, spec).value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GradObjectiveToyBatch)->Arg(64)->Arg(2000);

void BM_KlInverse(benchmark::State& state) {
  double e = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kl_inverse_bound(e, 200000, 0.01));
    e = e > 0.9 ? 0.0 : e + 0.013;
  }
}
BENCHMARK(BM_KlInverse);

void BM_CertifyConditional(benchmark::State& state) {
  OutcomeCounts c;
  c.environments = 5000;
  c.draws = 100;
  c.tp = 90000;
  c.fn = 10000;
  c.fp = 20000;
  c.tn = 380000;
  ConfidenceBudget b;
  for (auto _ : state) benchmark::DoNotOptimize(certify_conditional(c, 25.0, 0.5, b).bound);
}
BENCHMARK(BM_CertifyConditional);

void BM_NavRollout(benchmark::State& state) {
  nav::NavConfig cfg;
  const nav::GreedyClearancePolicy greedy(cfg);
  const nav::Policy policy = [&](std::span<const double> d) { return greedy(d); };
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto env = nav::nav_generate(cfg, seed);
    benchmark::DoNotOptimize(nav::nav_rollout(env, cfg, policy, nullptr, cfg.horizon, ++seed).y);
  }
}
BENCHMARK(BM_NavRollout);

void BM_CoverageExperiment(benchmark::State& state) {
  CoverageConfig cfg;
  cfg.draws = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coverage_experiment(cfg).marginal_safety);
}
BENCHMARK(BM_CoverageExperiment)->Arg(2000);

}  // namespace
}  // namespace pacguard

BENCHMARK_MAIN();
