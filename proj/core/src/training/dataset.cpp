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

#include "pacguard/training/dataset.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "pacguard/envs/toy.hpp"
#include "pacguard/parallel.hpp"
#include "pacguard/rng.hpp"
#include "pacguard/training/surrogate.hpp"

namespace pacguard {

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::kPrior: return "prior";
    case Partition::kBound: return "bound";
    case Partition::kHeldout: return "heldout";
  }
  return "?";
}

EnvSource EnvSource::toy(double c) {
  EnvSource s;
  s.kind = Kind::kToy;
  s.toy_c = c;
  return s;
}

EnvSource EnvSource::navigation(nav::NavConfig cfg) {
  EnvSource s;
  s.kind = Kind::kNav;
  s.nav = std::move(cfg);
  return s;
}

int EnvSource::default_horizon() const {
  return kind == Kind::kToy ? toy::kHorizon : nav.horizon;
}

std::size_t EnvSource::observation_dim() const {
  return kind == Kind::kToy ? 1 : static_cast<std::size_t>(nav.sensor.rays);
}

double EnvSource::observation_scale() const {
  return kind == Kind::kToy ? 1.0 : nav.sensor.max_range;
}

std::size_t LabeledRolloutSet::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rollouts.begin(), rollouts.end(), [](const Rollout& r) { return r.y == 1; }));
}

LabeledRolloutSet collect(const EnvSource& source, const nav::Policy* policy, std::size_t count,
                          int horizon, std::uint64_t seed, Partition partition) {
  if (count < 1) throw std::invalid_argument("collect: count must be >= 1");
  LabeledRolloutSet set;
  set.partition = partition;
  set.seed = seed;
  set.rollouts.resize(count);
  set.env_seeds.resize(count);
  for (std::size_t i = 0; i < count; ++i) set.env_seeds[i] = derive_seed(seed, i);

  if (source.kind == EnvSource::Kind::kToy) {
    if (horizon > 0 && horizon != toy::kHorizon) {
      throw std::invalid_argument("collect: the toy source has a fixed horizon of " +
                                  std::to_string(toy::kHorizon));
    }
    for (std::size_t i = 0; i < count; ++i) {
      Rng rng(set.env_seeds[i]);
      set.rollouts[i] = toy::toy_rollout(toy::toy_sample(source.toy_c, rng));
    }
    return set;
  }

  source.nav.validate();
  const int t = horizon > 0 ? horizon : source.nav.horizon;
  const nav::GreedyClearancePolicy greedy(source.nav);
  const nav::Policy fallback = [&greedy](std::span<const double> d) { return greedy(d); };
  const nav::Policy& pi = policy ? *policy : fallback;
  parallel_for(count, [&](std::size_t i) {
    const auto env = nav::nav_generate(source.nav, set.env_seeds[i]);
    set.rollouts[i] =
        nav::nav_rollout(env, source.nav, pi, nullptr, t, splitmix64(set.env_seeds[i]));
  });
  return set;
}

void assert_disjoint(std::span<const LabeledRolloutSet* const> sets) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto* s : sets) {
    for (auto seed : s->env_seeds) {
      if (!seen.insert(seed).second) {
        throw std::logic_error("partition overlap: environment seed " + std::to_string(seed) +
                               " appears twice (" + std::string(to_string(s->partition)) + ")");
      }
    }
  }
}

std::vector<int> step_labels(const Rollout& r, int k) {
  std::vector<int> out(r.observations.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = step_target(static_cast<int>(i) + 1, r.t_fail, r.horizon, k);
  }
  return out;
}

FeatureSpec FeatureSpec::for_source(const EnvSource& source, std::size_t history) {
  if (history < 1) throw std::invalid_argument("feature history must be >= 1");
  return {history, source.observation_scale()};
}

std::vector<double> step_features(const Rollout& r, std::size_t index, const FeatureSpec& spec) {
  if (index >= r.observations.size()) throw std::out_of_range("step_features: no such step");
  const std::size_t dim = r.observations[index].size();
  std::vector<double> x;
  x.reserve(spec.history * dim);
  const double inv = 1.0 / spec.scale;
  for (std::size_t h = spec.history; h-- > 0;) {
    const std::size_t src = index >= h ? index - h : 0;
    for (double v : r.observations[src]) x.push_back(v * inv);
  }
  return x;
}

std::vector<std::vector<double>> rollout_features(const Rollout& r, const FeatureSpec& spec) {
  std::vector<std::vector<double>> out;
  const std::size_t n = r.steps_before_failure();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(step_features(r, i, spec));
  return out;
}

std::vector<LabeledSequence> to_sequences(const LabeledRolloutSet& set, const FeatureSpec& spec,
                                          int last_steps) {
  std::vector<LabeledSequence> out;
  out.reserve(set.size());
  for (const auto& r : set.rollouts) {
    LabeledSequence s;
    s.y = r.y;
    s.t_fail = r.t_fail;
    s.horizon = r.horizon;
    const std::size_t n = r.steps_before_failure();
    std::size_t first = 0;
    if (last_steps > 0 && n > static_cast<std::size_t>(last_steps)) {
      first = n - static_cast<std::size_t>(last_steps);
    }
    s.first_step = static_cast<int>(first) + 1;
    for (std::size_t i = first; i < n; ++i) s.inputs.push_back(step_features(r, i, spec));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pacguard
