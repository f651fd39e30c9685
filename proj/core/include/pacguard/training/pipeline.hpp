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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pacguard/bounds/certificate.hpp"
#include "pacguard/predictor/network.hpp"
#include "pacguard/training/dataset.hpp"
#include "pacguard/training/trainer.hpp"

namespace pacguard {

/// Everything needed for collect -> train_prior -> train_posterior -> evaluate.
struct PipelineConfig {
  EnvSource source;
  int horizon = 0;            // <= 0: source default
  std::size_t history = 1;    // observation frames stacked per input
  NetArchitecture architecture = NetArchitecture::toy_default();
  std::size_t n_prior = 2000;
  std::size_t n_bound = 2000;
  std::size_t n_heldout = 20000;
  std::uint64_t heldout_m = 100;  // posterior draws for the held-out estimate
  TrainingConfig prior_training;
  TrainingConfig posterior_training;
  ConfidenceBudget budget;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// A pipeline stage failed; carries the stage name and its seed.
class PipelineStageError : public std::runtime_error {
 public:
  PipelineStageError(std::string stage, std::uint64_t seed, const std::string& what);
  const std::string& stage() const { return stage_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::string stage_;
  std::uint64_t seed_;
};

/// Partition and stage seeds derived from one master seed.
std::map<std::string, std::uint64_t> pipeline_seeds(std::uint64_t master_seed);

struct PipelineResult {
  std::map<std::string, std::uint64_t> seeds;
  std::size_t prior_failures = 0;
  std::size_t bound_failures = 0;
  std::size_t heldout_failures = 0;
  PriorResult prior;
  std::string prior_id;
  PosteriorResult posterior;
  OutcomeCounts heldout;        // posterior, heldout_m draws
  OutcomeCounts prior_heldout;  // prior mean as a point predictor
};

/// Runs the full protocol. The prior only ever sees the prior partition and
/// is frozen before the bound partition is touched.
PipelineResult run_pipeline(const PipelineConfig& cfg, std::uint64_t master_seed);

struct SweepResult {
  std::vector<double> omegas;
  std::vector<SweepPoint> points;  // bound counts, KL and held-out counts per ω
  std::vector<PipelineResult> runs;
};

/// One (prior, posterior) pair per ω on shared partitions.
SweepResult run_omega_sweep(const PipelineConfig& cfg, const std::vector<double>& omegas,
                            std::uint64_t master_seed);

}  // namespace pacguard
