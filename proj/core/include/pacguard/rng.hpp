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
#include <random>

namespace pacguard {

/// Engine used for every random stream in the toolkit.
using Rng = std::mt19937_64;

/// One step of the SplitMix64 generator; used as a mixing function.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives the seed of sub-stream `stream` from `master`.
///
/// Counter-based: the result depends only on (master, stream), so parallel
/// workers can build their own engines without sharing state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Named sub-streams of a master seed. The tags keep partitions disjoint.
enum class StreamTag : std::uint64_t {
  kPriorData = 1,
  kBoundData = 2,
  kHeldoutData = 3,
  kPriorInit = 4,
  kPriorTraining = 5,
  kPosteriorTraining = 6,
  kCertification = 7,
  kEvaluation = 8,
  kConformal = 9,
  kExperiment = 10,
};

std::uint64_t derive_seed(std::uint64_t master, StreamTag tag);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace pacguard
