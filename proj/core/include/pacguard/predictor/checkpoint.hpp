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
#include <map>
#include <string>
#include <string_view>

#include "pacguard/predictor/gaussian.hpp"
#include "pacguard/predictor/network.hpp"

namespace pacguard {

inline constexpr int kCheckpointFormatVersion = 1;

/// A saved prior or posterior with the seeds that produced it.
struct Checkpoint {
  std::string role;  // "prior" or "posterior"
  NetArchitecture architecture;
  PosteriorParams params;
  std::uint64_t master_seed = 0;
  std::map<std::string, std::uint64_t> seed_lineage;  // stream name -> derived seed
  std::string parent;  // id of the prior a posterior was trained against
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
/// Throws std::invalid_argument on version mismatch or when the parameter
/// count does not match the architecture.
Checkpoint checkpoint_from_json(std::string_view text);

/// Stable 16-hex-digit identifier of the parameters (FNV-1a over the bytes).
std::string params_id(const PosteriorParams& params);

}  // namespace pacguard
