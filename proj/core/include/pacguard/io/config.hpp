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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pacguard/conformal/conformal.hpp"
#include "pacguard/training/pipeline.hpp"

namespace pacguard {

/// Configuration problem with the location it was found at. `line`/`column`
/// are 1-based and 0 when unknown; `field` is a dotted path or empty.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field = {}, std::size_t line = 0,
              std::size_t column = 0);

  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string field_;
  std::size_t line_;
  std::size_t column_;
};

struct ToyVerifyConfig {
  std::vector<double> c_grid{-1.0, -0.75, -0.5, -0.25, 0.0, 0.5, 1.0};
  std::uint64_t samples = 1000000;
  double z_max = 4.0;
  bool plot = true;
};

struct SweepConfig {
  std::vector<double> omegas{0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0};
};

struct ConformalCompareConfig {
  CoverageConfig coverage;
  std::size_t pac_resamples = 200;
};

/// One run's complete configuration. Every section is optional in the file;
/// missing values take the defaults printed by `--print-defaults`.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  PipelineConfig pipeline;
  ToyVerifyConfig toy_verify;
  SweepConfig sweep;
  ConformalCompareConfig conformal;
};

/// Defaults for the toy source (the initial environment kind).
RunConfig default_run_config();

/// Parses a JSON document layered over the defaults. Unknown keys, type
/// mismatches and invalid values raise ConfigError.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

/// Complete JSON document of `cfg` (round-trips through parse_run_config).
std::string run_config_to_json(const RunConfig& cfg);

/// FNV-1a 64-bit hash, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace pacguard
