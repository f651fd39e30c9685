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

#include "pacguard/predictor/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

namespace pacguard {

using nlohmann::json;

std::string checkpoint_to_json(const Checkpoint& c) {
  json arch;
  arch["widths"] = c.architecture.widths;
  arch["activation"] = std::string(to_string(c.architecture.activation));
  json j;
  j["format"] = "pacguard.checkpoint";
  j["version"] = kCheckpointFormatVersion;
  j["role"] = c.role;
  j["id"] = params_id(c.params);
  j["parent"] = c.parent;
  j["architecture"] = arch;
  j["master_seed"] = c.master_seed;
  j["seed_lineage"] = c.seed_lineage;
  j["mu"] = c.params.mu;
  j["log_s"] = c.params.log_s;
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "pacguard.checkpoint") {
      throw std::invalid_argument("checkpoint: wrong format tag");
    }
    if (j.at("version").get<int>() != kCheckpointFormatVersion) {
      throw std::invalid_argument("checkpoint: unsupported version " + j.at("version").dump());
    }
    Checkpoint c;
    c.role = j.at("role").get<std::string>();
    c.parent = j.at("parent").get<std::string>();
    c.architecture.widths = j.at("architecture").at("widths").get<std::vector<std::size_t>>();
    c.architecture.activation =
        activation_from_string(j.at("architecture").at("activation").get<std::string>());
    c.architecture.validate();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.seed_lineage = j.at("seed_lineage").get<std::map<std::string, std::uint64_t>>();
    c.params.mu = j.at("mu").get<std::vector<double>>();
    c.params.log_s = j.at("log_s").get<std::vector<double>>();
    c.params.validate();
    if (c.params.size() != c.architecture.parameter_count()) {
      throw std::invalid_argument("checkpoint: " + std::to_string(c.params.size()) +
                                  " parameters for an architecture expecting " +
                                  std::to_string(c.architecture.parameter_count()));
    }
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("checkpoint: ") + e.what());
  }
}

std::string params_id(const PosteriorParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::vector<double>& v) {
    for (double d : v) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &d, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  };
  mix(p.mu);
  mix(p.log_s);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pacguard
