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

#include "pacguard/envs/serialize.hpp"

#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "pacguard/io/format.hpp"

namespace pacguard {

using nlohmann::json;

std::string nav_environment_to_json(const nav::NavEnvironment& env) {
  json j;
  j["format"] = "pacguard.nav_environment";
  j["version"] = kEnvironmentFormatVersion;
  j["seed"] = env.seed;
  j["setting"] = std::string(nav::to_string(env.setting));
  j["arena"] = {{"min", {env.arena_min.x, env.arena_min.y}},
                {"max", {env.arena_max.x, env.arena_max.y}}};
  json obs = json::array();
  for (const auto& o : env.obstacles) {
    obs.push_back({{"x", o.center.x}, {"y", o.center.y}, {"r", o.radius}, {"stage", o.stage}});
  }
  j["obstacles"] = obs;
  return j.dump(2) + "\n";
}

nav::NavEnvironment nav_environment_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("environment: ") + e.what());
  }
  try {
    if (j.at("format") != "pacguard.nav_environment") {
      throw std::invalid_argument("environment: wrong format tag");
    }
    if (j.at("version").get<int>() != kEnvironmentFormatVersion) {
      throw std::invalid_argument("environment: unsupported version " +
                                  j.at("version").dump());
    }
    nav::NavEnvironment env;
    env.seed = j.at("seed").get<std::uint64_t>();
    env.setting = nav::setting_from_string(j.at("setting").get<std::string>());
    const auto& a = j.at("arena");
    env.arena_min = {a.at("min").at(0).get<double>(), a.at("min").at(1).get<double>()};
    env.arena_max = {a.at("max").at(0).get<double>(), a.at("max").at(1).get<double>()};
    for (const auto& o : j.at("obstacles")) {
      env.obstacles.push_back({{o.at("x").get<double>(), o.at("y").get<double>()},
                               o.at("r").get<double>(),
                               o.at("stage").get<int>()});
    }
    return env;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("environment: ") + e.what());
  }
}

void write_rollout_csv(std::ostream& out, const Rollout& r, bool header) {
  const std::size_t rays = r.observations.empty() ? 0 : r.observations.front().size();
  if (header) {
    out << "t";
    for (std::size_t i = 0; i < rays; ++i) out << ",d" << i;
    out << ",yhat,y,t_fail\n";
  }
  for (std::size_t t = 0; t < r.observations.size(); ++t) {
    out << t + 1;
    for (double d : r.observations[t]) out << ',' << detail::format_double(d);
    out << ',';
    if (t < r.predictions.size()) out << r.predictions[t];
    out << ',' << r.y << ',' << r.t_fail << '\n';
  }
}

}  // namespace pacguard
