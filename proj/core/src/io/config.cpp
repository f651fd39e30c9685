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

#include "pacguard/io/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pacguard {

using nlohmann::json;

ConfigError::ConfigError(const std::string& message, std::string field, std::size_t line,
                         std::size_t column)
    : std::runtime_error(message), field_(std::move(field)), line_(line), column_(column) {}

namespace {

// --- serialization -------------------------------------------------------

json nav_to_json(const nav::NavConfig& n) {
  return {
      {"arena_length", n.arena_length},
      {"arena_width", n.arena_width},
      {"start", {{"x", n.start.position.x}, {"y", n.start.position.y},
                 {"heading", n.start.heading}}},
      {"setting", std::string(nav::to_string(n.setting))},
      {"min_obstacles", n.min_obstacles},
      {"max_obstacles", n.max_obstacles},
      {"min_hidden", n.min_hidden},
      {"max_hidden", n.max_hidden},
      {"radius_min", n.radius_min},
      {"radius_max", n.radius_max},
      {"keepout", n.keepout},
      {"min_gap", n.min_gap},
      {"max_retries", n.max_retries},
      {"sensor", {{"rays", n.sensor.rays}, {"fov_deg", n.sensor.fov_deg},
                  {"max_range", n.sensor.max_range},
                  {"noise_fraction", n.sensor.noise_fraction}}},
      {"robot_radius", n.robot_radius},
      {"primitive_length", n.primitive_length},
      {"primitive_points", n.primitive_points},
      {"primitive_curvatures", n.primitive_curvatures},
      {"horizon", n.horizon},
  };
}

json training_to_json(const TrainingConfig& t) {
  return {{"omega", t.omega},           {"k", t.k},
          {"gamma", t.gamma},           {"epochs", t.epochs},
          {"batch", t.batch},           {"m_train", t.m_train},
          {"log_s0", t.log_s0},         {"last_steps", t.last_steps},
          {"full_batch", t.full_batch}, {"kl_cap", t.kl_cap},
          {"trace_draws", t.trace_draws}};
}

json to_json_doc(const RunConfig& c) {
  const auto& p = c.pipeline;
  json j;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["env"] = {{"kind", p.source.kind == EnvSource::Kind::kToy ? "toy" : "nav"},
              {"toy", {{"c", p.source.toy_c}}},
              {"nav", nav_to_json(p.source.nav)}};
  j["pipeline"] = {{"horizon", p.horizon},     {"history", p.history},
                   {"n_prior", p.n_prior},     {"n_bound", p.n_bound},
                   {"n_heldout", p.n_heldout}, {"heldout_m", p.heldout_m}};
  j["architecture"] = {{"widths", p.architecture.widths},
                       {"activation", std::string(to_string(p.architecture.activation))}};
  j["prior_training"] = training_to_json(p.prior_training);
  j["posterior_training"] = training_to_json(p.posterior_training);
  j["budget"] = {{"delta", p.budget.delta},
                 {"delta_mc", p.budget.delta_mc},
                 {"M", p.budget.m},
                 {"strict_delta", p.budget.strict_delta},
                 {"sample_convergence", p.budget.sample_convergence}};
  j["toy_verify"] = {{"c_grid", c.toy_verify.c_grid},
                     {"samples", c.toy_verify.samples},
                     {"z_max", c.toy_verify.z_max},
                     {"plot", c.toy_verify.plot}};
  j["sweep"] = {{"omegas", c.sweep.omegas}};
  const auto& cv = c.conformal.coverage;
  j["conformal"] = {{"fail_lo", cv.spec.fail_lo},
                    {"fail_hi", cv.spec.fail_hi},
                    {"success_lo", cv.spec.success_lo},
                    {"success_hi", cv.spec.success_hi},
                    {"class_rate", cv.spec.class_rate},
                    {"t_total", cv.t_total},
                    {"epsilon_star", cv.epsilon_star},
                    {"draws", cv.draws},
                    {"finite_sample_correction", cv.finite_sample_correction},
                    {"test_points", cv.test_points},
                    {"pac_resamples", c.conformal.pac_resamples}};
  return j;
}

// --- parsing ---------------------------------------------------------------

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string type_word(const json& v) {
  if (v.is_boolean()) return "a boolean";
  if (v.is_number_unsigned()) return "a non-negative integer";
  if (v.is_number_integer()) return "an integer";
  if (v.is_number()) return "a number";
  if (v.is_string()) return "a string";
  if (v.is_array()) return "an array";
  if (v.is_object()) return "an object";
  return "null";
}

bool compatible(const json& def, const json& got) {
  if (def.is_boolean()) return got.is_boolean();
  if (def.is_number_unsigned()) return got.is_number_unsigned();
  if (def.is_number_integer()) return got.is_number_integer();
  if (def.is_number()) return got.is_number();
  if (def.is_string()) return got.is_string();
  if (def.is_array()) return got.is_array();
  if (def.is_object()) return got.is_object();
  return true;
}

// Rejects keys and types the defaults do not have; arrays are checked
// element-wise against the type of the default's elements.
void check_shape(const json& def, const json& got, const std::string& path) {
  if (!compatible(def, got)) {
    throw ConfigError(path + ": expected " + type_word(def) + ", got " + type_word(got), path);
  }
  if (def.is_object()) {
    for (auto it = got.begin(); it != got.end(); ++it) {
      const auto p = join(path, it.key());
      if (!def.contains(it.key())) throw ConfigError(p + ": unknown key", p);
      check_shape(def.at(it.key()), it.value(), p);
    }
  } else if (def.is_array() && !def.empty()) {
    for (std::size_t i = 0; i < got.size(); ++i) {
      check_shape(def.front(), got[i], path + "[" + std::to_string(i) + "]");
    }
  }
}

template <typename T>
T get(const json& j, const char* key) {
  return j.at(key).get<T>();
}

nav::NavConfig nav_from_json(const json& j) {
  nav::NavConfig n;
  n.arena_length = get<double>(j, "arena_length");
  n.arena_width = get<double>(j, "arena_width");
  n.start.position = {j.at("start").at("x").get<double>(), j.at("start").at("y").get<double>()};
  n.start.heading = j.at("start").at("heading").get<double>();
  try {
    n.setting = nav::setting_from_string(get<std::string>(j, "setting"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("env.nav.setting: ") + e.what(), "env.nav.setting");
  }
  n.min_obstacles = get<int>(j, "min_obstacles");
  n.max_obstacles = get<int>(j, "max_obstacles");
  n.min_hidden = get<int>(j, "min_hidden");
  n.max_hidden = get<int>(j, "max_hidden");
  n.radius_min = get<double>(j, "radius_min");
  n.radius_max = get<double>(j, "radius_max");
  n.keepout = get<double>(j, "keepout");
  n.min_gap = get<double>(j, "min_gap");
  n.max_retries = get<int>(j, "max_retries");
  const auto& s = j.at("sensor");
  n.sensor.rays = get<int>(s, "rays");
  n.sensor.fov_deg = get<double>(s, "fov_deg");
  n.sensor.max_range = get<double>(s, "max_range");
  n.sensor.noise_fraction = get<double>(s, "noise_fraction");
  n.robot_radius = get<double>(j, "robot_radius");
  n.primitive_length = get<double>(j, "primitive_length");
  n.primitive_points = get<int>(j, "primitive_points");
  n.primitive_curvatures = get<std::vector<double>>(j, "primitive_curvatures");
  n.horizon = get<int>(j, "horizon");
  return n;
}

TrainingConfig training_from_json(const json& j) {
  TrainingConfig t;
  t.omega = get<double>(j, "omega");
  t.k = get<int>(j, "k");
  t.gamma = get<double>(j, "gamma");
  t.epochs = get<int>(j, "epochs");
  t.batch = get<std::size_t>(j, "batch");
  t.m_train = get<int>(j, "m_train");
  t.log_s0 = get<double>(j, "log_s0");
  t.last_steps = get<int>(j, "last_steps");
  t.full_batch = get<bool>(j, "full_batch");
  t.kl_cap = get<double>(j, "kl_cap");
  t.trace_draws = get<int>(j, "trace_draws");
  return t;
}

// Byte offset -> 1-based (line, column).
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string validation_field(const std::string& what) {
  const auto colon = what.find(':');
  return colon == std::string::npos ? std::string() : what.substr(0, colon);
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  auto& p = c.pipeline;
  p.source = EnvSource::toy(0.0);
  p.source.nav = nav::NavConfig{};
  p.history = 1;
  p.architecture = NetArchitecture::toy_default();
  p.prior_training.epochs = 60;
  p.prior_training.gamma = 0.1;
  p.prior_training.batch = 32;
  p.posterior_training.epochs = 40;
  p.posterior_training.gamma = 0.02;
  p.posterior_training.batch = 64;
  p.heldout_m = 20;
  p.posterior_training.trace_draws = 2;
  c.conformal.coverage.seed = 0;
  return c;
}

std::string run_config_to_json(const RunConfig& cfg) { return to_json_doc(cfg).dump(2) + "\n"; }

RunConfig parse_run_config(std::string_view text) {
  json user;
  try {
    user = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what(),
                      {}, line, col);
  }
  if (!user.is_object()) throw ConfigError("config: top level must be an object");

  const RunConfig defaults = default_run_config();
  json doc = to_json_doc(defaults);
  // A nav run gets nav-sized defaults unless the file overrides them.
  const bool nav_env = user.contains("env") && user["env"].is_object() &&
                       user["env"].contains("kind") && user["env"]["kind"] == "nav";
  if (nav_env) {
    const auto& n = defaults.pipeline.source.nav;
    doc["pipeline"]["history"] = 4;
    doc["pipeline"]["n_prior"] = 1000;
    doc["pipeline"]["n_bound"] = 1000;
    doc["pipeline"]["n_heldout"] = 2000;
    doc["pipeline"]["heldout_m"] = 20;
    doc["architecture"]["widths"] =
        NetArchitecture::nav_default(4, static_cast<std::size_t>(n.sensor.rays)).widths;
    doc["architecture"]["activation"] = "relu";
    doc["prior_training"]["gamma"] = 0.05;
    doc["prior_training"]["epochs"] = 30;
    doc["prior_training"]["k"] = 3;
    doc["prior_training"]["omega"] = 2.0;
    doc["posterior_training"]["k"] = 3;
    doc["posterior_training"]["omega"] = 2.0;
    doc["posterior_training"]["gamma"] = 0.005;
    doc["posterior_training"]["trace_draws"] = 8;
    doc["posterior_training"]["epochs"] = 20;
  }
  check_shape(doc, user, "");
  // Width arrays are recomputed from the nav sensor/history unless given.
  const bool widths_given = user.contains("architecture") &&
                            user["architecture"].contains("widths");
  doc.merge_patch(user);

  RunConfig c;
  try {
    c.seed = get<std::uint64_t>(doc, "seed");
    c.threads = get<std::size_t>(doc, "threads");
    const auto& env = doc.at("env");
    const auto kind = get<std::string>(env, "kind");
    if (kind != "toy" && kind != "nav") {
      throw ConfigError("env.kind: expected \"toy\" or \"nav\", got \"" + kind + "\"", "env.kind");
    }
    auto& p = c.pipeline;
    p.source.nav = nav_from_json(env.at("nav"));
    p.source.toy_c = env.at("toy").at("c").get<double>();
    p.source.kind = kind == "toy" ? EnvSource::Kind::kToy : EnvSource::Kind::kNav;
    const auto& pl = doc.at("pipeline");
    p.horizon = get<int>(pl, "horizon");
    p.history = get<std::size_t>(pl, "history");
    p.n_prior = get<std::size_t>(pl, "n_prior");
    p.n_bound = get<std::size_t>(pl, "n_bound");
    p.n_heldout = get<std::size_t>(pl, "n_heldout");
    p.heldout_m = get<std::uint64_t>(pl, "heldout_m");
    const auto& a = doc.at("architecture");
    p.architecture.widths = get<std::vector<std::size_t>>(a, "widths");
    if (nav_env && !widths_given && !p.architecture.widths.empty()) {
      p.architecture.widths.front() =
          p.history * static_cast<std::size_t>(std::max(p.source.nav.sensor.rays, 1));
    }
    try {
      p.architecture.activation = activation_from_string(get<std::string>(a, "activation"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("architecture.activation: ") + e.what(),
                        "architecture.activation");
    }
    p.prior_training = training_from_json(doc.at("prior_training"));
    p.posterior_training = training_from_json(doc.at("posterior_training"));
    const auto& b = doc.at("budget");
    p.budget.delta = get<double>(b, "delta");
    p.budget.delta_mc = get<double>(b, "delta_mc");
    p.budget.m = get<std::uint64_t>(b, "M");
    p.budget.strict_delta = get<bool>(b, "strict_delta");
    p.budget.sample_convergence = get<bool>(b, "sample_convergence");
    const auto& tv = doc.at("toy_verify");
    c.toy_verify.c_grid = get<std::vector<double>>(tv, "c_grid");
    c.toy_verify.samples = get<std::uint64_t>(tv, "samples");
    c.toy_verify.z_max = get<double>(tv, "z_max");
    c.toy_verify.plot = get<bool>(tv, "plot");
    c.sweep.omegas = get<std::vector<double>>(doc.at("sweep"), "omegas");
    const auto& cf = doc.at("conformal");
    auto& cv = c.conformal.coverage;
    cv.spec.fail_lo = get<double>(cf, "fail_lo");
    cv.spec.fail_hi = get<double>(cf, "fail_hi");
    cv.spec.success_lo = get<double>(cf, "success_lo");
    cv.spec.success_hi = get<double>(cf, "success_hi");
    cv.spec.class_rate = get<double>(cf, "class_rate");
    cv.t_total = get<std::size_t>(cf, "t_total");
    cv.epsilon_star = get<double>(cf, "epsilon_star");
    cv.draws = get<std::size_t>(cf, "draws");
    cv.finite_sample_correction = get<bool>(cf, "finite_sample_correction");
    cv.test_points = get<std::size_t>(cf, "test_points");
    c.conformal.pac_resamples = get<std::size_t>(cf, "pac_resamples");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  try {
    c.pipeline.validate();
    c.conformal.coverage.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), validation_field(e.what()));
  }
  if (c.toy_verify.c_grid.empty()) throw ConfigError("toy_verify.c_grid: empty", "toy_verify.c_grid");
  for (double cc : c.toy_verify.c_grid) {
    if (!(cc >= -1.0 && cc <= 1.0)) {
      throw ConfigError("toy_verify.c_grid: values must lie in [-1, 1]", "toy_verify.c_grid");
    }
  }
  if (c.toy_verify.samples < 1) throw ConfigError("toy_verify.samples: must be >= 1", "toy_verify.samples");
  if (c.sweep.omegas.size() < 2) throw ConfigError("sweep.omegas: need >= 2 values", "sweep.omegas");
  for (double w : c.sweep.omegas) {
    if (!(w >= 0.0)) throw ConfigError("sweep.omegas: values must be >= 0", "sweep.omegas");
  }
  if (c.conformal.pac_resamples < 1) {
    throw ConfigError("conformal.pac_resamples: must be >= 1", "conformal.pac_resamples");
  }
  const double toy_c = c.pipeline.source.toy_c;
  if (!(toy_c >= -2.0 && toy_c <= 2.0)) throw ConfigError("env.toy.c: must lie in [-2, 2]", "env.toy.c");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pacguard
