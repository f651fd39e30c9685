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

#include "pacguard/envs/nav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pacguard::nav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

bool fits(const NavConfig& cfg, const std::vector<Obstacle>& placed, const Obstacle& cand) {
  const double half = cfg.arena_width / 2.0;
  if (cand.center.x - cand.radius < 0.0 || cand.center.x + cand.radius > cfg.arena_length ||
      cand.center.y - cand.radius < -half || cand.center.y + cand.radius > half) {
    return false;
  }
  if (dist(cand.center, cfg.start.position) - cand.radius < cfg.keepout) return false;
  return std::none_of(placed.begin(), placed.end(), [&](const Obstacle& o) {
    return dist(o.center, cand.center) <= o.radius + cand.radius + cfg.min_gap;
  });
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform(Rng& rng, double lo, double hi) {
  return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
}

Obstacle place_uniform(const NavConfig& cfg, const std::vector<Obstacle>& placed, Rng& rng) {
  const double half = cfg.arena_width / 2.0;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    Obstacle o;
    o.radius = uniform(rng, cfg.radius_min, cfg.radius_max);
    o.center.x = uniform(rng, o.radius, cfg.arena_length - o.radius);
    o.center.y = uniform(rng, -half + o.radius, half - o.radius);
    o.stage = 1;
    if (fits(cfg, placed, o)) return o;
  }
  throw GenerationError("could not place obstacle " + std::to_string(placed.size() + 1) +
                        " without overlap after " + std::to_string(cfg.max_retries) +
                        " attempts");
}

// Candidate fully inside the angular shadow of `occluder` as seen from the
// start, and entirely beyond the occluder's far side.
Obstacle place_hidden(const NavConfig& cfg, const std::vector<Obstacle>& placed,
                      std::size_t first_stage, Rng& rng) {
  const Vec2 p = cfg.start.position;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    const auto& occ = placed[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(first_stage) - 1))];
    const double da = dist(occ.center, p);
    const double half_occ = std::asin(std::min(1.0, occ.radius / da));
    const double bearing = std::atan2(occ.center.y - p.y, occ.center.x - p.x);
    Obstacle o;
    o.stage = 2;
    o.radius = uniform(rng, cfg.radius_min, cfg.radius_max);
    const double near = da + occ.radius + o.radius + cfg.min_gap;
    const double db = uniform(rng, near, near + 3.0);
    const double half_new = std::asin(std::min(1.0, o.radius / db));
    const double slack = half_occ - half_new;
    if (slack <= 1e-6) continue;
    const double phi = bearing + uniform(rng, -slack, slack) * 0.999;
    o.center = {p.x + db * std::cos(phi), p.y + db * std::sin(phi)};
    if (fits(cfg, placed, o)) return o;
  }
  throw GenerationError("could not place an occluded obstacle after " +
                        std::to_string(cfg.max_retries) + " attempts");
}

}  // namespace

std::string_view to_string(Setting s) {
  return s == Setting::kStandard ? "standard" : "occluded";
}

Setting setting_from_string(std::string_view s) {
  if (s == "standard") return Setting::kStandard;
  if (s == "occluded") return Setting::kOccluded;
  throw std::invalid_argument("unknown nav setting '" + std::string(s) + "'");
}

void NavConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("nav." + field + ": " + why);
  };
  if (!(arena_length > 0.0)) fail("arena_length", "must be positive");
  if (!(arena_width > 0.0)) fail("arena_width", "must be positive");
  if (min_obstacles < 0 || max_obstacles < min_obstacles) fail("max_obstacles", "bad range");
  if (min_hidden < 0 || max_hidden < min_hidden) fail("max_hidden", "bad range");
  if (!(radius_min > 0.0)) fail("radius_min", "must be > 0");
  if (radius_max < radius_min) fail("radius_max", "must be >= radius_min");
  if (2.0 * radius_max > arena_width) fail("radius_max", "obstacles wider than the arena");
  if (max_retries < 1) fail("max_retries", "must be >= 1");
  if (sensor.rays < 1) fail("sensor.rays", "must be >= 1");
  if (!(sensor.max_range > 0.0)) fail("sensor.max_range", "must be positive");
  if (sensor.noise_fraction < 0.0) fail("sensor.noise_fraction", "must be >= 0");
  if (!(robot_radius >= 0.0)) fail("robot_radius", "must be >= 0");
  if (!(primitive_length > 0.0)) fail("primitive_length", "must be positive");
  if (primitive_points < 2) fail("primitive_points", "must be >= 2");
  if (primitive_curvatures.empty()) fail("primitive_curvatures", "need at least one");
  if (horizon < 1) fail("horizon", "must be >= 1");
  if (setting == Setting::kOccluded && max_hidden > 0 && max_obstacles < 1) {
    fail("max_obstacles", "occluded setting needs first-stage obstacles");
  }
}

NavEnvironment nav_generate(const NavConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  NavEnvironment env;
  env.arena_min = {0.0, -cfg.arena_width / 2.0};
  env.arena_max = {cfg.arena_length, cfg.arena_width / 2.0};
  env.setting = cfg.setting;
  env.seed = seed;
  // Hidden obstacles can run out of shadow room; the whole layout is then
  // redrawn from the continuing stream.
  constexpr int kLayoutRestarts = 50;
  for (int restart = 0;; ++restart) {
    env.obstacles.clear();
    const int first = uniform_int(rng, cfg.min_obstacles, cfg.max_obstacles);
    for (int i = 0; i < first; ++i) {
      env.obstacles.push_back(place_uniform(cfg, env.obstacles, rng));
    }
    if (cfg.setting != Setting::kOccluded || first == 0) break;
    const int hidden = uniform_int(rng, cfg.min_hidden, cfg.max_hidden);
    const auto first_stage = env.obstacles.size();
    try {
      for (int i = 0; i < hidden; ++i) {
        env.obstacles.push_back(place_hidden(cfg, env.obstacles, first_stage, rng));
      }
      break;
    } catch (const GenerationError&) {
      if (restart + 1 >= kLayoutRestarts) throw;
    }
  }
  return env;
}

double ray_distance(Vec2 origin, double angle, std::span<const Obstacle> obstacles,
                    std::size_t* hit_index) {
  const double ux = std::cos(angle);
  const double uy = std::sin(angle);
  double best = kInf;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto& o = obstacles[i];
    const double cx = o.center.x - origin.x;
    const double cy = o.center.y - origin.y;
    const double b = ux * cx + uy * cy;
    const double c = cx * cx + cy * cy - o.radius * o.radius;
    if (c <= 0.0) {  // origin inside the obstacle
      best = 0.0;
      if (hit_index) *hit_index = i;
      continue;
    }
    const double disc = b * b - c;
    if (b <= 0.0 || disc < 0.0) continue;
    const double t = b - std::sqrt(disc);
    if (t < best) {
      best = t;
      if (hit_index) *hit_index = i;
    }
  }
  return best;
}

double ray_angle(const SensorConfig& sensor, int i) {
  const double fov = sensor.fov_deg * std::numbers::pi / 180.0;
  if (sensor.rays == 1) return 0.0;
  return -fov / 2.0 + fov * static_cast<double>(i) / static_cast<double>(sensor.rays - 1);
}

std::vector<double> depth_scan(const NavEnvironment& env, const SensorConfig& sensor,
                               const Pose& pose) {
  std::vector<double> depth(static_cast<std::size_t>(sensor.rays));
  for (int i = 0; i < sensor.rays; ++i) {
    const double d = ray_distance(pose.position, pose.heading + ray_angle(sensor, i),
                                  env.obstacles);
    depth[static_cast<std::size_t>(i)] = std::min(d, sensor.max_range);
  }
  return depth;
}

std::vector<double> noisy_depth_scan(const NavEnvironment& env, const SensorConfig& sensor,
                                     const Pose& pose, Rng& rng) {
  auto depth = depth_scan(env, sensor, pose);
  std::normal_distribution<double> noise(0.0, sensor.noise_fraction * sensor.max_range);
  for (auto& d : depth) {
    const double e = sensor.noise_fraction > 0.0 ? noise(rng) : 0.0;
    d = std::clamp(d + e, 0.0, sensor.max_range);
  }
  return depth;
}

std::vector<Vec2> primitive_polyline(const NavConfig& cfg, std::size_t k) {
  const double kappa = cfg.primitive_curvatures.at(k);
  std::vector<Vec2> pts(static_cast<std::size_t>(cfg.primitive_points) + 1);
  for (int i = 0; i <= cfg.primitive_points; ++i) {
    const double s = cfg.primitive_length * i / cfg.primitive_points;
    Vec2 p;
    if (std::abs(kappa) < 1e-12) {
      p = {s, 0.0};
    } else {
      p = {std::sin(kappa * s) / kappa, (1.0 - std::cos(kappa * s)) / kappa};
    }
    pts[static_cast<std::size_t>(i)] = p;
  }
  return pts;
}

Pose apply_primitive(const NavConfig& cfg, const Pose& pose, std::size_t k,
                     std::vector<Vec2>* world_path) {
  const auto local = primitive_polyline(cfg, k);
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  if (world_path) world_path->clear();
  Vec2 last = pose.position;
  for (const auto& p : local) {
    last = {pose.position.x + c * p.x - s * p.y, pose.position.y + s * p.x + c * p.y};
    if (world_path) world_path->push_back(last);
  }
  return {last, pose.heading + cfg.primitive_curvatures[k] * cfg.primitive_length};
}

bool path_collides(std::span<const Vec2> path, double robot_radius,
                   std::span<const Obstacle> obstacles) {
  for (const auto& o : obstacles) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (point_segment_distance(o.center, path[i], path[i + 1]) < o.radius + robot_radius) {
        return true;
      }
    }
  }
  return false;
}

GreedyClearancePolicy::GreedyClearancePolicy(const NavConfig& cfg, double clearance_cap,
                                             double turn_penalty)
    : cfg_(cfg), clearance_cap_(clearance_cap), turn_penalty_(turn_penalty) {
  for (std::size_t k = 0; k < cfg_.primitive_curvatures.size(); ++k) {
    primitives_.push_back(primitive_polyline(cfg_, k));
  }
  for (int i = 0; i < cfg_.sensor.rays; ++i) {
    cos_.push_back(std::cos(ray_angle(cfg_.sensor, i)));
    sin_.push_back(std::sin(ray_angle(cfg_.sensor, i)));
  }
}

std::vector<double> GreedyClearancePolicy::scores(std::span<const double> depth) const {
  std::vector<Vec2> returns;
  for (std::size_t i = 0; i < depth.size() && i < cos_.size(); ++i) {
    if (depth[i] < cfg_.sensor.max_range * 0.999) {
      returns.push_back({depth[i] * cos_[i], depth[i] * sin_[i]});
    }
  }
  std::vector<double> out;
  out.reserve(primitives_.size());
  for (std::size_t k = 0; k < primitives_.size(); ++k) {
    double clearance = kInf;
    for (const auto& q : returns) {
      for (std::size_t i = 0; i + 1 < primitives_[k].size(); ++i) {
        clearance = std::min(
            clearance, point_segment_distance(q, primitives_[k][i], primitives_[k][i + 1]));
      }
    }
    clearance = std::min(clearance - cfg_.robot_radius, clearance_cap_);
    out.push_back(clearance - turn_penalty_ * std::abs(cfg_.primitive_curvatures[k]));
  }
  return out;
}

std::size_t GreedyClearancePolicy::operator()(std::span<const double> depth) const {
  const auto s = scores(depth);
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] > s[best]) best = k;
  }
  return best;
}

namespace {

template <typename OnStep>
Rollout run(const NavEnvironment& env, const NavConfig& cfg, const Policy& policy,
            const StepPredictor* predictor, int horizon, std::uint64_t seed, OnStep&& on_step) {
  if (horizon < 1) throw std::invalid_argument("nav_rollout: horizon must be >= 1");
  Rng rng(seed);
  Rollout r;
  r.horizon = horizon;
  r.t_fail = horizon + 1;
  Pose pose = cfg.start;
  std::vector<Vec2> path;
  for (int t = 1; t <= horizon; ++t) {
    r.observations.push_back(noisy_depth_scan(env, cfg.sensor, pose, rng));
    if (predictor) {
      r.predictions.push_back((*predictor)(std::span<const std::vector<double>>(r.observations)));
    }
    const std::size_t k = policy(r.observations.back());
    if (k >= cfg.primitive_curvatures.size()) {
      throw std::out_of_range("policy returned primitive " + std::to_string(k));
    }
    pose = apply_primitive(cfg, pose, k, &path);
    on_step(pose);
    if (path_collides(path, cfg.robot_radius, env.obstacles)) {
      r.t_fail = t;
      break;
    }
  }
  r.y = r.t_fail <= horizon ? 1 : 0;
  return r;
}

}  // namespace

Rollout nav_rollout(const NavEnvironment& env, const NavConfig& cfg, const Policy& policy,
                    const StepPredictor* predictor, int horizon, std::uint64_t seed) {
  return run(env, cfg, policy, predictor, horizon, seed, [](const Pose&) {});
}

std::vector<Pose> nav_trajectory(const NavEnvironment& env, const NavConfig& cfg,
                                 const Policy& policy, int horizon, std::uint64_t seed) {
  std::vector<Pose> poses{cfg.start};
  run(env, cfg, policy, nullptr, horizon, seed, [&](const Pose& p) { poses.push_back(p); });
  return poses;
}

}  // namespace pacguard::nav
