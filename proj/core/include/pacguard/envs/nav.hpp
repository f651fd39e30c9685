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
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pacguard/envs/rollout.hpp"
#include "pacguard/rng.hpp"

namespace pacguard::nav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Pose {
  Vec2 position;
  double heading = 0.0;  // radians, 0 = +x
};

enum class Setting { kStandard, kOccluded };

std::string_view to_string(Setting s);
Setting setting_from_string(std::string_view s);

struct Obstacle {
  Vec2 center;
  double radius = 0.0;
  int stage = 1;  // 2 = placed in the shadow of a first-stage obstacle
  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

/// Ray-cast depth sensor: equally spaced rays over a forward cone.
struct SensorConfig {
  int rays = 32;
  double fov_deg = 90.0;
  double max_range = 5.0;
  double noise_fraction = 0.01;  // σ as a fraction of max_range
};

/// Environment distribution plus the fixed robot/sensor model.
struct NavConfig {
  double arena_length = 10.0;  // x ∈ [0, L]
  double arena_width = 6.0;    // y ∈ [-W/2, W/2]
  Pose start{{0.5, 0.0}, 0.0};
  Setting setting = Setting::kStandard;

  int min_obstacles = 10; // standard setting, or first stage when occluded
  int max_obstacles = 18;
  int min_hidden = 2;  // occluded second stage
  int max_hidden = 4;
  double radius_min = 0.25;
  double radius_max = 0.5;
  double keepout = 1.5;   // no obstacle center closer than this to the start
  double min_gap = 0.05;  // free space between obstacles
  int max_retries = 500;  // per obstacle

  SensorConfig sensor;
  double robot_radius = 0.2;
  double primitive_length = 1.0;
  int primitive_points = 10;
  /// Curvature (rad/m) of each motion primitive, straight first.
  std::vector<double> primitive_curvatures{0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75};
  int horizon = 10;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct NavEnvironment {
  Vec2 arena_min;
  Vec2 arena_max;
  Setting setting = Setting::kStandard;
  std::vector<Obstacle> obstacles;
  std::uint64_t seed = 0;
  friend bool operator==(const NavEnvironment&, const NavEnvironment&) = default;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Samples an environment; bit-identical for identical (cfg, seed).
/// Throws GenerationError when placement keeps failing.
NavEnvironment nav_generate(const NavConfig& cfg, std::uint64_t seed);

/// Distance along the ray to the first obstacle surface, or +inf.
double ray_distance(Vec2 origin, double angle, std::span<const Obstacle> obstacles,
                    std::size_t* hit_index = nullptr);

/// Noise-free depth scan from a pose (clipped at max range).
std::vector<double> depth_scan(const NavEnvironment& env, const SensorConfig& sensor,
                               const Pose& pose);
/// Depth scan with additive Gaussian noise, clamped to [0, max_range].
std::vector<double> noisy_depth_scan(const NavEnvironment& env, const SensorConfig& sensor,
                                     const Pose& pose, Rng& rng);
/// Angle of ray i relative to the heading.
double ray_angle(const SensorConfig& sensor, int i);

/// Polyline of primitive k in the robot frame (first point is the origin).
std::vector<Vec2> primitive_polyline(const NavConfig& cfg, std::size_t k);
/// Pose after executing primitive k from `pose`, and the world-frame path.
Pose apply_primitive(const NavConfig& cfg, const Pose& pose, std::size_t k,
                     std::vector<Vec2>* world_path = nullptr);
/// True when the swept robot disc along `path` touches any obstacle.
bool path_collides(std::span<const Vec2> path, double robot_radius,
                   std::span<const Obstacle> obstacles);

/// Black-box task policy: depth vector -> primitive index.
using Policy = std::function<std::size_t(std::span<const double> depth)>;

/// Greedy maximum-clearance selector over the configured primitives.
///
/// Clearance of a primitive is the distance from its robot-frame polyline to
/// the nearest sensed return, capped at `clearance_cap`; a small penalty on
/// |curvature| prefers straighter motion. Exact ties go to the lowest index.
class GreedyClearancePolicy {
 public:
  explicit GreedyClearancePolicy(const NavConfig& cfg, double clearance_cap = 1.0,
                                 double turn_penalty = 0.1);
  std::size_t operator()(std::span<const double> depth) const;
  std::vector<double> scores(std::span<const double> depth) const;

 private:
  NavConfig cfg_;
  double clearance_cap_;
  double turn_penalty_;
  std::vector<std::vector<Vec2>> primitives_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Per-step predictor over the observation history (observations 1..t).
using StepPredictor =
    std::function<int(std::span<const std::vector<double>> history)>;

/// Executes up to T primitives, re-observing before each. Predictions are
/// recorded but never change the trajectory. `seed` drives sensor noise.
Rollout nav_rollout(const NavEnvironment& env, const NavConfig& cfg, const Policy& policy,
                    const StepPredictor* predictor, int horizon, std::uint64_t seed);

/// Poses visited by the same rollout (start pose plus one per executed step).
std::vector<Pose> nav_trajectory(const NavEnvironment& env, const NavConfig& cfg,
                                 const Policy& policy, int horizon, std::uint64_t seed);

}  // namespace pacguard::nav
