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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pacguard/rng.hpp"

namespace pacguard {

enum class Activation { kRelu, kTanh };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

/// Fully connected network: widths[0] inputs, hidden layers, 2 logits.
struct NetArchitecture {
  std::vector<std::size_t> widths;
  Activation activation = Activation::kTanh;

  std::size_t input_dim() const { return widths.front(); }
  std::size_t parameter_count() const;
  /// Throws std::invalid_argument unless >= 2 layers, positive, final width 2.
  void validate() const;

  static NetArchitecture toy_default();
  static NetArchitecture nav_default(std::size_t history, std::size_t rays);

  friend bool operator==(const NetArchitecture&, const NetArchitecture&) = default;
};

/// Clamp applied to probabilities before any logarithm.
inline constexpr double kProbabilityFloor = 1e-7;

/// Scratch buffers for forward/backward passes; reuse across calls.
struct NetWorkspace {
  std::vector<std::vector<double>> activations;  // per layer, post-activation
  std::vector<std::vector<double>> deltas;
};

/// Evaluates and differentiates one architecture. Parameters are flattened
/// layer by layer as row-major weights (out × in) followed by biases.
class FeedForwardNet {
 public:
  explicit FeedForwardNet(NetArchitecture arch);

  const NetArchitecture& architecture() const { return arch_; }
  std::size_t parameter_count() const { return param_count_; }

  /// Two-class softmax probabilities (success, failure).
  std::array<double, 2> softmax(std::span<const double> w, std::span<const double> input,
                                NetWorkspace& ws) const;
  /// Softmax probability of the failure class.
  double p_fail(std::span<const double> w, std::span<const double> input,
                NetWorkspace& ws) const;
  double p_fail(std::span<const double> w, std::span<const double> input) const;

  /// Forward pass followed by backpropagation of dloss/dp_fail into `grad`
  /// (accumulated). Returns p_fail.
  double backward(std::span<const double> w, std::span<const double> input,
                  double dloss_dp, std::span<double> grad, NetWorkspace& ws) const;

  /// Scaled uniform initialization, deterministic for a given engine state.
  std::vector<double> initial_weights(Rng& rng) const;

 private:
  void check(std::span<const double> w, std::span<const double> input) const;
  void forward_logits(std::span<const double> w, std::span<const double> input,
                      NetWorkspace& ws) const;

  NetArchitecture arch_;
  std::size_t param_count_ = 0;
  std::vector<std::size_t> offsets_;  // start of each layer's weights
};

/// Softmax failure probability from the two logits (numerically stable).
double failure_probability(double logit_success, double logit_failure);

}  // namespace pacguard
