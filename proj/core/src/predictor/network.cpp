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

#include "pacguard/predictor/network.hpp"

#include <cmath>
#include <stdexcept>

namespace pacguard {

std::string_view to_string(Activation a) { return a == Activation::kRelu ? "relu" : "tanh"; }

Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + std::string(s) + "'");
}

std::size_t NetArchitecture::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l + 1] * (widths[l] + 1);
  return n;
}

void NetArchitecture::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("architecture needs >= 2 layers");
  for (auto w : widths) {
    if (w == 0) throw std::invalid_argument("layer widths must be positive");
  }
  if (widths.back() != 2) throw std::invalid_argument("final layer width must be 2");
}

NetArchitecture NetArchitecture::toy_default() { return {{1, 16, 16, 2}, Activation::kTanh}; }

NetArchitecture NetArchitecture::nav_default(std::size_t history, std::size_t rays) {
  return {{history * rays, 64, 32, 2}, Activation::kRelu};
}

double failure_probability(double logit_success, double logit_failure) {
  const double d = logit_failure - logit_success;
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

FeedForwardNet::FeedForwardNet(NetArchitecture arch) : arch_(std::move(arch)) {
  arch_.validate();
  param_count_ = arch_.parameter_count();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < arch_.widths.size(); ++l) {
    offsets_.push_back(off);
    off += arch_.widths[l + 1] * (arch_.widths[l] + 1);
  }
}

void FeedForwardNet::check(std::span<const double> w, std::span<const double> input) const {
  if (w.size() != param_count_) {
    throw std::invalid_argument("weight vector has " + std::to_string(w.size()) +
                                " entries, expected " + std::to_string(param_count_));
  }
  if (input.size() != arch_.input_dim()) {
    throw std::invalid_argument("input has " + std::to_string(input.size()) +
                                " entries, expected " + std::to_string(arch_.input_dim()));
  }
}

void FeedForwardNet::forward_logits(std::span<const double> w, std::span<const double> input,
                                    NetWorkspace& ws) const {
  check(w, input);
  const std::size_t layers = arch_.widths.size();
  ws.activations.resize(layers);
  ws.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    const std::size_t in = arch_.widths[l];
    const std::size_t out = arch_.widths[l + 1];
    const double* wl = w.data() + offsets_[l];
    const double* bl = wl + out * in;
    const auto& x = ws.activations[l];
    auto& z = ws.activations[l + 1];
    z.resize(out);
    const bool hidden = l + 2 < layers;
    for (std::size_t j = 0; j < out; ++j) {
      double acc = bl[j];
      const double* row = wl + j * in;
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
      if (hidden) {
        acc = arch_.activation == Activation::kRelu ? (acc > 0.0 ? acc : 0.0) : std::tanh(acc);
      }
      z[j] = acc;
    }
  }
}

std::array<double, 2> FeedForwardNet::softmax(std::span<const double> w,
                                              std::span<const double> input,
                                              NetWorkspace& ws) const {
  forward_logits(w, input, ws);
  const auto& z = ws.activations.back();
  const double p1 = failure_probability(z[0], z[1]);
  return {1.0 - p1, p1};
}

double FeedForwardNet::p_fail(std::span<const double> w, std::span<const double> input,
                              NetWorkspace& ws) const {
  forward_logits(w, input, ws);
  const auto& z = ws.activations.back();
  return failure_probability(z[0], z[1]);
}

double FeedForwardNet::p_fail(std::span<const double> w, std::span<const double> input) const {
  NetWorkspace ws;
  return p_fail(w, input, ws);
}

double FeedForwardNet::backward(std::span<const double> w, std::span<const double> input,
                                double dloss_dp, std::span<double> grad,
                                NetWorkspace& ws) const {
  if (grad.size() != param_count_) throw std::invalid_argument("gradient buffer size mismatch");
  forward_logits(w, input, ws);
  const std::size_t layers = arch_.widths.size();
  const auto& logits = ws.activations.back();
  const double p = failure_probability(logits[0], logits[1]);
  ws.deltas.resize(layers);
  // dp/dz1 = p(1-p), dp/dz0 = -p(1-p).
  const double dz = dloss_dp * p * (1.0 - p);
  ws.deltas[layers - 1] = {-dz, dz};
  for (std::size_t l = layers - 1; l >= 1; --l) {
    const std::size_t in = arch_.widths[l - 1];
    const std::size_t out = arch_.widths[l];
    const double* wl = w.data() + offsets_[l - 1];
    double* gw = grad.data() + offsets_[l - 1];
    double* gb = gw + out * in;
    const auto& x = ws.activations[l - 1];
    const auto& delta = ws.deltas[l];
    for (std::size_t j = 0; j < out; ++j) {
      const double d = delta[j];
      if (d == 0.0) continue;
      double* grow = gw + j * in;
      for (std::size_t i = 0; i < in; ++i) grow[i] += d * x[i];
      gb[j] += d;
    }
    if (l == 1) break;
    auto& prev = ws.deltas[l - 1];
    prev.assign(in, 0.0);
    for (std::size_t j = 0; j < out; ++j) {
      const double d = delta[j];
      if (d == 0.0) continue;
      const double* row = wl + j * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += d * row[i];
    }
    for (std::size_t i = 0; i < in; ++i) {
      const double a = x[i];
      prev[i] *= arch_.activation == Activation::kRelu ? (a > 0.0 ? 1.0 : 0.0) : (1.0 - a * a);
    }
  }
  return p;
}

std::vector<double> FeedForwardNet::initial_weights(Rng& rng) const {
  std::vector<double> w(param_count_, 0.0);
  for (std::size_t l = 0; l + 1 < arch_.widths.size(); ++l) {
    const std::size_t in = arch_.widths[l];
    const std::size_t out = arch_.widths[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = 0; i < out * in; ++i) w[offsets_[l] + i] = u(rng);
  }
  return w;
}

}  // namespace pacguard
