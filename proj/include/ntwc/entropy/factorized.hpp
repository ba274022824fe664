// Copyright 2026 The NTWC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ntwc/nn/params.hpp"
#include "ntwc/nn/tensor.hpp"

namespace ntwc {

// Learned per-channel univariate density, defined through a monotone
// cumulative function c(x) = sigmoid(f(x)). f is a small network whose
// matrices pass through softplus (nonnegative) and whose hidden layers use
// the gated map h + tanh(a) * tanh(h); both keep f strictly increasing.
//
// Parameters (per layer i, stacked over channels):
//   <prefix>.matrix<i>  (C, d_{i+1}, d_i)
//   <prefix>.bias<i>    (C, d_{i+1}, 1)
//   <prefix>.factor<i>  (C, d_{i+1}, 1)   hidden layers only
class FactorizedDensity {
 public:
  FactorizedDensity(std::string prefix, std::size_t channels,
                    std::vector<std::size_t> filters = {3, 3, 3}, double init_scale = 10.0);

  const std::string& prefix() const { return prefix_; }
  std::size_t channels() const { return channels_; }

  // Zero biases and gates give an odd f, so a fresh model is a zero-centred
  // logistic density.
  void initialize(ParameterSet& params) const;

  double logits_cumulative(const ParameterSet& params, std::size_t channel, double x) const;
  double cdf(const ParameterSet& params, std::size_t channel, double x) const;

  // c(v + 1/2) - c(v - 1/2), element-wise; v is (N x C x T).
  Tensor likelihood(const ParameterSet& params, const Tensor& v) const;
  double likelihood(const ParameterSet& params, std::size_t channel, double v) const;

  // Per-item code length sum(-log2 max(p, floor)). When `grad_v` or `grads`
  // is given, the gradient of weight * sum(bits) is accumulated into them.
  // Below the floor the gradient is passed through as if the floor were not
  // there, so badly modelled values still pull the density towards them.
  std::vector<double> bits(const ParameterSet& params, const Tensor& v, double floor,
                           double weight = 1.0, Tensor* grad_v = nullptr,
                           ParameterSet* grads = nullptr) const;

  // Points (lo, hi) with c(lo) = tail_mass / 2 and c(hi) = 1 - tail_mass / 2.
  std::pair<double, double> quantiles(const ParameterSet& params, std::size_t channel,
                                      double tail_mass) const;

 private:
  struct ChannelWeights;
  struct Activations;

  ChannelWeights channel_weights(const ParameterSet& params, std::size_t channel) const;
  double forward(const ChannelWeights& w, double x, Activations* act) const;
  // Returns df/dx; accumulates weight * dlogit * df/dtheta into grads.
  double backward(const ChannelWeights& w, const Activations& act, double dlogit,
                  ParameterSet* grads, std::size_t channel) const;

  std::string name(const char* kind, std::size_t layer) const;

  std::string prefix_;
  std::size_t channels_;
  std::vector<std::size_t> dims_;  // 1, filters..., 1
  double init_scale_;
};

}  // namespace ntwc
