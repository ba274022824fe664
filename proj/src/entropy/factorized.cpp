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

#include "ntwc/entropy/factorized.hpp"

#include <cmath>
#include <numbers>

#include "ntwc/errors.hpp"

namespace ntwc {
namespace {

double softplus(double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); }
double logistic(double v) {
  return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}
// Derivative of the logistic function; even in v.
double logistic_slope(double v) {
  const double e = std::exp(-std::fabs(v));
  return e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

struct FactorizedDensity::ChannelWeights {
  struct LayerWeights {
    std::size_t in = 0, out = 0;
    std::vector<double> matrix;      // softplus(raw), out x in
    std::vector<double> matrix_d;    // sigmoid(raw)
    std::vector<double> bias;
    std::vector<double> gate;        // tanh(raw factor); empty for the last layer
  };
  std::vector<LayerWeights> layers;
};

struct FactorizedDensity::Activations {
  std::vector<std::vector<double>> inputs;  // per layer input
  std::vector<std::vector<double>> pre;     // per layer pre-activation
};

FactorizedDensity::FactorizedDensity(std::string prefix, std::size_t channels,
                                     std::vector<std::size_t> filters, double init_scale)
    : prefix_(std::move(prefix)), channels_(channels), init_scale_(init_scale) {
  if (channels_ == 0) throw ConfigError(prefix_ + ": density needs at least one channel");
  dims_.push_back(1);
  for (auto f : filters) {
    if (f == 0) throw ConfigError(prefix_ + ": zero-width density layer");
    dims_.push_back(f);
  }
  dims_.push_back(1);
}

std::string FactorizedDensity::name(const char* kind, std::size_t layer) const {
  return prefix_ + "." + kind + std::to_string(layer);
}

void FactorizedDensity::initialize(ParameterSet& params) const {
  const std::size_t layers = dims_.size() - 1;
  const double scale = std::pow(init_scale_, 1.0 / static_cast<double>(layers));
  for (std::size_t i = 0; i < layers; ++i) {
    const std::size_t in = dims_[i], out = dims_[i + 1];
    // softplus(init) == 1 / (scale * out): the composed slope is 1 / init_scale.
    const double init = std::log(std::expm1(1.0 / scale / static_cast<double>(out)));
    params.add(name("matrix", i), Tensor(channels_, out, in, init));
    params.add(name("bias", i), Tensor(channels_, out, 1));
    if (i + 1 < layers) params.add(name("factor", i), Tensor(channels_, out, 1));
  }
}

FactorizedDensity::ChannelWeights FactorizedDensity::channel_weights(const ParameterSet& params,
                                                                     std::size_t ch) const {
  if (ch >= channels_) throw ConfigError(prefix_ + ": channel index out of range");
  ChannelWeights w;
  const std::size_t layers = dims_.size() - 1;
  w.layers.resize(layers);
  for (std::size_t i = 0; i < layers; ++i) {
    auto& lw = w.layers[i];
    lw.in = dims_[i];
    lw.out = dims_[i + 1];
    const Tensor& m = params.at(name("matrix", i));
    const Tensor& b = params.at(name("bias", i));
    lw.matrix.resize(lw.out * lw.in);
    lw.matrix_d.resize(lw.out * lw.in);
    for (std::size_t r = 0; r < lw.out; ++r) {
      for (std::size_t c = 0; c < lw.in; ++c) {
        const double raw = m(ch, r, c);
        lw.matrix[r * lw.in + c] = softplus(raw);
        lw.matrix_d[r * lw.in + c] = logistic(raw);
      }
    }
    lw.bias.resize(lw.out);
    for (std::size_t r = 0; r < lw.out; ++r) lw.bias[r] = b(ch, r, 0);
    if (i + 1 < layers) {
      const Tensor& f = params.at(name("factor", i));
      lw.gate.resize(lw.out);
      for (std::size_t r = 0; r < lw.out; ++r) lw.gate[r] = std::tanh(f(ch, r, 0));
    }
  }
  return w;
}

double FactorizedDensity::forward(const ChannelWeights& w, double x, Activations* act) const {
  std::vector<double> h{x};
  if (act) {
    act->inputs.clear();
    act->pre.clear();
  }
  for (const auto& lw : w.layers) {
    std::vector<double> pre(lw.out);
    for (std::size_t r = 0; r < lw.out; ++r) {
      double acc = lw.bias[r];
      for (std::size_t c = 0; c < lw.in; ++c) acc += lw.matrix[r * lw.in + c] * h[c];
      pre[r] = acc;
    }
    if (act) {
      act->inputs.push_back(h);
      act->pre.push_back(pre);
    }
    h = pre;
    if (!lw.gate.empty()) {
      for (std::size_t r = 0; r < lw.out; ++r) h[r] += lw.gate[r] * std::tanh(pre[r]);
    }
  }
  return h[0];
}

double FactorizedDensity::backward(const ChannelWeights& w, const Activations& act,
                                   double dlogit, ParameterSet* grads, std::size_t ch) const {
  std::vector<double> g{dlogit};
  for (std::size_t i = w.layers.size(); i-- > 0;) {
    const auto& lw = w.layers[i];
    const auto& pre = act.pre[i];
    const auto& in = act.inputs[i];
    std::vector<double> g_pre(lw.out);
    for (std::size_t r = 0; r < lw.out; ++r) {
      if (lw.gate.empty()) {
        g_pre[r] = g[r];
      } else {
        const double th = std::tanh(pre[r]);
        g_pre[r] = g[r] * (1.0 + lw.gate[r] * (1.0 - th * th));
        if (grads) {
          grads->at(name("factor", i))(ch, r, 0) += g[r] * th * (1.0 - lw.gate[r] * lw.gate[r]);
        }
      }
    }
    std::vector<double> g_in(lw.in, 0.0);
    for (std::size_t r = 0; r < lw.out; ++r) {
      if (grads) grads->at(name("bias", i))(ch, r, 0) += g_pre[r];
      for (std::size_t c = 0; c < lw.in; ++c) {
        g_in[c] += lw.matrix[r * lw.in + c] * g_pre[r];
        if (grads) {
          grads->at(name("matrix", i))(ch, r, c) += g_pre[r] * in[c] * lw.matrix_d[r * lw.in + c];
        }
      }
    }
    g = std::move(g_in);
  }
  return g[0];
}

double FactorizedDensity::logits_cumulative(const ParameterSet& params, std::size_t channel,
                                            double x) const {
  return forward(channel_weights(params, channel), x, nullptr);
}

double FactorizedDensity::cdf(const ParameterSet& params, std::size_t channel, double x) const {
  return logistic(logits_cumulative(params, channel, x));
}

namespace {

// |c(upper) - c(lower)| evaluated on the side of the sigmoid where both
// values are small, avoiding cancellation near 1.
double interval_mass(double lower, double upper) {
  const double s = (lower + upper) > 0.0 ? -1.0 : 1.0;
  return std::fabs(logistic(s * upper) - logistic(s * lower));
}

}  // namespace

double FactorizedDensity::likelihood(const ParameterSet& params, std::size_t channel,
                                     double v) const {
  const auto w = channel_weights(params, channel);
  return interval_mass(forward(w, v - 0.5, nullptr), forward(w, v + 0.5, nullptr));
}

Tensor FactorizedDensity::likelihood(const ParameterSet& params, const Tensor& v) const {
  if (v.c != channels_) {
    throw ConfigError(prefix_ + ": expected " + std::to_string(channels_) +
                      " channels, got tensor " + v.shape_string());
  }
  Tensor out = Tensor::zeros_like(v);
  for (std::size_t ch = 0; ch < channels_; ++ch) {
    const auto w = channel_weights(params, ch);
    for (std::size_t n = 0; n < v.n; ++n) {
      for (std::size_t t = 0; t < v.t; ++t) {
        const double x = v(n, ch, t);
        out(n, ch, t) = interval_mass(forward(w, x - 0.5, nullptr), forward(w, x + 0.5, nullptr));
      }
    }
  }
  return out;
}

std::vector<double> FactorizedDensity::bits(const ParameterSet& params, const Tensor& v,
                                            double floor, double weight, Tensor* grad_v,
                                            ParameterSet* grads) const {
  if (v.c != channels_) {
    throw ConfigError(prefix_ + ": expected " + std::to_string(channels_) +
                      " channels, got tensor " + v.shape_string());
  }
  if (grad_v && !grad_v->same_shape(v)) throw ConfigError(prefix_ + ": gradient shape mismatch");
  const bool need_grad = grad_v || grads;
  std::vector<double> out(v.n, 0.0);
  Activations lo_act, hi_act;
  for (std::size_t ch = 0; ch < channels_; ++ch) {
    const auto w = channel_weights(params, ch);
    for (std::size_t n = 0; n < v.n; ++n) {
      for (std::size_t t = 0; t < v.t; ++t) {
        const double x = v(n, ch, t);
        const double lower = forward(w, x - 0.5, need_grad ? &lo_act : nullptr);
        const double upper = forward(w, x + 0.5, need_grad ? &hi_act : nullptr);
        const double p = interval_mass(lower, upper);
        const double bounded = std::max(p, floor);
        out[n] += -std::log2(bounded);
        if (!need_grad) continue;
        const double d_p = -weight / (bounded * std::numbers::ln2);
        // The mass is sigmoid(upper) - sigmoid(lower) up to the reflection
        // in interval_mass, which leaves these slopes unchanged.
        const double d_upper = d_p * logistic_slope(upper);
        const double d_lower = -d_p * logistic_slope(lower);
        const double dx = backward(w, hi_act, d_upper, grads, ch) +
                          backward(w, lo_act, d_lower, grads, ch);
        if (grad_v) (*grad_v)(n, ch, t) += dx;
      }
    }
  }
  return out;
}

std::pair<double, double> FactorizedDensity::quantiles(const ParameterSet& params,
                                                       std::size_t channel,
                                                       double tail_mass) const {
  if (!(tail_mass > 0.0 && tail_mass < 1.0)) {
    throw ArgumentError("quantiles: tail mass must be in (0, 1)");
  }
  const auto w = channel_weights(params, channel);
  auto solve = [&](double target_prob) {
    const double target = std::log(target_prob / (1.0 - target_prob));
    double lo = -1.0, hi = 1.0;
    while (forward(w, lo, nullptr) > target) {
      lo *= 2.0;
      if (lo < -1e9) throw NumericError(prefix_ + ": density quantile diverged");
    }
    while (forward(w, hi, nullptr) < target) {
      hi *= 2.0;
      if (hi > 1e9) throw NumericError(prefix_ + ": density quantile diverged");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
      const double mid = 0.5 * (lo + hi);
      (forward(w, mid, nullptr) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return {solve(tail_mass / 2.0), solve(1.0 - tail_mass / 2.0)};
}

}  // namespace ntwc
