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

#include "ntwc/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "ntwc/errors.hpp"

namespace ntwc {
namespace {

using Index = std::ptrdiff_t;

// Range of output positions t with 0 <= stride * t + offset < in_len.
struct ValidRange {
  std::size_t lo, hi;
};

ValidRange valid_range(Index offset, Index stride, Index in_len, Index out_len) {
  Index lo = offset < 0 ? (-offset + stride - 1) / stride : 0;
  Index last = in_len - 1 - offset;
  Index hi = last < 0 ? 0 : last / stride + 1;
  hi = std::min(hi, out_len);
  lo = std::min(lo, hi);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

void check_input(const Tensor& x, std::size_t channels, const std::string& who) {
  if (x.c != channels) {
    throw ConfigError(who + ": expected " + std::to_string(channels) +
                      " input channels, got tensor " + x.shape_string());
  }
}

void init_normal(Tensor& w, double stddev, Rng& rng) {
  for (auto& v : w.data) v = stddev * rng.normal();
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv1d

Conv1d::Conv1d(std::string name, std::size_t in, std::size_t out, std::size_t kernel,
               std::size_t dilation, std::size_t stride)
    : name_(std::move(name)), in_(in), out_(out), kernel_(kernel), dilation_(dilation),
      stride_(stride) {
  if (kernel_ % 2 == 0) throw ConfigError(name_ + ": kernel size must be odd");
  if (stride_ != 1 && stride_ != 2) throw ConfigError(name_ + ": stride must be 1 or 2");
  if (dilation_ == 0) throw ConfigError(name_ + ": dilation must be positive");
}

std::size_t Conv1d::out_length(std::size_t length) const {
  if (length % stride_ != 0) {
    throw ConfigError(name_ + ": time length " + std::to_string(length) +
                      " not divisible by stride");
  }
  return length / stride_;
}

void Conv1d::initialize(ParameterSet& params, Rng& rng) const {
  Tensor w(out_, in_, kernel_);
  init_normal(w, 1.0 / std::sqrt(static_cast<double>(in_ * kernel_)), rng);
  params.add(name_ + ".weight", std::move(w));
  params.add(name_ + ".bias", Tensor(1, 1, out_));
}

Tensor Conv1d::forward(const ParameterSet& params, const Tensor& x, Trace* trace) const {
  check_input(x, in_, name_);
  const Tensor& w = params.at(name_ + ".weight");
  const Tensor& b = params.at(name_ + ".bias");
  const std::size_t t_out = out_length(x.t);
  const Index pad = static_cast<Index>(dilation_ * (kernel_ - 1) / 2);
  Tensor y(x.n, out_, t_out);
  for (std::size_t n = 0; n < x.n; ++n) {
    for (std::size_t o = 0; o < out_; ++o) {
      auto yr = y.row(n, o);
      std::fill(yr.begin(), yr.end(), b.data[o]);
      double* yp = yr.data();
      for (std::size_t i = 0; i < in_; ++i) {
        const double* xp = x.row(n, i).data();
        for (std::size_t j = 0; j < kernel_; ++j) {
          const double wv = w(o, i, j);
          const Index off = static_cast<Index>(j * dilation_) - pad;
          const auto r = valid_range(off, static_cast<Index>(stride_), static_cast<Index>(x.t),
                                     static_cast<Index>(t_out));
          if (stride_ == 1) {
            for (std::size_t t = r.lo; t < r.hi; ++t) {
              yp[t] += wv * xp[static_cast<Index>(t) + off];
            }
          } else {
            for (std::size_t t = r.lo; t < r.hi; ++t) yp[t] += wv * xp[2 * t + off];
          }
        }
      }
    }
  }
  if (trace) trace->saved = {x};
  return y;
}

Tensor Conv1d::backward(const ParameterSet& params, const Trace& trace, const Tensor& g,
                        ParameterSet* grads) const {
  const Tensor& x = trace.saved.at(0);
  const Tensor& w = params.at(name_ + ".weight");
  Tensor* gw = grads ? &grads->at(name_ + ".weight") : nullptr;
  Tensor* gb = grads ? &grads->at(name_ + ".bias") : nullptr;
  const Index pad = static_cast<Index>(dilation_ * (kernel_ - 1) / 2);
  Tensor gx = Tensor::zeros_like(x);
  for (std::size_t n = 0; n < x.n; ++n) {
    for (std::size_t o = 0; o < out_; ++o) {
      const double* gp = g.row(n, o).data();
      if (gb) {
        double s = 0.0;
        for (std::size_t t = 0; t < g.t; ++t) s += gp[t];
        gb->data[o] += s;
      }
      for (std::size_t i = 0; i < in_; ++i) {
        const double* xp = x.row(n, i).data();
        double* gxp = gx.row(n, i).data();
        for (std::size_t j = 0; j < kernel_; ++j) {
          const double wv = w(o, i, j);
          const Index off = static_cast<Index>(j * dilation_) - pad;
          const auto r = valid_range(off, static_cast<Index>(stride_), static_cast<Index>(x.t),
                                     static_cast<Index>(g.t));
          double acc = 0.0;
          if (stride_ == 1) {
            for (std::size_t t = r.lo; t < r.hi; ++t) {
              const Index s = static_cast<Index>(t) + off;
              gxp[s] += wv * gp[t];
              acc += gp[t] * xp[s];
            }
          } else {
            for (std::size_t t = r.lo; t < r.hi; ++t) {
              gxp[2 * t + off] += wv * gp[t];
              acc += gp[t] * xp[2 * t + off];
            }
          }
          if (gw) (*gw)(o, i, j) += acc;
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// ConvTranspose1d

ConvTranspose1d::ConvTranspose1d(std::string name, std::size_t in, std::size_t out,
                                 std::size_t kernel)
    : name_(std::move(name)), in_(in), out_(out), kernel_(kernel) {
  if (kernel_ % 2 == 0) throw ConfigError(name_ + ": kernel size must be odd");
}

void ConvTranspose1d::initialize(ParameterSet& params, Rng& rng) const {
  Tensor w(in_, out_, kernel_);
  // Each output sample sees about half of the taps of every input channel.
  init_normal(w, 1.0 / std::sqrt(static_cast<double>(in_ * kernel_) / 2.0), rng);
  params.add(name_ + ".weight", std::move(w));
  params.add(name_ + ".bias", Tensor(1, 1, out_));
}

Tensor ConvTranspose1d::forward(const ParameterSet& params, const Tensor& x,
                                Trace* trace) const {
  check_input(x, in_, name_);
  const Tensor& w = params.at(name_ + ".weight");
  const Tensor& b = params.at(name_ + ".bias");
  const std::size_t t_out = 2 * x.t;
  const Index pad = static_cast<Index>((kernel_ - 1) / 2);
  Tensor y(x.n, out_, t_out);
  for (std::size_t n = 0; n < x.n; ++n) {
    for (std::size_t o = 0; o < out_; ++o) {
      auto yr = y.row(n, o);
      std::fill(yr.begin(), yr.end(), b.data[o]);
    }
    for (std::size_t i = 0; i < in_; ++i) {
      const double* xp = x.row(n, i).data();
      for (std::size_t o = 0; o < out_; ++o) {
        double* yp = y.row(n, o).data();
        for (std::size_t j = 0; j < kernel_; ++j) {
          const double wv = w(i, o, j);
          const Index off = static_cast<Index>(j) - pad;
          const auto r = valid_range(off, 2, static_cast<Index>(t_out), static_cast<Index>(x.t));
          for (std::size_t t = r.lo; t < r.hi; ++t) yp[2 * t + off] += wv * xp[t];
        }
      }
    }
  }
  if (trace) trace->saved = {x};
  return y;
}

Tensor ConvTranspose1d::backward(const ParameterSet& params, const Trace& trace,
                                 const Tensor& g, ParameterSet* grads) const {
  const Tensor& x = trace.saved.at(0);
  const Tensor& w = params.at(name_ + ".weight");
  Tensor* gw = grads ? &grads->at(name_ + ".weight") : nullptr;
  Tensor* gb = grads ? &grads->at(name_ + ".bias") : nullptr;
  const Index pad = static_cast<Index>((kernel_ - 1) / 2);
  Tensor gx = Tensor::zeros_like(x);
  for (std::size_t n = 0; n < x.n; ++n) {
    if (gb) {
      for (std::size_t o = 0; o < out_; ++o) {
        double s = 0.0;
        for (double v : g.row(n, o)) s += v;
        gb->data[o] += s;
      }
    }
    for (std::size_t i = 0; i < in_; ++i) {
      const double* xp = x.row(n, i).data();
      double* gxp = gx.row(n, i).data();
      for (std::size_t o = 0; o < out_; ++o) {
        const double* gp = g.row(n, o).data();
        for (std::size_t j = 0; j < kernel_; ++j) {
          const double wv = w(i, o, j);
          const Index off = static_cast<Index>(j) - pad;
          const auto r = valid_range(off, 2, static_cast<Index>(g.t), static_cast<Index>(x.t));
          double acc = 0.0;
          for (std::size_t t = r.lo; t < r.hi; ++t) {
            gxp[t] += wv * gp[2 * t + off];
            acc += xp[t] * gp[2 * t + off];
          }
          if (gw) (*gw)(i, o, j) += acc;
        }
      }
    }
  }
  return gx;
}

// ---------------------------------------------------------------------------
// Pointwise activations

Tensor LeakyRelu::forward(const ParameterSet&, const Tensor& x, Trace* trace) const {
  Tensor y = x;
  for (auto& v : y.data) v = v > 0.0 ? v : slope_ * v;
  if (trace) trace->saved = {x};
  return y;
}

Tensor LeakyRelu::backward(const ParameterSet&, const Trace& trace, const Tensor& g,
                           ParameterSet*) const {
  const Tensor& x = trace.saved.at(0);
  Tensor gx = g;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    if (x.data[i] <= 0.0) gx.data[i] *= slope_;
  }
  return gx;
}

namespace {
double softplus(double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); }
double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }
}  // namespace

Tensor PositiveScale::forward(const ParameterSet&, const Tensor& x, Trace* trace) const {
  Tensor y = x;
  for (auto& v : y.data) v = std::max(softplus(v), min_value_);
  if (trace) trace->saved = {x};
  return y;
}

Tensor PositiveScale::backward(const ParameterSet&, const Trace& trace, const Tensor& g,
                               ParameterSet*) const {
  const Tensor& x = trace.saved.at(0);
  Tensor gx = g;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    const double v = x.data[i];
    gx.data[i] *= softplus(v) > min_value_ ? logistic(v) : 0.0;
  }
  return gx;
}

Tensor BoundedTanh::forward(const ParameterSet&, const Tensor& x, Trace* trace) const {
  Tensor y = x;
  for (auto& v : y.data) v = bound_ * std::tanh(v);
  if (trace) trace->saved = {y};
  return y;
}

Tensor BoundedTanh::backward(const ParameterSet&, const Trace& trace, const Tensor& g,
                             ParameterSet*) const {
  const Tensor& y = trace.saved.at(0);
  Tensor gx = g;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    const double u = y.data[i] / bound_;
    gx.data[i] *= bound_ * (1.0 - u * u);
  }
  return gx;
}

// ---------------------------------------------------------------------------
// Sequential

Sequential::Sequential(std::vector<LayerPtr> layers) {
  for (auto& l : layers) push(std::move(l));
}

void Sequential::push(LayerPtr layer) {
  if (!layers_.empty() && layers_.back()->out_channels() != layer->in_channels()) {
    throw ConfigError("sequential: channel mismatch (" +
                      std::to_string(layers_.back()->out_channels()) + " -> " +
                      std::to_string(layer->in_channels()) + ")");
  }
  layers_.push_back(std::move(layer));
}

Tensor Sequential::forward(const ParameterSet& params, const Tensor& x, Trace* trace) const {
  if (trace) trace->children.assign(layers_.size(), Trace{});
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i]->forward(params, h, trace ? &trace->children[i] : nullptr);
  }
  return h;
}

Tensor Sequential::backward(const ParameterSet& params, const Trace& trace,
                            const Tensor& grad_out, ParameterSet* grads) const {
  Tensor g = grad_out;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = layers_[i]->backward(params, trace.children.at(i), g, grads);
  }
  return g;
}

void Sequential::initialize(ParameterSet& params, Rng& rng) const {
  for (const auto& l : layers_) l->initialize(params, rng);
}

std::size_t Sequential::in_channels() const {
  return layers_.empty() ? 0 : layers_.front()->in_channels();
}

std::size_t Sequential::out_channels() const {
  return layers_.empty() ? 0 : layers_.back()->out_channels();
}

std::size_t Sequential::out_length(std::size_t length) const {
  for (const auto& l : layers_) length = l->out_length(length);
  return length;
}

// ---------------------------------------------------------------------------
// DilatedBlock

DilatedBlock::DilatedBlock(const std::string& name, std::size_t channels, std::size_t kernel,
                           const std::vector<std::size_t>& dilations)
    : channels_(channels) {
  if (dilations.empty()) throw ConfigError(name + ": dilated block needs at least one layer");
  for (std::size_t i = 0; i < dilations.size(); ++i) {
    body_.push(std::make_unique<Conv1d>(name + ".conv" + std::to_string(i), channels, channels,
                                        kernel, dilations[i], 1));
    body_.push(std::make_unique<LeakyRelu>(channels));
  }
}

Tensor DilatedBlock::forward(const ParameterSet& params, const Tensor& x, Trace* trace) const {
  if (trace) trace->children.assign(1, Trace{});
  Tensor y = body_.forward(params, x, trace ? &trace->children[0] : nullptr);
  add_inplace(y, x);
  return y;
}

Tensor DilatedBlock::backward(const ParameterSet& params, const Trace& trace,
                              const Tensor& grad_out, ParameterSet* grads) const {
  Tensor gx = body_.backward(params, trace.children.at(0), grad_out, grads);
  add_inplace(gx, grad_out);
  return gx;
}

}  // namespace ntwc
