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
#include <memory>
#include <string>
#include <vector>

#include "ntwc/nn/params.hpp"
#include "ntwc/nn/rng.hpp"
#include "ntwc/nn/tensor.hpp"

namespace ntwc {

// Intermediate values recorded by a forward pass so the matching backward
// pass can run later. Layers own no mutable state; parameters live in a
// ParameterSet and gradients are accumulated into a second one.
struct Trace {
  std::vector<Tensor> saved;
  std::vector<Trace> children;
};

class Layer {
 public:
  virtual ~Layer() = default;

  // `trace` may be null for inference.
  virtual Tensor forward(const ParameterSet& params, const Tensor& x, Trace* trace) const = 0;
  // Returns dL/dx. Parameter gradients are added into `grads` when non-null.
  virtual Tensor backward(const ParameterSet& params, const Trace& trace,
                          const Tensor& grad_out, ParameterSet* grads) const = 0;
  // Registers and initializes this layer's parameters.
  virtual void initialize(ParameterSet& params, Rng& rng) const { (void)params; (void)rng; }

  virtual std::size_t in_channels() const = 0;
  virtual std::size_t out_channels() const = 0;
  // Output time length for an input of `length` samples.
  virtual std::size_t out_length(std::size_t length) const { return length; }
};

using LayerPtr = std::unique_ptr<Layer>;

// 1-D convolution with odd kernel, "same" padding and stride 1 or 2.
// Weight shape (out, in, kernel); bias shape (1, 1, out).
class Conv1d final : public Layer {
 public:
  Conv1d(std::string name, std::size_t in, std::size_t out, std::size_t kernel,
         std::size_t dilation = 1, std::size_t stride = 1);

  Tensor forward(const ParameterSet& params, const Tensor& x, Trace* trace) const override;
  Tensor backward(const ParameterSet& params, const Trace& trace, const Tensor& grad_out,
                  ParameterSet* grads) const override;
  void initialize(ParameterSet& params, Rng& rng) const override;
  std::size_t in_channels() const override { return in_; }
  std::size_t out_channels() const override { return out_; }
  std::size_t out_length(std::size_t length) const override;

 private:
  std::string name_;
  std::size_t in_, out_, kernel_, dilation_, stride_;
};

// Stride-2 transposed convolution that exactly doubles the time axis
// (the adjoint of a stride-2 "same" Conv1d). Weight shape (in, out, kernel).
class ConvTranspose1d final : public Layer {
 public:
  ConvTranspose1d(std::string name, std::size_t in, std::size_t out, std::size_t kernel);

  Tensor forward(const ParameterSet& params, const Tensor& x, Trace* trace) const override;
  Tensor backward(const ParameterSet& params, const Trace& trace, const Tensor& grad_out,
                  ParameterSet* grads) const override;
  void initialize(ParameterSet& params, Rng& rng) const override;
  std::size_t in_channels() const override { return in_; }
  std::size_t out_channels() const override { return out_; }
  std::size_t out_length(std::size_t length) const override { return 2 * length; }

 private:
  std::string name_;
  std::size_t in_, out_, kernel_;
};

class LeakyRelu final : public Layer {
 public:
  explicit LeakyRelu(std::size_t channels, double slope = 0.2)
      : channels_(channels), slope_(slope) {}
  Tensor forward(const ParameterSet& params, const Tensor& x, Trace* trace) const override;
  Tensor backward(const ParameterSet& params, const Trace& trace, const Tensor& grad_out,
                  ParameterSet* grads) const override;
  std::size_t in_channels() const override { return channels_; }
  std::size_t out_channels() const override { return channels_; }

 private:
  std::size_t channels_;
  double slope_;
};

// softplus followed by a floor at `min_value`; yields strictly positive scales.
class PositiveScale final : public Layer {
 public:
  PositiveScale(std::size_t channels, double min_value)
      : channels_(channels), min_value_(min_value) {}
  Tensor forward(const ParameterSet& params, const Tensor& x, Trace* trace) const override;
  Tensor backward(const ParameterSet& params, const Trace& trace, const Tensor& grad_out,
                  ParameterSet* grads) const override;
  std::size_t in_channels() const override { return channels_; }
  std::size_t out_channels() const override { return channels_; }

 private:
  std::size_t channels_;
  double min_value_;
};

// bound * tanh(x): maps onto the open interval (-bound, bound).
class BoundedTanh final : public Layer {
 public:
  BoundedTanh(std::size_t channels, double bound) : channels_(channels), bound_(bound) {}
  Tensor forward(const ParameterSet& params, const Tensor& x, Trace* trace) const override;
  Tensor backward(const ParameterSet& params, const Trace& trace, const Tensor& grad_out,
                  ParameterSet* grads) const override;
  std::size_t in_channels() const override { return channels_; }
  std::size_t out_channels() const override { return channels_; }

 private:
  std::size_t channels_;
  double bound_;
};

class Sequential : public Layer {
 public:
  Sequential() = default;
  explicit Sequential(std::vector<LayerPtr> layers);

  void push(LayerPtr layer);
  std::size_t layer_count() const { return layers_.size(); }

  Tensor forward(const ParameterSet& params, const Tensor& x, Trace* trace) const override;
  Tensor backward(const ParameterSet& params, const Trace& trace, const Tensor& grad_out,
                  ParameterSet* grads) const override;
  void initialize(ParameterSet& params, Rng& rng) const override;
  std::size_t in_channels() const override;
  std::size_t out_channels() const override;
  std::size_t out_length(std::size_t length) const override;

 private:
  std::vector<LayerPtr> layers_;
};

// Stack of stride-1 dilated convolutions, each followed by a leaky rectifier,
// wrapped by an identity shortcut: out = x + body(x).
class DilatedBlock final : public Layer {
 public:
  DilatedBlock(const std::string& name, std::size_t channels, std::size_t kernel,
               const std::vector<std::size_t>& dilations);

  Tensor forward(const ParameterSet& params, const Tensor& x, Trace* trace) const override;
  Tensor backward(const ParameterSet& params, const Trace& trace, const Tensor& grad_out,
                  ParameterSet* grads) const override;
  void initialize(ParameterSet& params, Rng& rng) const override { body_.initialize(params, rng); }
  std::size_t in_channels() const override { return channels_; }
  std::size_t out_channels() const override { return channels_; }

 private:
  std::size_t channels_;
  Sequential body_;
};

}  // namespace ntwc
