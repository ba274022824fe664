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
#include <vector>

#include "ntwc/dsp/mel.hpp"
#include "ntwc/nn/model.hpp"
#include "ntwc/nn/params.hpp"
#include "ntwc/nn/rng.hpp"
#include "ntwc/nn/tensor.hpp"

namespace ntwc {

struct LossWeights {
  double mse = 1.0;
  double res = 0.0;
  double perc = 0.1;

  // Full training invariant: every weight finite and >= 0, mse or perc
  // positive, and res > 0 exactly when the model has a residual branch.
  void validate(bool residual) const;
};

// Frame-averaged objective terms. Rates are in bits per frame; mse, res_mse
// and perc are per-frame sums of squares.
struct LossBreakdown {
  double rate_bits_y = 0.0;
  double rate_bits_z = 0.0;
  double rate_bits_yr = 0.0;
  double mse = 0.0;
  double res_mse = 0.0;
  double perc = 0.0;
  double total = 0.0;

  double rate_bits() const { return rate_bits_y + rate_bits_z + rate_bits_yr; }
};

// What the synthesis transform receives in training when the residual
// branch is present: the noisy proxy y~ + r^, or the rounded latent
// (straight-through) plus r^.
enum class ResidualMerge { kProxy, kHard };

struct LossOptions {
  ResidualMerge merge = ResidualMerge::kProxy;
  double likelihood_floor = 1.0 / 32768.0;
};

// One set of uniform offsets for y, z and y_r. Drawing them up front makes
// the objective a deterministic function of the weights.
struct NoiseDraw {
  Tensor y, z, yr;

  static NoiseDraw sample(const ModelConfig& cfg, std::size_t frames, Rng& rng);
  NoiseDraw slice(std::size_t first, std::size_t count) const;
};

struct Distortion {
  double mse = 0.0;   // mean over frames of sum (x - x^)^2
  double perc = 0.0;  // mean over frames of sum_k |m_k(x) - m_k(x^)|^2
};

class RdObjective {
 public:
  explicit RdObjective(MelCepstrumConfig mel = {}, LossOptions options = {});

  const LossOptions& options() const { return options_; }
  const MelAnalyzer& mel() const { return mel_; }

  // Forward pass with noise proxies; when `grads` is non-null the gradient
  // of `total` is added into it (it must have the model's parameter layout).
  LossBreakdown evaluate(const Model& model, const Tensor& x, const LossWeights& weights,
                         const NoiseDraw& noise, ParameterSet* grads = nullptr) const;
  LossBreakdown evaluate(const Model& model, const Tensor& x, const LossWeights& weights,
                         Rng& rng, ParameterSet* grads = nullptr) const;

  // Time-domain and cepstral distortion terms. With non-null `grad_xhat`
  // the gradient of (w_mse * mse + w_perc * perc) is added into it.
  Distortion distortion(const Tensor& x, const Tensor& xhat, double w_mse = 0.0,
                        double w_perc = 0.0, Tensor* grad_xhat = nullptr) const;

 private:
  MelAnalyzer mel_;
  LossOptions options_;
};

// Convenience wrapper around a default-configured RdObjective.
LossBreakdown rd_loss(const Tensor& x, const Model& model, const LossWeights& weights, Rng& rng,
                      ParameterSet* grads = nullptr);

}  // namespace ntwc
