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
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ntwc/entropy/factorized.hpp"
#include "ntwc/nn/layers.hpp"
#include "ntwc/nn/params.hpp"
#include "ntwc/nn/rng.hpp"
#include "ntwc/nn/tensor.hpp"

namespace ntwc {

// One resolution of an analysis transform: `blocks` dilated blocks, each a
// chain of convolutions at the listed dilations.
struct StageConfig {
  std::size_t kernel = 9;
  std::size_t blocks = 4;
  std::vector<std::size_t> dilations{1, 2, 4, 8};
};

// input conv -> stage 1 -> stride-2 conv -> stage 2 -> stride-2 conv to
// `out_channels`. The matching synthesis transform mirrors it with
// transposed convolutions.
struct TransformConfig {
  std::size_t channels = 64;
  std::size_t input_kernel = 9;
  StageConfig stage1;
  std::size_t down1_kernel = 9;
  StageConfig stage2;
  std::size_t down2_kernel = 5;
  std::size_t out_channels = 4;
};

struct ModelConfig {
  std::size_t frame_length = 512;
  std::size_t overlap = 32;

  TransformConfig waveform{64, 9, {9, 4, {1, 2, 4, 8}}, 9, {5, 4, {1, 2, 4, 8}}, 5, 4};
  TransformConfig hyper{32, 9, {9, 3, {1, 2, 4}}, 9, {5, 2, {1, 2}}, 5, 2};

  bool residual = false;
  std::size_t residual_hidden = 32;
  std::size_t residual_code = 2;
  std::size_t residual_kernel = 5;

  std::vector<std::size_t> density_filters{3, 3, 3};
  double density_init_scale = 10.0;
  double sigma_min = 1e-6;

  std::size_t latent_channels() const { return waveform.out_channels; }
  std::size_t latent_length() const { return frame_length / 4; }
  std::size_t hyper_length() const { return frame_length / 16; }

  void validate() const;
  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);

  // Full-width layout from the reference architecture table.
  static ModelConfig reference(bool residual = false);
  // Narrow variant with the same topology, for desk-scale training and tests.
  static ModelConfig compact(std::size_t channels = 8, std::size_t hyper_channels = 8,
                             bool residual = false);
};

// Immutable network topology built from a ModelConfig. Shared between Model
// copies; all weights live in the Model's ParameterSet.
struct Architecture {
  explicit Architecture(const ModelConfig& cfg);

  ModelConfig config;
  Sequential analysis;
  Sequential synthesis;
  Sequential hyper_analysis;
  Sequential hyper_synthesis;
  Sequential residual_analysis;   // empty unless config.residual
  Sequential residual_synthesis;
  FactorizedDensity hyper_prior;
  FactorizedDensity residual_prior;
};

// Parameter name prefixes; parameter_count(prefix) groups by these.
inline constexpr const char* kAnalysisPrefix = "analysis.";
inline constexpr const char* kSynthesisPrefix = "synthesis.";
inline constexpr const char* kHyperAnalysisPrefix = "hyper_analysis.";
inline constexpr const char* kHyperSynthesisPrefix = "hyper_synthesis.";
inline constexpr const char* kResidualAnalysisPrefix = "residual_analysis.";
inline constexpr const char* kResidualSynthesisPrefix = "residual_synthesis.";
inline constexpr const char* kHyperPriorPrefix = "entropy_z";
inline constexpr const char* kResidualPriorPrefix = "entropy_yr";

class Model {
 public:
  // Random variance-scaled weights, zero biases.
  explicit Model(const ModelConfig& cfg, std::uint64_t seed = 0);
  Model(const ModelConfig& cfg, ParameterSet params);

  const ModelConfig& config() const { return arch_->config; }
  const Architecture& arch() const { return *arch_; }
  const ParameterSet& params() const { return params_; }
  ParameterSet& params() { return params_; }
  bool has_residual() const { return config().residual; }

  // x: (N x 1 x L) -> y: (N x 4 x L/4)
  Tensor analyze(const Tensor& x) const;
  // y (+ optional residual estimate, added before synthesis) -> (N x 1 x L)
  Tensor synthesize(const Tensor& y, const Tensor* residual = nullptr) const;
  // y -> z: (N x 2 x L/16)
  Tensor hyper_analyze(const Tensor& y) const;
  // z -> sigma, same shape as y, every entry >= sigma_min
  Tensor hyper_synthesize(const Tensor& z) const;
  // r (shaped like y) -> y_r (N x 2 x L/4)
  Tensor residual_analyze(const Tensor& r) const;
  // y_r -> r_hat with |r_hat| < 1/2
  Tensor residual_synthesize(const Tensor& yr) const;

  std::size_t parameter_count() const { return params_.scalar_count(); }
  std::size_t parameter_count(std::string_view prefix) const {
    return params_.scalar_count(prefix);
  }
  // Parameters outside the residual branch.
  std::size_t backbone_parameter_count() const;
  std::size_t residual_parameter_count() const;

  // 64-bit content hash over the architecture and every weight bit.
  std::uint64_t content_hash() const;

 private:
  void check_latent(const Tensor& y, const char* who) const;

  std::shared_ptr<const Architecture> arch_;
  ParameterSet params_;
};

}  // namespace ntwc
