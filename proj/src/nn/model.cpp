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

#include "ntwc/nn/model.hpp"

#include <bit>
#include <cstring>
#include <json.hpp>

#include "ntwc/errors.hpp"
#include "ntwc/nn/hash.hpp"

namespace ntwc {
namespace {

using nlohmann::json;

json stage_to_json(const StageConfig& s) {
  return {{"kernel", s.kernel}, {"blocks", s.blocks}, {"dilations", s.dilations}};
}

StageConfig stage_from_json(const json& j) {
  StageConfig s;
  s.kernel = j.at("kernel").get<std::size_t>();
  s.blocks = j.at("blocks").get<std::size_t>();
  s.dilations = j.at("dilations").get<std::vector<std::size_t>>();
  return s;
}

json transform_to_json(const TransformConfig& t) {
  return {{"channels", t.channels},         {"input_kernel", t.input_kernel},
          {"stage1", stage_to_json(t.stage1)}, {"down1_kernel", t.down1_kernel},
          {"stage2", stage_to_json(t.stage2)}, {"down2_kernel", t.down2_kernel},
          {"out_channels", t.out_channels}};
}

TransformConfig transform_from_json(const json& j) {
  TransformConfig t;
  t.channels = j.at("channels").get<std::size_t>();
  t.input_kernel = j.at("input_kernel").get<std::size_t>();
  t.stage1 = stage_from_json(j.at("stage1"));
  t.down1_kernel = j.at("down1_kernel").get<std::size_t>();
  t.stage2 = stage_from_json(j.at("stage2"));
  t.down2_kernel = j.at("down2_kernel").get<std::size_t>();
  t.out_channels = j.at("out_channels").get<std::size_t>();
  return t;
}

void add_stage(Sequential& seq, const std::string& name, std::size_t channels,
               const StageConfig& stage, bool reversed) {
  auto dilations = stage.dilations;
  if (reversed) std::reverse(dilations.begin(), dilations.end());
  for (std::size_t b = 0; b < stage.blocks; ++b) {
    seq.push(std::make_unique<DilatedBlock>(name + ".block" + std::to_string(b), channels,
                                            stage.kernel, dilations));
  }
}

Sequential build_analysis(const std::string& p, std::size_t in_channels,
                          const TransformConfig& t) {
  Sequential s;
  s.push(std::make_unique<Conv1d>(p + "input", in_channels, t.channels, t.input_kernel));
  add_stage(s, p + "stage1", t.channels, t.stage1, false);
  s.push(std::make_unique<Conv1d>(p + "down1", t.channels, t.channels, t.down1_kernel, 1, 2));
  add_stage(s, p + "stage2", t.channels, t.stage2, false);
  s.push(std::make_unique<Conv1d>(p + "down2", t.channels, t.out_channels, t.down2_kernel, 1, 2));
  return s;
}

Sequential build_synthesis(const std::string& p, std::size_t out_channels,
                           const TransformConfig& t) {
  Sequential s;
  s.push(std::make_unique<ConvTranspose1d>(p + "up2", t.out_channels, t.channels, t.down2_kernel));
  add_stage(s, p + "stage2", t.channels, t.stage2, true);
  s.push(std::make_unique<ConvTranspose1d>(p + "up1", t.channels, t.channels, t.down1_kernel));
  add_stage(s, p + "stage1", t.channels, t.stage1, true);
  s.push(std::make_unique<Conv1d>(p + "output", t.channels, out_channels, t.input_kernel));
  return s;
}

}  // namespace

void ModelConfig::validate() const {
  if (frame_length <= overlap) throw ConfigError("frame length must exceed overlap");
  if (frame_length % 16 != 0) throw ConfigError("frame length must be divisible by 16");
  for (const auto* t : {&waveform, &hyper}) {
    if (t->channels == 0 || t->out_channels == 0) throw ConfigError("zero-width transform");
    for (const auto* st : {&t->stage1, &t->stage2}) {
      if (st->blocks > 0 && st->dilations.empty()) throw ConfigError("stage without dilations");
      if (st->kernel % 2 == 0) throw ConfigError("stage kernel must be odd");
    }
  }
  if (residual && (residual_hidden == 0 || residual_code == 0)) {
    throw ConfigError("zero-width residual branch");
  }
  if (!(sigma_min > 0.0)) throw ConfigError("sigma_min must be positive");
}

std::string ModelConfig::to_json() const {
  json j = {{"frame_length", frame_length},
            {"overlap", overlap},
            {"waveform", transform_to_json(waveform)},
            {"hyper", transform_to_json(hyper)},
            {"residual", residual},
            {"residual_hidden", residual_hidden},
            {"residual_code", residual_code},
            {"residual_kernel", residual_kernel},
            {"density_filters", density_filters},
            {"density_init_scale", density_init_scale},
            {"sigma_min", sigma_min}};
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ModelConfig c;
    c.frame_length = j.at("frame_length").get<std::size_t>();
    c.overlap = j.at("overlap").get<std::size_t>();
    c.waveform = transform_from_json(j.at("waveform"));
    c.hyper = transform_from_json(j.at("hyper"));
    c.residual = j.at("residual").get<bool>();
    c.residual_hidden = j.at("residual_hidden").get<std::size_t>();
    c.residual_code = j.at("residual_code").get<std::size_t>();
    c.residual_kernel = j.at("residual_kernel").get<std::size_t>();
    c.density_filters = j.at("density_filters").get<std::vector<std::size_t>>();
    c.density_init_scale = j.at("density_init_scale").get<double>();
    c.sigma_min = j.at("sigma_min").get<double>();
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model config: ") + e.what());
  }
}

ModelConfig ModelConfig::reference(bool residual) {
  ModelConfig c;
  c.residual = residual;
  return c;
}

ModelConfig ModelConfig::compact(std::size_t channels, std::size_t hyper_channels,
                                 bool residual) {
  ModelConfig c;
  c.waveform.channels = channels;
  c.waveform.stage1.blocks = 1;
  c.waveform.stage2.blocks = 1;
  c.hyper.channels = hyper_channels;
  c.hyper.stage1.blocks = 1;
  c.hyper.stage2.blocks = 1;
  c.residual = residual;
  c.residual_hidden = 16;
  return c;
}

Architecture::Architecture(const ModelConfig& cfg)
    : config(cfg),
      hyper_prior(kHyperPriorPrefix, cfg.hyper.out_channels, cfg.density_filters,
                  cfg.density_init_scale),
      residual_prior(kResidualPriorPrefix, cfg.residual_code, cfg.density_filters,
                     cfg.density_init_scale) {
  config.validate();
  const std::size_t latent = cfg.latent_channels();
  analysis = build_analysis(kAnalysisPrefix, 1, cfg.waveform);
  synthesis = build_synthesis(kSynthesisPrefix, 1, cfg.waveform);
  hyper_analysis = build_analysis(kHyperAnalysisPrefix, latent, cfg.hyper);
  hyper_synthesis = build_synthesis(kHyperSynthesisPrefix, latent, cfg.hyper);
  hyper_synthesis.push(std::make_unique<PositiveScale>(latent, cfg.sigma_min));
  if (cfg.residual) {
    const std::string ra = kResidualAnalysisPrefix, rs = kResidualSynthesisPrefix;
    const std::size_t k = cfg.residual_kernel;
    residual_analysis.push(std::make_unique<Conv1d>(ra + "conv0", latent, cfg.residual_hidden, k));
    residual_analysis.push(std::make_unique<LeakyRelu>(cfg.residual_hidden));
    residual_analysis.push(
        std::make_unique<Conv1d>(ra + "conv1", cfg.residual_hidden, cfg.residual_code, k));
    residual_synthesis.push(
        std::make_unique<Conv1d>(rs + "conv0", cfg.residual_code, cfg.residual_hidden, k));
    residual_synthesis.push(std::make_unique<LeakyRelu>(cfg.residual_hidden));
    residual_synthesis.push(std::make_unique<Conv1d>(rs + "conv1", cfg.residual_hidden, latent, k));
    residual_synthesis.push(std::make_unique<BoundedTanh>(latent, 0.5));
  }
}

Model::Model(const ModelConfig& cfg, std::uint64_t seed)
    : arch_(std::make_shared<const Architecture>(cfg)) {
  Rng rng(seed);
  const auto& a = *arch_;
  a.analysis.initialize(params_, rng);
  a.synthesis.initialize(params_, rng);
  a.hyper_analysis.initialize(params_, rng);
  a.hyper_synthesis.initialize(params_, rng);
  a.hyper_prior.initialize(params_);
  if (cfg.residual) {
    a.residual_analysis.initialize(params_, rng);
    a.residual_synthesis.initialize(params_, rng);
    a.residual_prior.initialize(params_);
  }
}

Model::Model(const ModelConfig& cfg, ParameterSet params)
    : arch_(std::make_shared<const Architecture>(cfg)), params_(std::move(params)) {
  // Cross-check names and shapes against a freshly initialized layout.
  const Model reference(cfg, 0);
  if (reference.params_.size() != params_.size()) {
    throw FormatError("checkpoint has " + std::to_string(params_.size()) +
                      " tensors, architecture expects " +
                      std::to_string(reference.params_.size()));
  }
  for (const auto& [name, t] : reference.params_) {
    if (!params_.contains(name)) throw FormatError("checkpoint is missing " + name);
    const Tensor& got = params_.at(name);
    if (!got.same_shape(t) || got.data.size() != t.data.size()) {
      throw FormatError("checkpoint shape mismatch for " + name);
    }
  }
}

void Model::check_latent(const Tensor& y, const char* who) const {
  if (y.c != config().latent_channels()) {
    throw ConfigError(std::string(who) + ": expected " +
                      std::to_string(config().latent_channels()) + " latent channels, got " +
                      y.shape_string());
  }
}

Tensor Model::analyze(const Tensor& x) const {
  if (x.c != 1) throw ConfigError("analysis: expected a single-channel frame stack, got " + x.shape_string());
  if (x.t % 4 != 0) throw ConfigError("analysis: frame length must be divisible by 4");
  return arch_->analysis.forward(params_, x, nullptr);
}

Tensor Model::synthesize(const Tensor& y, const Tensor* residual) const {
  check_latent(y, "synthesis");
  if (residual && !has_residual()) {
    throw ConfigError("synthesis: residual supplied to a model without a residual branch");
  }
  if (residual) {
    if (!residual->same_shape(y)) throw ConfigError("synthesis: residual shape mismatch");
    Tensor merged = y;
    add_inplace(merged, *residual);
    return arch_->synthesis.forward(params_, merged, nullptr);
  }
  return arch_->synthesis.forward(params_, y, nullptr);
}

Tensor Model::hyper_analyze(const Tensor& y) const {
  check_latent(y, "hyper analysis");
  if (y.t % 4 != 0) throw ConfigError("hyper analysis: latent length must be divisible by 4");
  return arch_->hyper_analysis.forward(params_, y, nullptr);
}

Tensor Model::hyper_synthesize(const Tensor& z) const {
  if (z.c != config().hyper.out_channels) {
    throw ConfigError("hyper synthesis: unexpected hyperlatent shape " + z.shape_string());
  }
  return arch_->hyper_synthesis.forward(params_, z, nullptr);
}

Tensor Model::residual_analyze(const Tensor& r) const {
  if (!has_residual()) throw ConfigError("model has no residual branch");
  check_latent(r, "residual analysis");
  return arch_->residual_analysis.forward(params_, r, nullptr);
}

Tensor Model::residual_synthesize(const Tensor& yr) const {
  if (!has_residual()) throw ConfigError("model has no residual branch");
  if (yr.c != config().residual_code) {
    throw ConfigError("residual synthesis: unexpected code shape " + yr.shape_string());
  }
  return arch_->residual_synthesis.forward(params_, yr, nullptr);
}

std::size_t Model::residual_parameter_count() const {
  return params_.scalar_count(kResidualAnalysisPrefix) +
         params_.scalar_count(kResidualSynthesisPrefix) +
         params_.scalar_count(kResidualPriorPrefix);
}

std::size_t Model::backbone_parameter_count() const {
  return parameter_count() - residual_parameter_count();
}

std::uint64_t Model::content_hash() const {
  std::uint64_t h = fnv1a64(config().to_json());
  for (const auto& [name, t] : params_) {
    h = fnv1a64(name, h);
    const std::uint64_t dims[3] = {t.n, t.c, t.t};
    for (auto d : dims) {
      std::uint8_t b[8];
      for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(d >> (8 * i));
      h = fnv1a64(b, h);
    }
    for (double v : t.data) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      std::uint8_t b[8];
      for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(bits >> (8 * i));
      h = fnv1a64(b, h);
    }
  }
  return h;
}

}  // namespace ntwc
