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

#include <gtest/gtest.h>

#include <cmath>

#include "ntwc/errors.hpp"
#include "ntwc/nn/checkpoint.hpp"
#include "ntwc/nn/layers.hpp"
#include "ntwc/nn/model.hpp"
#include "test_util.hpp"

namespace ntwc {
namespace {

ModelConfig small_config(bool residual) {
  auto cfg = ModelConfig::compact(6, 5, residual);
  cfg.frame_length = 64;
  cfg.residual_hidden = 5;
  return cfg;
}

// Checks backward() of `net` against central differences on a random
// projection of its output, for sampled parameters and inputs.
void check_gradients(const Sequential& net, ParameterSet& params, Tensor x, Rng& rng,
                     const std::string& what) {
  const Tensor y0 = net.forward(params, x, nullptr);
  const Tensor proj = test::random_tensor(y0.n, y0.c, y0.t, rng);
  Trace trace;
  net.forward(params, x, &trace);
  ParameterSet grads = params.zeros_like();
  const Tensor gx = net.backward(params, trace, proj, &grads);
  auto loss = [&] { return test::dot(proj, net.forward(params, x, nullptr)); };
  std::size_t checked = 0;
  for (const auto& [name, i] : test::sample_entries(params, 3, rng)) {
    if (grads.at(name).data[i] == 0.0 && !name.starts_with(what)) continue;
    const double num = test::central_difference(loss, params.at(name).data[i], 1e-6);
    EXPECT_LT(test::relative_error(grads.at(name).data[i], num), 1e-4) << what << " " << name << "[" << i << "]";
    ++checked;
  }
  for (int k = 0; k < 10; ++k) {
    const std::size_t i = rng.below(x.size());
    const double num = test::central_difference(loss, x.data[i], 1e-6);
    EXPECT_LT(test::relative_error(gx.data[i], num), 1e-4) << what << " input[" << i << "]";
  }
  EXPECT_GT(checked, 0u);
}

TEST(Model, ReferenceShapesForL512) {
  const Model m(ModelConfig::reference(true), 1);
  Rng rng(2);
  const Tensor x = test::random_tensor(2, 1, 512, rng, 0.3);
  const Tensor y = m.analyze(x);
  EXPECT_EQ(y.n, 2u);
  EXPECT_EQ(y.c, 4u);
  EXPECT_EQ(y.t, 128u);
  const Tensor z = m.hyper_analyze(y);
  EXPECT_EQ(z.c, 2u);
  EXPECT_EQ(z.t, 32u);
  const Tensor sigma = m.hyper_synthesize(z);
  EXPECT_TRUE(sigma.same_shape(y));
  const Tensor yr = m.residual_analyze(y);
  EXPECT_EQ(yr.c, 2u);
  EXPECT_EQ(yr.t, 128u);
  const Tensor rhat = m.residual_synthesize(yr);
  EXPECT_TRUE(rhat.same_shape(y));
  const Tensor xhat = m.synthesize(y, &rhat);
  EXPECT_TRUE(xhat.same_shape(x));
}

TEST(Model, ShapeContractForLengthsDivisibleBy16) {
  for (std::size_t L : {16u, 48u, 160u, 256u}) {
    auto cfg = ModelConfig::compact(4, 4);
    cfg.frame_length = L;
    cfg.overlap = 4;
    const Model m(cfg, 3);
    const Tensor y = m.analyze(Tensor(1, 1, L));
    EXPECT_EQ(y.t, L / 4);
    EXPECT_EQ(m.hyper_analyze(y).t, L / 16);
    EXPECT_EQ(m.synthesize(y).t, L);
  }
}

TEST(Model, ZeroInputGivesFiniteOutputs) {
  const Model m(ModelConfig::compact(8, 8, true), 4);
  const Tensor y = m.analyze(Tensor(1, 1, 512));
  EXPECT_TRUE(all_finite(y));
  EXPECT_TRUE(all_finite(m.hyper_analyze(y)));
  EXPECT_TRUE(all_finite(m.residual_synthesize(Tensor(1, 2, 128))));
  Tensor edge(1, 4, 128, 0.5);
  for (std::size_t i = 0; i < edge.size(); i += 2) edge.data[i] = -0.5;
  EXPECT_TRUE(all_finite(m.residual_analyze(edge)));
}

TEST(Model, BatchedCallsEqualPerFrameCalls) {
  const Model m(ModelConfig::compact(8, 8, true), 5);
  Rng rng(6);
  const Tensor x = test::random_tensor(3, 1, 512, rng, 0.3);
  const Tensor y = m.analyze(x);
  const Tensor z = m.hyper_analyze(y);
  const Tensor s = m.hyper_synthesize(z);
  const Tensor yr = m.residual_analyze(y);
  const Tensor rh = m.residual_synthesize(yr);
  const Tensor xh = m.synthesize(y, &rh);
  for (std::size_t i = 0; i < 3; ++i) {
    const Tensor yi = m.analyze(slice_batch(x, i, 1));
    EXPECT_EQ(yi.data, slice_batch(y, i, 1).data);
    EXPECT_EQ(m.hyper_analyze(yi).data, slice_batch(z, i, 1).data);
    EXPECT_EQ(m.hyper_synthesize(slice_batch(z, i, 1)).data, slice_batch(s, i, 1).data);
    EXPECT_EQ(m.residual_analyze(yi).data, slice_batch(yr, i, 1).data);
    const Tensor rhi = m.residual_synthesize(slice_batch(yr, i, 1));
    EXPECT_EQ(rhi.data, slice_batch(rh, i, 1).data);
    EXPECT_EQ(m.synthesize(yi, &rhi).data, slice_batch(xh, i, 1).data);
  }
}

TEST(Model, ZeroResidualMatchesPlainSynthesis) {
  const Model m(ModelConfig::compact(8, 8, true), 7);
  Rng rng(8);
  const Tensor y = test::random_tensor(1, 4, 128, rng);
  const Tensor zero(1, 4, 128);
  EXPECT_EQ(m.synthesize(y, &zero).data, m.synthesize(y).data);
}

TEST(Model, ResidualOnPlainModelIsAConfigError) {
  const Model m(ModelConfig::compact(8, 8, false), 9);
  const Tensor y(1, 4, 128), r(1, 4, 128);
  EXPECT_THROW(m.synthesize(y, &r), ConfigError);
  EXPECT_THROW(m.residual_analyze(r), ConfigError);
}

TEST(Model, ShapeMismatchIsAConfigError) {
  const Model m(ModelConfig::compact(8, 8, true), 9);
  EXPECT_THROW(m.analyze(Tensor(1, 2, 512)), ConfigError);
  EXPECT_THROW(m.analyze(Tensor(1, 1, 514)), ConfigError);
  EXPECT_THROW(m.hyper_analyze(Tensor(1, 3, 128)), ConfigError);
  EXPECT_THROW(m.hyper_synthesize(Tensor(1, 3, 32)), ConfigError);
  EXPECT_THROW(m.residual_synthesize(Tensor(1, 4, 128)), ConfigError);
}

TEST(Model, ScalesStayAboveMinimumForExtremeInputs) {
  Model m(ModelConfig::compact(8, 8), 10);
  Rng rng(11);
  for (double scale : {1.0, 1e3, 1e6}) {
    const Tensor z = test::random_tensor(2, 2, 32, rng, scale);
    for (double s : m.hyper_synthesize(z).data) ASSERT_GE(s, 1e-6);
  }
  // Force hugely negative pre-activations through the last layer's bias.
  for (auto& [name, t] : m.params()) {
    if (name.starts_with(kHyperSynthesisPrefix) && name.ends_with(".bias")) {
      for (auto& v : t.data) v = -1e4;
    }
  }
  for (double s : m.hyper_synthesize(Tensor(1, 2, 32)).data) ASSERT_GE(s, 1e-6);
}

TEST(Model, ResidualEstimateIsBounded) {
  Model m(ModelConfig::compact(8, 8, true), 12);
  Rng rng(13);
  for (double scale : {0.0, 1.0, 1e4}) {
    const Tensor yr = test::random_tensor(2, 2, 128, rng, scale);
    for (double v : m.residual_synthesize(yr).data) ASSERT_LE(std::abs(v), 0.5);
  }
}

TEST(Model, ParameterCounts) {
  const Model base(ModelConfig::reference(false), 0);
  const Model res(ModelConfig::reference(true), 0);
  EXPECT_GE(base.parameter_count(), 1500000u);
  EXPECT_LE(base.parameter_count(), 3500000u);
  EXPECT_EQ(res.backbone_parameter_count(), base.parameter_count());
  EXPECT_EQ(res.parameter_count(), base.parameter_count() + res.residual_parameter_count());
  EXPECT_GT(res.residual_parameter_count(), 0u);
  EXPECT_LT(res.residual_parameter_count(), 500000u);
  EXPECT_EQ(ParameterSet{}.scalar_count(), 0u);
  std::cout << "backbone parameters: " << base.parameter_count()
            << ", residual branch: " << res.residual_parameter_count() << '\n';
}

TEST(Model, SeededInitIsReproducible) {
  const Model a(ModelConfig::compact(), 42), b(ModelConfig::compact(), 42), c(ModelConfig::compact(), 43);
  EXPECT_EQ(a.content_hash(), b.content_hash());
  EXPECT_NE(a.content_hash(), c.content_hash());
}

TEST(Model, ConfigJsonRoundTrip) {
  const auto cfg = ModelConfig::compact(12, 6, true);
  const auto back = ModelConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  EXPECT_THROW(ModelConfig::from_json("{"), std::exception);
}

TEST(Model, ParameterLayoutIsValidated) {
  const Model a(ModelConfig::compact(), 1);
  ParameterSet p = a.params();
  p.at("analysis.input.weight").data.pop_back();
  EXPECT_THROW(Model(ModelConfig::compact(), p), FormatError);
}

TEST(Gradients, AnalysisTransform) {
  Model m(small_config(true), 21);
  Rng rng(22);
  check_gradients(m.arch().analysis, m.params(), test::random_tensor(2, 1, 64, rng, 0.5), rng,
                  kAnalysisPrefix);
}

TEST(Gradients, SynthesisTransform) {
  Model m(small_config(true), 23);
  Rng rng(24);
  check_gradients(m.arch().synthesis, m.params(), test::random_tensor(2, 4, 16, rng), rng,
                  kSynthesisPrefix);
}

TEST(Gradients, HyperAnalysisTransform) {
  Model m(small_config(true), 25);
  Rng rng(26);
  check_gradients(m.arch().hyper_analysis, m.params(), test::random_tensor(2, 4, 16, rng), rng,
                  kHyperAnalysisPrefix);
}

TEST(Gradients, HyperSynthesisTransform) {
  Model m(small_config(true), 27);
  Rng rng(28);
  check_gradients(m.arch().hyper_synthesis, m.params(), test::random_tensor(2, 2, 4, rng), rng,
                  kHyperSynthesisPrefix);
}

TEST(Gradients, ResidualAnalysisTransform) {
  Model m(small_config(true), 29);
  Rng rng(30);
  check_gradients(m.arch().residual_analysis, m.params(), test::random_tensor(2, 4, 16, rng, 0.3),
                  rng, kResidualAnalysisPrefix);
}

TEST(Gradients, ResidualSynthesisTransform) {
  Model m(small_config(true), 31);
  Rng rng(32);
  check_gradients(m.arch().residual_synthesis, m.params(), test::random_tensor(2, 2, 16, rng),
                  rng, kResidualSynthesisPrefix);
}

TEST(Layers, ConvTransposeIsAdjointOfStridedConv) {
  Rng rng(40);
  ParameterSet p;
  const Conv1d down("d", 3, 2, 5, 1, 2);
  const ConvTranspose1d up("u", 2, 3, 5);
  down.initialize(p, rng);
  up.initialize(p, rng);
  // Share weights: transpose weight (in=2, out=3, k) equals conv weight (out=2, in=3, k).
  p.at("u.weight").data = p.at("d.weight").data;
  for (auto& v : p.at("d.bias").data) v = 0.0;
  for (auto& v : p.at("u.bias").data) v = 0.0;
  const Tensor x = test::random_tensor(1, 3, 20, rng);
  const Tensor g = test::random_tensor(1, 2, 10, rng);
  const double lhs = test::dot(down.forward(p, x, nullptr), g);
  const double rhs = test::dot(x, up.forward(p, g, nullptr));
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST(Layers, SequentialRejectsChannelMismatch) {
  Sequential s;
  s.push(std::make_unique<Conv1d>("a", 1, 4, 3));
  EXPECT_THROW(s.push(std::make_unique<Conv1d>("b", 3, 4, 3)), ConfigError);
}

TEST(Layers, DuplicateParameterNamesAreRejected) {
  ParameterSet p;
  p.add("w", Tensor(1, 1, 1));
  EXPECT_THROW(p.add("w", Tensor(1, 1, 1)), ConfigError);
}

TEST(Checkpoint, RoundTripsWeightsStateAndMetadata) {
  Model m(ModelConfig::compact(8, 8, true), 50);
  TrainingState st{17, Rng(3).serialize(), m.params().zeros_like(), m.params().zeros_like()};
  st.first_moment.fill(0.25);
  Checkpoint ck{m, {{"lambda_mse", 4.0}}, st};
  const auto bytes = serialize_checkpoint(ck);
  const auto back = parse_checkpoint(bytes);
  EXPECT_EQ(back.model.content_hash(), m.content_hash());
  EXPECT_EQ(back.metadata["lambda_mse"], 4.0);
  ASSERT_TRUE(back.training);
  EXPECT_EQ(back.training->step, 17u);
  EXPECT_EQ(back.training->rng_state, st.rng_state);
  EXPECT_EQ(back.training->first_moment.at("analysis.input.weight").data[0], 0.25);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
}

TEST(Checkpoint, CorruptionIsDetected) {
  const Model m(ModelConfig::compact(), 51);
  auto bytes = serialize_checkpoint({m, {}, std::nullopt});
  auto flipped = bytes;
  flipped[flipped.size() - 3] ^= 0x10;
  EXPECT_THROW(parse_checkpoint(flipped), FormatError);
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(parse_checkpoint(bytes), FormatError);
  std::vector<std::uint8_t> junk = {'X', 'Y', 'Z', 'W', 0, 0, 0, 0};
  EXPECT_THROW(parse_checkpoint(junk), FormatError);
}

TEST(Checkpoint, FileRoundTrip) {
  test::TempDir dir("ckpt");
  const Model m(ModelConfig::compact(), 52);
  save_checkpoint(dir / "m.ntwm", {m, {}, std::nullopt});
  EXPECT_EQ(load_checkpoint(dir / "m.ntwm").model.content_hash(), m.content_hash());
  EXPECT_THROW(load_checkpoint(dir / "none.ntwm"), IoError);
}

}  // namespace
}  // namespace ntwc
