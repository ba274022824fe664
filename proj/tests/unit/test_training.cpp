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
#include <fstream>

#include "ntwc/errors.hpp"
#include "ntwc/training/adam.hpp"
#include "ntwc/training/corpus.hpp"
#include "ntwc/training/loss.hpp"
#include "ntwc/training/sweep.hpp"
#include "ntwc/training/trainer.hpp"
#include "test_util.hpp"

namespace ntwc {
namespace {

ModelConfig small_config(bool residual) {
  auto cfg = ModelConfig::compact(6, 5, residual);
  cfg.frame_length = 64;
  cfg.residual_hidden = 5;
  return cfg;
}

Tensor speechy_frames(std::size_t n, std::size_t length, std::uint64_t seed) {
  const auto corpus = synthetic_corpus({4, seed, 0.2});
  Rng rng(seed);
  return FrameSampler(corpus, length).sample(n, rng);
}

// Loss without the likelihood floor, so the objective is smooth everywhere.
RdObjective exact_objective(ResidualMerge merge = ResidualMerge::kProxy) {
  LossOptions opts;
  opts.merge = merge;
  opts.likelihood_floor = 1e-300;
  return RdObjective({}, opts);
}

// With a residual branch the loss also sees y through the detached residual
// target (and, in hard mode, through round(y)), which finite differences
// follow but the gradient deliberately does not. Analysis parameters are
// therefore only checked on models without the branch.
void check_loss_gradient(const RdObjective& obj, Model& m, const Tensor& x, const LossWeights& w,
                         const NoiseDraw& noise, double tolerance, std::size_t per_tensor,
                         std::uint64_t seed) {
  const bool skip_analysis = m.has_residual();
  ParameterSet grads = m.params().zeros_like();
  obj.evaluate(m, x, w, noise, &grads);
  auto total = [&] { return obj.evaluate(m, x, w, noise).total; };
  Rng rng(seed);
  std::size_t checked = 0;
  for (const auto& [name, i] : test::sample_entries(m.params(), per_tensor, rng)) {
    if (skip_analysis && name.starts_with(kAnalysisPrefix)) continue;
    double& p = m.params().at(name).data[i];
    const double num = test::central_difference(total, p, 1e-6 * std::max(1.0, std::abs(p)));
    // 1e-8 absolute covers the rounding noise of the difference quotient.
    const double a = grads.at(name).data[i];
    EXPECT_NEAR(a, num, tolerance * std::max(std::abs(a), std::abs(num)) + 1e-8)
        << name << "[" << i << "]";
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}

TEST(Loss, ZeroWeightsLeaveOnlyTheRate) {
  const Model m(ModelConfig::compact(8, 8, false), 1);
  Rng rng(2);
  const auto l = rd_loss(speechy_frames(3, 512, 3), m, {0.0, 0.0, 0.0}, rng);
  EXPECT_DOUBLE_EQ(l.total, l.rate_bits());
  EXPECT_GT(l.mse, 0.0);
  EXPECT_EQ(l.rate_bits_yr, 0.0);
}

TEST(Loss, IdenticalReconstructionHasNoDistortion) {
  const RdObjective obj;
  const Tensor x = speechy_frames(3, 512, 4);
  const auto d = obj.distortion(x, x);
  EXPECT_EQ(d.mse, 0.0);
  EXPECT_EQ(d.perc, 0.0);
  Tensor g = Tensor::zeros_like(x);
  obj.distortion(x, x, 1.0, 1.0, &g);
  for (double v : g.data) EXPECT_EQ(v, 0.0);
}

TEST(Loss, TotalIsTheWeightedSum) {
  const Model m(ModelConfig::compact(8, 8, true), 5);
  Rng rng(6);
  const LossWeights w{3.0, 2.0, 0.5};
  const auto l = rd_loss(speechy_frames(2, 512, 7), m, w, rng);
  EXPECT_NEAR(l.total, l.rate_bits() + 3.0 * l.mse + 2.0 * l.res_mse + 0.5 * l.perc, 1e-9 * l.total);
  for (double v : {l.rate_bits_y, l.rate_bits_z, l.rate_bits_yr, l.mse, l.res_mse, l.perc}) {
    EXPECT_GE(v, 0.0);
    EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Loss, BatchLossIsMeanOfFrameLosses) {
  const Model m(ModelConfig::compact(8, 8, true), 8);
  const RdObjective obj;
  Rng rng(9);
  const Tensor x = speechy_frames(4, 512, 10);
  const NoiseDraw noise = NoiseDraw::sample(m.config(), 4, rng);
  const LossWeights w{2.0, 1.0, 0.2};
  const auto all = obj.evaluate(m, x, w, noise);
  double total = 0.0, mse = 0.0, bits = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto one = obj.evaluate(m, slice_batch(x, i, 1), w, noise.slice(i, 1));
    total += one.total / 4;
    mse += one.mse / 4;
    bits += one.rate_bits() / 4;
  }
  EXPECT_NEAR(all.total, total, 1e-9 * all.total);
  EXPECT_NEAR(all.mse, mse, 1e-9 * all.mse);
  EXPECT_NEAR(all.rate_bits(), bits, 1e-9 * bits);
}

TEST(Loss, ResidualTermNeverReachesTheAnalysisTransform) {
  const Model m(ModelConfig::compact(8, 8, true), 11);
  const RdObjective obj;
  Rng rng(12);
  const Tensor x = speechy_frames(2, 512, 13);
  const NoiseDraw noise = NoiseDraw::sample(m.config(), 2, rng);
  ParameterSet with = m.params().zeros_like(), without = m.params().zeros_like();
  obj.evaluate(m, x, {1.0, 5.0, 0.1}, noise, &with);
  obj.evaluate(m, x, {1.0, 0.0, 0.1}, noise, &without);
  bool residual_changed = false;
  for (const auto& [name, g] : with) {
    if (name.starts_with(kAnalysisPrefix) || name.starts_with(kHyperAnalysisPrefix) ||
        name.starts_with(kSynthesisPrefix) || name.starts_with(kHyperSynthesisPrefix)) {
      EXPECT_EQ(g.data, without.at(name).data) << name;
    }
    if (name.starts_with(kResidualSynthesisPrefix) && g.data != without.at(name).data) residual_changed = true;
  }
  EXPECT_TRUE(residual_changed);
}

TEST(Loss, NonFiniteComponentIsNamed) {
  Model m(ModelConfig::compact(8, 8, false), 14);
  m.params().at("synthesis.output.bias").data[0] = std::nan("");
  Rng rng(15);
  try {
    rd_loss(speechy_frames(1, 512, 16), m, {1.0, 0.0, 0.1}, rng);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("mse"), std::string::npos) << e.what();
  }
}

TEST(Loss, WeightValidation) {
  EXPECT_THROW((LossWeights{-1.0, 0.0, 0.1}.validate(false)), ConfigError);
  EXPECT_THROW((LossWeights{0.0, 0.0, 0.0}.validate(false)), ConfigError);
  EXPECT_THROW((LossWeights{1.0, 0.0, 0.1}.validate(true)), ConfigError);
  EXPECT_THROW((LossWeights{1.0, 1.0, 0.1}.validate(false)), ConfigError);
  EXPECT_NO_THROW((LossWeights{1.0, 1.0, 0.1}.validate(true)));
  const Model m(ModelConfig::compact(8, 8, false), 1);
  Rng rng(1);
  EXPECT_THROW(rd_loss(Tensor(1, 1, 512), m, {1.0, 1.0, 0.0}, rng), ConfigError);
  EXPECT_THROW(rd_loss(Tensor(1, 1, 256), m, {1.0, 0.0, 0.0}, rng), ConfigError);
}

TEST(LossGradient, RateTerm) {
  for (bool residual : {false, true}) {
    Model m(small_config(residual), 20);
    Rng rng(21);
    const Tensor x = speechy_frames(2, 64, 22);
    check_loss_gradient(exact_objective(), m, x, {0.0, 0.0, 0.0},
                        NoiseDraw::sample(m.config(), 2, rng), 1e-4, 2, 23);
  }
}

TEST(LossGradient, MseTerm) {
  const RdObjective obj = exact_objective();
  Rng rng(24);
  const Tensor x = speechy_frames(2, 64, 25);
  Tensor xhat = x;
  for (auto& v : xhat.data) v += 0.1 * rng.normal();
  Tensor g = Tensor::zeros_like(x);
  obj.distortion(x, xhat, 1.0, 0.0, &g);
  auto f = [&] { return obj.distortion(x, xhat).mse; };
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = rng.below(x.size());
    EXPECT_LT(test::relative_error(g.data[i], test::central_difference(f, xhat.data[i], 1e-6)), 1e-4);
  }
  Model m(small_config(false), 26);
  check_loss_gradient(obj, m, x, {1.0, 0.0, 0.0}, NoiseDraw::sample(m.config(), 2, rng), 1e-4, 2, 27);
}

TEST(LossGradient, PerceptualTerm) {
  const RdObjective obj = exact_objective();
  Rng rng(28);
  const Tensor x = speechy_frames(2, 512, 29);
  Tensor xhat = x;
  for (auto& v : xhat.data) v += 0.05 * rng.normal();
  Tensor g = Tensor::zeros_like(x);
  obj.distortion(x, xhat, 0.0, 1.0, &g);
  auto f = [&] { return obj.distortion(x, xhat).perc; };
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = rng.below(x.size());
    EXPECT_LT(test::relative_error(g.data[i], test::central_difference(f, xhat.data[i], 1e-6)), 1e-4);
  }
  Model m(small_config(false), 30);
  const Tensor xs = speechy_frames(2, 64, 31);
  check_loss_gradient(obj, m, xs, {0.0, 0.0, 1.0}, NoiseDraw::sample(m.config(), 2, rng), 1e-4, 2, 32);
}

TEST(LossGradient, ResidualTerm) {
  Model m(small_config(true), 33);
  Rng rng(34);
  const Tensor x = speechy_frames(2, 64, 35);
  check_loss_gradient(exact_objective(), m, x, {0.0, 1.0, 0.0},
                      NoiseDraw::sample(m.config(), 2, rng), 1e-4, 2, 36);
}

TEST(LossGradient, ComposedObjectiveWithoutResidual) {
  Model m(small_config(false), 41);
  Rng rng(42);
  const Tensor x = speechy_frames(3, 64, 43);
  check_loss_gradient(exact_objective(), m, x, {4.0, 0.0, 0.4},
                      NoiseDraw::sample(m.config(), 3, rng), 1e-3, 3, 44);
}

TEST(LossGradient, ComposedObjectiveBothMergeModes) {
  for (auto merge : {ResidualMerge::kProxy, ResidualMerge::kHard}) {
    Model m(small_config(true), 37);
    Rng rng(38);
    const Tensor x = speechy_frames(3, 64, 39);
    check_loss_gradient(exact_objective(merge), m, x, {4.0, 2.0, 0.4},
                        NoiseDraw::sample(m.config(), 3, rng), 1e-3, 3, 40);
  }
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParameterSet p;
  p.add("w", Tensor(1, 1, 3));
  p.at("w").data = {1.0, -2.0, 0.5};
  ParameterSet g = p.zeros_like();
  g.at("w").data = {0.3, -5.0, 0.0};
  Adam adam(p);
  adam.step(p, g, 0.01);
  EXPECT_NEAR(p.at("w").data[0], 0.99, 1e-9);
  EXPECT_NEAR(p.at("w").data[1], -1.99, 1e-9);
  EXPECT_EQ(p.at("w").data[2], 0.5);
  EXPECT_EQ(adam.steps_taken(), 1u);
}

TEST(Adam, MinimizesAQuadratic) {
  ParameterSet p;
  p.add("w", Tensor(1, 1, 2));
  p.at("w").data = {3.0, -4.0};
  Adam adam(p);
  for (int i = 0; i < 3000; ++i) {
    ParameterSet g = p.zeros_like();
    for (std::size_t k = 0; k < 2; ++k) g.at("w").data[k] = 2.0 * (p.at("w").data[k] - 1.0);
    adam.step(p, g, 0.01);
  }
  EXPECT_NEAR(p.at("w").data[0], 1.0, 1e-3);
  EXPECT_NEAR(p.at("w").data[1], 1.0, 1e-3);
}

TEST(TrainConfig, Defaults) {
  const auto c = parse_train_config("");
  EXPECT_EQ(c.steps, 200000u);
  EXPECT_DOUBLE_EQ(c.learning_rate, 1e-4);
  EXPECT_DOUBLE_EQ(c.weights().perc, c.lambda_mse / 10.0);
  EXPECT_EQ(c.weights().res, 0.0);
}

TEST(TrainConfig, ParsesKeysAndComments) {
  const auto c = parse_train_config(
      "# comment\nsteps = 12\nbatch_size=3\nlearning_rate = 2e-3 # trailing\nresidual = true\n"
      "lambda_mse = 8\nlambda_perc = 0.5\nmodel = compact\nchannels = 6\nmerge = hard\n");
  EXPECT_EQ(c.steps, 12u);
  EXPECT_EQ(c.batch_size, 3u);
  EXPECT_DOUBLE_EQ(c.learning_rate, 2e-3);
  EXPECT_TRUE(c.residual);
  EXPECT_EQ(c.merge, ResidualMerge::kHard);
  EXPECT_DOUBLE_EQ(c.weights().res, 8.0);
  EXPECT_DOUBLE_EQ(c.weights().perc, 0.5);
  EXPECT_EQ(c.model_config().waveform.channels, 6u);
}

TEST(TrainConfig, RejectsBadInput) {
  EXPECT_THROW(parse_train_config("steps = 0\n"), ConfigError);
  EXPECT_THROW(parse_train_config("stepz = 3\n"), ConfigError);
  EXPECT_THROW(parse_train_config("steps = -3\n"), ConfigError);
  EXPECT_THROW(parse_train_config("steps\n"), ConfigError);
  EXPECT_THROW(parse_train_config("lambda_res = 1\n"), ConfigError);
  EXPECT_THROW(parse_train_config("model = huge\n"), ConfigError);
  EXPECT_THROW(parse_train_config("lambda_mse = 0\nlambda_perc = 0\n"), ConfigError);
}

TrainConfig tiny_config(const test::TempDir& dir, std::uint64_t steps) {
  TrainConfig c;
  c.steps = steps;
  c.batch_size = 2;
  c.learning_rate = 1e-3;
  c.model = "compact";
  c.channels = 4;
  c.hyper_channels = 4;
  c.residual = true;
  c.lambda_mse = 50.0;
  c.checkpoint = dir / "m.ntwm";
  c.history = dir / "h.csv";
  c.checkpoint_every = 0;
  return c;
}

TEST(Train, SameSeedSameWeights) {
  test::TempDir dir("train_det");
  const auto corpus = synthetic_corpus({3, 5, 0.3});
  auto c = tiny_config(dir, 3);
  c.checkpoint.clear();
  c.history.clear();
  const auto a = train(c, corpus);
  const auto b = train(c, corpus);
  EXPECT_EQ(a.checkpoint.model.content_hash(), b.checkpoint.model.content_hash());
  c.seed = 2;
  EXPECT_NE(train(c, corpus).checkpoint.model.content_hash(), a.checkpoint.model.content_hash());
}

TEST(Train, ResumeContinuesTheSameTrajectory) {
  test::TempDir dir("train_resume");
  const auto corpus = synthetic_corpus({3, 5, 0.3});
  auto straight = tiny_config(dir, 6);
  straight.checkpoint = dir / "straight.ntwm";
  straight.history = dir / "straight.csv";
  const auto full = train(straight, corpus);

  auto first = tiny_config(dir, 3);
  train(first, corpus);
  auto second = tiny_config(dir, 6);
  second.resume = first.checkpoint;
  const auto resumed = train(second, corpus);

  EXPECT_EQ(resumed.checkpoint.model.content_hash(), full.checkpoint.model.content_hash());
  ASSERT_EQ(resumed.history.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(resumed.history[i].step, full.history[i + 3].step);
    EXPECT_EQ(resumed.history[i].loss.total, full.history[i + 3].loss.total);
  }
  // The history file is continued, not restarted.
  std::ifstream in(second.history);
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "step,rate_bits_y,rate_bits_z,rate_bits_yr,mse,perc,total");
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6u);
  EXPECT_EQ(load_checkpoint(second.checkpoint).training->step, 6u);
}

TEST(Train, DivergenceKeepsLastGoodCheckpoint) {
  test::TempDir dir("train_div");
  std::vector<Utterance> corpus = synthetic_corpus({1, 5, 0.1});
  for (auto& s : corpus[0].audio.samples) s = std::nan("");
  const auto c = tiny_config(dir, 5);
  EXPECT_THROW(train(c, corpus), NumericError);
  const auto ck = load_checkpoint(c.checkpoint);
  ASSERT_TRUE(ck.training);
  EXPECT_EQ(ck.training->step, 0u);
}

TEST(Train, EmptyCorpusIsAnError) {
  test::TempDir dir("train_empty");
  EXPECT_THROW(train(tiny_config(dir, 1), std::vector<Utterance>{}), ArgumentError);
}

TEST(Train, SmoothedEndpoints) {
  std::vector<HistoryRow> h(20);
  for (std::size_t i = 0; i < 20; ++i) h[i].loss.total = 20.0 - i;
  const auto [a, b] = smoothed_endpoints(h, 0.1);
  EXPECT_DOUBLE_EQ(a, 19.5);
  EXPECT_DOUBLE_EQ(b, 1.5);
}

TEST(Sweep, EmptyGridIsAnError) {
  test::TempDir dir("sweep_empty");
  const auto corpus = synthetic_corpus({1, 5, 0.1});
  EXPECT_THROW(sweep_lambdas(tiny_config(dir, 1), {}, corpus, corpus), ArgumentError);
}

TEST(Sweep, SingleLambdaGivesOneRow) {
  test::TempDir dir("sweep_one");
  const auto corpus = synthetic_corpus({2, 5, 0.2});
  const auto rows = sweep_lambdas(tiny_config(dir, 2), {10.0}, corpus, corpus);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].lambda, 10.0);
  EXPECT_GT(rows[0].point.kbps, 0.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "m_lambda0.ntwm"));
  EXPECT_EQ(default_lambda_grid(2.0), (std::vector<double>{0.5, 2.0, 8.0, 32.0}));
}

TEST(Corpus, SyntheticIsSeededAndBounded) {
  const auto a = synthetic_corpus({3, 9, 0.5});
  const auto b = synthetic_corpus({3, 9, 0.5});
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].audio.samples, b[i].audio.samples);
    EXPECT_EQ(a[i].audio.samples.size(), 8000u);
    for (double s : a[i].audio.samples) ASSERT_LT(std::abs(s), 1.0);
  }
  EXPECT_NE(synthetic_corpus({1, 10, 0.5})[0].audio.samples, a[0].audio.samples);
}

TEST(Corpus, SourceStrings) {
  const auto s = parse_synthetic_source("synthetic:5:42:0.25");
  EXPECT_EQ(s.count, 5u);
  EXPECT_EQ(s.seed, 42u);
  EXPECT_DOUBLE_EQ(s.seconds, 0.25);
  EXPECT_THROW(parse_synthetic_source("synthetic:x:1"), ArgumentError);
  EXPECT_THROW(parse_synthetic_source("synthetic:0:1"), ArgumentError);
  EXPECT_THROW(load_corpus("/nonexistent/dir"), IoError);
  test::TempDir dir("corpus");
  for (const auto& u : synthetic_corpus({2, 3, 0.1})) save_pcm(dir / (u.name + ".wav"), u.audio);
  const auto loaded = load_corpus(dir.path().string());
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0].name, "synthetic_0.wav");
}

}  // namespace
}  // namespace ntwc
