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

#include "ntwc/training/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "ntwc/errors.hpp"
#include "ntwc/training/adam.hpp"

namespace ntwc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const auto out = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("train config: " + key + " expects a nonnegative integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("train config: " + key + " expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("train config: " + key + " expects true/false, got '" + v + "'");
}

double global_norm(const ParameterSet& grads) {
  double s = 0.0;
  for (const auto& [name, g] : grads) {
    for (double v : g.data) s += v * v;
  }
  return std::sqrt(s);
}

nlohmann::json loss_json(const LossBreakdown& l) {
  return {{"rate_bits_y", l.rate_bits_y}, {"rate_bits_z", l.rate_bits_z},
          {"rate_bits_yr", l.rate_bits_yr}, {"mse", l.mse},
          {"res_mse", l.res_mse}, {"perc", l.perc}, {"total", l.total}};
}

// Keeps rows up to and including `step` from an existing history file.
std::vector<std::string> history_prefix(const std::filesystem::path& path, std::uint64_t step) {
  std::vector<std::string> kept;
  std::ifstream in(path);
  if (!in) return kept;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      if (std::stoull(line.substr(0, comma)) <= step) kept.push_back(line);
    } catch (const std::exception&) {
    }
  }
  return kept;
}

}  // namespace

LossWeights TrainConfig::weights() const {
  LossWeights w;
  w.mse = lambda_mse;
  w.perc = lambda_perc.value_or(lambda_mse / 10.0);
  w.res = residual ? (lambda_res > 0.0 ? lambda_res : lambda_mse) : 0.0;
  return w;
}

ModelConfig TrainConfig::model_config() const {
  if (model == "reference") return ModelConfig::reference(residual);
  if (model == "compact") return ModelConfig::compact(channels, hyper_channels, residual);
  throw ConfigError("train config: model must be 'compact' or 'reference', got '" + model + "'");
}

double TrainConfig::learning_rate_at(std::uint64_t step) const {
  if (lr_decay_every == 0) return learning_rate;
  return learning_rate * std::pow(lr_decay, static_cast<double>(step / lr_decay_every));
}

void TrainConfig::validate() const {
  if (steps < 1) throw ConfigError("train config: steps must be >= 1");
  if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train config: learning_rate must be positive");
  }
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) {
    throw ConfigError("train config: lr_decay must be in (0, 1]");
  }
  if (!(max_grad_norm >= 0.0)) throw ConfigError("train config: max_grad_norm must be >= 0");
  if (!residual && lambda_res != 0.0) {
    throw ConfigError("train config: lambda_res set without the residual branch");
  }
  model_config().validate();
  weights().validate(residual);
}

nlohmann::json TrainConfig::to_json() const {
  const auto w = weights();
  return {{"steps", steps},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"lr_decay", lr_decay},
          {"lr_decay_every", lr_decay_every},
          {"max_grad_norm", max_grad_norm},
          {"seed", seed},
          {"residual", residual},
          {"merge", merge == ResidualMerge::kProxy ? "proxy" : "hard"},
          {"lambda_mse", w.mse},
          {"lambda_res", w.res},
          {"lambda_perc", w.perc},
          {"model", model},
          {"channels", channels},
          {"hyper_channels", hyper_channels},
          {"dataset", dataset}};
}

TrainConfig parse_train_config(const std::string& text) {
  TrainConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("train config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key == "steps") c.steps = to_u64(key, v);
    else if (key == "batch_size") c.batch_size = to_u64(key, v);
    else if (key == "learning_rate") c.learning_rate = to_double(key, v);
    else if (key == "lr_decay") c.lr_decay = to_double(key, v);
    else if (key == "lr_decay_every") c.lr_decay_every = to_u64(key, v);
    else if (key == "max_grad_norm") c.max_grad_norm = to_double(key, v);
    else if (key == "seed") c.seed = to_u64(key, v);
    else if (key == "residual") c.residual = to_bool(key, v);
    else if (key == "merge") {
      if (v == "proxy") c.merge = ResidualMerge::kProxy;
      else if (v == "hard") c.merge = ResidualMerge::kHard;
      else throw ConfigError("train config: merge must be 'proxy' or 'hard'");
    }
    else if (key == "lambda_mse") c.lambda_mse = to_double(key, v);
    else if (key == "lambda_res") c.lambda_res = to_double(key, v);
    else if (key == "lambda_perc") c.lambda_perc = to_double(key, v);
    else if (key == "model") c.model = v;
    else if (key == "channels") c.channels = to_u64(key, v);
    else if (key == "hyper_channels") c.hyper_channels = to_u64(key, v);
    else if (key == "dataset") c.dataset = v;
    else if (key == "checkpoint") c.checkpoint = v;
    else if (key == "history") c.history = v;
    else if (key == "resume") c.resume = v;
    else if (key == "checkpoint_every") c.checkpoint_every = to_u64(key, v);
    else throw ConfigError("train config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open train config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto c = parse_train_config(ss.str());
  // Relative output paths are taken relative to the config file.
  const auto base = path.parent_path();
  for (auto* p : {&c.checkpoint, &c.history, &c.resume}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  if (!is_synthetic_source(c.dataset) && std::filesystem::path(c.dataset).is_relative()) {
    c.dataset = (base / c.dataset).string();
  }
  return c;
}

void write_history_header(std::ostream& out) {
  out << "step,rate_bits_y,rate_bits_z,rate_bits_yr,mse,perc,total\n";
}

void write_history_row(std::ostream& out, const HistoryRow& row) {
  const auto& l = row.loss;
  out << row.step << ',' << std::setprecision(10) << l.rate_bits_y << ',' << l.rate_bits_z << ','
      << l.rate_bits_yr << ',' << l.mse << ',' << l.perc << ',' << l.total << '\n';
}

std::pair<double, double> smoothed_endpoints(const std::vector<HistoryRow>& history,
                                             double fraction) {
  if (history.empty()) throw ArgumentError("smoothed_endpoints: empty history");
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(history.size() * fraction));
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    head += history[i].loss.total;
    tail += history[history.size() - 1 - i].loss.total;
  }
  return {head / k, tail / k};
}

TrainResult train(const TrainConfig& config, const ProgressFn& progress) {
  return train(config, load_corpus(config.dataset), progress);
}

TrainResult train(const TrainConfig& config, const std::vector<Utterance>& corpus,
                  const ProgressFn& progress) {
  config.validate();
  const ModelConfig mcfg = config.model_config();
  const LossWeights weights = config.weights();
  const FrameSampler sampler(corpus, mcfg.frame_length);
  LossOptions opts;
  opts.merge = config.merge;
  const RdObjective objective({}, opts);

  Rng rng(config.seed);
  std::uint64_t start = 0;
  std::optional<Model> model;
  std::optional<Adam> adam;
  if (!config.resume.empty()) {
    Checkpoint prev = load_checkpoint(config.resume);
    if (!prev.training) throw ConfigError("resume checkpoint has no optimizer state");
    if (prev.model.config().to_json() != mcfg.to_json()) {
      throw ConfigError("resume checkpoint architecture differs from the train config");
    }
    start = prev.training->step;
    rng.deserialize(prev.training->rng_state);
    adam.emplace(std::move(prev.training->first_moment), std::move(prev.training->second_moment),
                 start);
    model.emplace(std::move(prev.model));
  } else {
    model.emplace(mcfg, rng.next_u64());
    adam.emplace(model->params());
  }

  std::ofstream history_out;
  if (!config.history.empty()) {
    const auto kept = start > 0 ? history_prefix(config.history, start)
                                : std::vector<std::string>{};
    history_out.open(config.history, std::ios::trunc);
    if (!history_out) throw IoError("cannot write loss history " + config.history.string());
    write_history_header(history_out);
    for (const auto& line : kept) history_out << line << '\n';
  }

  const nlohmann::json cfg_json = config.to_json();
  auto snapshot = [&](std::uint64_t step, const Model& m, const Adam& a, const Rng& r,
                      const std::optional<LossBreakdown>& last) {
    Checkpoint ck{m, {}, TrainingState{step, r.serialize(), a.first_moment(), a.second_moment()}};
    ck.metadata["train_config"] = cfg_json;
    ck.metadata["lambda_mse"] = weights.mse;
    ck.metadata["lambda_res"] = weights.res;
    ck.metadata["lambda_perc"] = weights.perc;
    if (last) ck.metadata["last_loss"] = loss_json(*last);
    return ck;
  };

  TrainResult result{snapshot(start, *model, *adam, rng, std::nullopt), {}};
  ParameterSet grads = model->params().zeros_like();
  std::optional<LossBreakdown> last;
  for (std::uint64_t step = start; step < config.steps; ++step) {
    // Saved before any draw for this step so a diverged run can be resumed
    // from the last good state.
    const std::string rng_before = rng.serialize();
    auto fail = [&](const std::string& what) {
      Rng r0;
      r0.deserialize(rng_before);
      if (!config.checkpoint.empty()) {
        save_checkpoint(config.checkpoint, snapshot(step, *model, *adam, r0, last));
      }
      throw NumericError("training diverged at step " + std::to_string(step + 1) + ": " + what);
    };
    const Tensor batch = sampler.sample(config.batch_size, rng);
    grads.fill(0.0);
    LossBreakdown loss;
    try {
      loss = objective.evaluate(*model, batch, weights, rng, &grads);
    } catch (const NumericError& e) {
      fail(e.what());
    }
    const double norm = global_norm(grads);
    if (!std::isfinite(norm)) fail("non-finite gradient");
    if (config.max_grad_norm > 0.0 && norm > config.max_grad_norm) {
      for (auto& [name, g] : grads) scale_inplace(g, config.max_grad_norm / norm);
    }
    adam->step(model->params(), grads, config.learning_rate_at(step));
    last = loss;
    const HistoryRow row{step + 1, loss};
    result.history.push_back(row);
    if (history_out.is_open()) write_history_row(history_out, row);
    if (progress) progress(row);
    const bool final_step = step + 1 == config.steps;
    if (!config.checkpoint.empty() &&
        (final_step || (config.checkpoint_every > 0 && (step + 1) % config.checkpoint_every == 0))) {
      if (history_out.is_open()) history_out.flush();
      save_checkpoint(config.checkpoint, snapshot(step + 1, *model, *adam, rng, last));
    }
  }
  result.checkpoint = snapshot(config.steps > start ? config.steps : start, *model, *adam, rng, last);
  return result;
}

}  // namespace ntwc
