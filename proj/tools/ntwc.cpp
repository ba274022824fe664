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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ntwc/codec/codec.hpp"
#include "ntwc/errors.hpp"
#include "ntwc/eval/metrics.hpp"
#include "ntwc/eval/rd_curve.hpp"
#include "ntwc/nn/checkpoint.hpp"
#include "ntwc/training/corpus.hpp"
#include "ntwc/training/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kModelDirEnv = "NTWC_MODEL_DIR";

std::string model_dir_from_env() {
  const char* v = std::getenv(kModelDirEnv);
  return v ? std::string(v) : std::string();
}

// Bare checkpoint names are looked up in $NTWC_MODEL_DIR.
fs::path resolve_model(const std::string& arg) {
  fs::path p(arg);
  if (fs::exists(p)) return p;
  const auto dir = model_dir_from_env();
  if (!dir.empty() && p.is_relative() && fs::exists(fs::path(dir) / p)) return fs::path(dir) / p;
  return p;
}

json rate_json(const ntwc::RateReport& r) {
  return {{"frames", r.num_frames},
          {"duration_s", r.duration_seconds()},
          {"kbps", r.coded_kbps()},
          {"estimated_kbps", r.estimated_kbps()},
          {"bits_y", r.coded_bits_y},
          {"bits_z", r.coded_bits_z},
          {"bits_yr", r.coded_bits_yr}};
}

json info_json(const ntwc::Container& c) {
  const auto& h = c.header;
  const auto shares = ntwc::rate_allocation(c);
  return {{"version", h.version},
          {"residual", h.residual()},
          {"model_hash", ntwc::hash_to_hex(h.model_hash)},
          {"sample_rate", h.sample_rate},
          {"frame_length", h.frame_length},
          {"overlap", h.overlap},
          {"num_frames", h.num_frames},
          {"original_length", h.original_length},
          {"precision", h.precision},
          {"tail_exponent", h.tail_exponent},
          {"duration_s", h.duration_seconds()},
          {"payload_bits", c.payload_bits()},
          {"bits_y", c.payload_bits_y()},
          {"bits_z", c.payload_bits_z()},
          {"bits_yr", c.payload_bits_yr()},
          {"kbps", c.kbps()},
          {"share_y", shares.y},
          {"share_z", shares.z},
          {"share_yr", shares.yr}};
}

std::vector<ntwc::Utterance> corpus_with_seed(const std::string& source,
                                              const std::optional<std::uint64_t>& seed) {
  if (seed && ntwc::is_synthetic_source(source)) {
    auto spec = ntwc::parse_synthetic_source(source);
    spec.seed = *seed;
    return ntwc::synthetic_corpus(spec);
  }
  return ntwc::load_corpus(source);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural speech waveform codec"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;

  auto* train_cmd = app.add_subcommand("train", "Train a model from a key-value config file");
  std::string train_config;
  std::optional<std::uint64_t> train_steps;
  bool quiet = false;
  train_cmd->add_option("config", train_config, "Training config")->required();
  train_cmd->add_option("--seed", seed, "Override the config seed");
  train_cmd->add_option("--steps", train_steps, "Override the step count");
  train_cmd->add_flag("--quiet", quiet, "No progress output");

  auto* enc_cmd = app.add_subcommand("encode", "Encode a 16 kHz mono WAV");
  std::string enc_wav, enc_model, enc_out;
  enc_cmd->add_option("wav", enc_wav)->required();
  enc_cmd->add_option("model", enc_model)->required();
  enc_cmd->add_option("out", enc_out)->required();

  auto* dec_cmd = app.add_subcommand("decode", "Decode a container to WAV");
  std::string dec_bin, dec_model, dec_out;
  dec_cmd->add_option("bin", dec_bin)->required();
  dec_cmd->add_option("model", dec_model)->required();
  dec_cmd->add_option("out", dec_out)->required();

  auto* eval_cmd = app.add_subcommand("eval", "Compare a decoded WAV with its reference");
  std::string eval_ref, eval_test, eval_container, eval_scorer;
  eval_cmd->add_option("ref", eval_ref)->required();
  eval_cmd->add_option("test", eval_test)->required();
  eval_cmd->add_option("--container", eval_container, "Container for kbps and rate shares");
  eval_cmd->add_option("--scorer", eval_scorer,
                       "External scorer command; {ref} and {test} are replaced by paths");

  auto* rd_cmd = app.add_subcommand("rd-curve", "Evaluate every checkpoint in a directory");
  std::vector<std::string> rd_paths;
  std::string rd_csv;
  std::size_t rd_threads = 1;
  rd_cmd->add_option("paths", rd_paths, "[model-dir] corpus (dir or synthetic:<count>:<seed>)")
      ->expected(1, 2)
      ->required();
  rd_cmd->add_option("--csv", rd_csv, "Output CSV path")->required();
  rd_cmd->add_option("--threads", rd_threads, "Worker threads")->check(CLI::PositiveNumber);
  rd_cmd->add_option("--seed", seed, "Seed for a synthetic corpus");

  auto* info_cmd = app.add_subcommand("info", "Print container header and rate as JSON");
  std::string info_bin;
  info_cmd->add_option("bin", info_bin)->required();

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic WAV corpus");
  std::string synth_dir;
  std::size_t synth_count = 8;
  double synth_seconds = 1.0;
  synth_cmd->add_option("out-dir", synth_dir)->required();
  synth_cmd->add_option("--count", synth_count)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seconds", synth_seconds)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*train_cmd) {
      auto cfg = ntwc::load_train_config(train_config);
      if (seed) cfg.seed = *seed;
      if (train_steps) cfg.steps = *train_steps;
      const auto every = std::max<std::uint64_t>(1, cfg.steps / 100);
      auto result = ntwc::train(cfg, [&](const ntwc::HistoryRow& row) {
        if (quiet || (row.step % every != 0 && row.step != cfg.steps)) return;
        std::cerr << "step " << row.step << " total " << row.loss.total << " bits "
                  << row.loss.rate_bits() << " mse " << row.loss.mse << '\n';
      });
      json out = {{"steps", cfg.steps}, {"checkpoint", cfg.checkpoint.string()}};
      if (!result.history.empty()) {
        const auto [head, tail] = ntwc::smoothed_endpoints(result.history);
        out["smoothed_total_start"] = head;
        out["smoothed_total_end"] = tail;
      }
      std::cout << out.dump() << '\n';
    } else if (*enc_cmd) {
      const auto rate = ntwc::encode_file(enc_wav, resolve_model(enc_model), enc_out);
      std::cout << rate_json(rate).dump() << '\n';
    } else if (*dec_cmd) {
      const auto w = ntwc::decode_file(dec_bin, resolve_model(dec_model), dec_out);
      std::cout << json{{"samples", w.samples.size()}, {"duration_s", w.duration_seconds()}}.dump()
                << '\n';
    } else if (*eval_cmd) {
      const auto ref = ntwc::load_pcm(eval_ref);
      const auto test = ntwc::load_pcm(eval_test);
      ntwc::EvalResult r;
      r.snr_db = ntwc::snr_db(ref, test);
      r.mel_cepstral_distortion = ntwc::mel_cepstral_distortion(ref, test);
      if (!eval_container.empty()) {
        const auto c = ntwc::read_container(eval_container);
        r.kbps = c.kbps();
        r.shares = ntwc::rate_allocation(c);
      }
      if (!eval_scorer.empty()) r.external_score = ntwc::run_external_scorer(eval_scorer, eval_ref, eval_test);
      auto j = r.to_json();
      if (eval_container.empty()) {
        j.erase("kbps");
        j.erase("share_y");
        j.erase("share_z");
        j.erase("share_yr");
      }
      std::cout << j.dump() << '\n';
    } else if (*rd_cmd) {
      std::string model_dir, corpus;
      if (rd_paths.size() == 2) {
        model_dir = rd_paths[0];
        corpus = rd_paths[1];
      } else {
        model_dir = model_dir_from_env();
        corpus = rd_paths[0];
        if (model_dir.empty()) {
          throw ntwc::ArgumentError(std::string("rd-curve: no model directory given and ") +
                                    kModelDirEnv + " is not set");
        }
      }
      const auto points = ntwc::rd_curve(ntwc::list_checkpoints(model_dir),
                                         corpus_with_seed(corpus, seed), rd_threads);
      std::ofstream out(rd_csv);
      if (!out) throw ntwc::IoError("cannot write " + rd_csv);
      ntwc::write_rd_csv(out, points);
      for (const auto& p : points) {
        std::cout << json{{"model", p.model}, {"kbps", p.kbps}, {"snr_db", p.snr_db},
                          {"mcd", p.mcd}, {"share_yr", p.shares.yr}}.dump()
                  << '\n';
      }
    } else if (*info_cmd) {
      std::cout << info_json(ntwc::read_container(info_bin)).dump() << '\n';
    } else if (*synth_cmd) {
      fs::create_directories(synth_dir);
      ntwc::SyntheticSpec spec{synth_count, seed.value_or(1), synth_seconds};
      for (const auto& u : ntwc::synthetic_corpus(spec)) {
        ntwc::save_pcm(fs::path(synth_dir) / (u.name + ".wav"), u.audio);
      }
      std::cout << json{{"count", synth_count}, {"dir", synth_dir}}.dump() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
