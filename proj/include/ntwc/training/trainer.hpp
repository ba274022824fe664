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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ntwc/nn/checkpoint.hpp"
#include "ntwc/training/corpus.hpp"
#include "ntwc/training/loss.hpp"

namespace ntwc {

inline constexpr std::uint64_t kDefaultTrainSteps = 200000;

struct TrainConfig {
  std::uint64_t steps = kDefaultTrainSteps;
  std::size_t batch_size = 8;
  double learning_rate = 1e-4;
  // Step schedule: lr * decay^(floor(step / decay_every)); off when 0.
  double lr_decay = 1.0;
  std::uint64_t lr_decay_every = 0;
  // Global gradient-norm clip; off when 0.
  double max_grad_norm = 0.0;
  std::uint64_t seed = 1;

  bool residual = false;
  ResidualMerge merge = ResidualMerge::kProxy;
  double lambda_mse = 1.0;
  double lambda_res = 0.0;  // defaults to lambda_mse for residual models
  std::optional<double> lambda_perc;  // defaults to lambda_mse / 10

  // "compact" or "reference".
  std::string model = "reference";
  std::size_t channels = 8;        // compact only
  std::size_t hyper_channels = 8;  // compact only

  std::string dataset = "synthetic:64:7";
  std::filesystem::path checkpoint;  // written periodically and at the end
  std::filesystem::path history;     // loss-history CSV
  std::filesystem::path resume;      // optional checkpoint to continue from
  std::uint64_t checkpoint_every = 1000;

  LossWeights weights() const;
  ModelConfig model_config() const;
  double learning_rate_at(std::uint64_t step) const;
  void validate() const;

  nlohmann::json to_json() const;
};

// "key = value" lines; '#' starts a comment. Unknown keys are errors.
TrainConfig parse_train_config(const std::string& text);
TrainConfig load_train_config(const std::filesystem::path& path);

struct HistoryRow {
  std::uint64_t step = 0;
  LossBreakdown loss;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<HistoryRow> history;  // this run only
};

using ProgressFn = std::function<void(const HistoryRow&)>;

// Runs Adam on the RD objective. Everything random (batch positions, noise
// offsets) comes from one generator whose state is checkpointed, so resuming
// continues the original trajectory exactly. A non-finite loss or gradient
// aborts with NumericError after saving the last good weights.
TrainResult train(const TrainConfig& config, const std::vector<Utterance>& corpus,
                  const ProgressFn& progress = {});
TrainResult train(const TrainConfig& config, const ProgressFn& progress = {});

// Mean of the first and last `fraction` of the totals in `history`.
std::pair<double, double> smoothed_endpoints(const std::vector<HistoryRow>& history,
                                             double fraction = 0.1);

void write_history_header(std::ostream& out);
void write_history_row(std::ostream& out, const HistoryRow& row);

}  // namespace ntwc
