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

#include "ntwc/training/sweep.hpp"

#include "ntwc/errors.hpp"

namespace ntwc {

std::vector<double> default_lambda_grid(double lambda0) {
  return {0.25 * lambda0, lambda0, 4.0 * lambda0, 16.0 * lambda0};
}

std::vector<SweepRow> sweep_lambdas(const TrainConfig& base, const std::vector<double>& grid,
                                    const std::vector<Utterance>& train_corpus,
                                    const std::vector<Utterance>& heldout,
                                    const ProgressFn& progress) {
  if (grid.empty()) throw ArgumentError("sweep_lambdas: lambda grid is empty");
  const LossWeights bw = base.weights();
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lambda = grid[i];
    TrainConfig cfg = base;
    cfg.lambda_mse = lambda;
    cfg.lambda_perc = bw.perc / bw.mse * lambda;
    cfg.lambda_res = base.residual ? bw.res / bw.mse * lambda : 0.0;
    cfg.resume.clear();
    if (!base.checkpoint.empty()) {
      auto p = base.checkpoint;
      p.replace_filename(base.checkpoint.stem().string() + "_lambda" + std::to_string(i) +
                         base.checkpoint.extension().string());
      cfg.checkpoint = p;
    }
    if (!base.history.empty()) {
      auto p = base.history;
      p.replace_filename(base.history.stem().string() + "_lambda" + std::to_string(i) +
                         base.history.extension().string());
      cfg.history = p;
    }
    auto result = train(cfg, train_corpus, progress);
    auto point = evaluate_model(result.checkpoint, "lambda" + std::to_string(i), heldout);
    rows.push_back({lambda, std::move(point), std::move(result.checkpoint)});
  }
  return rows;
}

}  // namespace ntwc
