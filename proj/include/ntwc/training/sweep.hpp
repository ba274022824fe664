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

#include <vector>

#include "ntwc/eval/rd_curve.hpp"
#include "ntwc/training/trainer.hpp"

namespace ntwc {

// {0.25, 1, 4, 16} * lambda0
std::vector<double> default_lambda_grid(double lambda0);

struct SweepRow {
  double lambda = 0.0;
  RdPoint point;  // kbps, mse, perceptual distance (mcd) on the held-out corpus
  Checkpoint checkpoint;
};

// Trains one model per lambda_mse in `grid` (other weights keep their ratio
// to lambda_mse in `base`) and evaluates each on `heldout`. Rows follow the
// grid order. When base.checkpoint is set, model i is saved next to it with
// the suffix "_lambda<i>".
std::vector<SweepRow> sweep_lambdas(const TrainConfig& base, const std::vector<double>& grid,
                                    const std::vector<Utterance>& train_corpus,
                                    const std::vector<Utterance>& heldout,
                                    const ProgressFn& progress = {});

}  // namespace ntwc
