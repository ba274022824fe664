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
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "ntwc/eval/metrics.hpp"
#include "ntwc/nn/checkpoint.hpp"
#include "ntwc/training/corpus.hpp"

namespace ntwc {

// One model evaluated over a corpus by a real encode/decode round trip.
struct RdPoint {
  std::string model;
  double lambda_mse = 0.0;  // from checkpoint metadata, 0 when absent
  bool residual = false;
  double kbps = 0.0;            // total payload bits / total hop-based duration
  double estimated_kbps = 0.0;  // model likelihoods of the quantized latents
  double snr_db = 0.0;          // pooled over the corpus
  double mcd = 0.0;             // mean over utterances
  double mse = 0.0;             // per sample
  RateShares shares;
  std::size_t frames = 0;
  double seconds = 0.0;
};

// Utterances are processed by up to `threads` workers; results are combined
// in corpus order, so the output does not depend on the thread count.
RdPoint evaluate_model(const Checkpoint& checkpoint, const std::string& name,
                       const std::vector<Utterance>& corpus, std::size_t threads = 1);

// *.ntwm files in `dir`, in name order.
std::vector<std::filesystem::path> list_checkpoints(const std::filesystem::path& dir);

// Evaluates every checkpoint; rows are sorted by kbps.
std::vector<RdPoint> rd_curve(const std::vector<std::filesystem::path>& checkpoints,
                              const std::vector<Utterance>& corpus, std::size_t threads = 1);

// Columns: model,lambda_mse,residual,kbps,estimated_kbps,snr_db,mcd,mse,
//          share_y,share_z,share_yr,frames,seconds
void write_rd_csv(std::ostream& out, const std::vector<RdPoint>& points);

}  // namespace ntwc
