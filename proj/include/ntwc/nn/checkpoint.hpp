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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ntwc/nn/model.hpp"
#include "ntwc/nn/params.hpp"

namespace ntwc {

// Optimizer state needed to resume training bit-exactly.
struct TrainingState {
  std::uint64_t step = 0;
  std::string rng_state;
  ParameterSet first_moment;
  ParameterSet second_moment;
};

struct Checkpoint {
  Model model;
  nlohmann::json metadata = nlohmann::json::object();  // free-form (lambdas, history path, ...)
  std::optional<TrainingState> training;
};

// Binary layout, little-endian:
//   "NTWM" u32 version | u64 json length | json header | u32 tensor count |
//   per tensor: u16 name length, name, u32 n, u32 c, u32 t, f64 values.
// The JSON header carries the architecture, the model content hash and the
// metadata. Optimizer moments are stored as tensors named "adam.m/<param>"
// and "adam.v/<param>".
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string hash_to_hex(std::uint64_t hash);

}  // namespace ntwc
