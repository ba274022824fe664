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
#include <vector>

#include "ntwc/codec/container.hpp"
#include "ntwc/coder/quantized_cdf.hpp"
#include "ntwc/dsp/wav.hpp"
#include "ntwc/entropy/cdf_tables.hpp"
#include "ntwc/entropy/rate.hpp"
#include "ntwc/nn/model.hpp"

namespace ntwc {

// Integer latents of a whole signal, frame-major, each frame channel-major.
struct LatentCodes {
  std::vector<std::int32_t> y, z, yr;
  bool operator==(const LatentCodes&) const = default;
};

struct EncodeResult {
  Container container;
  LatentCodes codes;
  RateReport rate;  // coded bits from payload sizes, estimates from the model
};

struct DecodeResult {
  Waveform audio;
  LatentCodes codes;
};

// Encoder and decoder bound to one model. Coding tables are built once:
// one Gaussian table per entry of the shared scale table, and one table per
// channel for each factorized density. Frames are coded independently.
class Codec {
 public:
  explicit Codec(const Model& model, CdfOptions options = {});

  const Model& model() const { return model_; }
  const CdfOptions& options() const { return options_; }

  EncodeResult encode(const Waveform& audio) const;
  // Throws ModelMismatchError when the container was made with another
  // model, FormatError/StreamError for damaged payloads.
  DecodeResult decode(const Container& container) const;

 private:
  const Model& model_;
  CdfOptions options_;
  std::vector<double> scales_;
  std::vector<QuantizedCdf> gaussian_tables_;
  std::vector<QuantizedCdf> z_tables_;
  std::vector<QuantizedCdf> yr_tables_;
};

RateReport encode_file(const std::filesystem::path& wav, const std::filesystem::path& checkpoint,
                       const std::filesystem::path& out);
Waveform decode_file(const std::filesystem::path& container,
                     const std::filesystem::path& checkpoint, const std::filesystem::path& out);

}  // namespace ntwc
