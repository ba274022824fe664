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
#include <string>
#include <vector>

#include "ntwc/dsp/framing.hpp"
#include "ntwc/dsp/wav.hpp"
#include "ntwc/nn/rng.hpp"
#include "ntwc/nn/tensor.hpp"

namespace ntwc {

struct Utterance {
  std::string name;
  Waveform audio;
};

struct SyntheticSpec {
  std::size_t count = 32;
  std::uint64_t seed = 1;
  double seconds = 1.0;
};

// One speech-like test signal: 2-5 sinusoids, each with its own slow
// amplitude envelope, over a pink-noise floor. Peak level is about 0.5.
Waveform synthetic_utterance(Rng& rng, double seconds = 1.0, int sample_rate = kSampleRate);
std::vector<Utterance> synthetic_corpus(const SyntheticSpec& spec);

// "synthetic:<count>:<seed>[:<seconds>]" builds a synthetic corpus; anything
// else is a directory whose *.wav files are loaded in name order.
std::vector<Utterance> load_corpus(const std::string& source);
bool is_synthetic_source(const std::string& source);
SyntheticSpec parse_synthetic_source(const std::string& source);

// Draws training batches of random L-sample excerpts.
class FrameSampler {
 public:
  FrameSampler(const std::vector<Utterance>& corpus, std::size_t frame_length);

  // (batch x 1 x L); excerpt positions come from `rng`.
  Tensor sample(std::size_t batch, Rng& rng) const;

 private:
  std::vector<const Waveform*> sources_;
  std::size_t frame_length_;
};

// Every frame of every utterance, in corpus order.
Tensor corpus_frames(const std::vector<Utterance>& corpus, FrameGeometry geometry = {});

}  // namespace ntwc
