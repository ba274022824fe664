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
#include <span>
#include <vector>

namespace ntwc {

inline constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;  // normalized to [-1, 1)
  int sample_rate = kSampleRate;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// int16 <-> [-1, 1) with a 1/32768 scale. denormalize rounds to nearest and
// saturates, so denormalize(normalize(v)) == v for every int16.
double normalize_sample(std::int16_t v);
std::int16_t denormalize_sample(double s);

// Parses a RIFF/WAVE image holding 16-bit PCM. Only mono audio at
// `expected_rate` is accepted.
Waveform parse_wav(std::span<const std::uint8_t> bytes,
                   int expected_rate = kSampleRate);
std::vector<std::uint8_t> serialize_wav(const Waveform& w);

Waveform load_pcm(const std::filesystem::path& path,
                  int expected_rate = kSampleRate);
void save_pcm(const std::filesystem::path& path, const Waveform& w);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

}  // namespace ntwc
