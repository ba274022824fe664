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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ntwc/codec/container.hpp"
#include "ntwc/dsp/mel.hpp"
#include "ntwc/dsp/wav.hpp"

namespace ntwc {

// Reported in place of +inf when the test signal matches the reference.
inline constexpr double kSnrCapDb = 120.0;

// 10 log10(sum ref^2 / sum (ref - test)^2), capped at kSnrCapDb.
double snr_db(const Waveform& reference, const Waveform& test);

// RMS of cepstral differences per analysis window, averaged over windows
// and then over the mel scales.
double mel_cepstral_distortion(const Waveform& reference, const Waveform& test,
                               const MelAnalyzer& analyzer);
double mel_cepstral_distortion(const Waveform& reference, const Waveform& test);

struct RateShares {
  double y = 0.0, z = 0.0, yr = 0.0;
};

// Fractions of the coded payload bits spent on each stream.
RateShares rate_allocation(const Container& container);

struct EvalResult {
  double kbps = 0.0;
  double snr_db = 0.0;
  double mel_cepstral_distortion = 0.0;
  RateShares shares;
  std::optional<double> external_score;

  nlohmann::json to_json() const;
};

// Runs a user scoring command. "{ref}" and "{test}" in the template are
// replaced by the quoted paths; the command's stdout must be one number.
double run_external_scorer(const std::string& command_template,
                           const std::filesystem::path& reference,
                           const std::filesystem::path& test);

}  // namespace ntwc
