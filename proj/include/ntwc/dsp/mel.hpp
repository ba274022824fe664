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
#include <span>
#include <vector>

namespace ntwc {

struct MelScale {
  std::size_t mel_bins = 0;
  std::size_t window = 0;  // analysis window and DFT size, in samples
};

struct MelCepstrumConfig {
  // Four resolutions, coarse to fine.
  std::vector<MelScale> scales{{8, 64}, {32, 128}, {64, 256}, {128, 512}};
  std::size_t num_cepstral_coeffs = 13;
  double log_floor = 1e-5;
  int sample_rate = 16000;

  std::size_t num_scales() const { return scales.size(); }
  // Coefficients produced per window at scale k (bounded by its bin count).
  std::size_t coeffs(std::size_t k) const;
  void validate() const;
};

// Precomputed analysis matrices for every scale of a MelCepstrumConfig.
// Each window goes Hann window -> DFT power -> mel energies -> log(E + floor)
// -> orthonormal DCT-II. Every step is smooth, so the backward pass is exact.
class MelAnalyzer {
 public:
  explicit MelAnalyzer(MelCepstrumConfig cfg = {});

  const MelCepstrumConfig& config() const { return cfg_; }

  // Cepstrum of the first `window` samples of x at scale k.
  std::vector<double> cepstrum(std::span<const double> x, std::size_t k) const;
  std::vector<double> log_mel_energies(std::span<const double> x, std::size_t k) const;
  // Gradient of <grad_coeffs, cepstrum(x, k)> with respect to x[0:window].
  std::vector<double> cepstrum_backward(std::span<const double> x, std::size_t k,
                                        std::span<const double> grad_coeffs) const;

  // Cepstra of all windows (hop = window / 2) that fit inside `signal`,
  // concatenated window by window. Signals shorter than one window are
  // analysed as a single zero-padded window.
  std::vector<double> features(std::span<const double> signal, std::size_t k) const;
  std::vector<double> features_backward(std::span<const double> signal, std::size_t k,
                                        std::span<const double> grad) const;
  std::size_t window_count(std::size_t length, std::size_t k) const;

  // Centre frequency (Hz) of mel bin `bin` at scale k.
  double bin_center_hz(std::size_t k, std::size_t bin) const;

 private:
  struct ScaleTables {
    std::size_t window = 0;
    std::size_t bins = 0;
    std::size_t fft_bins = 0;
    std::size_t coeffs = 0;
    std::vector<double> hann;
    std::vector<double> cos_table;  // fft_bins x window
    std::vector<double> sin_table;
    std::vector<double> mel;        // bins x fft_bins
    std::vector<double> dct;        // coeffs x bins
    std::vector<double> centers_hz;
  };

  struct WindowState {
    std::vector<double> re, im, energy;
  };

  WindowState analyse(std::span<const double> x, const ScaleTables& s) const;

  MelCepstrumConfig cfg_;
  std::vector<ScaleTables> tables_;
};

// One-shot helper; builds the analysis tables on every call.
std::vector<double> mel_cepstrum(std::span<const double> x, const MelCepstrumConfig& cfg,
                                 std::size_t k);

}  // namespace ntwc
