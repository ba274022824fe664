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

#include "ntwc/dsp/mel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ntwc/errors.hpp"

namespace ntwc {
namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

std::size_t MelCepstrumConfig::coeffs(std::size_t k) const {
  return std::min(num_cepstral_coeffs, scales.at(k).mel_bins);
}

void MelCepstrumConfig::validate() const {
  if (scales.empty()) throw ArgumentError("mel config: no scales");
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (scales[k].mel_bins == 0 || scales[k].window < 2) {
      throw ArgumentError("mel config: scale " + std::to_string(k) + " is empty");
    }
    if (k > 0 && scales[k].mel_bins <= scales[k - 1].mel_bins) {
      throw ArgumentError("mel config: mel bin counts must be strictly increasing");
    }
  }
  if (num_cepstral_coeffs == 0) throw ArgumentError("mel config: zero cepstral coefficients");
  if (!(log_floor > 0.0)) throw ArgumentError("mel config: log floor must be positive");
}

MelAnalyzer::MelAnalyzer(MelCepstrumConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const double pi = std::numbers::pi;
  for (std::size_t k = 0; k < cfg_.scales.size(); ++k) {
    ScaleTables s;
    s.window = cfg_.scales[k].window;
    s.bins = cfg_.scales[k].mel_bins;
    s.fft_bins = s.window / 2 + 1;
    s.coeffs = cfg_.coeffs(k);

    s.hann.resize(s.window);
    for (std::size_t i = 0; i < s.window; ++i) {
      s.hann[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / s.window);
    }
    s.cos_table.resize(s.fft_bins * s.window);
    s.sin_table.resize(s.fft_bins * s.window);
    for (std::size_t f = 0; f < s.fft_bins; ++f) {
      for (std::size_t i = 0; i < s.window; ++i) {
        // Reduce the phase index first so large products stay exact.
        const double phase = 2.0 * pi * static_cast<double>((f * i) % s.window) / s.window;
        s.cos_table[f * s.window + i] = std::cos(phase);
        s.sin_table[f * s.window + i] = std::sin(phase);
      }
    }

    // HTK-style triangular filters evenly spaced on the mel axis up to Nyquist.
    const double nyquist = cfg_.sample_rate / 2.0;
    const double top = hz_to_mel(nyquist);
    std::vector<double> edges(s.bins + 2);
    for (std::size_t m = 0; m < edges.size(); ++m) {
      edges[m] = mel_to_hz(top * static_cast<double>(m) / static_cast<double>(s.bins + 1));
    }
    s.mel.assign(s.bins * s.fft_bins, 0.0);
    s.centers_hz.resize(s.bins);
    for (std::size_t m = 0; m < s.bins; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      s.centers_hz[m] = mid;
      for (std::size_t f = 0; f < s.fft_bins; ++f) {
        const double hz = static_cast<double>(f) * cfg_.sample_rate / s.window;
        double w = 0.0;
        if (hz > lo && hz <= mid) {
          w = (hz - lo) / (mid - lo);
        } else if (hz > mid && hz < hi) {
          w = (hi - hz) / (hi - mid);
        }
        s.mel[m * s.fft_bins + f] = w;
      }
    }

    s.dct.resize(s.coeffs * s.bins);
    for (std::size_t q = 0; q < s.coeffs; ++q) {
      const double norm = q == 0 ? std::sqrt(1.0 / s.bins) : std::sqrt(2.0 / s.bins);
      for (std::size_t m = 0; m < s.bins; ++m) {
        s.dct[q * s.bins + m] =
            norm * std::cos(pi * static_cast<double>(q) * (static_cast<double>(m) + 0.5) / s.bins);
      }
    }
    tables_.push_back(std::move(s));
  }
}

double MelAnalyzer::bin_center_hz(std::size_t k, std::size_t bin) const {
  return tables_.at(k).centers_hz.at(bin);
}

MelAnalyzer::WindowState MelAnalyzer::analyse(std::span<const double> x,
                                              const ScaleTables& s) const {
  std::vector<double> windowed(s.window);
  for (std::size_t i = 0; i < s.window; ++i) windowed[i] = x[i] * s.hann[i];
  WindowState st;
  st.re.assign(s.fft_bins, 0.0);
  st.im.assign(s.fft_bins, 0.0);
  for (std::size_t f = 0; f < s.fft_bins; ++f) {
    const double* c = &s.cos_table[f * s.window];
    const double* sn = &s.sin_table[f * s.window];
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < s.window; ++i) {
      re += windowed[i] * c[i];
      im -= windowed[i] * sn[i];
    }
    st.re[f] = re;
    st.im[f] = im;
  }
  st.energy.assign(s.bins, 0.0);
  for (std::size_t m = 0; m < s.bins; ++m) {
    const double* row = &s.mel[m * s.fft_bins];
    double e = 0.0;
    for (std::size_t f = 0; f < s.fft_bins; ++f) {
      e += row[f] * (st.re[f] * st.re[f] + st.im[f] * st.im[f]);
    }
    st.energy[m] = e;
  }
  return st;
}

std::vector<double> MelAnalyzer::log_mel_energies(std::span<const double> x,
                                                  std::size_t k) const {
  const auto& s = tables_.at(k);
  if (x.size() < s.window) {
    throw ArgumentError("mel_cepstrum: frame shorter than the analysis window");
  }
  auto st = analyse(x, s);
  for (auto& e : st.energy) e = std::log(e + cfg_.log_floor);
  return st.energy;
}

std::vector<double> MelAnalyzer::cepstrum(std::span<const double> x, std::size_t k) const {
  const auto& s = tables_.at(k);
  const auto logs = log_mel_energies(x, k);
  std::vector<double> out(s.coeffs, 0.0);
  for (std::size_t q = 0; q < s.coeffs; ++q) {
    double acc = 0.0;
    for (std::size_t m = 0; m < s.bins; ++m) acc += s.dct[q * s.bins + m] * logs[m];
    out[q] = acc;
  }
  return out;
}

std::vector<double> MelAnalyzer::cepstrum_backward(std::span<const double> x, std::size_t k,
                                                   std::span<const double> grad_coeffs) const {
  const auto& s = tables_.at(k);
  if (x.size() < s.window) {
    throw ArgumentError("mel_cepstrum: frame shorter than the analysis window");
  }
  if (grad_coeffs.size() != s.coeffs) {
    throw ArgumentError("mel_cepstrum backward: expected " + std::to_string(s.coeffs) +
                        " coefficient gradients");
  }
  const auto st = analyse(x, s);
  std::vector<double> g_energy(s.bins, 0.0);
  for (std::size_t m = 0; m < s.bins; ++m) {
    double acc = 0.0;
    for (std::size_t q = 0; q < s.coeffs; ++q) acc += s.dct[q * s.bins + m] * grad_coeffs[q];
    g_energy[m] = acc / (st.energy[m] + cfg_.log_floor);
  }
  std::vector<double> g_windowed(s.window, 0.0);
  for (std::size_t f = 0; f < s.fft_bins; ++f) {
    double g_power = 0.0;
    for (std::size_t m = 0; m < s.bins; ++m) g_power += s.mel[m * s.fft_bins + f] * g_energy[m];
    if (g_power == 0.0) continue;
    const double g_re = 2.0 * st.re[f] * g_power;
    const double g_im = 2.0 * st.im[f] * g_power;
    const double* c = &s.cos_table[f * s.window];
    const double* sn = &s.sin_table[f * s.window];
    for (std::size_t i = 0; i < s.window; ++i) g_windowed[i] += g_re * c[i] - g_im * sn[i];
  }
  for (std::size_t i = 0; i < s.window; ++i) g_windowed[i] *= s.hann[i];
  return g_windowed;
}

std::size_t MelAnalyzer::window_count(std::size_t length, std::size_t k) const {
  const std::size_t w = tables_.at(k).window;
  if (length <= w) return 1;
  const std::size_t hop = w / 2;
  return (length - w) / hop + 1;
}

std::vector<double> MelAnalyzer::features(std::span<const double> signal, std::size_t k) const {
  const auto& s = tables_.at(k);
  const std::size_t count = window_count(signal.size(), k);
  const std::size_t hop = s.window / 2;
  std::vector<double> padded;
  if (signal.size() < s.window) {
    padded.assign(s.window, 0.0);
    std::copy(signal.begin(), signal.end(), padded.begin());
    signal = padded;
  }
  std::vector<double> out;
  out.reserve(count * s.coeffs);
  for (std::size_t w = 0; w < count; ++w) {
    const auto c = cepstrum(signal.subspan(w * hop, s.window), k);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::vector<double> MelAnalyzer::features_backward(std::span<const double> signal,
                                                   std::size_t k,
                                                   std::span<const double> grad) const {
  const auto& s = tables_.at(k);
  const std::size_t count = window_count(signal.size(), k);
  if (grad.size() != count * s.coeffs) {
    throw ArgumentError("mel features backward: gradient size mismatch");
  }
  const std::size_t hop = s.window / 2;
  const std::size_t original = signal.size();
  std::vector<double> padded;
  if (signal.size() < s.window) {
    padded.assign(s.window, 0.0);
    std::copy(signal.begin(), signal.end(), padded.begin());
    signal = padded;
  }
  std::vector<double> out(signal.size(), 0.0);
  for (std::size_t w = 0; w < count; ++w) {
    const auto g = cepstrum_backward(signal.subspan(w * hop, s.window), k,
                                     grad.subspan(w * s.coeffs, s.coeffs));
    for (std::size_t i = 0; i < s.window; ++i) out[w * hop + i] += g[i];
  }
  out.resize(original);
  return out;
}

std::vector<double> mel_cepstrum(std::span<const double> x, const MelCepstrumConfig& cfg,
                                 std::size_t k) {
  return MelAnalyzer(cfg).cepstrum(x, k);
}

}  // namespace ntwc
