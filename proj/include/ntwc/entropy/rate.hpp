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

#include "ntwc/nn/model.hpp"
#include "ntwc/nn/tensor.hpp"

namespace ntwc {

// Lower bound applied to every likelihood before taking -log2.
inline constexpr double kLikelihoodFloor = 1.0 / 32768.0;  // 2^-15
inline constexpr std::size_t kDefaultHop = 480;

double kbps(double bits, std::size_t num_frames, std::size_t hop = kDefaultHop,
            int sample_rate = 16000);

// Bit budget of the three streams. Estimated values come from model
// likelihoods, coded values from actual entropy-coder output.
struct RateReport {
  double estimated_bits_y = 0.0;
  double estimated_bits_z = 0.0;
  double estimated_bits_yr = 0.0;
  std::uint64_t coded_bits_y = 0;
  std::uint64_t coded_bits_z = 0;
  std::uint64_t coded_bits_yr = 0;
  std::size_t num_frames = 0;
  std::size_t hop = kDefaultHop;
  int sample_rate = 16000;

  double estimated_bits() const { return estimated_bits_y + estimated_bits_z + estimated_bits_yr; }
  std::uint64_t coded_bits() const { return coded_bits_y + coded_bits_z + coded_bits_yr; }
  // Overlapping samples are sent once, so duration counts hops, not frames.
  double duration_seconds() const {
    return static_cast<double>(num_frames * hop) / sample_rate;
  }
  double estimated_kbps() const { return kbps(estimated_bits(), num_frames, hop, sample_rate); }
  double coded_kbps() const {
    return kbps(static_cast<double>(coded_bits()), num_frames, hop, sample_rate);
  }
  RateReport& operator+=(const RateReport& o);
};

// Sum of -log2 max(p, floor); throws NumericError on NaN or negative p.
double code_length_bits(const Tensor& likelihoods, double floor = kLikelihoodFloor);

// Rate from per-element likelihoods of the three streams. The tensors'
// batch axis is the frame count; `yr` may be null (no residual stream).
RateReport rate_from_likelihoods(const Tensor& y, const Tensor& z, const Tensor* yr,
                                 std::size_t hop = kDefaultHop);

// Model-based estimate: sigma = h_s(z), then Gaussian-box likelihoods for y
// and the factorized densities for z and y_r. Works for noisy proxies and
// for quantized values alike.
RateReport estimate_rate(const Model& model, const Tensor& y, const Tensor& z, const Tensor* yr);

}  // namespace ntwc
