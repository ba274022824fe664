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

#include "ntwc/coder/quantized_cdf.hpp"
#include "ntwc/entropy/factorized.hpp"
#include "ntwc/nn/params.hpp"

namespace ntwc {

inline constexpr int kDefaultPrecision = 16;
inline constexpr int kDefaultTailExponent = 8;  // tail mass 2^-8

struct CdfOptions {
  int precision = kDefaultPrecision;
  int tail_exponent = kDefaultTailExponent;

  double tail_mass() const;
  void validate() const;
};

// Table for the zero-mean Gaussian-box model at scale sigma. The support
// [-K, K] is the narrowest symmetric range whose outside mass is at most the
// tail mass; that mass goes to the escape symbol.
QuantizedCdf build_gaussian_cdf(double sigma, const CdfOptions& opts = {});

// One table per channel of a factorized density.
std::vector<QuantizedCdf> build_factorized_cdfs(const FactorizedDensity& density,
                                                const ParameterSet& params,
                                                const CdfOptions& opts = {});

// Log-spaced scales used to share Gaussian tables between elements; an
// element with scale sigma uses the first table entry >= sigma.
std::vector<double> default_scale_table();
std::size_t scale_index(std::span<const double> table, double sigma);

}  // namespace ntwc
