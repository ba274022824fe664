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

#include "ntwc/entropy/cdf_tables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntwc/entropy/gaussian.hpp"
#include "ntwc/errors.hpp"

namespace ntwc {

double CdfOptions::tail_mass() const { return std::ldexp(1.0, -tail_exponent); }

void CdfOptions::validate() const {
  if (precision < kMinPrecision || precision > kMaxPrecision) {
    throw ArgumentError("cdf precision " + std::to_string(precision) + " outside [8, 16]");
  }
  if (tail_exponent < 1 || tail_exponent > 30) {
    throw ArgumentError("tail mass exponent " + std::to_string(tail_exponent) + " outside [1, 30]");
  }
}

QuantizedCdf build_gaussian_cdf(double sigma, const CdfOptions& opts) {
  opts.validate();
  if (!(sigma >= kSigmaMin)) throw ArgumentError("gaussian cdf: scale below minimum");
  const double tail = opts.tail_mass();
  const std::size_t capacity = (std::size_t{1} << opts.precision) - 1;  // one slot for escape
  std::int32_t k = 0;
  while (2.0 * standard_normal_cdf(-(k + 0.5) / sigma) > tail) {
    ++k;
    if (static_cast<std::size_t>(2 * k + 1) > capacity) {
      throw ArgumentError("gaussian cdf: support for sigma " + std::to_string(sigma) +
                          " exceeds precision " + std::to_string(opts.precision));
    }
  }
  std::vector<double> pmf;
  pmf.reserve(2 * k + 2);
  for (std::int32_t v = -k; v <= k; ++v) pmf.push_back(gaussian_box_likelihood(v, sigma));
  pmf.push_back(2.0 * standard_normal_cdf(-(k + 0.5) / sigma));
  QuantizedCdf out;
  out.offset = -k;
  out.precision = opts.precision;
  out.has_escape = true;
  out.cdf = pmf_to_quantized_cdf(pmf, opts.precision);
  return out;
}

std::vector<QuantizedCdf> build_factorized_cdfs(const FactorizedDensity& density,
                                                const ParameterSet& params,
                                                const CdfOptions& opts) {
  opts.validate();
  const std::size_t capacity = (std::size_t{1} << opts.precision) - 1;
  std::vector<QuantizedCdf> out;
  for (std::size_t ch = 0; ch < density.channels(); ++ch) {
    const auto [lo, hi] = density.quantiles(params, ch, opts.tail_mass());
    const auto v_min = static_cast<std::int32_t>(std::floor(lo));
    const auto v_max = static_cast<std::int32_t>(std::ceil(hi));
    const auto n = static_cast<std::size_t>(v_max - v_min + 1);
    if (n > capacity) {
      throw ArgumentError(density.prefix() + ": support of channel " + std::to_string(ch) +
                          " exceeds precision " + std::to_string(opts.precision));
    }
    std::vector<double> pmf;
    pmf.reserve(n + 1);
    for (std::int32_t v = v_min; v <= v_max; ++v) {
      pmf.push_back(density.likelihood(params, ch, v));
    }
    const double outside = density.cdf(params, ch, v_min - 0.5) +
                           (1.0 - density.cdf(params, ch, v_max + 0.5));
    pmf.push_back(std::max(outside, 0.0));
    QuantizedCdf t;
    t.offset = v_min;
    t.precision = opts.precision;
    t.has_escape = true;
    t.cdf = pmf_to_quantized_cdf(pmf, opts.precision);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> default_scale_table() {
  constexpr std::size_t kLevels = 64;
  const double lo = std::log(0.11), hi = std::log(256.0);
  std::vector<double> t(kLevels);
  for (std::size_t i = 0; i < kLevels; ++i) {
    t[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (kLevels - 1));
  }
  return t;
}

std::size_t scale_index(std::span<const double> table, double sigma) {
  if (table.empty()) throw ArgumentError("empty scale table");
  auto it = std::lower_bound(table.begin(), table.end(), sigma);
  if (it == table.end()) return table.size() - 1;
  return static_cast<std::size_t>(it - table.begin());
}

}  // namespace ntwc
