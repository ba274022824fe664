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

#include "ntwc/coder/quantized_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntwc/errors.hpp"

namespace ntwc {

void QuantizedCdf::validate() const {
  if (precision < kMinPrecision || precision > kMaxPrecision) {
    throw ArgumentError("cdf precision " + std::to_string(precision) + " outside [8, 16]");
  }
  if (cdf.size() < 2 || cdf.front() != 0 || cdf.back() != (1u << precision)) {
    throw ArgumentError("cdf must start at 0 and end at 2^precision");
  }
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    if (cdf[i] <= cdf[i - 1]) throw ArgumentError("cdf is not strictly increasing");
  }
  if (has_escape && cdf.size() < 3) throw ArgumentError("escape table needs a support symbol");
}

std::vector<std::uint32_t> pmf_to_quantized_cdf(std::span<const double> pmf, int precision) {
  if (precision < kMinPrecision || precision > kMaxPrecision) {
    throw ArgumentError("cdf precision " + std::to_string(precision) + " outside [8, 16]");
  }
  const std::uint64_t total = 1ull << precision;
  if (pmf.empty() || pmf.size() > total) {
    throw ArgumentError("pmf size " + std::to_string(pmf.size()) +
                        " does not fit a table of precision " + std::to_string(precision));
  }
  double mass = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ArgumentError("pmf entries must be finite and >= 0");
    mass += p;
  }
  if (!(mass > 0.0)) throw ArgumentError("pmf has no mass");

  std::vector<std::int64_t> freq(pmf.size());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    freq[i] = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(pmf[i] / mass * static_cast<double>(total))));
    sum += freq[i];
  }
  // Settle the rounding surplus or deficit on the most probable symbols,
  // where a one-count change costs the fewest bits.
  std::int64_t diff = static_cast<std::int64_t>(total) - sum;
  while (diff != 0) {
    auto it = std::max_element(freq.begin(), freq.end());
    if (diff > 0) {
      *it += diff;
      diff = 0;
    } else {
      const std::int64_t take = std::min<std::int64_t>(-diff, std::max<std::int64_t>(1, (*it - 1) / 16));
      if (*it - take < 1) throw ArgumentError("pmf cannot be quantized at this precision");
      *it -= take;
      diff += take;
    }
  }
  std::vector<std::uint32_t> cdf(pmf.size() + 1, 0);
  for (std::size_t i = 0; i < freq.size(); ++i) {
    cdf[i + 1] = cdf[i] + static_cast<std::uint32_t>(freq[i]);
  }
  return cdf;
}

}  // namespace ntwc
