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
#include <span>
#include <vector>

namespace ntwc {

inline constexpr int kMinPrecision = 8;
inline constexpr int kMaxPrecision = 16;

// Integer cumulative table for one symbol alphabet. Symbol i stands for the
// value offset + i; when has_escape is set the last symbol is reserved for
// values outside the support, which are then sent as raw 16-bit words.
struct QuantizedCdf {
  std::int32_t offset = 0;
  int precision = 16;
  bool has_escape = true;
  std::vector<std::uint32_t> cdf;  // cdf[0] == 0, cdf.back() == 1 << precision

  std::size_t symbol_count() const { return cdf.empty() ? 0 : cdf.size() - 1; }
  std::size_t support_size() const { return symbol_count() - (has_escape ? 1 : 0); }
  std::int32_t min_value() const { return offset; }
  std::int32_t max_value() const {
    return offset + static_cast<std::int32_t>(support_size()) - 1;
  }
  std::uint32_t frequency(std::size_t symbol) const { return cdf[symbol + 1] - cdf[symbol]; }

  // Throws ArgumentError unless the table is strictly increasing, starts at
  // zero and ends at 2^precision.
  void validate() const;
};

// Scales a probability vector to integer frequencies summing to
// 2^precision, each at least one. The input need not be normalized.
std::vector<std::uint32_t> pmf_to_quantized_cdf(std::span<const double> pmf, int precision);

}  // namespace ntwc
