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

#include "ntwc/entropy/quantize.hpp"

#include <cmath>
#include <limits>

#include "ntwc/errors.hpp"

namespace ntwc {

double round_half_away(double v) {
  if (!std::isfinite(v)) throw NumericError("quantize: non-finite input");
  return std::round(v);
}

std::vector<std::int32_t> quantize(std::span<const double> v) {
  std::vector<std::int32_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = round_half_away(v[i]);
    if (r > std::numeric_limits<std::int32_t>::max() ||
        r < std::numeric_limits<std::int32_t>::min()) {
      throw NumericError("quantize: value out of 32-bit range");
    }
    out[i] = static_cast<std::int32_t>(r);
  }
  return out;
}

Tensor quantize(const Tensor& v) {
  Tensor out = v;
  for (auto& x : out.data) x = round_half_away(x);
  return out;
}

Tensor uniform_noise(std::size_t n, std::size_t c, std::size_t t, Rng& rng) {
  Tensor o(n, c, t);
  for (auto& x : o.data) x = rng.uniform() - 0.5;
  return o;
}

Tensor noise_proxy(const Tensor& v, Rng& rng) {
  Tensor out = uniform_noise(v.n, v.c, v.t, rng);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += v.data[i];
  return out;
}

}  // namespace ntwc
