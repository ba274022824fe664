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
#include <span>
#include <vector>

#include "ntwc/nn/rng.hpp"
#include "ntwc/nn/tensor.hpp"

namespace ntwc {

// Round half away from zero. Throws NumericError on NaN/Inf.
double round_half_away(double v);

// Element-wise hard quantization to integers.
std::vector<std::int32_t> quantize(std::span<const double> v);
// Same, but keeps the tensor layout (values are integral doubles).
Tensor quantize(const Tensor& v);

// Additive uniform noise on (-1/2, 1/2), the training-time stand-in for
// rounding. A fresh offset is drawn for every element on every call.
Tensor uniform_noise(std::size_t n, std::size_t c, std::size_t t, Rng& rng);
Tensor noise_proxy(const Tensor& v, Rng& rng);

}  // namespace ntwc
