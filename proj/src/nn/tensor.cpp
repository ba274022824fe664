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

#include "ntwc/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "ntwc/errors.hpp"

namespace ntwc {

std::string Tensor::shape_string() const {
  return "(" + std::to_string(n) + " x " + std::to_string(c) + " x " +
         std::to_string(t) + ")";
}

Tensor slice_batch(const Tensor& x, std::size_t first, std::size_t count) {
  if (first + count > x.n) {
    throw ArgumentError("slice_batch: range exceeds batch size " +
                        std::to_string(x.n));
  }
  Tensor out(count, x.c, x.t);
  const std::size_t stride = x.c * x.t;
  std::copy_n(x.data.begin() + static_cast<std::ptrdiff_t>(first * stride),
              count * stride, out.data.begin());
  return out;
}

Tensor concat_batch(std::span<const Tensor> parts) {
  if (parts.empty()) return {};
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.c != parts[0].c || p.t != parts[0].t) {
      throw ArgumentError("concat_batch: mismatched shapes " +
                          parts[0].shape_string() + " and " + p.shape_string());
    }
    total += p.n;
  }
  Tensor out(total, parts[0].c, parts[0].t);
  auto it = out.data.begin();
  for (const auto& p : parts) it = std::copy(p.data.begin(), p.data.end(), it);
  return out;
}

void add_inplace(Tensor& dst, const Tensor& src) {
  if (!dst.same_shape(src)) {
    throw ArgumentError("add_inplace: shape mismatch " + dst.shape_string() +
                        " vs " + src.shape_string());
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += src.data[i];
}

void scale_inplace(Tensor& dst, double s) {
  for (auto& v : dst.data) v *= s;
}

bool all_finite(const Tensor& x) {
  return std::all_of(x.data.begin(), x.data.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace ntwc
