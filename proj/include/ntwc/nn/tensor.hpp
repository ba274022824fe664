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
#include <string>
#include <vector>

namespace ntwc {

// Dense rank-3 array in (batch, channel, time) order. Parameters reuse the
// same container: a conv weight is (out, in, kernel), a bias is (1, 1, out).
struct Tensor {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t t = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t n_, std::size_t c_, std::size_t t_, double fill = 0.0)
      : n(n_), c(c_), t(t_), data(n_ * c_ * t_, fill) {}

  static Tensor zeros_like(const Tensor& other) {
    return Tensor(other.n, other.c, other.t);
  }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && t == o.t;
  }

  double& operator()(std::size_t i, std::size_t ch, std::size_t k) {
    return data[(i * c + ch) * t + k];
  }
  double operator()(std::size_t i, std::size_t ch, std::size_t k) const {
    return data[(i * c + ch) * t + k];
  }

  std::span<double> row(std::size_t i, std::size_t ch) {
    return {data.data() + (i * c + ch) * t, t};
  }
  std::span<const double> row(std::size_t i, std::size_t ch) const {
    return {data.data() + (i * c + ch) * t, t};
  }
  // All channels of one batch item.
  std::span<double> item(std::size_t i) { return {data.data() + i * c * t, c * t}; }
  std::span<const double> item(std::size_t i) const {
    return {data.data() + i * c * t, c * t};
  }

  std::string shape_string() const;
};

// Copies batch items [first, first + count) into a new tensor.
Tensor slice_batch(const Tensor& x, std::size_t first, std::size_t count);

// Concatenates tensors along the batch axis. All inputs must share (c, t).
Tensor concat_batch(std::span<const Tensor> parts);

void add_inplace(Tensor& dst, const Tensor& src);
void scale_inplace(Tensor& dst, double s);
bool all_finite(const Tensor& x);

}  // namespace ntwc
