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
#include <map>
#include <string>
#include <string_view>

#include "ntwc/nn/tensor.hpp"

namespace ntwc {

// Named weight map. Iteration order is lexicographic, which the checkpoint
// writer and the content hash rely on.
class ParameterSet {
 public:
  using Map = std::map<std::string, Tensor, std::less<>>;

  Tensor& add(const std::string& name, Tensor value);
  bool contains(std::string_view name) const { return tensors_.find(name) != tensors_.end(); }
  const Tensor& at(std::string_view name) const;
  Tensor& at(std::string_view name);

  // Total scalar count of tensors whose name starts with `prefix`.
  std::size_t scalar_count(std::string_view prefix = {}) const;
  std::size_t size() const { return tensors_.size(); }
  bool empty() const { return tensors_.empty(); }

  // Same names and shapes, all zeros.
  ParameterSet zeros_like() const;
  void fill(double v);
  // this += s * other; names must match exactly.
  void add_scaled(const ParameterSet& other, double s);

  Map::const_iterator begin() const { return tensors_.begin(); }
  Map::const_iterator end() const { return tensors_.end(); }
  Map::iterator begin() { return tensors_.begin(); }
  Map::iterator end() { return tensors_.end(); }

 private:
  Map tensors_;
};

}  // namespace ntwc
