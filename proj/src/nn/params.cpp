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

#include "ntwc/nn/params.hpp"

#include "ntwc/errors.hpp"

namespace ntwc {

Tensor& ParameterSet::add(const std::string& name, Tensor value) {
  auto [it, inserted] = tensors_.emplace(name, std::move(value));
  if (!inserted) throw ConfigError("duplicate parameter " + name);
  return it->second;
}

const Tensor& ParameterSet::at(std::string_view name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ConfigError("missing parameter " + std::string(name));
  return it->second;
}

Tensor& ParameterSet::at(std::string_view name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ConfigError("missing parameter " + std::string(name));
  return it->second;
}

std::size_t ParameterSet::scalar_count(std::string_view prefix) const {
  std::size_t total = 0;
  for (const auto& [name, t] : tensors_) {
    if (std::string_view(name).starts_with(prefix)) total += t.size();
  }
  return total;
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  for (const auto& [name, t] : tensors_) out.tensors_.emplace(name, Tensor::zeros_like(t));
  return out;
}

void ParameterSet::fill(double v) {
  for (auto& [name, t] : tensors_) std::fill(t.data.begin(), t.data.end(), v);
}

void ParameterSet::add_scaled(const ParameterSet& other, double s) {
  if (other.tensors_.size() != tensors_.size()) {
    throw ConfigError("parameter sets differ in size");
  }
  for (auto& [name, t] : tensors_) {
    const Tensor& o = other.at(name);
    if (!o.same_shape(t)) throw ConfigError("parameter shape mismatch for " + name);
    for (std::size_t i = 0; i < t.size(); ++i) t.data[i] += s * o.data[i];
  }
}

}  // namespace ntwc
