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

#include "ntwc/training/adam.hpp"

#include <cmath>

#include "ntwc/errors.hpp"

namespace ntwc {

Adam::Adam(const ParameterSet& like, AdamConfig cfg)
    : cfg_(cfg), m_(like.zeros_like()), v_(like.zeros_like()) {}

Adam::Adam(ParameterSet first_moment, ParameterSet second_moment, std::uint64_t step,
           AdamConfig cfg)
    : cfg_(cfg), m_(std::move(first_moment)), v_(std::move(second_moment)), step_(step) {}

void Adam::step(ParameterSet& params, const ParameterSet& grads, double learning_rate) {
  ++step_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  auto m_it = m_.begin();
  auto v_it = v_.begin();
  auto g_it = grads.begin();
  for (auto& [name, w] : params) {
    if (m_it == m_.end() || g_it == grads.end() || m_it->first != name ||
        g_it->first != name || !m_it->second.same_shape(w) || !g_it->second.same_shape(w)) {
      throw ConfigError("adam: optimizer state does not match parameter " + name);
    }
    auto& m = m_it->second.data;
    auto& v = v_it->second.data;
    const auto& g = g_it->second.data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w.data[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
    ++m_it;
    ++v_it;
    ++g_it;
  }
  if (m_it != m_.end()) throw ConfigError("adam: optimizer state has extra entries");
}

}  // namespace ntwc
