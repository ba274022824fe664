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

#include "ntwc/nn/params.hpp"

namespace ntwc {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive-moment gradient descent with bias correction and no weight decay.
class Adam {
 public:
  Adam(const ParameterSet& like, AdamConfig cfg = {});
  Adam(ParameterSet first_moment, ParameterSet second_moment, std::uint64_t step,
       AdamConfig cfg = {});

  void step(ParameterSet& params, const ParameterSet& grads, double learning_rate);

  std::uint64_t steps_taken() const { return step_; }
  const ParameterSet& first_moment() const { return m_; }
  const ParameterSet& second_moment() const { return v_; }

 private:
  AdamConfig cfg_;
  ParameterSet m_, v_;
  std::uint64_t step_ = 0;
};

}  // namespace ntwc
