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

namespace ntwc {

inline constexpr double kSigmaMin = 1e-6;

// Probability mass of N(0, sigma^2) convolved with U(-1/2, 1/2) at v, i.e.
// Phi((v + 1/2) / sigma) - Phi((v - 1/2) / sigma). Evaluated on |v| so both
// arguments are <= 1/(2 sigma), which keeps the tail values accurate.
double gaussian_box_likelihood(double v, double sigma);

struct LikelihoodWithGrad {
  double value = 0.0;
  double d_value = 0.0;  // d likelihood / d v
  double d_scale = 0.0;  // d likelihood / d sigma
};
LikelihoodWithGrad gaussian_box_likelihood_grad(double v, double sigma);

double standard_normal_cdf(double x);

}  // namespace ntwc
