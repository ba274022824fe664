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

#include "ntwc/entropy/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "ntwc/errors.hpp"

namespace ntwc {
namespace {

void check_scale(double sigma) {
  if (!(sigma >= kSigmaMin)) {
    throw ArgumentError("gaussian likelihood: scale below minimum");
  }
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian_box_likelihood(double v, double sigma) {
  check_scale(sigma);
  const double a = std::fabs(v);
  const double upper = (0.5 - a) / sigma;
  const double lower = (-0.5 - a) / sigma;
  return standard_normal_cdf(upper) - standard_normal_cdf(lower);
}

LikelihoodWithGrad gaussian_box_likelihood_grad(double v, double sigma) {
  check_scale(sigma);
  const double a = std::fabs(v);
  const double upper = (0.5 - a) / sigma;
  const double lower = (-0.5 - a) / sigma;
  const double pu = normal_pdf(upper);
  const double pl = normal_pdf(lower);
  LikelihoodWithGrad out;
  out.value = standard_normal_cdf(upper) - standard_normal_cdf(lower);
  const double d_abs = (pl - pu) / sigma;
  out.d_value = v > 0.0 ? d_abs : (v < 0.0 ? -d_abs : 0.0);
  out.d_scale = (lower * pl - upper * pu) / sigma;
  return out;
}

}  // namespace ntwc
