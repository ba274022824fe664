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

#include "ntwc/entropy/rate.hpp"

#include <cmath>

#include "ntwc/entropy/gaussian.hpp"
#include "ntwc/errors.hpp"

namespace ntwc {

double kbps(double bits, std::size_t num_frames, std::size_t hop, int sample_rate) {
  if (num_frames == 0) return 0.0;
  const double seconds = static_cast<double>(num_frames * hop) / sample_rate;
  return bits / seconds / 1000.0;
}

RateReport& RateReport::operator+=(const RateReport& o) {
  estimated_bits_y += o.estimated_bits_y;
  estimated_bits_z += o.estimated_bits_z;
  estimated_bits_yr += o.estimated_bits_yr;
  coded_bits_y += o.coded_bits_y;
  coded_bits_z += o.coded_bits_z;
  coded_bits_yr += o.coded_bits_yr;
  num_frames += o.num_frames;
  return *this;
}

double code_length_bits(const Tensor& likelihoods, double floor) {
  double bits = 0.0;
  for (double p : likelihoods.data) {
    if (!(p >= 0.0)) throw NumericError("rate: invalid likelihood");
    const double bounded = std::max(p, floor);
    if (!(bounded > 0.0)) throw NumericError("rate: zero likelihood");
    bits -= std::log2(bounded);
  }
  return bits;
}

RateReport rate_from_likelihoods(const Tensor& y, const Tensor& z, const Tensor* yr,
                                 std::size_t hop) {
  RateReport r;
  r.num_frames = y.n;
  r.hop = hop;
  r.estimated_bits_y = code_length_bits(y);
  r.estimated_bits_z = code_length_bits(z);
  r.estimated_bits_yr = yr ? code_length_bits(*yr) : 0.0;
  return r;
}

RateReport estimate_rate(const Model& model, const Tensor& y, const Tensor& z, const Tensor* yr) {
  const Tensor sigma = model.hyper_synthesize(z);
  if (!sigma.same_shape(y)) {
    throw ConfigError("estimate_rate: scale field " + sigma.shape_string() +
                      " does not match latent " + y.shape_string());
  }
  Tensor lik_y = Tensor::zeros_like(y);
  for (std::size_t i = 0; i < y.size(); ++i) {
    lik_y.data[i] = gaussian_box_likelihood(y.data[i], sigma.data[i]);
  }
  const auto& arch = model.arch();
  const Tensor lik_z = arch.hyper_prior.likelihood(model.params(), z);
  Tensor lik_yr;
  if (yr) {
    if (!model.has_residual()) throw ConfigError("estimate_rate: model has no residual branch");
    lik_yr = arch.residual_prior.likelihood(model.params(), *yr);
  }
  return rate_from_likelihoods(lik_y, lik_z, yr ? &lik_yr : nullptr,
                               model.config().frame_length - model.config().overlap);
}

}  // namespace ntwc
