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

#include "ntwc/training/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ntwc/entropy/gaussian.hpp"
#include "ntwc/entropy/quantize.hpp"
#include "ntwc/errors.hpp"

namespace ntwc {

namespace {

void check_weight(double w, const char* name) {
  if (!std::isfinite(w) || w < 0.0) {
    throw ConfigError(std::string("loss weight ") + name + " must be finite and nonnegative");
  }
}

void check_finite(double v, const char* component) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string("rd_loss: non-finite ") + component);
  }
}

// Per-frame bits of y~ under N(0, sigma^2) * U(-1/2, 1/2). Gradients of
// weight * sum(bits) go to grad_y and grad_sigma.
std::vector<double> gaussian_bits(const Tensor& y, const Tensor& sigma, double floor,
                                  double weight, Tensor* grad_y, Tensor* grad_sigma) {
  std::vector<double> out(y.n, 0.0);
  const std::size_t per = y.c * y.t;
  for (std::size_t n = 0; n < y.n; ++n) {
    for (std::size_t i = n * per; i < (n + 1) * per; ++i) {
      if (grad_y) {
        const auto g = gaussian_box_likelihood_grad(y.data[i], sigma.data[i]);
        const double bounded = std::max(g.value, floor);
        out[n] -= std::log2(bounded);
        const double d_p = -weight / (bounded * std::numbers::ln2);
        grad_y->data[i] += d_p * g.d_value;
        grad_sigma->data[i] += d_p * g.d_scale;
      } else {
        out[n] -= std::log2(std::max(gaussian_box_likelihood(y.data[i], sigma.data[i]), floor));
      }
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

void LossWeights::validate(bool residual) const {
  check_weight(mse, "mse");
  check_weight(res, "res");
  check_weight(perc, "perc");
  if (!(mse > 0.0 || perc > 0.0)) {
    throw ConfigError("loss weights: at least one of mse and perc must be positive");
  }
  if (residual && !(res > 0.0)) {
    throw ConfigError("loss weights: residual model needs a positive res weight");
  }
  if (!residual && res != 0.0) {
    throw ConfigError("loss weights: res weight given but the residual branch is absent");
  }
}

NoiseDraw NoiseDraw::sample(const ModelConfig& cfg, std::size_t frames, Rng& rng) {
  NoiseDraw d;
  d.y = uniform_noise(frames, cfg.latent_channels(), cfg.latent_length(), rng);
  d.z = uniform_noise(frames, cfg.hyper.out_channels, cfg.hyper_length(), rng);
  if (cfg.residual) d.yr = uniform_noise(frames, cfg.residual_code, cfg.latent_length(), rng);
  return d;
}

NoiseDraw NoiseDraw::slice(std::size_t first, std::size_t count) const {
  NoiseDraw d;
  d.y = slice_batch(y, first, count);
  d.z = slice_batch(z, first, count);
  if (!yr.empty()) d.yr = slice_batch(yr, first, count);
  return d;
}

RdObjective::RdObjective(MelCepstrumConfig mel, LossOptions options)
    : mel_(std::move(mel)), options_(options) {
  if (!(options_.likelihood_floor > 0.0 && options_.likelihood_floor < 1.0)) {
    throw ConfigError("likelihood floor must be in (0, 1)");
  }
}

Distortion RdObjective::distortion(const Tensor& x, const Tensor& xhat, double w_mse,
                                   double w_perc, Tensor* grad_xhat) const {
  if (!x.same_shape(xhat) || x.c != 1) {
    throw ConfigError("distortion: shape mismatch " + x.shape_string() + " vs " +
                      xhat.shape_string());
  }
  if (grad_xhat && !grad_xhat->same_shape(x)) throw ConfigError("distortion: gradient shape");
  Distortion d;
  if (x.n == 0) return d;
  const double inv_n = 1.0 / static_cast<double>(x.n);
  for (std::size_t n = 0; n < x.n; ++n) {
    const auto a = x.row(n, 0);
    const auto b = xhat.row(n, 0);
    for (std::size_t t = 0; t < x.t; ++t) {
      const double e = a[t] - b[t];
      d.mse += e * e;
      if (grad_xhat && w_mse != 0.0) grad_xhat->row(n, 0)[t] -= 2.0 * w_mse * inv_n * e;
    }
    for (std::size_t k = 0; k < mel_.config().num_scales(); ++k) {
      const auto fa = mel_.features(a, k);
      const auto fb = mel_.features(b, k);
      std::vector<double> g(fb.size());
      for (std::size_t i = 0; i < fa.size(); ++i) {
        const double e = fb[i] - fa[i];
        d.perc += e * e;
        g[i] = 2.0 * w_perc * inv_n * e;
      }
      if (grad_xhat && w_perc != 0.0) {
        const auto gx = mel_.features_backward(b, k, g);
        auto row = grad_xhat->row(n, 0);
        for (std::size_t t = 0; t < row.size(); ++t) row[t] += gx[t];
      }
    }
  }
  d.mse *= inv_n;
  d.perc *= inv_n;
  return d;
}

LossBreakdown RdObjective::evaluate(const Model& model, const Tensor& x,
                                    const LossWeights& weights, Rng& rng,
                                    ParameterSet* grads) const {
  return evaluate(model, x, weights, NoiseDraw::sample(model.config(), x.n, rng), grads);
}

LossBreakdown RdObjective::evaluate(const Model& model, const Tensor& x,
                                    const LossWeights& weights, const NoiseDraw& noise,
                                    ParameterSet* grads) const {
  check_weight(weights.mse, "mse");
  check_weight(weights.res, "res");
  check_weight(weights.perc, "perc");
  const auto& cfg = model.config();
  const auto& arch = model.arch();
  const auto& p = model.params();
  const bool residual = model.has_residual();
  if (weights.res > 0.0 && !residual) {
    throw ConfigError("rd_loss: res weight given but the residual branch is absent");
  }
  if (x.c != 1 || x.t != cfg.frame_length || x.n == 0) {
    throw ConfigError("rd_loss: expected frames of shape (N x 1 x " +
                      std::to_string(cfg.frame_length) + "), got " + x.shape_string());
  }
  const bool need_grad = grads != nullptr;
  const double inv_n = 1.0 / static_cast<double>(x.n);
  const double floor = options_.likelihood_floor;

  Trace t_a, t_ha, t_hs, t_ra, t_rs, t_s;
  Trace* ta = need_grad ? &t_a : nullptr;
  Trace* tha = need_grad ? &t_ha : nullptr;
  Trace* ths = need_grad ? &t_hs : nullptr;
  Trace* tra = need_grad ? &t_ra : nullptr;
  Trace* trs = need_grad ? &t_rs : nullptr;
  Trace* ts = need_grad ? &t_s : nullptr;

  if (!all_finite(x)) throw NumericError("rd_loss: non-finite input frames");
  const Tensor y = arch.analysis.forward(p, x, ta);
  if (!all_finite(y)) throw NumericError("rd_loss: non-finite latent y");
  if (!y.same_shape(noise.y)) throw ConfigError("rd_loss: noise draw does not match latent");
  const Tensor z = arch.hyper_analysis.forward(p, y, tha);
  if (!z.same_shape(noise.z)) throw ConfigError("rd_loss: noise draw does not match hyperlatent");
  Tensor zt = z;
  add_inplace(zt, noise.z);
  if (!all_finite(z)) throw NumericError("rd_loss: non-finite hyperlatent z");
  const Tensor sigma = arch.hyper_synthesis.forward(p, zt, ths);
  if (!all_finite(sigma)) throw NumericError("rd_loss: non-finite scales");
  Tensor yt = y;
  add_inplace(yt, noise.y);

  Tensor g_y = Tensor::zeros_like(y);
  Tensor g_sigma = Tensor::zeros_like(y);
  Tensor g_zt = Tensor::zeros_like(z);
  LossBreakdown out;
  out.rate_bits_y = mean(gaussian_bits(yt, sigma, floor, inv_n, need_grad ? &g_y : nullptr,
                                       need_grad ? &g_sigma : nullptr));
  out.rate_bits_z = mean(arch.hyper_prior.bits(p, zt, floor, inv_n,
                                               need_grad ? &g_zt : nullptr, grads));

  // Decoder input.
  Tensor dec_in;
  if (residual && options_.merge == ResidualMerge::kHard) {
    dec_in = quantize(y);
  } else {
    dec_in = yt;
  }

  Tensor r, rhat, yrt;
  if (residual) {
    const Tensor ybar = quantize(y);
    r = y;
    for (std::size_t i = 0; i < r.size(); ++i) r.data[i] -= ybar.data[i];
    const Tensor yr = arch.residual_analysis.forward(p, r, tra);
    if (!yr.same_shape(noise.yr)) throw ConfigError("rd_loss: noise draw does not match y_r");
    yrt = yr;
    add_inplace(yrt, noise.yr);
    rhat = arch.residual_synthesis.forward(p, yrt, trs);
    add_inplace(dec_in, rhat);
  }
  const Tensor xhat = arch.synthesis.forward(p, dec_in, ts);

  Tensor g_xhat = Tensor::zeros_like(x);
  const Distortion dist =
      distortion(x, xhat, weights.mse, weights.perc, need_grad ? &g_xhat : nullptr);
  out.mse = dist.mse;
  out.perc = dist.perc;

  Tensor g_yrt;
  if (residual) {
    g_yrt = Tensor::zeros_like(yrt);
    out.rate_bits_yr = mean(arch.residual_prior.bits(p, yrt, floor, inv_n,
                                                     need_grad ? &g_yrt : nullptr, grads));
    double res = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double e = r.data[i] - rhat.data[i];
      res += e * e;
    }
    out.res_mse = res * inv_n;
  }

  check_finite(out.rate_bits_y, "rate_bits_y");
  check_finite(out.rate_bits_z, "rate_bits_z");
  check_finite(out.rate_bits_yr, "rate_bits_yr");
  check_finite(out.mse, "mse");
  check_finite(out.res_mse, "res_mse");
  check_finite(out.perc, "perc");
  out.total = out.rate_bits() + weights.mse * out.mse + weights.res * out.res_mse +
              weights.perc * out.perc;
  check_finite(out.total, "total");
  if (!need_grad) return out;

  const Tensor g_dec = arch.synthesis.backward(p, t_s, g_xhat, grads);
  // Both merge modes pass the decoder gradient straight to y.
  add_inplace(g_y, g_dec);
  if (residual) {
    Tensor g_rhat = g_dec;
    for (std::size_t i = 0; i < r.size(); ++i) {
      g_rhat.data[i] -= 2.0 * weights.res * inv_n * (r.data[i] - rhat.data[i]);
    }
    add_inplace(g_yrt, arch.residual_synthesis.backward(p, t_rs, g_rhat, grads));
    // r is built from a detached copy of y, so the analysis transform gets
    // nothing back from this branch.
    (void)arch.residual_analysis.backward(p, t_ra, g_yrt, grads);
  }
  add_inplace(g_zt, arch.hyper_synthesis.backward(p, t_hs, g_sigma, grads));
  add_inplace(g_y, arch.hyper_analysis.backward(p, t_ha, g_zt, grads));
  (void)arch.analysis.backward(p, t_a, g_y, grads);
  return out;
}

LossBreakdown rd_loss(const Tensor& x, const Model& model, const LossWeights& weights, Rng& rng,
                      ParameterSet* grads) {
  static const RdObjective objective;
  return objective.evaluate(model, x, weights, rng, grads);
}

}  // namespace ntwc
