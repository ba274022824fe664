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

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "ntwc/entropy/cdf_tables.hpp"
#include "ntwc/entropy/factorized.hpp"
#include "ntwc/entropy/gaussian.hpp"
#include "ntwc/entropy/quantize.hpp"
#include "ntwc/entropy/rate.hpp"
#include "ntwc/errors.hpp"
#include "ntwc/nn/model.hpp"
#include "test_util.hpp"

namespace ntwc {
namespace {

double box_integral(double v, double sigma) {
  auto pdf = [sigma](double x) {
    return std::exp(-0.5 * (x / sigma) * (x / sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(pdf, v - 0.5, v + 0.5, 15, 1e-14);
}

TEST(Quantize, RoundsHalfAwayFromZero) {
  const std::vector<double> v = {0.4, -0.4, 1.5, -1.5};
  EXPECT_EQ(quantize(v), (std::vector<std::int32_t>{0, 0, 2, -2}));
  EXPECT_EQ(round_half_away(2.5), 3.0);
  EXPECT_EQ(round_half_away(-0.5), -1.0);
}

TEST(Quantize, IntegersAreFixedPoints) {
  for (int k = -50; k <= 50; ++k) EXPECT_EQ(round_half_away(k), k);
}

TEST(Quantize, ErrorIsAtMostHalf) {
  Rng rng(1);
  Tensor v = test::random_tensor(4, 3, 100, rng, 20.0);
  const Tensor q = quantize(v);
  for (std::size_t i = 0; i < v.size(); ++i) ASSERT_LE(std::abs(v.data[i] - q.data[i]), 0.5);
}

TEST(Quantize, NonFiniteInputIsAnError) {
  const std::vector<double> v = {1.0, std::nan("")};
  EXPECT_THROW(quantize(v), NumericError);
  EXPECT_THROW(round_half_away(INFINITY), NumericError);
}

TEST(NoiseProxy, OffsetsStayInsideTheUnitBox) {
  Rng rng(2);
  const Tensor v = test::random_tensor(2, 4, 500, rng, 3.0);
  const Tensor p = noise_proxy(v, rng);
  for (std::size_t i = 0; i < v.size(); ++i) ASSERT_LT(std::abs(p.data[i] - v.data[i]), 0.5);
}

TEST(NoiseProxy, SeededDrawsAreReproducible) {
  Rng a(3), b(3);
  const Tensor v(1, 2, 64, 1.25);
  EXPECT_EQ(noise_proxy(v, a).data, noise_proxy(v, b).data);
}

TEST(NoiseProxy, OffsetMeanIsZero) {
  Rng rng(4);
  const Tensor o = uniform_noise(1, 1, 1000000, rng);
  double sum = 0.0;
  for (double v : o.data) sum += v;
  const double mean = sum / o.size();
  const double stderr_ = std::sqrt(1.0 / 12.0 / o.size());
  EXPECT_LT(std::abs(mean), 3.0 * stderr_);
}

TEST(GaussianBox, MatchesQuadratureAtUnitScale) {
  const double oracle = box_integral(0.0, 1.0);
  EXPECT_NEAR(oracle, 0.3829249, 1e-7);
  EXPECT_NEAR(gaussian_box_likelihood(0.0, 1.0), oracle, 1e-12);
}

TEST(GaussianBox, MatchesQuadratureOnAGrid) {
  for (double sigma : {1e-3, 0.05, 0.3, 1.0, 3.0, 17.0, 400.0}) {
    for (double v : {-7.3, -2.0, -0.49, 0.0, 0.5, 1.0, 4.2, 30.0}) {
      EXPECT_NEAR(gaussian_box_likelihood(v, sigma), box_integral(v, sigma), 1e-10) << v << " " << sigma;
    }
  }
}

TEST(GaussianBox, TinyScaleConcentratesAtZero) {
  EXPECT_NEAR(gaussian_box_likelihood(0.0, kSigmaMin), 1.0, 1e-15);
  EXPECT_THROW(gaussian_box_likelihood(0.0, 0.5e-6), ArgumentError);
}

TEST(GaussianBox, IsEven) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-20, 20), s = std::exp(rng.uniform(-5, 5));
    ASSERT_EQ(gaussian_box_likelihood(v, s), gaussian_box_likelihood(-v, s));
  }
}

TEST(GaussianBox, SumsToOneOverIntegers) {
  for (double sigma : {1e-6, 1e-3, 0.1, 0.5, 1.0, 10.0, 100.0, 1000.0}) {
    const long k_max = static_cast<long>(std::ceil(12.0 * sigma)) + 2;
    double total = 0.0;
    // Small terms first.
    for (long k = k_max; k >= 1; --k) total += 2.0 * gaussian_box_likelihood(k, sigma);
    total += gaussian_box_likelihood(0, sigma);
    EXPECT_NEAR(total, 1.0, 1e-9) << sigma;
  }
}

TEST(GaussianBox, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  for (int i = 0; i < 300; ++i) {
    double v = rng.uniform(-4, 4);
    double s = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
    if (std::abs(v) < 1e-3) continue;  // |v| has a kink at 0
    const auto g = gaussian_box_likelihood_grad(v, s);
    EXPECT_EQ(g.value, gaussian_box_likelihood(v, s));
    if (g.value < 1e-250) continue;  // -log p is not representable
    auto nll = [&] { return -std::log(gaussian_box_likelihood(v, s)); };
    const double dv = test::central_difference(nll, v, 1e-6);
    const double ds = test::central_difference(nll, s, 1e-6 * s);
    // Central differences carry ~1e-9 absolute noise at this step size.
    EXPECT_NEAR(-g.d_value / g.value, dv, 1e-4 * std::abs(dv) + 1e-8) << v << " " << s;
    EXPECT_NEAR(-g.d_scale / g.value, ds, 1e-4 * std::abs(ds) + 1e-8) << v << " " << s;
  }
}

TEST(Factorized, CumulativeIsMonotoneWithUnitLimits) {
  const FactorizedDensity d("p", 3);
  ParameterSet p;
  d.initialize(p);
  Rng rng(7);
  for (auto& [name, t] : p) {
    for (auto& v : t.data) v += 0.3 * rng.normal();
  }
  for (std::size_t ch = 0; ch < 3; ++ch) {
    double prev = 0.0;
    for (double x = -60.0; x <= 60.0; x += 0.01) {
      const double c = d.cdf(p, ch, x);
      ASSERT_GE(c, prev);
      prev = c;
    }
    EXPECT_LT(d.cdf(p, ch, -1e4), 1e-6);
    EXPECT_GT(d.cdf(p, ch, 1e4), 1.0 - 1e-6);
    for (double v = -20; v <= 20; v += 0.37) EXPECT_GE(d.likelihood(p, ch, v), 0.0);
  }
}

TEST(Factorized, QuantileRangeHoldsAllButTheTail) {
  const FactorizedDensity d("p", 2);
  ParameterSet p;
  d.initialize(p);
  Rng rng(8);
  for (auto& [name, t] : p) {
    for (auto& v : t.data) v += 0.5 * rng.normal();
  }
  const double tail = std::ldexp(1.0, -8);
  for (std::size_t ch = 0; ch < 2; ++ch) {
    const auto [lo, hi] = d.quantiles(p, ch, tail);
    const long q_lo = static_cast<long>(std::floor(lo)), q_hi = static_cast<long>(std::ceil(hi));
    double sum = 0.0;
    for (long k = q_lo; k <= q_hi; ++k) sum += d.likelihood(p, ch, static_cast<double>(k));
    EXPECT_GE(sum, 1.0 - tail);
    EXPECT_NEAR(d.cdf(p, ch, lo), tail / 2, 1e-9);
    EXPECT_NEAR(d.cdf(p, ch, hi), 1 - tail / 2, 1e-9);
  }
}

TEST(Factorized, FreshDensityPeaksAtZero) {
  const FactorizedDensity d("p", 4);
  ParameterSet p;
  d.initialize(p);
  for (std::size_t ch = 0; ch < 4; ++ch) {
    const double at0 = d.likelihood(p, ch, 0.0);
    for (int k = -10; k <= 10; ++k) {
      if (k != 0) {
        EXPECT_GT(at0, d.likelihood(p, ch, k));
      }
    }
  }
}

TEST(Factorized, ChannelMismatchIsAnError) {
  const FactorizedDensity d("p", 2);
  ParameterSet p;
  d.initialize(p);
  EXPECT_THROW(d.likelihood(p, Tensor(1, 3, 4)), ConfigError);
}

TEST(Factorized, BitsGradientMatchesFiniteDifferences) {
  const FactorizedDensity d("p", 2);
  ParameterSet p;
  d.initialize(p);
  Rng rng(9);
  for (auto& [name, t] : p) {
    for (auto& v : t.data) v += 0.3 * rng.normal();
  }
  Tensor v = test::random_tensor(3, 2, 5, rng, 3.0);
  const double floor = 1e-300;
  Tensor gv = Tensor::zeros_like(v);
  ParameterSet gp = p.zeros_like();
  d.bits(p, v, floor, 0.7, &gv, &gp);
  auto loss = [&] {
    double s = 0.0;
    for (double b : d.bits(p, v, floor)) s += 0.7 * b;
    return s;
  };
  for (const auto& [name, i] : test::sample_entries(p, 4, rng)) {
    const double num = test::central_difference(loss, p.at(name).data[i], 1e-6);
    EXPECT_LT(test::relative_error(gp.at(name).data[i], num), 1e-4) << name << "[" << i << "]";
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double num = test::central_difference(loss, v.data[i], 1e-6);
    EXPECT_LT(test::relative_error(gv.data[i], num), 1e-4) << "v[" << i << "]";
  }
}

TEST(Factorized, BitsMatchLikelihoods) {
  const FactorizedDensity d("p", 2);
  ParameterSet p;
  d.initialize(p);
  Rng rng(10);
  const Tensor v = test::random_tensor(2, 2, 6, rng, 2.0);
  const Tensor lik = d.likelihood(p, v);
  const auto bits = d.bits(p, v, kLikelihoodFloor);
  for (std::size_t n = 0; n < 2; ++n) {
    double want = 0.0;
    for (double x : lik.item(n)) want -= std::log2(std::max(x, kLikelihoodFloor));
    EXPECT_NEAR(bits[n], want, 1e-9);
  }
}

TEST(CdfTables, UnitScaleZeroMassMatchesLikelihood) {
  const auto t = build_gaussian_cdf(1.0, {16, 8});
  const std::size_t zero = static_cast<std::size_t>(-t.offset);
  EXPECT_NEAR(t.frequency(zero) / 65536.0, 0.3829249, 1e-3);
  EXPECT_LE(t.min_value(), -3);
  EXPECT_GE(t.max_value(), 3);
}

TEST(CdfTables, SupportHoldsAllButTailMass) {
  const double tail = std::ldexp(1.0, -8);
  for (double sigma : {0.11, 0.5, 1.0, 4.0, 30.0, 256.0}) {
    const auto t = build_gaussian_cdf(sigma);
    t.validate();
    double inside = 0.0;
    for (int v = t.min_value(); v <= t.max_value(); ++v) inside += gaussian_box_likelihood(v, sigma);
    EXPECT_GE(inside, 1.0 - tail) << sigma;
    // One step narrower would not be enough.
    const double narrower = inside - 2.0 * gaussian_box_likelihood(t.max_value(), sigma);
    EXPECT_LT(narrower, 1.0 - tail) << sigma;
  }
}

TEST(CdfTables, DegenerateScaleStillStrictlyIncreasing) {
  for (int precision : {8, 12, 16}) {
    const auto t = build_gaussian_cdf(kSigmaMin, {precision, 8});
    EXPECT_NO_THROW(t.validate());
    for (std::size_t s = 0; s < t.symbol_count(); ++s) EXPECT_GE(t.frequency(s), 1u);
  }
}

TEST(CdfTables, PrecisionOutOfRangeIsAnError) {
  EXPECT_THROW(build_gaussian_cdf(1.0, {7, 8}), ArgumentError);
  EXPECT_THROW(build_gaussian_cdf(1.0, {17, 8}), ArgumentError);
  const std::vector<double> pmf = {0.5, 0.5};
  EXPECT_THROW(pmf_to_quantized_cdf(pmf, 20), ArgumentError);
}

TEST(CdfTables, QuantizedPmfTracksInput) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pmf(2 + rng.below(60));
    double total = 0.0;
    for (auto& p : pmf) total += (p = rng.uniform() * rng.uniform());
    const auto cdf = pmf_to_quantized_cdf(pmf, 16);
    ASSERT_EQ(cdf.size(), pmf.size() + 1);
    ASSERT_EQ(cdf.front(), 0u);
    ASSERT_EQ(cdf.back(), 65536u);
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      ASSERT_GT(cdf[i + 1], cdf[i]);
      EXPECT_NEAR((cdf[i + 1] - cdf[i]) / 65536.0, pmf[i] / total, 2e-3);
    }
  }
}

TEST(CdfTables, FactorizedTablesCoverQuantiles) {
  const Model m(ModelConfig::compact(8, 8, true), 3);
  const auto tables = build_factorized_cdfs(m.arch().hyper_prior, m.params());
  ASSERT_EQ(tables.size(), 2u);
  for (std::size_t ch = 0; ch < 2; ++ch) {
    tables[ch].validate();
    const auto [lo, hi] = m.arch().hyper_prior.quantiles(m.params(), ch, std::ldexp(1.0, -8));
    EXPECT_LE(tables[ch].min_value(), lo);
    EXPECT_GE(tables[ch].max_value(), hi);
  }
}

TEST(CdfTables, ScaleIndexPicksFirstEntryNotBelow) {
  const auto table = default_scale_table();
  ASSERT_EQ(table.size(), 64u);
  EXPECT_NEAR(table.front(), 0.11, 1e-12);
  EXPECT_NEAR(table.back(), 256.0, 1e-9);
  EXPECT_EQ(scale_index(table, 1e-6), 0u);
  EXPECT_EQ(scale_index(table, 1e6), 63u);
  for (std::size_t i = 1; i < table.size(); ++i) {
    EXPECT_EQ(scale_index(table, table[i]), i);
    EXPECT_EQ(scale_index(table, 0.5 * (table[i - 1] + table[i])), i);
  }
}

TEST(Rate, OneFrameOf480BitsIs16Kbps) {
  EXPECT_DOUBLE_EQ(kbps(480.0, 1), 16.0);
  RateReport r;
  r.num_frames = 1;
  r.coded_bits_y = 480;
  EXPECT_DOUBLE_EQ(r.coded_kbps(), 16.0);
}

TEST(Rate, HalfProbabilityIsOneBitEach) {
  const Tensor y(1, 4, 128, 0.5), z(1, 2, 32, 0.5);
  const auto r = rate_from_likelihoods(y, z, nullptr);
  EXPECT_DOUBLE_EQ(r.estimated_bits_y, 512.0);
  EXPECT_DOUBLE_EQ(r.estimated_bits_z, 64.0);
  EXPECT_EQ(r.estimated_bits_yr, 0.0);
}

TEST(Rate, InvalidLikelihoodIsAnError) {
  const Tensor bad(1, 1, 2, -0.1);
  EXPECT_THROW(code_length_bits(bad), NumericError);
  const Tensor zero(1, 1, 2, 0.0);
  EXPECT_DOUBLE_EQ(code_length_bits(zero), 30.0);  // floored at 2^-15
}

TEST(Rate, AdditiveAcrossFramesAndStreams) {
  const Model m(ModelConfig::compact(8, 8, true), 12);
  Rng rng(13);
  const Tensor x = test::random_tensor(3, 1, 512, rng, 0.2);
  const Tensor y = quantize(m.analyze(x));
  const Tensor z = quantize(m.hyper_analyze(y));
  const Tensor yr = quantize(m.residual_analyze(Tensor(3, 4, 128, 0.2)));
  const RateReport all = estimate_rate(m, y, z, &yr);
  RateReport sum;
  for (std::size_t i = 0; i < 3; ++i) {
    const Tensor yi = slice_batch(y, i, 1), zi = slice_batch(z, i, 1), ri = slice_batch(yr, i, 1);
    sum += estimate_rate(m, yi, zi, &ri);
  }
  EXPECT_NEAR(all.estimated_bits_y, sum.estimated_bits_y, 1e-9);
  EXPECT_NEAR(all.estimated_bits_z, sum.estimated_bits_z, 1e-9);
  EXPECT_NEAR(all.estimated_bits_yr, sum.estimated_bits_yr, 1e-9);
  EXPECT_EQ(all.num_frames, sum.num_frames);
  EXPECT_NEAR(all.estimated_bits(),
              all.estimated_bits_y + all.estimated_bits_z + all.estimated_bits_yr, 1e-12);
}

}  // namespace
}  // namespace ntwc
