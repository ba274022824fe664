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

#include "ntwc/codec/codec.hpp"

#include <string>

#include "ntwc/coder/range_coder.hpp"
#include "ntwc/dsp/framing.hpp"
#include "ntwc/entropy/quantize.hpp"
#include "ntwc/errors.hpp"
#include "ntwc/nn/checkpoint.hpp"

namespace ntwc {

namespace {

std::vector<std::int32_t> to_ints(std::span<const double> v) {
  std::vector<std::int32_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::int32_t>(v[i]);
  return out;
}

Tensor to_tensor(std::span<const std::int32_t> v, std::size_t c, std::size_t t) {
  Tensor out(1, c, t);
  for (std::size_t i = 0; i < v.size(); ++i) out.data[i] = v[i];
  return out;
}

// Table index per element: the channel, for factorized densities.
std::vector<std::uint32_t> channel_index(std::size_t c, std::size_t t) {
  std::vector<std::uint32_t> idx(c * t);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i / t);
  return idx;
}

std::vector<std::uint32_t> scale_indices(std::span<const double> scales, std::span<const double> sigma) {
  std::vector<std::uint32_t> idx(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    idx[i] = static_cast<std::uint32_t>(scale_index(scales, sigma[i]));
  }
  return idx;
}

void append(std::vector<std::int32_t>& dst, const std::vector<std::int32_t>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

Codec::Codec(const Model& model, CdfOptions options)
    : model_(model), options_(options), scales_(default_scale_table()) {
  options_.validate();
  gaussian_tables_.reserve(scales_.size());
  for (double s : scales_) gaussian_tables_.push_back(build_gaussian_cdf(s, options_));
  const auto& arch = model_.arch();
  z_tables_ = build_factorized_cdfs(arch.hyper_prior, model_.params(), options_);
  if (model_.has_residual()) {
    yr_tables_ = build_factorized_cdfs(arch.residual_prior, model_.params(), options_);
  }
}

EncodeResult Codec::encode(const Waveform& audio) const {
  const auto& cfg = model_.config();
  if (audio.sample_rate != kSampleRate) {
    throw FormatError("expected 16 kHz audio, got " + std::to_string(audio.sample_rate) + " Hz");
  }
  const FrameGeometry geometry{cfg.frame_length, cfg.overlap};
  const FrameStack frames = frame_signal(audio, geometry);
  const std::size_t n_frames = frames.data.n;

  const Tensor y = model_.analyze(frames.data);
  const Tensor z = model_.hyper_analyze(y);
  const Tensor zbar = quantize(z);
  const Tensor sigma = model_.hyper_synthesize(zbar);
  const Tensor ybar = quantize(y);
  Tensor yrbar;
  if (model_.has_residual()) {
    Tensor r = y;
    for (std::size_t i = 0; i < r.size(); ++i) r.data[i] -= ybar.data[i];
    yrbar = quantize(model_.residual_analyze(r));
  }

  EncodeResult res;
  auto& h = res.container.header;
  h.flags = model_.has_residual() ? kFlagResidual : 0;
  h.model_hash = model_.content_hash();
  h.sample_rate = static_cast<std::uint32_t>(audio.sample_rate);
  h.frame_length = static_cast<std::uint16_t>(cfg.frame_length);
  h.overlap = static_cast<std::uint16_t>(cfg.overlap);
  h.num_frames = static_cast<std::uint32_t>(n_frames);
  h.original_length = audio.samples.size();
  h.precision = static_cast<std::uint8_t>(options_.precision);
  h.tail_exponent = static_cast<std::uint8_t>(options_.tail_exponent);

  const auto z_index = channel_index(zbar.c, zbar.t);
  const auto yr_index = model_.has_residual() ? channel_index(yrbar.c, yrbar.t)
                                              : std::vector<std::uint32_t>{};
  for (std::size_t n = 0; n < n_frames; ++n) {
    FramePacket p;
    const auto zv = to_ints(zbar.item(n));
    p.z = encode_symbols({zv, z_index}, z_tables_).payload;
    const auto yv = to_ints(ybar.item(n));
    p.y = encode_symbols({yv, scale_indices(scales_, sigma.item(n))}, gaussian_tables_).payload;
    append(res.codes.z, zv);
    append(res.codes.y, yv);
    if (model_.has_residual()) {
      const auto rv = to_ints(yrbar.item(n));
      p.yr = encode_symbols({rv, yr_index}, yr_tables_).payload;
      append(res.codes.yr, rv);
    }
    res.container.frames.push_back(std::move(p));
  }

  res.rate = estimate_rate(model_, ybar, zbar, model_.has_residual() ? &yrbar : nullptr);
  res.rate.coded_bits_z = res.container.payload_bits_z();
  res.rate.coded_bits_y = res.container.payload_bits_y();
  res.rate.coded_bits_yr = res.container.payload_bits_yr();
  return res;
}

DecodeResult Codec::decode(const Container& container) const {
  const auto& h = container.header;
  const auto& cfg = model_.config();
  if (h.model_hash != model_.content_hash()) {
    throw ModelMismatchError("model/bitstream mismatch: container was written with model " +
                             hash_to_hex(h.model_hash) + ", loaded model is " +
                             hash_to_hex(model_.content_hash()));
  }
  if (h.frame_length != cfg.frame_length || h.overlap != cfg.overlap ||
      h.residual() != model_.has_residual() || h.sample_rate != kSampleRate) {
    throw ModelMismatchError("model/bitstream mismatch: container geometry differs from the model");
  }
  if (h.precision != options_.precision || h.tail_exponent != options_.tail_exponent) {
    return Codec(model_, CdfOptions{h.precision, h.tail_exponent}).decode(container);
  }
  if (container.frames.size() != h.num_frames) {
    throw FormatError("container holds " + std::to_string(container.frames.size()) +
                      " packets, header says " + std::to_string(h.num_frames));
  }

  const std::size_t yc = cfg.latent_channels(), yt = cfg.latent_length();
  const std::size_t zc = cfg.hyper.out_channels, zt = cfg.hyper_length();
  const std::size_t rc = cfg.residual_code;
  const auto z_index = channel_index(zc, zt);
  const auto yr_index = channel_index(rc, yt);

  DecodeResult out;
  FrameStack frames;
  frames.geometry = {cfg.frame_length, cfg.overlap};
  frames.original_length = h.original_length;
  std::vector<Tensor> decoded;
  decoded.reserve(h.num_frames);
  for (std::size_t n = 0; n < h.num_frames; ++n) {
    const auto& p = container.frames[n];
    auto positioned = [&](const char* stream, auto&& fn) {
      try {
        return fn();
      } catch (const StreamError& e) {
        throw StreamError(std::string(e.what()) + " (frame " + std::to_string(n) + ", " + stream +
                          " stream)");
      }
    };
    const auto zv = positioned("z", [&] {
      return decode_symbols({p.z, z_index.size()}, z_tables_, z_index);
    });
    const Tensor sigma = model_.hyper_synthesize(to_tensor(zv, zc, zt));
    const auto y_index = scale_indices(scales_, sigma.item(0));
    const auto yv = positioned("y", [&] {
      return decode_symbols({p.y, y_index.size()}, gaussian_tables_, y_index);
    });
    Tensor ybar = to_tensor(yv, yc, yt);
    append(out.codes.z, zv);
    append(out.codes.y, yv);
    Tensor xhat;
    if (h.residual()) {
      const auto rv = positioned("y_r", [&] {
        return decode_symbols({p.yr, yr_index.size()}, yr_tables_, yr_index);
      });
      append(out.codes.yr, rv);
      const Tensor rhat = model_.residual_synthesize(to_tensor(rv, rc, yt));
      xhat = model_.synthesize(ybar, &rhat);
    } else {
      xhat = model_.synthesize(ybar);
    }
    decoded.push_back(std::move(xhat));
  }
  frames.data = concat_batch(decoded);
  out.audio = overlap_add(frames, h.original_length);
  out.audio.sample_rate = static_cast<int>(h.sample_rate);
  return out;
}

RateReport encode_file(const std::filesystem::path& wav, const std::filesystem::path& checkpoint,
                       const std::filesystem::path& out) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const Codec codec(ck.model);
  const auto res = codec.encode(load_pcm(wav));
  write_container(out, res.container);
  return res.rate;
}

Waveform decode_file(const std::filesystem::path& container,
                     const std::filesystem::path& checkpoint, const std::filesystem::path& out) {
  const Container c = read_container(container);
  const Checkpoint ck = load_checkpoint(checkpoint);
  const Codec codec(ck.model);
  auto res = codec.decode(c);
  save_pcm(out, res.audio);
  return std::move(res.audio);
}

}  // namespace ntwc
