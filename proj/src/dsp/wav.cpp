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

#include "ntwc/dsp/wav.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "ntwc/errors.hpp"

namespace ntwc {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) |
         (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
         (static_cast<std::uint32_t>(b[pos + 2]) << 16) |
         (static_cast<std::uint32_t>(b[pos + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t pos, const char* tag) {
  return std::equal(tag, tag + 4, b.begin() + static_cast<std::ptrdiff_t>(pos));
}

}  // namespace

double normalize_sample(std::int16_t v) { return static_cast<double>(v) / 32768.0; }

std::int16_t denormalize_sample(double s) {
  const double scaled = std::round(s * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

Waveform parse_wav(std::span<const std::uint8_t> bytes, int expected_rate) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw FormatError("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16 || body + size > bytes.size()) throw FormatError("truncated fmt chunk");
      format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = read_u32(bytes, body + 4);
      bits = read_u16(bytes, body + 14);
      if (format == kFormatExtensible && size >= 26) {
        format = read_u16(bytes, body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) throw FormatError("data chunk precedes fmt chunk");
      if (format != kFormatPcm || bits != 16) {
        throw FormatError("unsupported encoding: expected 16-bit PCM (format " +
                          std::to_string(format) + ", " + std::to_string(bits) +
                          " bits)");
      }
      if (channels != 1 || static_cast<int>(rate) != expected_rate) {
        throw FormatError("expected " + std::to_string(expected_rate / 1000) +
                          " kHz mono, got " + std::to_string(rate) + " Hz with " +
                          std::to_string(channels) + " channel(s)");
      }
      // Tolerate writers that leave the data size unset or too large.
      const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      const std::size_t count = avail / 2;
      if (count == 0) throw FormatError("empty stream");
      Waveform w;
      w.sample_rate = static_cast<int>(rate);
      w.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        w.samples[i] = normalize_sample(static_cast<std::int16_t>(read_u16(bytes, body + 2 * i)));
      }
      return w;
    }
    pos = body + size + (size & 1u);
  }
  throw FormatError(have_fmt ? "empty stream" : "missing fmt chunk");
}

std::vector<std::uint8_t> serialize_wav(const Waveform& w) {
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (double s : w.samples) put_u16(out, static_cast<std::uint16_t>(denormalize_sample(s)));
  return out;
}

Waveform load_pcm(const std::filesystem::path& path, int expected_rate) {
  const auto bytes = read_file(path);
  try {
    return parse_wav(bytes, expected_rate);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_pcm(const std::filesystem::path& path, const Waveform& w) {
  write_file(path, serialize_wav(w));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace ntwc
