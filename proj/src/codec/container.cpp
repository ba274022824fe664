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

#include "ntwc/codec/container.hpp"

#include <string>

#include "ntwc/dsp/framing.hpp"
#include "ntwc/dsp/wav.hpp"
#include "ntwc/entropy/rate.hpp"
#include "ntwc/errors.hpp"

namespace ntwc {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get(std::span<const std::uint8_t> b, std::size_t& pos) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(b[pos + i]) << (8 * i));
  pos += sizeof(T);
  return v;
}

std::uint64_t bits_of(const std::vector<FramePacket>& frames,
                      std::vector<std::uint8_t> FramePacket::*field) {
  std::uint64_t n = 0;
  for (const auto& f : frames) n += (f.*field).size();
  return 8 * n;
}

}  // namespace

std::uint64_t Container::payload_bits_z() const { return bits_of(frames, &FramePacket::z); }
std::uint64_t Container::payload_bits_y() const { return bits_of(frames, &FramePacket::y); }
std::uint64_t Container::payload_bits_yr() const { return bits_of(frames, &FramePacket::yr); }

double Container::kbps() const {
  return ntwc::kbps(static_cast<double>(payload_bits()), header.num_frames, header.hop(),
                    static_cast<int>(header.sample_rate));
}

std::vector<std::uint8_t> write_header(const ContainerHeader& h) {
  std::vector<std::uint8_t> out(kContainerMagic.begin(), kContainerMagic.end());
  put(out, h.version);
  put(out, h.flags);
  put(out, h.model_hash);
  put(out, h.sample_rate);
  put(out, h.frame_length);
  put(out, h.overlap);
  put(out, h.num_frames);
  put(out, h.original_length);
  put(out, h.precision);
  put(out, h.tail_exponent);
  return out;
}

ContainerHeader read_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < ContainerHeader::kSize) {
    throw FormatError("container truncated in header (" + std::to_string(bytes.size()) +
                      " of " + std::to_string(ContainerHeader::kSize) + " bytes)");
  }
  for (std::size_t i = 0; i < kContainerMagic.size(); ++i) {
    if (bytes[i] != kContainerMagic[i]) throw FormatError("not an NTWC container (bad magic)");
  }
  std::size_t pos = 4;
  ContainerHeader h;
  h.version = get<std::uint8_t>(bytes, pos);
  h.flags = get<std::uint8_t>(bytes, pos);
  h.model_hash = get<std::uint64_t>(bytes, pos);
  h.sample_rate = get<std::uint32_t>(bytes, pos);
  h.frame_length = get<std::uint16_t>(bytes, pos);
  h.overlap = get<std::uint16_t>(bytes, pos);
  h.num_frames = get<std::uint32_t>(bytes, pos);
  h.original_length = get<std::uint64_t>(bytes, pos);
  h.precision = get<std::uint8_t>(bytes, pos);
  h.tail_exponent = get<std::uint8_t>(bytes, pos);
  if (h.version != kContainerVersion) {
    throw FormatError("unsupported container version " + std::to_string(h.version));
  }
  if ((h.flags & ~kFlagResidual) != 0) throw FormatError("unknown container flags");
  if (h.sample_rate == 0) throw FormatError("container sample rate is zero");
  if (h.frame_length <= h.overlap || 2u * h.overlap > h.frame_length) {
    throw FormatError("container frame geometry is invalid");
  }
  if (h.precision < 8 || h.precision > 16) throw FormatError("container coder precision out of range");
  if (h.tail_exponent < 1 || h.tail_exponent > 24) throw FormatError("container tail exponent out of range");
  const FrameGeometry g{h.frame_length, h.overlap};
  if (h.num_frames != g.frame_count(h.original_length)) {
    throw FormatError("container frame count does not match its original length");
  }
  return h;
}

void write_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t read_varint(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  const std::size_t start = pos;
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= bytes.size()) {
      throw FormatError("truncated varint at byte offset " + std::to_string(start));
    }
    const std::uint8_t b = bytes[pos++];
    if (shift == 63 && (b & 0xfe) != 0) break;
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if ((b & 0x80) == 0) {
      if (b == 0 && shift > 0) break;  // over-long encoding
      return v;
    }
  }
  throw FormatError("malformed varint at byte offset " + std::to_string(start));
}

std::vector<std::uint8_t> serialize_container(const Container& c) {
  if (c.frames.size() != c.header.num_frames) {
    throw FormatError("container has " + std::to_string(c.frames.size()) +
                      " packets but the header says " + std::to_string(c.header.num_frames));
  }
  auto out = write_header(c.header);
  for (const auto& f : c.frames) {
    if (!c.header.residual() && !f.yr.empty()) {
      throw FormatError("y_r payload present without the residual flag");
    }
    write_varint(out, f.z.size());
    write_varint(out, f.y.size());
    write_varint(out, f.yr.size());
    out.insert(out.end(), f.z.begin(), f.z.end());
    out.insert(out.end(), f.y.begin(), f.y.end());
    out.insert(out.end(), f.yr.begin(), f.yr.end());
  }
  return out;
}

Container parse_container(std::span<const std::uint8_t> bytes) {
  Container c;
  c.header = read_header(bytes);
  std::size_t pos = ContainerHeader::kSize;
  c.frames.reserve(c.header.num_frames);
  for (std::uint32_t i = 0; i < c.header.num_frames; ++i) {
    const std::size_t packet_start = pos;
    std::uint64_t len[3];
    for (auto& l : len) l = read_varint(bytes, pos);
    const std::uint64_t body = len[0] + len[1] + len[2];
    if (len[0] > bytes.size() || len[1] > bytes.size() || len[2] > bytes.size() ||
        body > bytes.size() - pos) {
      throw FormatError("truncated packet for frame " + std::to_string(i) + " at byte offset " +
                        std::to_string(packet_start));
    }
    if (c.header.residual() && len[2] == 0) {
      throw FormatError("residual flag set but frame " + std::to_string(i) +
                        " has an empty y_r payload");
    }
    if (!c.header.residual() && len[2] != 0) {
      throw FormatError("frame " + std::to_string(i) + " carries y_r data without the residual flag");
    }
    FramePacket f;
    std::vector<std::uint8_t>* dst[3] = {&f.z, &f.y, &f.yr};
    for (int s = 0; s < 3; ++s) {
      dst[s]->assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                     bytes.begin() + static_cast<std::ptrdiff_t>(pos + len[s]));
      pos += len[s];
    }
    c.frames.push_back(std::move(f));
  }
  if (pos != bytes.size()) {
    throw FormatError("trailing data after the last packet at byte offset " + std::to_string(pos));
  }
  return c;
}

void write_container(const std::filesystem::path& path, const Container& c) {
  write_file(path, serialize_container(c));
}

Container read_container(const std::filesystem::path& path) {
  return parse_container(read_file(path));
}

}  // namespace ntwc
