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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ntwc {

inline constexpr std::array<std::uint8_t, 4> kContainerMagic = {'N', 'T', 'W', 'C'};
inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::uint8_t kFlagResidual = 0x01;

// Fixed 36-byte little-endian header:
//   magic[4] version:u8 flags:u8 model_hash:u64 sample_rate:u32
//   frame_length:u16 overlap:u16 num_frames:u32 original_length:u64
//   precision:u8 tail_exponent:u8
struct ContainerHeader {
  static constexpr std::size_t kSize = 36;

  std::uint8_t version = kContainerVersion;
  std::uint8_t flags = 0;
  std::uint64_t model_hash = 0;
  std::uint32_t sample_rate = 16000;
  std::uint16_t frame_length = 512;
  std::uint16_t overlap = 32;
  std::uint32_t num_frames = 0;
  std::uint64_t original_length = 0;
  std::uint8_t precision = 16;
  std::uint8_t tail_exponent = 8;

  bool residual() const { return (flags & kFlagResidual) != 0; }
  std::size_t hop() const { return frame_length - overlap; }
  double duration_seconds() const {
    return static_cast<double>(num_frames) * static_cast<double>(hop()) / sample_rate;
  }
  bool operator==(const ContainerHeader&) const = default;
};

// One frame: varint lengths of the z, y and y_r payloads, then the payloads.
struct FramePacket {
  std::vector<std::uint8_t> z, y, yr;
  bool operator==(const FramePacket&) const = default;
};

struct Container {
  ContainerHeader header;
  std::vector<FramePacket> frames;

  std::uint64_t payload_bits_z() const;
  std::uint64_t payload_bits_y() const;
  std::uint64_t payload_bits_yr() const;
  // Entropy-coded bits only; header and length prefixes are excluded.
  std::uint64_t payload_bits() const { return payload_bits_z() + payload_bits_y() + payload_bits_yr(); }
  double kbps() const;
  bool operator==(const Container&) const = default;
};

std::vector<std::uint8_t> write_header(const ContainerHeader& h);
// Throws FormatError for bad magic, unknown version or flags, or
// inconsistent geometry.
ContainerHeader read_header(std::span<const std::uint8_t> bytes);

// Unsigned LEB128.
void write_varint(std::vector<std::uint8_t>& out, std::uint64_t v);
// Advances `pos`; throws FormatError naming the byte offset on truncation or
// an over-long encoding.
std::uint64_t read_varint(std::span<const std::uint8_t> bytes, std::size_t& pos);

std::vector<std::uint8_t> serialize_container(const Container& c);
Container parse_container(std::span<const std::uint8_t> bytes);

void write_container(const std::filesystem::path& path, const Container& c);
Container read_container(const std::filesystem::path& path);

}  // namespace ntwc
