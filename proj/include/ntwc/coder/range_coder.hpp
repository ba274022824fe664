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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ntwc/coder/quantized_cdf.hpp"

namespace ntwc {

// Range coder over a 56-bit window held in 64-bit integers. Renormalization
// is byte-wise and carries are resolved with a cached byte plus a run of
// pending 0xFF bytes. Only integer arithmetic is used, so the byte stream is
// identical on every platform.
//
// Stream layout: if the encoder performed S renormalization shifts, the
// payload is exactly S + 1 bytes. The decoder reads 7 bytes up front and one
// per shift, so after the last symbol it must have read exactly 6 bytes past
// the end; any other count means the payload was cut or padded.
class RangeEncoder {
 public:
  // Encodes the sub-interval [cum, cum + freq) of [0, 2^precision).
  void encode(std::uint32_t cum, std::uint32_t freq, int precision);
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint64_t range_ = (1ull << 56) - 1;
  std::uint8_t cache_ = 0;
  bool has_cache_ = false;
  std::uint64_t pending_ = 0;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> payload);

  // Returns the scaled target in [0, 2^precision); the caller maps it to a
  // symbol and must then call consume() with that symbol's interval.
  std::uint32_t peek(int precision);
  void consume(std::uint32_t cum, std::uint32_t freq, int precision);
  // Verifies that the payload was consumed exactly and ends with the
  // encoder's flush value.
  void finish() const;

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> payload_;
  std::size_t pos_ = 0;
  std::uint64_t code_ = 0;
  std::uint64_t low_ = 0;  // encoder's low, mod 2^56, for the termination check
  std::uint64_t range_ = (1ull << 56) - 1;
  std::uint64_t scaled_ = 0;
};

// A sequence of integer values, each to be coded with the table at the
// matching index of a table list.
struct SymbolStream {
  std::vector<std::int32_t> values;
  std::vector<std::uint32_t> table_index;
};

struct CodedBytes {
  std::vector<std::uint8_t> payload;
  std::size_t symbol_count = 0;
};

// Values outside a table's support are sent as the escape symbol followed by
// the value as a raw 16-bit two's-complement word.
CodedBytes encode_symbols(const SymbolStream& stream, std::span<const QuantizedCdf> tables);
std::vector<std::int32_t> decode_symbols(const CodedBytes& coded,
                                         std::span<const QuantizedCdf> tables,
                                         std::span<const std::uint32_t> table_index);

// Sum of -log2(freq / 2^precision) over the symbols the encoder would emit,
// including escape symbols and raw words.
double ideal_code_length_bits(const SymbolStream& stream, std::span<const QuantizedCdf> tables);

}  // namespace ntwc
