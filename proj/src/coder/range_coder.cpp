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

#include "ntwc/coder/range_coder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntwc/errors.hpp"

namespace ntwc {
namespace {

constexpr int kWindowBits = 56;
constexpr std::uint64_t kWindowMask = (1ull << kWindowBits) - 1;
constexpr std::uint64_t kTop = 1ull << 48;  // renormalize below this range
constexpr int kTopShift = kWindowBits - 8;
constexpr int kRawBits = 8;
// The decoder reads this many zero bytes past the payload end. The encoder
// always writes the sixth zero byte itself, so dropping the last byte of a
// payload leaves the decoder short of input instead of decoding other symbols.
constexpr std::size_t kImplicitZeros = 5;  // escape payload is sent as two raw bytes

void check_precision(int precision) {
  if (precision < 1 || precision > kMaxPrecision) {
    throw ArgumentError("range coder: precision " + std::to_string(precision) + " unsupported");
  }
}

}  // namespace

void RangeEncoder::shift_low() {
  if (low_ < (0xFFull << kTopShift) || low_ > kWindowMask) {
    const auto carry = static_cast<std::uint8_t>(low_ >> kWindowBits);
    if (has_cache_) out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
    for (; pending_ > 0; --pending_) out_.push_back(static_cast<std::uint8_t>(0xFF + carry));
    cache_ = static_cast<std::uint8_t>(low_ >> kTopShift);
    has_cache_ = true;
  } else {
    ++pending_;
  }
  low_ = (low_ << 8) & kWindowMask;
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq, int precision) {
  check_precision(precision);
  if (freq == 0 || static_cast<std::uint64_t>(cum) + freq > (1ull << precision)) {
    throw ArgumentError("range coder: invalid symbol interval");
  }
  const std::uint64_t r = range_ >> precision;
  low_ += r * cum;
  range_ = r * freq;
  while (range_ < kTop) {
    shift_low();
    range_ <<= 8;
  }
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  // Round low up to the next multiple of 2^48: it stays inside the final
  // interval (range >= 2^48) and only its top window byte is non-zero.
  low_ = (low_ + kTop - 1) & ~(kTop - 1);
  shift_low();
  shift_low();  // flushes the cache and pending run; the new cache byte is zero
  shift_low();  // writes that zero byte
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> payload) : payload_(payload) {
  for (int i = 0; i < kWindowBits / 8; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  const std::size_t p = pos_++;
  if (p < payload_.size()) return payload_[p];
  if (p >= payload_.size() + kImplicitZeros) throw StreamError("unexpected end of stream");
  return 0;
}

std::uint32_t RangeDecoder::peek(int precision) {
  check_precision(precision);
  scaled_ = range_ >> precision;
  const std::uint64_t target = code_ / scaled_;
  if (target >= (1ull << precision)) throw StreamError("corrupt stream: code outside range");
  return static_cast<std::uint32_t>(target);
}

void RangeDecoder::consume(std::uint32_t cum, std::uint32_t freq, int precision) {
  const std::uint64_t r = range_ >> precision;
  code_ -= r * cum;
  low_ = (low_ + r * cum) & kWindowMask;
  range_ = r * freq;
  while (range_ < kTop) {
    code_ = ((code_ << 8) | next_byte()) & kWindowMask;
    low_ = (low_ << 8) & kWindowMask;
    range_ <<= 8;
  }
}

void RangeDecoder::finish() const {
  const std::size_t expected = payload_.size() + kImplicitZeros;
  if (pos_ > expected) throw StreamError("unexpected end of stream");
  if (pos_ < expected) throw StreamError("trailing bytes after stream");
  // The encoder rounds low up to a multiple of 2^48, so the remaining code
  // must be exactly that distance.
  if (code_ != ((kTop - (low_ & (kTop - 1))) & (kTop - 1))) {
    throw StreamError("corrupt stream: bad termination");
  }
}

namespace {

const QuantizedCdf& table_for(std::span<const QuantizedCdf> tables, std::uint32_t index) {
  if (index >= tables.size()) {
    throw ArgumentError("symbol refers to table " + std::to_string(index) + " of " +
                        std::to_string(tables.size()));
  }
  return tables[index];
}

std::size_t find_symbol(const QuantizedCdf& t, std::uint32_t target) {
  // Last i with cdf[i] <= target.
  auto it = std::upper_bound(t.cdf.begin(), t.cdf.end(), target);
  return static_cast<std::size_t>(it - t.cdf.begin()) - 1;
}

}  // namespace

CodedBytes encode_symbols(const SymbolStream& stream, std::span<const QuantizedCdf> tables) {
  if (stream.values.size() != stream.table_index.size()) {
    throw ArgumentError("symbol stream: values and table indices differ in length");
  }
  for (const auto& t : tables) t.validate();
  RangeEncoder enc;
  for (std::size_t i = 0; i < stream.values.size(); ++i) {
    const auto& t = table_for(tables, stream.table_index[i]);
    const std::int32_t v = stream.values[i];
    if (v >= t.min_value() && v <= t.max_value()) {
      const auto s = static_cast<std::size_t>(v - t.offset);
      enc.encode(t.cdf[s], t.frequency(s), t.precision);
      continue;
    }
    if (!t.has_escape) {
      throw ArgumentError("value " + std::to_string(v) + " outside table support and no escape");
    }
    if (v < INT16_MIN || v > INT16_MAX) {
      throw ArgumentError("value " + std::to_string(v) + " exceeds the 16-bit escape range");
    }
    const std::size_t esc = t.symbol_count() - 1;
    enc.encode(t.cdf[esc], t.frequency(esc), t.precision);
    const auto raw = static_cast<std::uint16_t>(static_cast<std::int16_t>(v));
    enc.encode(raw >> 8, 1, kRawBits);
    enc.encode(raw & 0xFF, 1, kRawBits);
  }
  return {enc.finish(), stream.values.size()};
}

std::vector<std::int32_t> decode_symbols(const CodedBytes& coded,
                                         std::span<const QuantizedCdf> tables,
                                         std::span<const std::uint32_t> table_index) {
  if (coded.symbol_count != table_index.size()) {
    throw ArgumentError("decode: symbol count does not match table index list");
  }
  for (const auto& t : tables) t.validate();
  RangeDecoder dec(coded.payload);
  std::vector<std::int32_t> out(table_index.size());
  for (std::size_t i = 0; i < table_index.size(); ++i) {
    const auto& t = table_for(tables, table_index[i]);
    const std::size_t s = find_symbol(t, dec.peek(t.precision));
    dec.consume(t.cdf[s], t.frequency(s), t.precision);
    if (t.has_escape && s + 1 == t.symbol_count()) {
      const std::uint32_t hi = dec.peek(kRawBits);
      dec.consume(hi, 1, kRawBits);
      const std::uint32_t lo = dec.peek(kRawBits);
      dec.consume(lo, 1, kRawBits);
      out[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>((hi << 8) | lo));
    } else {
      out[i] = t.offset + static_cast<std::int32_t>(s);
    }
  }
  dec.finish();
  return out;
}

double ideal_code_length_bits(const SymbolStream& stream, std::span<const QuantizedCdf> tables) {
  double bits = 0.0;
  for (std::size_t i = 0; i < stream.values.size(); ++i) {
    const auto& t = table_for(tables, stream.table_index[i]);
    const std::int32_t v = stream.values[i];
    std::size_t s;
    if (v >= t.min_value() && v <= t.max_value()) {
      s = static_cast<std::size_t>(v - t.offset);
    } else {
      s = t.symbol_count() - 1;
      bits += 2 * kRawBits;
    }
    bits -= std::log2(static_cast<double>(t.frequency(s)) / static_cast<double>(1u << t.precision));
  }
  return bits;
}

}  // namespace ntwc
