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

#include "ntwc/coder/range_coder.hpp"
#include "ntwc/entropy/cdf_tables.hpp"
#include "ntwc/errors.hpp"
#include "test_util.hpp"

namespace ntwc {
namespace {

QuantizedCdf uniform_table(std::size_t symbols, int precision = 16, bool escape = false) {
  std::vector<double> pmf(symbols, 1.0);
  QuantizedCdf t;
  t.precision = precision;
  t.has_escape = escape;
  t.cdf = pmf_to_quantized_cdf(pmf, precision);
  return t;
}

QuantizedCdf random_table(Rng& rng) {
  const int precision = 8 + static_cast<int>(rng.below(9));
  const std::size_t max_symbols = std::min<std::size_t>(200, (1u << precision) / 2);
  std::vector<double> pmf(2 + rng.below(max_symbols - 1));
  for (auto& p : pmf) p = std::pow(rng.uniform(), 3.0);
  QuantizedCdf t;
  t.offset = static_cast<std::int32_t>(rng.below(21)) - 10;
  t.precision = precision;
  t.has_escape = rng.below(2) == 1 && pmf.size() >= 2;
  t.cdf = pmf_to_quantized_cdf(pmf, precision);
  return t;
}

SymbolStream random_stream(std::span<const QuantizedCdf> tables, std::size_t count, Rng& rng) {
  SymbolStream s;
  for (std::size_t i = 0; i < count; ++i) {
    const auto ti = static_cast<std::uint32_t>(rng.below(tables.size()));
    const auto& t = tables[ti];
    std::int32_t v;
    if (t.has_escape && rng.below(50) == 0) {
      v = static_cast<std::int32_t>(rng.below(65536)) - 32768;
    } else {
      // Draw from the table's own distribution.
      const auto target = static_cast<std::uint32_t>(rng.below(1u << t.precision));
      std::size_t sym = 0;
      while (t.cdf[sym + 1] <= target) ++sym;
      if (t.has_escape && sym + 1 == t.symbol_count()) sym = 0;
      v = t.offset + static_cast<std::int32_t>(sym);
    }
    s.values.push_back(v);
    s.table_index.push_back(ti);
  }
  return s;
}

TEST(RangeCoder, EmptyStreamRoundTrips) {
  const std::vector<QuantizedCdf> tables = {uniform_table(4)};
  const auto coded = encode_symbols({}, tables);
  EXPECT_LE(coded.payload.size(), 2u);
  EXPECT_TRUE(decode_symbols(coded, tables, {}).empty());
}

TEST(RangeCoder, UniformByteAlphabetCostsOneBytePerSymbol) {
  const std::vector<QuantizedCdf> tables = {uniform_table(256)};
  Rng rng(1);
  SymbolStream s;
  for (int i = 0; i < 1000; ++i) {
    s.values.push_back(static_cast<std::int32_t>(rng.below(256)));
    s.table_index.push_back(0);
  }
  const auto coded = encode_symbols(s, tables);
  EXPECT_GE(coded.payload.size(), 996u);
  EXPECT_LE(coded.payload.size(), 1004u);
  EXPECT_EQ(decode_symbols(coded, tables, s.table_index), s.values);
}

TEST(RangeCoder, RandomRoundTrips) {
  Rng rng(2);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<QuantizedCdf> tables;
    for (std::size_t i = 0; i < 1 + rng.below(4); ++i) tables.push_back(random_table(rng));
    const auto s = random_stream(tables, rng.below(60), rng);
    const auto coded = encode_symbols(s, tables);
    ASSERT_EQ(decode_symbols(coded, tables, s.table_index), s.values) << "trial " << trial;
  }
}

TEST(RangeCoder, LongStreamsAreNearOptimal) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<QuantizedCdf> tables;
    for (int i = 0; i < 3; ++i) tables.push_back(random_table(rng));
    const auto s = random_stream(tables, 5000, rng);
    const auto coded = encode_symbols(s, tables);
    const double ideal = ideal_code_length_bits(s, tables);
    EXPECT_LE(8.0 * coded.payload.size(), ideal * 1.02 + 32.0);
    ASSERT_EQ(decode_symbols(coded, tables, s.table_index), s.values);
  }
}

TEST(RangeCoder, TruncatedPayloadIsReported) {
  Rng rng(4);
  const std::vector<QuantizedCdf> tables = {build_gaussian_cdf(2.0)};
  for (int trial = 0; trial < 2000; ++trial) {
    const auto s = random_stream(tables, 1 + rng.below(300), rng);
    auto coded = encode_symbols(s, tables);
    coded.payload.pop_back();
    try {
      decode_symbols(coded, tables, s.table_index);
      FAIL() << "trial " << trial;
    } catch (const StreamError& e) {
      EXPECT_NE(std::string(e.what()).find("unexpected end of stream"), std::string::npos);
    }
  }
}

TEST(RangeCoder, TrailingBytesAreReported) {
  const std::vector<QuantizedCdf> tables = {uniform_table(16)};
  SymbolStream s{{1, 2, 3}, {0, 0, 0}};
  auto coded = encode_symbols(s, tables);
  coded.payload.push_back(0);
  try {
    decode_symbols(coded, tables, s.table_index);
    FAIL();
  } catch (const StreamError& e) {
    EXPECT_NE(std::string(e.what()).find("trailing bytes"), std::string::npos) << e.what();
  }
}

TEST(RangeCoder, OutOfSupportWithoutEscapeIsAnError) {
  const std::vector<QuantizedCdf> tables = {uniform_table(4)};
  EXPECT_THROW(encode_symbols({{4}, {0}}, tables), ArgumentError);
  EXPECT_THROW(encode_symbols({{0}, {1}}, tables), ArgumentError);
  const std::vector<QuantizedCdf> esc = {build_gaussian_cdf(1.0)};
  EXPECT_THROW(encode_symbols({{40000}, {0}}, esc), ArgumentError);
  EXPECT_NO_THROW(encode_symbols({{-32768}, {0}}, esc));
}

TEST(RangeCoder, InvalidTablesAreRejected) {
  QuantizedCdf t;
  t.precision = 8;
  t.has_escape = false;
  t.cdf = {0, 10, 10, 256};
  EXPECT_THROW(t.validate(), ArgumentError);
  t.cdf = {0, 10, 255};
  EXPECT_THROW(t.validate(), ArgumentError);
}

// Bytes produced by this coder for a fixed input; any platform must match.
TEST(RangeCoder, GoldenFixture) {
  std::vector<QuantizedCdf> tables = {build_gaussian_cdf(0.7), build_gaussian_cdf(3.0)};
  QuantizedCdf u;
  u.precision = 12;
  u.has_escape = false;
  u.cdf = {0, 100, 1000, 3000, 4096};
  tables.push_back(u);
  const std::vector<std::int32_t> values = {0, 1, 3, 0, 7, 2, 3, 0, 0, 1,
                                            2, 0, 300, -40, 0, 1, 3, 2, 0, 1};
  std::vector<std::uint32_t> index;
  for (int i = 0; i < 20; ++i) index.push_back(i % 3);
  const std::vector<std::uint8_t> golden = {0x98, 0x7c, 0x76, 0x6e, 0x2f, 0x52, 0xdd, 0x89, 0x4f,
                                            0x85, 0xed, 0x70, 0x8d, 0xa1, 0xb7, 0x54, 0x34, 0x00};
  const auto coded = encode_symbols({values, index}, tables);
  EXPECT_EQ(coded.payload, golden);
  EXPECT_EQ(decode_symbols({golden, values.size()}, tables, index), values);
}

}  // namespace
}  // namespace ntwc
