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

#include "ntwc/nn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <string_view>

#include "ntwc/dsp/wav.hpp"
#include "ntwc/errors.hpp"

namespace ntwc {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'N', 'T', 'W', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr std::string_view kFirstMoment = "adam.m/";
constexpr std::string_view kSecondMoment = "adam.v/";

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  void u16(std::uint16_t v) { uint(v, 2); }
  void u32(std::uint32_t v) { uint(v, 4); }
  void u64(std::uint64_t v) { uint(v, 8); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v), 8); }
  void uint(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : buf(b) {}
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos + n > buf.size()) throw FormatError("checkpoint truncated at offset " + std::to_string(pos));
    auto s = buf.subspan(pos, n);
    pos += n;
    return s;
  }
  std::uint64_t uint(int width) {
    auto s = take(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(s[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint(8)); }
  std::span<const std::uint8_t> buf;
  std::size_t pos = 0;
};

void write_tensor(Writer& w, const std::string& name, const Tensor& t) {
  w.u16(static_cast<std::uint16_t>(name.size()));
  w.bytes(name.data(), name.size());
  w.u32(static_cast<std::uint32_t>(t.n));
  w.u32(static_cast<std::uint32_t>(t.c));
  w.u32(static_cast<std::uint32_t>(t.t));
  for (double v : t.data) w.f64(v);
}

}  // namespace

std::string hash_to_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  json header = {{"config", json::parse(ckpt.model.config().to_json())},
                 {"content_hash", hash_to_hex(ckpt.model.content_hash())},
                 {"metadata", ckpt.metadata}};
  if (ckpt.training) {
    header["training"] = {{"step", ckpt.training->step}, {"rng", ckpt.training->rng_state}};
  }
  const std::string text = header.dump();
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u64(text.size());
  w.bytes(text.data(), text.size());
  std::uint32_t count = static_cast<std::uint32_t>(ckpt.model.params().size());
  if (ckpt.training) {
    count += static_cast<std::uint32_t>(ckpt.training->first_moment.size() +
                                        ckpt.training->second_moment.size());
  }
  w.u32(count);
  for (const auto& [name, t] : ckpt.model.params()) write_tensor(w, name, t);
  if (ckpt.training) {
    for (const auto& [name, t] : ckpt.training->first_moment) {
      write_tensor(w, std::string(kFirstMoment) + name, t);
    }
    for (const auto& [name, t] : ckpt.training->second_moment) {
      write_tensor(w, std::string(kSecondMoment) + name, t);
    }
  }
  return std::move(w.out);
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw FormatError("not a model checkpoint");
  const auto version = r.uint(4);
  if (version != kVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  const auto json_len = r.uint(8);
  const auto text = r.take(json_len);
  json header;
  try {
    header = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  }
  const auto cfg = ModelConfig::from_json(header.at("config").dump());

  ParameterSet params, first, second;
  const auto count = r.uint(4);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = r.uint(2);
    const auto name_bytes = r.take(name_len);
    std::string name(name_bytes.begin(), name_bytes.end());
    const auto n = r.uint(4), c = r.uint(4), t = r.uint(4);
    Tensor tensor(n, c, t);
    for (auto& v : tensor.data) v = r.f64();
    if (name.starts_with(kFirstMoment)) {
      first.add(name.substr(kFirstMoment.size()), std::move(tensor));
    } else if (name.starts_with(kSecondMoment)) {
      second.add(name.substr(kSecondMoment.size()), std::move(tensor));
    } else {
      params.add(name, std::move(tensor));
    }
  }
  if (r.pos != bytes.size()) throw FormatError("trailing bytes after checkpoint tensors");

  Checkpoint ckpt{Model(cfg, std::move(params)), header.value("metadata", json::object()),
                  std::nullopt};
  const std::string expected = header.at("content_hash").get<std::string>();
  if (hash_to_hex(ckpt.model.content_hash()) != expected) {
    throw FormatError("checkpoint content hash mismatch (file corrupted?)");
  }
  if (header.contains("training")) {
    TrainingState st;
    st.step = header["training"].at("step").get<std::uint64_t>();
    st.rng_state = header["training"].at("rng").get<std::string>();
    st.first_moment = std::move(first);
    st.second_moment = std::move(second);
    ckpt.training = std::move(st);
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  // Write-then-rename so an interrupted save never leaves a torn file.
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  write_file(tmp, serialize_checkpoint(ckpt));
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return parse_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace ntwc
