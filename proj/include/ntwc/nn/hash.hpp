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

#include <cstdint>
#include <span>
#include <string_view>

namespace ntwc {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;

// 64-bit FNV-1a, chainable through `state`.
constexpr std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                                std::uint64_t state = kFnvOffset) {
  for (auto b : bytes) {
    state ^= b;
    state *= 0x100000001b3ull;
  }
  return state;
}

inline std::uint64_t fnv1a64(std::string_view text, std::uint64_t state = kFnvOffset) {
  for (char ch : text) {
    state ^= static_cast<std::uint8_t>(ch);
    state *= 0x100000001b3ull;
  }
  return state;
}

}  // namespace ntwc
