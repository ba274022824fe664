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
#include <optional>

#include "ntwc/dsp/wav.hpp"
#include "ntwc/nn/tensor.hpp"

namespace ntwc {

inline constexpr std::size_t kFrameLength = 512;
inline constexpr std::size_t kFrameOverlap = 32;

struct FrameGeometry {
  std::size_t frame_length = kFrameLength;
  std::size_t overlap = kFrameOverlap;

  std::size_t hop() const { return frame_length - overlap; }
  // Number of frames needed to cover `length` samples (at least one).
  std::size_t frame_count(std::size_t length) const;
};

struct FrameStack {
  Tensor data;  // (N x 1 x L)
  FrameGeometry geometry;
  std::size_t original_length = 0;
};

// Splits a waveform into overlapping frames; the tail is zero-padded.
FrameStack frame_signal(const Waveform& w, FrameGeometry geometry = {});

// Inverse of frame_signal. Overlapping regions are linearly crossfaded; the
// output is trimmed to `original_length` when given (else to the stack's own
// original_length, or the full padded span when that is zero).
Waveform overlap_add(const FrameStack& frames,
                     std::optional<std::size_t> original_length = std::nullopt);

}  // namespace ntwc
