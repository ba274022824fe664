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

#include "ntwc/dsp/framing.hpp"

#include <algorithm>

#include "ntwc/errors.hpp"

namespace ntwc {

std::size_t FrameGeometry::frame_count(std::size_t length) const {
  if (frame_length <= overlap) {
    throw ArgumentError("frame length must exceed overlap");
  }
  if (length <= overlap) return 1;
  const std::size_t h = hop();
  return (length - overlap + h - 1) / h;
}

FrameStack frame_signal(const Waveform& w, FrameGeometry geometry) {
  const std::size_t count = geometry.frame_count(w.samples.size());
  const std::size_t hop = geometry.hop();
  FrameStack out{Tensor(count, 1, geometry.frame_length), geometry, w.samples.size()};
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * hop;
    if (start >= w.samples.size()) break;
    const std::size_t n = std::min(geometry.frame_length, w.samples.size() - start);
    std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(start), n,
                out.data.row(i, 0).begin());
  }
  return out;
}

Waveform overlap_add(const FrameStack& frames, std::optional<std::size_t> original_length) {
  const auto& g = frames.geometry;
  if (g.frame_length <= g.overlap) throw ArgumentError("frame length must exceed overlap");
  if (2 * g.overlap > g.frame_length) {
    throw ArgumentError("overlap_add: overlap may not exceed half the frame length");
  }
  if (frames.data.c != 1 || frames.data.t != g.frame_length) {
    throw ArgumentError("overlap_add: frame tensor " + frames.data.shape_string() +
                        " does not match geometry");
  }
  const std::size_t count = frames.data.n;
  const std::size_t hop = g.hop();
  const std::size_t padded = count == 0 ? 0 : (count - 1) * hop + g.frame_length;
  Waveform out;
  out.samples.assign(padded, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto frame = frames.data.row(i, 0);
    const std::size_t start = i * hop;
    for (std::size_t k = 0; k < g.frame_length; ++k) {
      double weight = 1.0;
      // Fade in over the region shared with the previous frame, fade out over
      // the region shared with the next one. The two ramps sum to one.
      if (i > 0 && k < g.overlap) {
        weight = static_cast<double>(k + 1) / static_cast<double>(g.overlap + 1);
      } else if (i + 1 < count && k >= hop) {
        weight = 1.0 - static_cast<double>(k - hop + 1) / static_cast<double>(g.overlap + 1);
      }
      out.samples[start + k] += weight * frame[k];
    }
  }
  std::size_t keep = original_length.value_or(frames.original_length);
  if (keep == 0 && !original_length) keep = padded;
  out.samples.resize(std::min(keep, padded));
  return out;
}

}  // namespace ntwc
