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

#include "ntwc/training/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ntwc/errors.hpp"

namespace ntwc {

namespace {

// Fixed-coefficient pink filter on white noise (about -3 dB per octave
// across the band).
class PinkNoise {
 public:
  double next(double white) {
    b_[0] = 0.99886 * b_[0] + white * 0.0555179;
    b_[1] = 0.99332 * b_[1] + white * 0.0750759;
    b_[2] = 0.96900 * b_[2] + white * 0.1538520;
    b_[3] = 0.86650 * b_[3] + white * 0.3104856;
    b_[4] = 0.55000 * b_[4] + white * 0.5329522;
    b_[5] = -0.7616 * b_[5] - white * 0.0168980;
    const double out = b_[0] + b_[1] + b_[2] + b_[3] + b_[4] + b_[5] + b_[6] + white * 0.5362;
    b_[6] = white * 0.115926;
    return out * 0.11;
  }

 private:
  double b_[7] = {};
};

}  // namespace

Waveform synthetic_utterance(Rng& rng, double seconds, int sample_rate) {
  if (!(seconds > 0.0)) throw ArgumentError("synthetic_utterance: duration must be positive");
  const auto length = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  const std::size_t tones = 2 + rng.below(4);
  struct Tone {
    double freq, phase, amp, env_rate, env_phase, env_depth;
  };
  std::vector<Tone> spec(tones);
  for (auto& t : spec) {
    t.freq = std::exp(rng.uniform(std::log(80.0), std::log(3500.0)));
    t.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    t.amp = rng.uniform(0.2, 1.0);
    t.env_rate = rng.uniform(0.5, 8.0);
    t.env_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    t.env_depth = rng.uniform(0.3, 1.0);
  }
  const double noise_level = rng.uniform(0.005, 0.05);
  PinkNoise pink;
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(length);
  double peak = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    const double time = static_cast<double>(i) / sample_rate;
    double s = 0.0;
    for (const auto& t : spec) {
      const double env =
          1.0 - t.env_depth * 0.5 *
                    (1.0 + std::sin(2.0 * std::numbers::pi * t.env_rate * time + t.env_phase));
      s += t.amp * env * std::sin(2.0 * std::numbers::pi * t.freq * time + t.phase);
    }
    w.samples[i] = s;
    peak = std::max(peak, std::abs(s));
  }
  const double gain = peak > 0.0 ? 0.5 / peak : 0.0;
  for (auto& s : w.samples) s = s * gain + noise_level * pink.next(rng.normal());
  for (auto& s : w.samples) s = std::clamp(s, -1.0, 32767.0 / 32768.0);
  return w;
}

std::vector<Utterance> synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.count == 0) throw ArgumentError("synthetic corpus: count must be positive");
  Rng rng(spec.seed);
  std::vector<Utterance> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    out.push_back({"synthetic_" + std::to_string(i), synthetic_utterance(rng, spec.seconds)});
  }
  return out;
}

bool is_synthetic_source(const std::string& source) {
  return source.rfind("synthetic:", 0) == 0;
}

SyntheticSpec parse_synthetic_source(const std::string& source) {
  if (!is_synthetic_source(source)) throw ArgumentError("not a synthetic source: " + source);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = source.find(':', start);
    parts.push_back(source.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() < 3 || parts.size() > 4) {
    throw ArgumentError("synthetic source must look like synthetic:<count>:<seed>[:<seconds>]");
  }
  SyntheticSpec spec;
  try {
    spec.count = std::stoull(parts[1]);
    spec.seed = std::stoull(parts[2]);
    if (parts.size() == 4) spec.seconds = std::stod(parts[3]);
  } catch (const std::exception&) {
    throw ArgumentError("malformed synthetic source: " + source);
  }
  if (spec.count == 0 || !(spec.seconds > 0.0)) {
    throw ArgumentError("synthetic source needs a positive count and duration");
  }
  return spec;
}

std::vector<Utterance> load_corpus(const std::string& source) {
  if (is_synthetic_source(source)) return synthetic_corpus(parse_synthetic_source(source));
  const std::filesystem::path dir(source);
  if (!std::filesystem::is_directory(dir)) throw IoError("corpus directory not found: " + source);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("corpus directory has no .wav files: " + source);
  std::vector<Utterance> out;
  for (const auto& f : files) out.push_back({f.filename().string(), load_pcm(f)});
  return out;
}

FrameSampler::FrameSampler(const std::vector<Utterance>& corpus, std::size_t frame_length)
    : frame_length_(frame_length) {
  for (const auto& u : corpus) {
    if (!u.audio.samples.empty()) sources_.push_back(&u.audio);
  }
  if (sources_.empty()) throw ArgumentError("training corpus is empty");
}

Tensor FrameSampler::sample(std::size_t batch, Rng& rng) const {
  Tensor out(batch, 1, frame_length_);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto& s = sources_[rng.below(sources_.size())]->samples;
    const std::size_t span = s.size() > frame_length_ ? s.size() - frame_length_ + 1 : 1;
    const std::size_t start = rng.below(span);
    auto row = out.row(b, 0);
    for (std::size_t t = 0; t < frame_length_ && start + t < s.size(); ++t) row[t] = s[start + t];
  }
  return out;
}

Tensor corpus_frames(const std::vector<Utterance>& corpus, FrameGeometry geometry) {
  std::vector<Tensor> parts;
  for (const auto& u : corpus) parts.push_back(frame_signal(u.audio, geometry).data);
  if (parts.empty()) throw ArgumentError("corpus is empty");
  return concat_batch(parts);
}

}  // namespace ntwc
