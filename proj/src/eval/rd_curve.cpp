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

#include "ntwc/eval/rd_curve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <thread>

#include "ntwc/codec/codec.hpp"
#include "ntwc/errors.hpp"

namespace ntwc {

namespace {

struct UtteranceStats {
  std::uint64_t bits_y = 0, bits_z = 0, bits_yr = 0;
  double estimated_bits = 0.0;
  std::size_t frames = 0;
  double signal = 0.0, noise = 0.0;
  std::size_t samples = 0;
  double mcd = 0.0;
};

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

RdPoint evaluate_model(const Checkpoint& checkpoint, const std::string& name,
                       const std::vector<Utterance>& corpus, std::size_t threads) {
  if (corpus.empty()) throw ArgumentError("evaluation corpus is empty");
  const Codec codec(checkpoint.model);
  const MelAnalyzer mel;
  std::vector<UtteranceStats> stats(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const auto& ref = corpus[i].audio;
    const auto enc = codec.encode(ref);
    const auto dec = codec.decode(enc.container);
    auto& s = stats[i];
    s.bits_y = enc.rate.coded_bits_y;
    s.bits_z = enc.rate.coded_bits_z;
    s.bits_yr = enc.rate.coded_bits_yr;
    s.estimated_bits = enc.rate.estimated_bits();
    s.frames = enc.rate.num_frames;
    s.samples = ref.samples.size();
    for (std::size_t t = 0; t < ref.samples.size(); ++t) {
      const double e = ref.samples[t] - dec.audio.samples[t];
      s.signal += ref.samples[t] * ref.samples[t];
      s.noise += e * e;
    }
    s.mcd = mel_cepstral_distortion(ref, dec.audio, mel);
  });

  RdPoint p;
  p.model = name;
  if (checkpoint.metadata.is_object()) p.lambda_mse = checkpoint.metadata.value("lambda_mse", 0.0);
  p.residual = checkpoint.model.has_residual();
  std::uint64_t by = 0, bz = 0, byr = 0;
  double est = 0.0, signal = 0.0, noise = 0.0, mcd = 0.0;
  std::size_t samples = 0;
  for (const auto& s : stats) {
    by += s.bits_y;
    bz += s.bits_z;
    byr += s.bits_yr;
    est += s.estimated_bits;
    p.frames += s.frames;
    signal += s.signal;
    noise += s.noise;
    samples += s.samples;
    mcd += s.mcd;
  }
  const auto& cfg = checkpoint.model.config();
  const std::size_t hop = cfg.frame_length - cfg.overlap;
  const double total = static_cast<double>(by + bz + byr);
  p.seconds = static_cast<double>(p.frames * hop) / kSampleRate;
  p.kbps = kbps(total, p.frames, hop);
  p.estimated_kbps = kbps(est, p.frames, hop);
  p.snr_db = noise > 0.0 ? std::min(kSnrCapDb, 10.0 * std::log10(signal / noise)) : kSnrCapDb;
  p.mcd = mcd / static_cast<double>(stats.size());
  p.mse = samples ? noise / static_cast<double>(samples) : 0.0;
  if (total > 0.0) {
    p.shares.y = static_cast<double>(by) / total;
    p.shares.z = static_cast<double>(bz) / total;
    p.shares.yr = static_cast<double>(byr) / total;
  }
  return p;
}

std::vector<std::filesystem::path> list_checkpoints(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("model directory not found: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ntwm") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("no .ntwm checkpoints in " + dir.string());
  return out;
}

std::vector<RdPoint> rd_curve(const std::vector<std::filesystem::path>& checkpoints,
                              const std::vector<Utterance>& corpus, std::size_t threads) {
  std::vector<RdPoint> points;
  for (const auto& path : checkpoints) {
    points.push_back(
        evaluate_model(load_checkpoint(path), path.stem().string(), corpus, threads));
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const RdPoint& a, const RdPoint& b) { return a.kbps < b.kbps; });
  return points;
}

void write_rd_csv(std::ostream& out, const std::vector<RdPoint>& points) {
  out << "model,lambda_mse,residual,kbps,estimated_kbps,snr_db,mcd,mse,share_y,share_z,share_yr,"
         "frames,seconds\n";
  out << std::setprecision(10);
  for (const auto& p : points) {
    out << p.model << ',' << p.lambda_mse << ',' << (p.residual ? 1 : 0) << ',' << p.kbps << ','
        << p.estimated_kbps << ',' << p.snr_db << ',' << p.mcd << ',' << p.mse << ','
        << p.shares.y << ',' << p.shares.z << ',' << p.shares.yr << ',' << p.frames << ','
        << p.seconds << '\n';
  }
}

}  // namespace ntwc
