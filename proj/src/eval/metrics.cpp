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

#include "ntwc/eval/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

#include "ntwc/errors.hpp"

namespace ntwc {

double snr_db(const Waveform& reference, const Waveform& test) {
  if (reference.samples.size() != test.samples.size()) {
    throw ArgumentError("snr: signals differ in length (" +
                        std::to_string(reference.samples.size()) + " vs " +
                        std::to_string(test.samples.size()) + ")");
  }
  double signal = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    const double r = reference.samples[i];
    const double e = r - test.samples[i];
    signal += r * r;
    noise += e * e;
  }
  if (!(signal > 0.0)) throw ArgumentError("snr: reference is all zeros");
  if (!(noise > 0.0)) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / noise));
}

double mel_cepstral_distortion(const Waveform& reference, const Waveform& test,
                               const MelAnalyzer& analyzer) {
  if (reference.samples.size() != test.samples.size()) {
    throw ArgumentError("mel cepstral distortion: signals differ in length");
  }
  const auto& cfg = analyzer.config();
  double total = 0.0;
  for (std::size_t k = 0; k < cfg.num_scales(); ++k) {
    const auto a = analyzer.features(reference.samples, k);
    const auto b = analyzer.features(test.samples, k);
    const std::size_t coeffs = cfg.coeffs(k);
    const std::size_t windows = a.size() / coeffs;
    double scale_sum = 0.0;
    for (std::size_t w = 0; w < windows; ++w) {
      double sq = 0.0;
      for (std::size_t i = 0; i < coeffs; ++i) {
        const double d = a[w * coeffs + i] - b[w * coeffs + i];
        sq += d * d;
      }
      scale_sum += std::sqrt(sq / static_cast<double>(coeffs));
    }
    total += scale_sum / static_cast<double>(windows);
  }
  return total / static_cast<double>(cfg.num_scales());
}

double mel_cepstral_distortion(const Waveform& reference, const Waveform& test) {
  static const MelAnalyzer analyzer;
  return mel_cepstral_distortion(reference, test, analyzer);
}

RateShares rate_allocation(const Container& container) {
  const double total = static_cast<double>(container.payload_bits());
  if (!(total > 0.0)) throw FormatError("container has no payload bits");
  RateShares s;
  s.y = static_cast<double>(container.payload_bits_y()) / total;
  s.z = static_cast<double>(container.payload_bits_z()) / total;
  s.yr = static_cast<double>(container.payload_bits_yr()) / total;
  return s;
}

nlohmann::json EvalResult::to_json() const {
  nlohmann::json j = {{"kbps", kbps},
                      {"snr_db", snr_db},
                      {"mel_cepstral_distortion", mel_cepstral_distortion},
                      {"share_y", shares.y},
                      {"share_z", shares.z},
                      {"share_yr", shares.yr}};
  if (external_score) j["external_score"] = *external_score;
  return j;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

double run_external_scorer(const std::string& command_template,
                           const std::filesystem::path& reference,
                           const std::filesystem::path& test) {
  std::string cmd = command_template;
  replace_all(cmd, "{ref}", shell_quote(reference.string()));
  replace_all(cmd, "{test}", shell_quote(test.string()));
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw IoError("cannot start scorer command");
  std::string output;
  char buf[256];
  while (std::fgets(buf, sizeof buf, pipe.get())) output += buf;
  const int status = pclose(pipe.release());
  if (status != 0) throw IoError("scorer command failed with status " + std::to_string(status));
  try {
    std::size_t used = 0;
    const double v = std::stod(output, &used);
    if (output.find_first_not_of(" \t\r\n", used) != std::string::npos) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw FormatError("scorer output is not a single number: '" + output + "'");
  }
}

}  // namespace ntwc
