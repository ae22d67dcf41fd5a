#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tsekit/error.hpp"

namespace tsekit {

// Mono sampled signal. Samples are dimensionless amplitudes, nominally in
// [-1, 1]; the sample rate is restricted to the two rates the rest of the
// toolkit knows how to configure defaults for.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  Waveform() = default;
  Waveform(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate_hz(rate) {
    check_rate(rate);
  }

  static void check_rate(int rate) {
    if (rate != 8000 && rate != 16000)
      throw_invalid("sample_rate_hz must be 8000 or 16000, got " +
                    std::to_string(rate));
  }

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }

  double energy() const {
    double e = 0.0;
    for (double v : samples) e += v * v;
    return e;
  }

  double rms() const {
    return samples.empty() ? 0.0 : std::sqrt(energy() / samples.size());
  }

  bool is_zero() const {
    for (double v : samples)
      if (v != 0.0) return false;
    return true;
  }

  bool all_finite() const {
    for (double v : samples)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline Waveform zeros_like(const Waveform& w) {
  return Waveform(std::vector<double>(w.size(), 0.0), w.sample_rate_hz);
}

inline void require_same_shape(const Waveform& a, const Waveform& b,
                               const char* what) {
  if (a.sample_rate_hz != b.sample_rate_hz)
    throw_invalid(std::string(what) + ": sample rate mismatch");
  if (a.size() != b.size())
    throw_invalid(std::string(what) + ": length mismatch (" +
                  std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                  ")");
}

}  // namespace tsekit
