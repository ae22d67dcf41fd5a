#include "tsekit/stft.hpp"

#include <cmath>

#include "tsekit/error.hpp"

namespace tsekit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void StftConfig::validate() const {
  if (!is_power_of_two(frame_len))
    throw_invalid("StftConfig: frame_len must be a power of two");
  if (hop == 0 || hop > frame_len)
    throw_invalid("StftConfig: hop must be in [1, frame_len]");
  if (frame_len % hop != 0 || frame_len / hop < 2)
    throw_invalid(
        "StftConfig: constant overlap-add requires hop to divide frame_len "
        "with at least 2x overlap");
  if (window != Window::hann) throw_invalid("StftConfig: unsupported window");
}

StftConfig StftConfig::default_for_rate(int sample_rate_hz) {
  Waveform::check_rate(sample_rate_hz);
  StftConfig cfg;
  if (sample_rate_hz == 16000) {
    cfg.frame_len = 512;
    cfg.hop = 128;
  } else {
    cfg.frame_len = 256;
    cfg.hop = 64;
  }
  return cfg;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  if (w.empty()) throw_invalid("stft: empty input");

  const std::size_t n = w.size();
  const std::size_t pad = cfg.frame_len / 2;
  const std::size_t frames = 1 + n / cfg.hop;
  const std::vector<double> win = hann_window(cfg.frame_len);

  Spectrogram s;
  s.frames = frames;
  s.bins = cfg.bins();
  s.config = cfg;
  s.origin_len = n;
  s.sample_rate_hz = w.sample_rate_hz;
  s.data.resize(frames * s.bins);

  std::vector<double> frame(cfg.frame_len);
  for (std::size_t t = 0; t < frames; ++t) {
    // Frame start in padded coordinates; sample p maps to signal index p-pad.
    const std::ptrdiff_t start =
        static_cast<std::ptrdiff_t>(t * cfg.hop) -
        static_cast<std::ptrdiff_t>(pad);
    for (std::size_t i = 0; i < cfg.frame_len; ++i) {
      const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(i);
      const double v =
          (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n))
              ? w.samples[static_cast<std::size_t>(idx)]
              : 0.0;
      frame[i] = v * win[i];
    }
    std::vector<cplx> spec = rfft(frame);
    for (std::size_t k = 0; k < s.bins; ++k) s.at(t, k) = spec[k];
  }
  return s;
}

Waveform istft(const Spectrogram& s) {
  s.config.validate();
  if (s.bins != s.config.bins())
    throw_invalid("istft: bins inconsistent with config");

  const std::size_t n = s.origin_len;
  const std::size_t pad = s.config.frame_len / 2;
  const std::size_t padded_len = n + 2 * pad;
  const std::vector<double> win = hann_window(s.config.frame_len);

  std::vector<double> acc(padded_len, 0.0);
  std::vector<double> norm(padded_len, 0.0);
  std::vector<cplx> bins(s.bins);
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t k = 0; k < s.bins; ++k) bins[k] = s.at(t, k);
    std::vector<double> frame = irfft(bins, s.config.frame_len);
    const std::size_t start = t * s.config.hop;
    for (std::size_t i = 0; i < s.config.frame_len; ++i) {
      const std::size_t p = start + i;
      if (p >= padded_len) break;
      acc[p] += frame[i] * win[i];
      norm[p] += win[i] * win[i];
    }
  }

  Waveform out;
  out.sample_rate_hz = s.sample_rate_hz;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = norm[pad + i];
    out.samples[i] = d > 1e-12 ? acc[pad + i] / d : 0.0;
  }
  return out;
}

double spectral_energy(const Spectrogram& s) {
  double e = 0.0;
  for (std::size_t t = 0; t < s.frames; ++t) {
    double frame_e = 0.0;
    for (std::size_t k = 0; k < s.bins; ++k) {
      const double m = (k == 0 || k == s.bins - 1) ? 1.0 : 2.0;
      frame_e += m * std::norm(s.at(t, k));
    }
    e += frame_e / static_cast<double>(s.config.frame_len);
  }
  return e;
}

}  // namespace tsekit
