#include "tsekit/mel.hpp"

#include <cmath>

#include "tsekit/error.hpp"

namespace tsekit {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> MelFilterbank::apply(
    const std::vector<double>& power) const {
  if (power.size() != n_bins)
    throw_invalid("MelFilterbank: power spectrum size mismatch");
  std::vector<double> out(n_mels, 0.0);
  for (std::size_t m = 0; m < n_mels; ++m) {
    double acc = 0.0;
    const double* row = weights.data() + m * n_bins;
    for (std::size_t k = 0; k < n_bins; ++k) acc += row[k] * power[k];
    out[m] = acc;
  }
  return out;
}

MelFilterbank make_mel_filterbank(std::size_t n_mels, std::size_t frame_len,
                                  int sample_rate_hz, double f_lo,
                                  double f_hi) {
  if (n_mels == 0) throw_invalid("mel filterbank: n_mels must be positive");
  Waveform::check_rate(sample_rate_hz);
  const double nyquist = sample_rate_hz / 2.0;
  if (f_hi <= 0.0) f_hi = nyquist;
  if (f_lo < 0.0 || f_hi > nyquist || f_lo >= f_hi)
    throw_invalid("mel filterbank: need 0 <= f_lo < f_hi <= nyquist");

  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.n_bins = frame_len / 2 + 1;
  fb.weights.assign(n_mels * fb.n_bins, 0.0);

  const double mel_lo = hz_to_mel(f_lo);
  const double mel_hi = hz_to_mel(f_hi);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(n_mels + 1));

  const double bin_hz =
      static_cast<double>(sample_rate_hz) / static_cast<double>(frame_len);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    bool any = false;
    for (std::size_t k = 0; k < fb.n_bins; ++k) {
      const double f = bin_hz * static_cast<double>(k);
      double w = 0.0;
      if (f > left && f < right) {
        w = f <= centre ? (f - left) / (centre - left)
                        : (right - f) / (right - centre);
      }
      if (w > 0.0) {
        fb.weights[m * fb.n_bins + k] = w;
        any = true;
      }
    }
    if (!any)
      throw_invalid(
          "mel filterbank: a filter has no FFT bin support; lower n_mels or "
          "raise frame_len");
  }
  return fb;
}

std::vector<std::vector<double>> power_spectrogram(const Spectrogram& s) {
  std::vector<std::vector<double>> out(s.frames,
                                       std::vector<double>(s.bins, 0.0));
  for (std::size_t t = 0; t < s.frames; ++t)
    for (std::size_t k = 0; k < s.bins; ++k) out[t][k] = std::norm(s.at(t, k));
  return out;
}

}  // namespace tsekit
