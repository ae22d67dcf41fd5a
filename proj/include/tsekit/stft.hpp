#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tsekit/fft.hpp"
#include "tsekit/waveform.hpp"

namespace tsekit {

// STFT framing convention (fixed, so externally produced estimates can be
// aligned with ours):
//   * periodic Hann window of frame_len samples,
//   * the signal is zero-padded by frame_len/2 on both ends (center
//     convention), frame t starts at t*hop in the padded signal,
//   * frame count = 1 + floor(len/hop),
//   * bins 0..frame_len/2 of the real FFT are kept.
// istft is the weighted overlap-add inverse (synthesis window = analysis
// window, normalized pointwise by the squared-window overlap), trimmed back
// to the original length. For any valid config this inverts stft exactly up
// to rounding.
struct StftConfig {
  std::size_t frame_len = 512;
  std::size_t hop = 128;
  enum class Window { hann } window = Window::hann;

  // COLA validity: power-of-two frame, hop dividing it, at least 2x overlap.
  void validate() const;

  std::size_t bins() const { return frame_len / 2 + 1; }

  static StftConfig default_for_rate(int sample_rate_hz);
};

struct Spectrogram {
  // frames x bins, row-major.
  std::vector<cplx> data;
  std::size_t frames = 0;
  std::size_t bins = 0;
  StftConfig config;
  std::size_t origin_len = 0;
  int sample_rate_hz = 16000;

  cplx& at(std::size_t frame, std::size_t bin) {
    return data[frame * bins + bin];
  }
  const cplx& at(std::size_t frame, std::size_t bin) const {
    return data[frame * bins + bin];
  }
};

std::vector<double> hann_window(std::size_t n);

Spectrogram stft(const Waveform& w, const StftConfig& cfg);
Waveform istft(const Spectrogram& s);

// Sum over frames of the per-frame FFT energy (1/frame_len) * sum_k m_k |X_k|^2
// with m_k = 2 except at DC and Nyquist. By Parseval this equals the total
// energy of the windowed, padded frames.
double spectral_energy(const Spectrogram& s);

}  // namespace tsekit
