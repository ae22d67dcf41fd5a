#pragma once

#include <cstddef>
#include <vector>

#include "tsekit/stft.hpp"

namespace tsekit {

// Triangular mel filterbank over the one-sided spectrum of an STFT frame.
// Filters are laid out on a grid of n_mels + 2 points equally spaced on the
// mel scale between f_lo and f_hi; filter m rises over [f(m), f(m+1)] and
// falls over [f(m+1), f(m+2)], evaluated at the FFT bin centre frequencies.
// Each triangle has unit peak, so per-bin weights lie in [0, 1].
double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t n_bins = 0;
  // Row-major n_mels x n_bins weight matrix.
  std::vector<double> weights;

  double at(std::size_t mel, std::size_t bin) const {
    return weights[mel * n_bins + bin];
  }

  // Filterbank-weighted band energies of one power spectrum (length n_bins).
  std::vector<double> apply(const std::vector<double>& power) const;
};

// f_lo/f_hi default to 0 Hz and Nyquist when f_hi <= 0.
MelFilterbank make_mel_filterbank(std::size_t n_mels, std::size_t frame_len,
                                  int sample_rate_hz, double f_lo = 0.0,
                                  double f_hi = 0.0);

// Power spectrogram (frames x bins, |X|^2) of a waveform.
std::vector<std::vector<double>> power_spectrogram(const Spectrogram& s);

}  // namespace tsekit
