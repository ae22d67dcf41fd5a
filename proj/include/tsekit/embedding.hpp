#pragma once

#include <cstddef>
#include <vector>

#include "tsekit/stft.hpp"

namespace tsekit {

// Deterministic speaker embedder: summary statistics of log-mel energies.
// Stands in for a trained auxiliary network so that verification scoring,
// gating and DET analysis downstream are exactly reproducible.
struct EmbedderConfig {
  enum class Stats { mean_logmel, mean_plus_std };

  std::size_t n_mels = 24;
  Stats stats = Stats::mean_plus_std;
  StftConfig stft;

  std::size_t dim() const {
    return n_mels * (stats == Stats::mean_plus_std ? 2 : 1);
  }
  static EmbedderConfig default_for_rate(int sample_rate_hz);
};

struct Embedding {
  std::vector<double> values;
  double source_duration_s = 0.0;

  std::size_t dim() const { return values.size(); }
};

// Per-mel-band means (and population standard deviations) of
// log(band energy + 1e-10) across STFT frames. Input must cover at least
// one full analysis frame and must not be identically zero.
Embedding embed(const Waveform& w, const EmbedderConfig& cfg);

// Standard cosine similarity; errors on dimension mismatch or zero vectors.
double cosine(const Embedding& a, const Embedding& b);

}  // namespace tsekit
