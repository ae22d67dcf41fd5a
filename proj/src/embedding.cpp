#include "tsekit/embedding.hpp"

#include <cmath>

#include "tsekit/error.hpp"
#include "tsekit/mel.hpp"

namespace tsekit {

namespace {
constexpr double kLogFloor = 1e-10;  // silence guard inside the log
}

EmbedderConfig EmbedderConfig::default_for_rate(int sample_rate_hz) {
  EmbedderConfig cfg;
  cfg.stft = StftConfig::default_for_rate(sample_rate_hz);
  return cfg;
}

Embedding embed(const Waveform& w, const EmbedderConfig& cfg) {
  cfg.stft.validate();
  if (cfg.n_mels < 8) throw_invalid("embed: n_mels must be at least 8");
  if (w.size() < cfg.stft.frame_len)
    throw_invalid("embedding undefined: input shorter than one frame");
  if (w.is_zero()) throw_invalid("embedding undefined: all-zero input");

  const Spectrogram s = stft(w, cfg.stft);
  const MelFilterbank fb =
      make_mel_filterbank(cfg.n_mels, cfg.stft.frame_len, w.sample_rate_hz);

  // frames x n_mels log energies.
  std::vector<double> mean(cfg.n_mels, 0.0);
  std::vector<double> sq(cfg.n_mels, 0.0);
  std::vector<double> power(s.bins);
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t k = 0; k < s.bins; ++k) power[k] = std::norm(s.at(t, k));
    const std::vector<double> bands = fb.apply(power);
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      const double lv = std::log(bands[m] + kLogFloor);
      mean[m] += lv;
      sq[m] += lv * lv;
    }
  }
  const double inv_frames = 1.0 / static_cast<double>(s.frames);

  Embedding e;
  e.source_duration_s = w.duration_s();
  e.values.reserve(cfg.dim());
  for (std::size_t m = 0; m < cfg.n_mels; ++m)
    e.values.push_back(mean[m] * inv_frames);
  if (cfg.stats == EmbedderConfig::Stats::mean_plus_std) {
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      const double mu = mean[m] * inv_frames;
      const double var = std::max(sq[m] * inv_frames - mu * mu, 0.0);
      e.values.push_back(std::sqrt(var));
    }
  }
  return e;
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim() || a.dim() == 0)
    throw_invalid("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na <= 0.0 || nb <= 0.0) throw_invalid("cosine undefined for zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace tsekit
