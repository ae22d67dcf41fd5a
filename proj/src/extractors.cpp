#include "tsekit/extractors.hpp"

#include <cmath>

#include "tsekit/embedding.hpp"
#include "tsekit/error.hpp"
#include "tsekit/stft.hpp"
#include "tsekit/wav_io.hpp"

namespace tsekit {

namespace {

const Waveform& mixture_of(const Trial& trial) {
  if (!trial.mixture) throw_data("trial " + trial.trial_id + " lacks mixture");
  return *trial.mixture;
}

// Ratio mask |T|^2 / (|A|^2 + |B|^2 + |N|^2) applied to the mixture, where
// target may be null (mask 0). Denominator terms are the actual mixture
// components, so masks stay in [0, 1].
Waveform ratio_mask_extract(const Trial& trial, const Waveform* target) {
  const Waveform& mix = mixture_of(trial);
  if (!trial.source_a || !trial.source_b || !trial.noise)
    throw_data("trial " + trial.trial_id +
               " lacks per-source references required for ratio masking");
  const StftConfig cfg = StftConfig::default_for_rate(mix.sample_rate_hz);
  const Spectrogram sy = stft(mix, cfg);
  const Spectrogram sa = stft(*trial.source_a, cfg);
  const Spectrogram sb = stft(*trial.source_b, cfg);
  const Spectrogram sn = stft(*trial.noise, cfg);
  const Spectrogram* st = nullptr;
  Spectrogram st_storage;
  if (target != nullptr) {
    st_storage = stft(*target, cfg);
    st = &st_storage;
  }

  Spectrogram masked = sy;
  for (std::size_t t = 0; t < sy.frames; ++t) {
    for (std::size_t k = 0; k < sy.bins; ++k) {
      const double denom = std::norm(sa.at(t, k)) + std::norm(sb.at(t, k)) +
                           std::norm(sn.at(t, k)) + 1e-30;
      const double num = st ? std::norm(st->at(t, k)) : 0.0;
      masked.at(t, k) = sy.at(t, k) * (num / denom);
    }
  }
  return istft(masked);
}

class OracleExtractor final : public Extractor {
 public:
  std::string name() const override { return "oracle"; }
  Waveform extract(const Trial& trial) const override {
    const Waveform& mix = mixture_of(trial);
    if (trial.active && trial.target_reference) return *trial.target_reference;
    return zeros_like(mix);
  }
};

class IrmExtractor final : public Extractor {
 public:
  std::string name() const override { return "irm"; }
  Waveform extract(const Trial& trial) const override {
    const Waveform* target =
        trial.active && trial.target_reference ? trial.target_reference.get()
                                               : nullptr;
    return ratio_mask_extract(trial, target);
  }
};

class PassthroughExtractor final : public Extractor {
 public:
  std::string name() const override { return "passthrough"; }
  Waveform extract(const Trial& trial) const override {
    return mixture_of(trial);
  }
};

class ZeroExtractor final : public Extractor {
 public:
  std::string name() const override { return "zero"; }
  Waveform extract(const Trial& trial) const override {
    return zeros_like(mixture_of(trial));
  }
};

class WrongSpeakerExtractor final : public Extractor {
 public:
  std::string name() const override { return "wrong"; }
  Waveform extract(const Trial& trial) const override {
    if (!trial.interference_reference)
      throw_data("trial " + trial.trial_id + " lacks interference reference");
    return *trial.interference_reference;
  }
};

class IsAwareExtractor final : public Extractor {
 public:
  explicit IsAwareExtractor(const IsAwareOracleConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
  }
  std::string name() const override { return "is-aware"; }
  Waveform extract(const Trial& trial) const override {
    const Waveform& mix = mixture_of(trial);
    if (trial.active) {
      if (!trial.target_reference)
        throw_data("trial " + trial.trial_id + " lacks target reference");
      Waveform out = *trial.target_reference;
      if (is_aware_miss_draw(cfg_, trial.trial_id)) {
        const double gain = std::pow(10.0, cfg_.residual_floor_db / 20.0);
        for (double& v : out.samples) v *= gain;
      }
      return out;
    }
    if (is_aware_false_alarm_draw(cfg_, trial.trial_id)) {
      if (!trial.interference_reference)
        throw_data("trial " + trial.trial_id + " lacks interference reference");
      return *trial.interference_reference;
    }
    return zeros_like(mix);
  }

 private:
  IsAwareOracleConfig cfg_;
};

class BlindIrmExtractor final : public Extractor {
 public:
  std::string name() const override { return "blind-irm"; }
  Waveform extract(const Trial& trial) const override {
    const Waveform& mix = mixture_of(trial);
    if (!trial.source_a || !trial.source_b)
      throw_data("trial " + trial.trial_id +
                 " lacks per-source references required by blind-irm");
    if (!trial.enrollment)
      throw_data("trial " + trial.trial_id + " lacks enrollment");
    const EmbedderConfig ecfg =
        EmbedderConfig::default_for_rate(mix.sample_rate_hz);
    const Embedding enr = embed(*trial.enrollment, ecfg);
    const double sim_a = cosine(embed(*trial.source_a, ecfg), enr);
    const double sim_b = cosine(embed(*trial.source_b, ecfg), enr);
    const Waveform* pseudo_target =
        sim_a >= sim_b ? trial.source_a.get() : trial.source_b.get();
    return ratio_mask_extract(trial, pseudo_target);
  }
};

class ExternalExtractor final : public Extractor {
 public:
  explicit ExternalExtractor(std::filesystem::path dir)
      : dir_(std::move(dir)) {}
  std::string name() const override { return "external"; }
  Waveform extract(const Trial& trial) const override {
    const Waveform& mix = mixture_of(trial);
    const std::filesystem::path path = dir_ / (trial.trial_id + ".wav");
    if (!std::filesystem::exists(path))
      throw_data("trial " + trial.trial_id + ": missing estimate " +
                 path.string());
    Waveform est = read_wav(path);
    if (est.sample_rate_hz != mix.sample_rate_hz)
      throw_data("trial " + trial.trial_id + ": estimate sample rate " +
                 std::to_string(est.sample_rate_hz) + " does not match mixture");
    if (est.size() != mix.size())
      throw_data("trial " + trial.trial_id + ": estimate length mismatch (" +
                 std::to_string(est.size()) + " vs " +
                 std::to_string(mix.size()) + ")");
    return est;
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace

void IsAwareOracleConfig::validate() const {
  if (!(miss_prob >= 0.0 && miss_prob <= 1.0))
    throw_invalid("IsAwareOracleConfig: miss_prob must be in [0, 1]");
  if (!(false_alarm_prob >= 0.0 && false_alarm_prob <= 1.0))
    throw_invalid("IsAwareOracleConfig: false_alarm_prob must be in [0, 1]");
  if (!(residual_floor_db < 0.0))
    throw_invalid("IsAwareOracleConfig: residual_floor_db must be negative");
}

bool is_aware_miss_draw(const IsAwareOracleConfig& cfg,
                        const std::string& trial_id) {
  Rng rng(derive_seed(cfg.seed, "is_aware_miss:" + trial_id));
  return rng.uniform() < cfg.miss_prob;
}

bool is_aware_false_alarm_draw(const IsAwareOracleConfig& cfg,
                               const std::string& trial_id) {
  Rng rng(derive_seed(cfg.seed, "is_aware_fa:" + trial_id));
  return rng.uniform() < cfg.false_alarm_prob;
}

std::unique_ptr<Extractor> make_oracle_extractor() {
  return std::make_unique<OracleExtractor>();
}
std::unique_ptr<Extractor> make_irm_extractor() {
  return std::make_unique<IrmExtractor>();
}
std::unique_ptr<Extractor> make_passthrough_extractor() {
  return std::make_unique<PassthroughExtractor>();
}
std::unique_ptr<Extractor> make_zero_extractor() {
  return std::make_unique<ZeroExtractor>();
}
std::unique_ptr<Extractor> make_wrong_speaker_extractor() {
  return std::make_unique<WrongSpeakerExtractor>();
}
std::unique_ptr<Extractor> make_is_aware_extractor(
    const IsAwareOracleConfig& cfg) {
  return std::make_unique<IsAwareExtractor>(cfg);
}
std::unique_ptr<Extractor> make_blind_irm_extractor() {
  return std::make_unique<BlindIrmExtractor>();
}
std::unique_ptr<Extractor> make_external_extractor(
    const std::filesystem::path& estimates_dir) {
  return std::make_unique<ExternalExtractor>(estimates_dir);
}

std::unique_ptr<Extractor> make_extractor(
    const std::string& label, const IsAwareOracleConfig& is_aware) {
  if (label == "oracle") return make_oracle_extractor();
  if (label == "irm") return make_irm_extractor();
  if (label == "blind-irm" || label == "baseline")
    return make_blind_irm_extractor();
  if (label == "passthrough") return make_passthrough_extractor();
  if (label == "zero") return make_zero_extractor();
  if (label == "wrong") return make_wrong_speaker_extractor();
  if (label == "is-aware") return make_is_aware_extractor(is_aware);
  if (label.rfind("external:", 0) == 0) {
    const std::string dir = label.substr(9);
    if (dir.empty())
      throw_invalid("extractor: external requires a directory, external:<dir>");
    return make_external_extractor(dir);
  }
  throw_invalid(
      "unknown extractor '" + label +
      "' (expected oracle|irm|blind-irm|passthrough|zero|wrong|is-aware|"
      "external:<dir>)");
}

}  // namespace tsekit
