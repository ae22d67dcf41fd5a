#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "tsekit/simulator.hpp"

namespace tsekit {

// Pluggable extraction stage. Implementations are stateless given the trial
// (stochastic ones derive per-trial seeds from the trial id), so one
// instance can serve concurrent workers.
class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual std::string name() const = 0;
  // Contract: output has the mixture's length and rate, finite samples.
  virtual Waveform extract(const Trial& trial) const = 0;
};

// Upper anchor: the target reference itself (zeros on inactive trials).
std::unique_ptr<Extractor> make_oracle_extractor();

// Ideal ratio mask from the ground-truth source spectra, applied to the
// mixture STFT. Inactive trials have no target spectrum, so the mask is all
// zero and the output silent.
std::unique_ptr<Extractor> make_irm_extractor();

// Failure-mode anchors: the mixture itself, silence, and the interference.
std::unique_ptr<Extractor> make_passthrough_extractor();
std::unique_ptr<Extractor> make_zero_extractor();
std::unique_ptr<Extractor> make_wrong_speaker_extractor();

// Statistical model of a system trained to output zeros for absent targets:
// active trials return the target except for seeded misses, which return the
// target scaled down to residual_floor_db; inactive trials return silence
// except for seeded false alarms, which return the interference.
struct IsAwareOracleConfig {
  double miss_prob = 0.0;
  double false_alarm_prob = 0.0;
  double residual_floor_db = -100.0;
  std::uint64_t seed = 0;

  void validate() const;
};
std::unique_ptr<Extractor> make_is_aware_extractor(
    const IsAwareOracleConfig& cfg);

// The per-trial error draws, exposed so the stochastic behavior can be
// audited without synthesizing audio.
bool is_aware_miss_draw(const IsAwareOracleConfig& cfg,
                        const std::string& trial_id);
bool is_aware_false_alarm_draw(const IsAwareOracleConfig& cfg,
                               const std::string& trial_id);

// Blind system with no access to ground-truth activity: embeds both mixture
// sources, picks the one closest to the enrollment as pseudo-target, and
// ratio-masks the mixture with it. Always outputs a full source, even when
// the enrolled speaker is absent. Requires per-source references.
std::unique_ptr<Extractor> make_blind_irm_extractor();

// Loads `<trial_id>.wav` from a directory of externally produced estimates.
std::unique_ptr<Extractor> make_external_extractor(
    const std::filesystem::path& estimates_dir);

// Parses an extractor CLI label: oracle | irm | blind-irm | passthrough |
// zero | wrong | is-aware | external:<dir>.
std::unique_ptr<Extractor> make_extractor(const std::string& label,
                                          const IsAwareOracleConfig& is_aware);

}  // namespace tsekit
