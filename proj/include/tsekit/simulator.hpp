#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tsekit/rng.hpp"
#include "tsekit/waveform.hpp"

namespace tsekit {

// Seeded generator of desk-scale evaluation corpora: parametric harmonic
// "speakers", utterances, two-speaker noisy full-overlap mixtures, and the
// three-enrollments-per-mixture trial protocol (two active, one inactive).
// Everything is a pure function of the spec seed, so corpora are bitwise
// reproducible and trials can be regenerated individually in any order.

struct SyntheticSpeaker {
  struct Formant {
    double center_hz = 0.0;
    double bandwidth_hz = 0.0;
    double gain = 0.0;
  };

  std::string speaker_id;
  double f0_hz = 0.0;
  std::array<Formant, 3> formants{};
  double jitter = 0.0;  // relative f0 wobble depth
};

// One evaluation unit. Waveforms are shared because the three trials of a
// mixture reference the same audio. source_a/source_b are the individual
// scaled speaker signals (the mixture minus noise splits exactly into them);
// they may be null on externally supplied manifests.
struct Trial {
  std::string trial_id;
  std::shared_ptr<const Waveform> mixture;
  std::shared_ptr<const Waveform> target_reference;  // null on inactive trials
  std::shared_ptr<const Waveform> interference_reference;
  std::shared_ptr<const Waveform> noise;
  std::shared_ptr<const Waveform> enrollment;
  std::shared_ptr<const Waveform> source_a;
  std::shared_ptr<const Waveform> source_b;
  std::string target_speaker_id;
  std::string enrollment_speaker_id;
  std::string mixture_speaker_a;
  std::string mixture_speaker_b;
  bool active = false;
};

struct CorpusSpec {
  enum class Protocol { test, train };

  std::size_t n_speakers = 20;
  std::size_t n_mixtures = 100;
  int sample_rate_hz = 16000;
  double utterance_s = 3.0;
  std::pair<double, double> snr_range_db = {-5.0, 5.0};
  // Noise level below the summed speech, in dB.
  std::pair<double, double> noise_snr_db = {10.0, 20.0};
  std::size_t enrollment_concat_count = 1;
  std::uint64_t seed = 0;
  // test: 3 trials per mixture (2 active + 1 inactive).
  // train: 1 trial per mixture, an exact train_is_fraction of them inactive.
  Protocol protocol = Protocol::test;
  double train_is_fraction = 0.10;

  void validate() const;  // error messages name the offending field
  std::size_t trials_per_mixture() const {
    return protocol == Protocol::test ? 3 : 1;
  }
  std::size_t n_trials() const { return n_mixtures * trials_per_mixture(); }
};

struct Corpus {
  CorpusSpec spec;
  std::vector<SyntheticSpeaker> speakers;
  std::vector<Trial> trials;
};

// Speakers on a shuffled f0 grid with pairwise gaps >= 10 Hz, random formant
// profiles and jitter depths. Needs n_speakers >= 3.
std::vector<SyntheticSpeaker> sample_speakers(const CorpusSpec& spec);

// Harmonic-bank synthesis: jittered f0, fundamental amplitude pinned to 1 so
// the spectral peak sits at f0, upper harmonics shaped by the speaker's
// formant resonances with per-segment detuning (0.3-0.6 s vowel-like
// segments). Output is RMS-normalized to 0.1 exactly. duration >= 0.5 s.
Waveform synthesize_utterance(const SyntheticSpeaker& speaker,
                              double duration_s, int sample_rate_hz,
                              std::uint64_t seed);

struct MixtureParts {
  Waveform source_a;  // speaker A, level-anchored
  Waveform source_b;  // speaker B, scaled to the drawn speech-to-speech SNR
  Waveform noise;     // white noise at the drawn level below the speech sum
  Waveform mixture;   // source_a + source_b + noise, summed sample by sample
};

MixtureParts make_mixture(const SyntheticSpeaker& spk_a,
                          const SyntheticSpeaker& spk_b,
                          const CorpusSpec& spec, std::uint64_t seed);

// Deterministic casting for mixture m: indices of speaker A, B and the
// enrolled-but-absent inactive speaker.
struct MixtureCast {
  std::size_t a = 0, b = 0, inactive = 0;
};
MixtureCast cast_mixture(const CorpusSpec& spec, std::size_t mixture_index);

// In the train protocol, whether mixture m is an inactive-target sample.
bool train_mixture_is_inactive(const CorpusSpec& spec,
                               std::size_t mixture_index);

// All trials of mixture m (3 under the test protocol, 1 under train), with
// the mixture waveforms shared between them. trial ids are
// "m<mixture>_<as0|as1|is>" / "m<mixture>_tr".
std::vector<Trial> build_mixture_trials(
    const CorpusSpec& spec, const std::vector<SyntheticSpeaker>& speakers,
    std::size_t mixture_index);

// Builds trial #index from scratch (synthesizes its mixture and enrollment).
Trial build_trial(const CorpusSpec& spec,
                  const std::vector<SyntheticSpeaker>& speakers,
                  std::size_t index);

// Whole corpus in memory; jobs > 1 synthesizes mixtures concurrently with
// identical results.
Corpus build_corpus(const CorpusSpec& spec, int jobs = 1);

}  // namespace tsekit
