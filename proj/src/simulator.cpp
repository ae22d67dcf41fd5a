#include "tsekit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>

#include "tsekit/error.hpp"
#include "tsekit/parallel.hpp"

namespace tsekit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double formant_response(const SyntheticSpeaker& spk,
                        const std::array<double, 3>& detune, double f_hz) {
  double h = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const SyntheticSpeaker::Formant& fm = spk.formants[j];
    const double c = fm.center_hz * detune[j];
    const double b = fm.bandwidth_hz;
    const double d = f_hz - c;
    h += fm.gain * b * b / (d * d + b * b);
  }
  return h;
}

std::string mixture_trial_id(std::size_t mixture_index, const char* role) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "m%04zu_%s", mixture_index, role);
  return buf;
}

}  // namespace

void CorpusSpec::validate() const {
  if (n_speakers < 3)
    throw_invalid("CorpusSpec: n_speakers must be at least 3");
  if (n_mixtures < 1)
    throw_invalid("CorpusSpec: n_mixtures must be at least 1");
  Waveform::check_rate(sample_rate_hz);
  if (utterance_s < 0.5)
    throw_invalid("CorpusSpec: utterance_s must be at least 0.5");
  if (!(snr_range_db.first <= snr_range_db.second))
    throw_invalid("CorpusSpec: snr_range_db must satisfy lo <= hi");
  if (!(noise_snr_db.first <= noise_snr_db.second))
    throw_invalid("CorpusSpec: noise_snr_db must satisfy lo <= hi");
  if (enrollment_concat_count < 1 || enrollment_concat_count > 5)
    throw_invalid("CorpusSpec: enrollment_concat_count must be in 1..5");
  if (!(train_is_fraction >= 0.0 && train_is_fraction <= 1.0))
    throw_invalid("CorpusSpec: train_is_fraction must be in [0, 1]");
}

std::vector<SyntheticSpeaker> sample_speakers(const CorpusSpec& spec) {
  if (spec.n_speakers < 3)
    throw_invalid("sample_speakers: n_speakers must be at least 3");
  const std::size_t n = spec.n_speakers;

  // f0 values sit on a shuffled grid so any pair is at least 10 Hz apart.
  const double spacing =
      std::max(10.5, 220.0 / static_cast<double>(n - 1));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng grid_rng(derive_seed(spec.seed, "speaker_grid"));
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(grid_rng.below(i + 1));
    std::swap(perm[i], perm[j]);
  }

  std::vector<SyntheticSpeaker> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(spec.seed, "speaker", i));
    SyntheticSpeaker& s = out[i];
    char buf[32];
    std::snprintf(buf, sizeof buf, "spk%03zu", i);
    s.speaker_id = buf;
    s.f0_hz = 80.0 + spacing * static_cast<double>(perm[i]);
    s.formants[0] = {rng.uniform(300.0, 900.0), rng.uniform(80.0, 160.0),
                     rng.uniform(0.5, 1.0)};
    s.formants[1] = {rng.uniform(1000.0, 2200.0), rng.uniform(100.0, 200.0),
                     rng.uniform(0.5, 1.0)};
    s.formants[2] = {rng.uniform(2300.0, 3400.0), rng.uniform(150.0, 300.0),
                     rng.uniform(0.5, 1.0)};
    s.jitter = rng.uniform(0.005, 0.02);
  }
  return out;
}

Waveform synthesize_utterance(const SyntheticSpeaker& speaker,
                              double duration_s, int sample_rate_hz,
                              std::uint64_t seed) {
  Waveform::check_rate(sample_rate_hz);
  if (duration_s < 0.5)
    throw_invalid("synthesize_utterance: duration must be at least 0.5 s");
  const double fs = static_cast<double>(sample_rate_hz);
  const std::size_t n =
      static_cast<std::size_t>(std::llround(duration_s * fs));

  Rng rng(seed);
  // Slow sinusoidal f0 wobble; depth comes from the speaker profile.
  const double vib_w1 = kTwoPi * rng.uniform(2.0, 5.0) / fs;
  const double vib_p1 = kTwoPi * rng.uniform();
  const double vib_w2 = kTwoPi * rng.uniform(2.0, 5.0) / fs;
  const double vib_p2 = kTwoPi * rng.uniform();

  const double f0 = speaker.f0_hz;
  const double nyquist = fs / 2.0;
  // Worst-case instantaneous f0 keeps every harmonic below 0.95*Nyquist.
  const std::size_t n_harm = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(0.95 * nyquist / (f0 * (1.0 + speaker.jitter)))));

  std::vector<double> cos_phase(n_harm), sin_phase(n_harm);
  for (std::size_t k = 0; k < n_harm; ++k) {
    const double ph = kTwoPi * rng.uniform();
    cos_phase[k] = std::cos(ph);
    sin_phase[k] = std::sin(ph);
  }

  const std::size_t ramp_len =
      static_cast<std::size_t>(std::llround(0.010 * fs));
  std::vector<double> amp(n_harm, 0.0), amp_target(n_harm, 0.0),
      amp_step(n_harm, 0.0);
  std::vector<double> out(n);

  std::complex<double> phasor(1.0, 0.0);  // exp(i * running phase)
  std::size_t t = 0;
  bool first_segment = true;
  while (t < n) {
    // Vowel-like segment: new formant detunings, amplitudes crossfaded in.
    std::size_t seg_len = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(rng.uniform(0.3, 0.6) * fs)));
    seg_len = std::min(seg_len, n - t);
    const std::array<double, 3> detune = {rng.uniform(0.85, 1.15),
                                          rng.uniform(0.85, 1.15),
                                          rng.uniform(0.85, 1.15)};
    // Fundamental pinned to 1 so the spectral peak stays at f0; upper
    // harmonics fall as 1/k^2 scaled by the formant envelope.
    amp_target[0] = 1.0;
    for (std::size_t k = 1; k < n_harm; ++k) {
      const double f = static_cast<double>(k + 1) * f0;
      amp_target[k] = (0.1 + formant_response(speaker, detune, f)) /
                      static_cast<double>((k + 1) * (k + 1));
    }
    std::size_t ramp_n = first_segment ? 0 : std::min(seg_len, ramp_len);
    if (ramp_n == 0) {
      amp = amp_target;
    } else {
      for (std::size_t k = 0; k < n_harm; ++k)
        amp_step[k] =
            (amp_target[k] - amp[k]) / static_cast<double>(ramp_n);
    }
    first_segment = false;

    for (std::size_t s = 0; s < seg_len; ++s, ++t) {
      if (s < ramp_n)
        for (std::size_t k = 0; k < n_harm; ++k) amp[k] += amp_step[k];
      const double td = static_cast<double>(t);
      const double wobble =
          speaker.jitter * (0.6 * std::sin(vib_w1 * td + vib_p1) +
                            0.4 * std::sin(vib_w2 * td + vib_p2));
      std::complex<double> p = phasor;
      double acc = 0.0;
      for (std::size_t k = 0; k < n_harm; ++k) {
        // amp * sin(k*theta + phase): imaginary part of p * e^{i*phase}.
        acc += amp[k] * (p.real() * sin_phase[k] + p.imag() * cos_phase[k]);
        p *= phasor;
      }
      out[t] = acc;
      const double dtheta = kTwoPi * f0 * (1.0 + wobble) / fs;
      phasor *= std::complex<double>(std::cos(dtheta), std::sin(dtheta));
    }
  }

  double energy = 0.0;
  for (double v : out) energy += v * v;
  const double scale = 0.1 / std::sqrt(energy / static_cast<double>(n));
  for (double& v : out) v *= scale;

  Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  w.samples = std::move(out);
  return w;
}

MixtureParts make_mixture(const SyntheticSpeaker& spk_a,
                          const SyntheticSpeaker& spk_b,
                          const CorpusSpec& spec, std::uint64_t seed) {
  if (spk_a.speaker_id == spk_b.speaker_id)
    throw_invalid("make_mixture: speakers must be distinct");

  MixtureParts parts;
  parts.source_a = synthesize_utterance(spk_a, spec.utterance_s,
                                        spec.sample_rate_hz,
                                        derive_seed(seed, "utt_a"));
  parts.source_b = synthesize_utterance(spk_b, spec.utterance_s,
                                        spec.sample_rate_hz,
                                        derive_seed(seed, "utt_b"));
  // Full-overlap min version: both sources truncated to the shorter one.
  const std::size_t n = std::min(parts.source_a.size(), parts.source_b.size());
  parts.source_a.samples.resize(n);
  parts.source_b.samples.resize(n);

  Rng levels(derive_seed(seed, "levels"));
  const double snr_db =
      levels.uniform(spec.snr_range_db.first, spec.snr_range_db.second);
  const double noise_below_db =
      levels.uniform(spec.noise_snr_db.first, spec.noise_snr_db.second);

  // Scale B so 10*log10(Ea/Eb) equals the drawn speech-to-speech SNR.
  const double ea = parts.source_a.energy();
  const double eb = parts.source_b.energy();
  const double gb = std::sqrt(ea / (eb * std::pow(10.0, snr_db / 10.0)));
  for (double& v : parts.source_b.samples) v *= gb;

  double speech_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = parts.source_a.samples[i] + parts.source_b.samples[i];
    speech_energy += s * s;
  }

  Rng noise_rng(derive_seed(seed, "noise"));
  parts.noise.sample_rate_hz = spec.sample_rate_hz;
  parts.noise.samples.resize(n);
  double noise_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = noise_rng.normal();
    parts.noise.samples[i] = v;
    noise_energy += v * v;
  }
  const double gn = std::sqrt(speech_energy *
                              std::pow(10.0, -noise_below_db / 10.0) /
                              noise_energy);
  for (double& v : parts.noise.samples) v *= gn;

  parts.mixture.sample_rate_hz = spec.sample_rate_hz;
  parts.mixture.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    parts.mixture.samples[i] =
        (parts.source_a.samples[i] + parts.source_b.samples[i]) +
        parts.noise.samples[i];
  return parts;
}

MixtureCast cast_mixture(const CorpusSpec& spec, std::size_t mixture_index) {
  const std::size_t n = spec.n_speakers;
  Rng rng(derive_seed(derive_seed(spec.seed, "mixture", mixture_index),
                      "cast"));
  MixtureCast cast;
  cast.a = static_cast<std::size_t>(rng.below(n));
  cast.b = static_cast<std::size_t>(rng.below(n - 1));
  if (cast.b >= cast.a) ++cast.b;
  cast.inactive = static_cast<std::size_t>(rng.below(n - 2));
  const std::size_t lo = std::min(cast.a, cast.b);
  const std::size_t hi = std::max(cast.a, cast.b);
  if (cast.inactive >= lo) ++cast.inactive;
  if (cast.inactive >= hi) ++cast.inactive;
  return cast;
}

bool train_mixture_is_inactive(const CorpusSpec& spec,
                               std::size_t mixture_index) {
  // Evenly spread so any prefix carries close to the requested fraction.
  const std::size_t n_is = static_cast<std::size_t>(
      std::llround(spec.train_is_fraction *
                   static_cast<double>(spec.n_mixtures)));
  const std::size_t m = mixture_index;
  return (m + 1) * n_is / spec.n_mixtures > m * n_is / spec.n_mixtures;
}

std::vector<Trial> build_mixture_trials(
    const CorpusSpec& spec, const std::vector<SyntheticSpeaker>& speakers,
    std::size_t m) {
  if (m >= spec.n_mixtures)
    throw_invalid("build_mixture_trials: mixture index out of range");
  if (speakers.size() != spec.n_speakers)
    throw_invalid("build_mixture_trials: speaker list does not match spec");
  const std::uint64_t seed_m = derive_seed(spec.seed, "mixture", m);
  const MixtureCast cast = cast_mixture(spec, m);
  MixtureParts parts =
      make_mixture(speakers[cast.a], speakers[cast.b], spec, seed_m);

  auto mixture = std::make_shared<const Waveform>(std::move(parts.mixture));
  auto src_a = std::make_shared<const Waveform>(std::move(parts.source_a));
  auto src_b = std::make_shared<const Waveform>(std::move(parts.source_b));
  auto noise = std::make_shared<const Waveform>(std::move(parts.noise));

  auto make_enrollment = [&](std::size_t speaker_index, const char* label) {
    Waveform enr;
    enr.sample_rate_hz = spec.sample_rate_hz;
    for (std::size_t j = 0; j < spec.enrollment_concat_count; ++j) {
      const Waveform utt =
          synthesize_utterance(speakers[speaker_index], spec.utterance_s,
                               spec.sample_rate_hz,
                               derive_seed(seed_m, label, j));
      enr.samples.insert(enr.samples.end(), utt.samples.begin(),
                         utt.samples.end());
    }
    return std::make_shared<const Waveform>(std::move(enr));
  };

  auto active_trial = [&](const char* role, const char* enr_label,
                          bool a_is_target) {
    Trial tr;
    tr.trial_id = mixture_trial_id(m, role);
    tr.mixture = mixture;
    tr.target_reference = a_is_target ? src_a : src_b;
    tr.interference_reference = a_is_target ? src_b : src_a;
    tr.noise = noise;
    tr.source_a = src_a;
    tr.source_b = src_b;
    const std::size_t spk = a_is_target ? cast.a : cast.b;
    tr.enrollment = make_enrollment(spk, enr_label);
    tr.target_speaker_id = speakers[spk].speaker_id;
    tr.enrollment_speaker_id = speakers[spk].speaker_id;
    tr.mixture_speaker_a = speakers[cast.a].speaker_id;
    tr.mixture_speaker_b = speakers[cast.b].speaker_id;
    tr.active = true;
    return tr;
  };
  auto inactive_trial = [&](const char* role, const char* enr_label) {
    Trial tr;
    tr.trial_id = mixture_trial_id(m, role);
    tr.mixture = mixture;
    // No target: the whole speech content is interference.
    Waveform interf;
    interf.sample_rate_hz = spec.sample_rate_hz;
    interf.samples.resize(mixture->size());
    for (std::size_t i = 0; i < interf.size(); ++i)
      interf.samples[i] = src_a->samples[i] + src_b->samples[i];
    tr.interference_reference =
        std::make_shared<const Waveform>(std::move(interf));
    tr.noise = noise;
    tr.source_a = src_a;
    tr.source_b = src_b;
    tr.enrollment = make_enrollment(cast.inactive, enr_label);
    tr.target_speaker_id = speakers[cast.inactive].speaker_id;
    tr.enrollment_speaker_id = speakers[cast.inactive].speaker_id;
    tr.mixture_speaker_a = speakers[cast.a].speaker_id;
    tr.mixture_speaker_b = speakers[cast.b].speaker_id;
    tr.active = false;
    return tr;
  };

  std::vector<Trial> trials;
  if (spec.protocol == CorpusSpec::Protocol::test) {
    trials.push_back(active_trial("as0", "enr_as0", true));
    trials.push_back(active_trial("as1", "enr_as1", false));
    trials.push_back(inactive_trial("is", "enr_is"));
  } else {
    if (train_mixture_is_inactive(spec, m))
      trials.push_back(inactive_trial("tr", "enr_tr"));
    else
      trials.push_back(active_trial("tr", "enr_tr", true));
  }
  return trials;
}

Trial build_trial(const CorpusSpec& spec,
                  const std::vector<SyntheticSpeaker>& speakers,
                  std::size_t index) {
  if (index >= spec.n_trials())
    throw_invalid("build_trial: index out of range");
  const std::size_t per = spec.trials_per_mixture();
  std::vector<Trial> trials =
      build_mixture_trials(spec, speakers, index / per);
  return std::move(trials[index % per]);
}

Corpus build_corpus(const CorpusSpec& spec, int jobs) {
  spec.validate();
  Corpus corpus;
  corpus.spec = spec;
  corpus.speakers = sample_speakers(spec);
  corpus.trials.resize(spec.n_trials());
  const std::size_t per = spec.trials_per_mixture();
  parallel_for(spec.n_mixtures, jobs, [&](std::size_t m) {
    std::vector<Trial> trials =
        build_mixture_trials(spec, corpus.speakers, m);
    for (std::size_t s = 0; s < per; ++s)
      corpus.trials[m * per + s] = std::move(trials[s]);
  });
  return corpus;
}

}  // namespace tsekit
