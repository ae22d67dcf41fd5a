#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "tsekit/error.hpp"
#include "tsekit/fft.hpp"
#include "tsekit/simulator.hpp"

using namespace tsekit;

namespace {

CorpusSpec small_spec() {
  CorpusSpec spec;
  spec.n_speakers = 5;
  spec.n_mixtures = 4;
  spec.utterance_s = 1.0;
  spec.seed = 42;
  return spec;
}

bool same_samples(const Waveform& a, const Waveform& b) {
  return a.sample_rate_hz == b.sample_rate_hz && a.samples == b.samples;
}

}  // namespace

TEST_CASE("speakers sit on an f0 grid with safe pairwise gaps") {
  CorpusSpec spec;
  spec.n_speakers = 40;
  spec.seed = 7;
  const auto speakers = sample_speakers(spec);
  REQUIRE(speakers.size() == 40);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    ids.insert(speakers[i].speaker_id);
    CHECK(speakers[i].f0_hz >= 80.0);
    for (std::size_t j = i + 1; j < speakers.size(); ++j)
      CHECK(std::abs(speakers[i].f0_hz - speakers[j].f0_hz) >= 10.0);
  }
  CHECK(ids.size() == 40);  // distinct ids
  CHECK(speakers[0].speaker_id == "spk000");

  CorpusSpec tiny;
  tiny.n_speakers = 2;
  CHECK_THROWS_AS(sample_speakers(tiny), Error);
}

TEST_CASE("utterances are normalized, deterministic and peak at f0") {
  const auto speakers = sample_speakers(small_spec());
  const SyntheticSpeaker& spk = speakers[2];

  const Waveform u = synthesize_utterance(spk, 2.0, 16000, 99);
  CHECK(u.size() == 32000);
  CHECK(u.sample_rate_hz == 16000);
  CHECK(std::abs(u.rms() - 0.1) < 1e-9);

  const Waveform again = synthesize_utterance(spk, 2.0, 16000, 99);
  CHECK(same_samples(u, again));
  const Waveform other = synthesize_utterance(spk, 2.0, 16000, 100);
  CHECK(!same_samples(u, other));

  // Spectral argmax at the fundamental (amplitude pinned above all
  // harmonics; jitter spreads higher harmonics more than f0).
  std::vector<double> padded(next_power_of_two(u.size()), 0.0);
  std::copy(u.samples.begin(), u.samples.end(), padded.begin());
  const auto spec = rfft(padded);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < spec.size(); ++k)
    if (std::abs(spec[k]) > std::abs(spec[peak])) peak = k;
  const double peak_hz =
      16000.0 * static_cast<double>(peak) / static_cast<double>(padded.size());
  CHECK(std::abs(peak_hz - spk.f0_hz) < std::max(5.0, 0.03 * spk.f0_hz));

  CHECK(synthesize_utterance(spk, 0.7, 8000, 1).size() == 5600);
  CHECK_THROWS_AS(synthesize_utterance(spk, 0.4, 16000, 1), Error);
}

TEST_CASE("mixtures honor the drawn levels and sum exactly") {
  CorpusSpec spec = small_spec();
  spec.snr_range_db = {0.0, 0.0};
  spec.noise_snr_db = {15.0, 15.0};
  const auto speakers = sample_speakers(spec);
  const MixtureParts parts = make_mixture(speakers[0], speakers[1], spec, 5);

  const double ea = parts.source_a.energy();
  const double eb = parts.source_b.energy();
  CHECK(std::abs(10.0 * std::log10(ea / eb)) < 1e-9);

  double speech_energy = 0.0;
  for (std::size_t i = 0; i < parts.mixture.size(); ++i) {
    const double s = parts.source_a.samples[i] + parts.source_b.samples[i];
    speech_energy += s * s;
  }
  const double want_noise = speech_energy * std::pow(10.0, -1.5);
  CHECK(parts.noise.energy() == doctest::Approx(want_noise).epsilon(1e-9));

  // The mixture is the plain sample-wise sum, same association.
  for (std::size_t i = 0; i < parts.mixture.size(); ++i) {
    const double want = (parts.source_a.samples[i] +
                         parts.source_b.samples[i]) +
                        parts.noise.samples[i];
    CHECK(parts.mixture.samples[i] == want);
  }

  CHECK_THROWS_AS(make_mixture(speakers[0], speakers[0], spec, 5), Error);
}

TEST_CASE("test protocol emits two active and one inactive trial per mixture") {
  const CorpusSpec spec = small_spec();
  const Corpus corpus = build_corpus(spec);
  REQUIRE(corpus.trials.size() == 12);

  for (std::size_t m = 0; m < spec.n_mixtures; ++m) {
    const Trial& as0 = corpus.trials[3 * m + 0];
    const Trial& as1 = corpus.trials[3 * m + 1];
    const Trial& is = corpus.trials[3 * m + 2];
    char want[16];
    std::snprintf(want, sizeof want, "m%04zu_", m);
    CHECK(as0.trial_id == std::string(want) + "as0");
    CHECK(as1.trial_id == std::string(want) + "as1");
    CHECK(is.trial_id == std::string(want) + "is");

    CHECK(as0.active);
    CHECK(as1.active);
    CHECK(!is.active);

    // All three trials share the same audio scene.
    CHECK(as0.mixture.get() == as1.mixture.get());
    CHECK(as0.mixture.get() == is.mixture.get());

    // Active targets are the two mixture speakers, in order.
    CHECK(as0.target_reference.get() == as0.source_a.get());
    CHECK(as1.target_reference.get() == as1.source_b.get());
    CHECK(as0.target_speaker_id == as0.mixture_speaker_a);
    CHECK(as1.target_speaker_id == as1.mixture_speaker_b);
    CHECK(as0.enrollment_speaker_id == as0.target_speaker_id);

    // Inactive trial: no target, enrollment speaker is in neither seat,
    // and the interference reference is the full speech sum.
    CHECK(is.target_reference == nullptr);
    CHECK(is.enrollment_speaker_id != is.mixture_speaker_a);
    CHECK(is.enrollment_speaker_id != is.mixture_speaker_b);
    REQUIRE(is.interference_reference != nullptr);
    for (std::size_t i = 0; i < is.interference_reference->size(); ++i)
      CHECK(is.interference_reference->samples[i] ==
            is.source_a->samples[i] + is.source_b->samples[i]);

    // Mixture speakers are distinct.
    CHECK(as0.mixture_speaker_a != as0.mixture_speaker_b);
  }
}

TEST_CASE("enrollment concatenates the requested number of utterances") {
  CorpusSpec spec = small_spec();
  spec.enrollment_concat_count = 3;
  const auto speakers = sample_speakers(spec);
  const Trial tr = build_trial(spec, speakers, 0);
  CHECK(tr.enrollment->size() == 3 * 16000);
  CHECK(std::abs(tr.enrollment->duration_s() - 3.0) < 1e-12);

  // The first utterance inside the concatenation matches count=1 exactly.
  CorpusSpec one = spec;
  one.enrollment_concat_count = 1;
  const Trial tr1 = build_trial(one, speakers, 0);
  REQUIRE(tr1.enrollment->size() == 16000);
  for (std::size_t i = 0; i < tr1.enrollment->size(); ++i)
    CHECK(tr.enrollment->samples[i] == tr1.enrollment->samples[i]);
}

TEST_CASE("train protocol hits the inactive fraction exactly") {
  CorpusSpec spec = small_spec();
  spec.protocol = CorpusSpec::Protocol::train;
  spec.n_mixtures = 10;
  spec.train_is_fraction = 0.3;
  const Corpus corpus = build_corpus(spec);
  REQUIRE(corpus.trials.size() == 10);
  std::size_t inactive = 0;
  for (const Trial& t : corpus.trials) {
    CHECK(t.trial_id.substr(5) == "_tr");
    if (!t.active) {
      ++inactive;
      CHECK(t.target_reference == nullptr);
    }
  }
  CHECK(inactive == 3);
}

TEST_CASE("corpus generation is order-independent and reproducible") {
  const CorpusSpec spec = small_spec();
  const Corpus a = build_corpus(spec, 1);
  const Corpus b = build_corpus(spec, 2);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].trial_id == b.trials[i].trial_id);
    CHECK(same_samples(*a.trials[i].mixture, *b.trials[i].mixture));
    CHECK(same_samples(*a.trials[i].enrollment, *b.trials[i].enrollment));
  }

  // Individual regeneration matches the batch build.
  const auto speakers = sample_speakers(spec);
  for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{11}}) {
    const Trial t = build_trial(spec, speakers, i);
    CHECK(t.trial_id == a.trials[i].trial_id);
    CHECK(same_samples(*t.mixture, *a.trials[i].mixture));
    CHECK(same_samples(*t.enrollment, *a.trials[i].enrollment));
    CHECK(t.active == a.trials[i].active);
  }

  // A different seed changes the audio.
  CorpusSpec other = spec;
  other.seed = 43;
  const Corpus c = build_corpus(other);
  CHECK(!same_samples(*a.trials[0].mixture, *c.trials[0].mixture));
}

TEST_CASE("generated audio is pinned against golden checksums") {
  // Guards the full synthesis chain (speaker sampling, utterances, level
  // draws, noise, casting) against accidental drift. If a deliberate
  // generator change lands, re-pin these from the printed values.
  const Corpus corpus = build_corpus(small_spec());
  const std::uint64_t mix0 = testutil::waveform_checksum(*corpus.trials[0].mixture);
  const std::uint64_t enr11 =
      testutil::waveform_checksum(*corpus.trials[11].enrollment);
  CAPTURE(mix0);
  CAPTURE(enr11);
  CHECK(mix0 == UINT64_C(0x62a64b15f69e7901));
  CHECK(enr11 == UINT64_C(0x3d047060fd20e3f0));
}

TEST_CASE("corpus spec validation names the offending field") {
  CorpusSpec spec;
  auto message_of = [](const CorpusSpec& s) {
    try {
      s.validate();
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  spec.n_speakers = 2;
  CHECK(message_of(spec).find("n_speakers") != std::string::npos);
  spec = {};
  spec.n_mixtures = 0;
  CHECK(message_of(spec).find("n_mixtures") != std::string::npos);
  spec = {};
  spec.utterance_s = 0.2;
  CHECK(message_of(spec).find("utterance_s") != std::string::npos);
  spec = {};
  spec.snr_range_db = {3.0, -3.0};
  CHECK(message_of(spec).find("snr_range_db") != std::string::npos);
  spec = {};
  spec.noise_snr_db = {20.0, 10.0};
  CHECK(message_of(spec).find("noise_snr_db") != std::string::npos);
  spec = {};
  spec.enrollment_concat_count = 6;
  CHECK(message_of(spec).find("enrollment_concat_count") != std::string::npos);
  spec = {};
  spec.train_is_fraction = 1.5;
  CHECK(message_of(spec).find("train_is_fraction") != std::string::npos);
  spec = {};
  spec.sample_rate_hz = 44100;
  CHECK_THROWS_AS(spec.validate(), Error);

  spec = {};
  CHECK_THROWS_AS(build_trial(spec, sample_speakers(spec), 300), Error);
}
