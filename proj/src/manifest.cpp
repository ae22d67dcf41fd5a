#include "tsekit/manifest.hpp"

#include <fstream>
#include <json.hpp>

#include "tsekit/error.hpp"
#include "tsekit/parallel.hpp"
#include "tsekit/wav_io.hpp"

namespace tsekit {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string mixture_file(std::size_t m, const char* part) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "wav/m%04zu_%s.wav", m, part);
  return buf;
}

ordered_json entry_to_json(const ManifestEntry& e) {
  ordered_json j;
  j["trial_id"] = e.trial_id;
  j["active"] = e.active;
  j["mixture_wav"] = e.mixture_wav;
  if (e.target_wav.empty())
    j["target_wav"] = nullptr;
  else
    j["target_wav"] = e.target_wav;
  j["interference_wav"] = e.interference_wav;
  j["noise_wav"] = e.noise_wav;
  j["enrollment_wav"] = e.enrollment_wav;
  j["target_speaker"] = e.target_speaker;
  j["enrollment_speaker"] = e.enrollment_speaker;
  j["enrollment_duration_s"] = e.enrollment_duration_s;
  j["source_a_wav"] = e.source_a_wav;
  j["source_b_wav"] = e.source_b_wav;
  j["mixture_speaker_a"] = e.mixture_speaker_a;
  j["mixture_speaker_b"] = e.mixture_speaker_b;
  return j;
}

ManifestEntry entry_from_json(const ordered_json& j, std::size_t line_no) {
  const std::string where =
      "manifest line " + std::to_string(line_no) + ": ";
  auto need = [&](const char* key) -> const ordered_json& {
    auto it = j.find(key);
    if (it == j.end())
      throw_data(where + "missing required key " + key);
    return *it;
  };
  auto opt_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    return it->get<std::string>();
  };
  try {
    ManifestEntry e;
    e.trial_id = need("trial_id").get<std::string>();
    e.active = need("active").get<bool>();
    e.mixture_wav = need("mixture_wav").get<std::string>();
    const ordered_json& target = need("target_wav");
    e.target_wav = target.is_null() ? std::string{} : target.get<std::string>();
    e.interference_wav = need("interference_wav").get<std::string>();
    e.noise_wav = need("noise_wav").get<std::string>();
    e.enrollment_wav = need("enrollment_wav").get<std::string>();
    e.target_speaker = need("target_speaker").get<std::string>();
    e.enrollment_speaker = need("enrollment_speaker").get<std::string>();
    e.enrollment_duration_s = need("enrollment_duration_s").get<double>();
    e.source_a_wav = opt_string("source_a_wav");
    e.source_b_wav = opt_string("source_b_wav");
    e.mixture_speaker_a = opt_string("mixture_speaker_a");
    e.mixture_speaker_b = opt_string("mixture_speaker_b");
    if (e.active && e.target_wav.empty())
      throw_data(where + "active trial " + e.trial_id + " has null target_wav");
    if (!e.active && !e.target_wav.empty())
      throw_data(where + "inactive trial " + e.trial_id +
                 " carries a target_wav");
    return e;
  } catch (const ordered_json::exception& ex) {
    throw_data(where + ex.what());
  }
}

}  // namespace

void write_corpus_tree(const CorpusSpec& spec,
                       const std::vector<SyntheticSpeaker>& speakers,
                       const fs::path& out_dir, int jobs) {
  spec.validate();
  fs::create_directories(out_dir / "wav");
  std::ofstream manifest(out_dir / "manifest.jsonl",
                         std::ios::binary | std::ios::trunc);
  if (!manifest)
    throw Error(Error::Kind::io,
                "cannot open for write: " +
                    (out_dir / "manifest.jsonl").string());

  const std::size_t chunk =
      jobs <= 1 ? 1 : static_cast<std::size_t>(jobs);
  std::vector<std::vector<Trial>> bundles(chunk);

  for (std::size_t m0 = 0; m0 < spec.n_mixtures; m0 += chunk) {
    const std::size_t n_now = std::min(chunk, spec.n_mixtures - m0);
    parallel_for(n_now, jobs, [&](std::size_t i) {
      bundles[i] = build_mixture_trials(spec, speakers, m0 + i);
    });
    for (std::size_t i = 0; i < n_now; ++i) {
      const std::size_t m = m0 + i;
      const std::vector<Trial>& trials = bundles[i];

      const std::string mix = mixture_file(m, "mix");
      const std::string src_a = mixture_file(m, "src_a");
      const std::string src_b = mixture_file(m, "src_b");
      const std::string noise = mixture_file(m, "noise");
      write_wav(out_dir / mix, *trials[0].mixture);
      write_wav(out_dir / src_a, *trials[0].source_a);
      write_wav(out_dir / src_b, *trials[0].source_b);
      write_wav(out_dir / noise, *trials[0].noise);
      std::string interference_sum;

      for (const Trial& tr : trials) {
        ManifestEntry e;
        e.trial_id = tr.trial_id;
        e.active = tr.active;
        e.mixture_wav = mix;
        e.noise_wav = noise;
        e.source_a_wav = src_a;
        e.source_b_wav = src_b;
        e.target_speaker = tr.target_speaker_id;
        e.enrollment_speaker = tr.enrollment_speaker_id;
        e.mixture_speaker_a = tr.mixture_speaker_a;
        e.mixture_speaker_b = tr.mixture_speaker_b;
        e.enrollment_duration_s = tr.enrollment->duration_s();
        e.enrollment_wav = "wav/" + tr.trial_id + "_enr.wav";
        write_wav(out_dir / e.enrollment_wav, *tr.enrollment);
        if (tr.active) {
          e.target_wav =
              tr.target_reference == trials[0].source_a ? src_a : src_b;
          e.interference_wav =
              tr.target_reference == trials[0].source_a ? src_b : src_a;
        } else {
          if (interference_sum.empty()) {
            interference_sum = mixture_file(m, "interf_sum");
            write_wav(out_dir / interference_sum,
                      *tr.interference_reference);
          }
          e.interference_wav = interference_sum;
        }
        manifest << entry_to_json(e).dump() << "\n";
      }
    }
  }
  if (!manifest)
    throw Error(Error::Kind::io,
                "write failed: " + (out_dir / "manifest.jsonl").string());
}

Manifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in)
    throw Error(Error::Kind::io, "cannot open " + manifest_path.string());
  Manifest m;
  m.base_dir = manifest_path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::exception& ex) {
      throw_data("manifest line " + std::to_string(line_no) + ": " +
                 ex.what());
    }
    m.entries.push_back(entry_from_json(j, line_no));
  }
  if (in.bad())
    throw Error(Error::Kind::io, "read failed: " + manifest_path.string());
  if (m.entries.empty())
    throw_data("manifest is empty: " + manifest_path.string());
  return m;
}

Trial load_trial(const Manifest& manifest, std::size_t index) {
  if (index >= manifest.entries.size())
    throw_invalid("load_trial: index out of range");
  const ManifestEntry& e = manifest.entries[index];
  const std::string where = "trial " + e.trial_id + ": ";

  auto load = [&](const std::string& rel) {
    return std::make_shared<const Waveform>(read_wav(manifest.base_dir / rel));
  };
  auto check_against_mixture = [&](const Waveform& w, const char* what,
                                   const Waveform& mix) {
    if (w.sample_rate_hz != mix.sample_rate_hz)
      throw_data(where + std::string(what) + " sample rate mismatch");
    if (w.size() != mix.size())
      throw_data(where + std::string(what) + " length mismatch");
  };

  Trial tr;
  tr.trial_id = e.trial_id;
  tr.active = e.active;
  tr.target_speaker_id = e.target_speaker;
  tr.enrollment_speaker_id = e.enrollment_speaker;
  tr.mixture_speaker_a = e.mixture_speaker_a;
  tr.mixture_speaker_b = e.mixture_speaker_b;

  tr.mixture = load(e.mixture_wav);
  if (!e.target_wav.empty()) {
    tr.target_reference = load(e.target_wav);
    check_against_mixture(*tr.target_reference, "target", *tr.mixture);
  }
  tr.interference_reference = load(e.interference_wav);
  check_against_mixture(*tr.interference_reference, "interference",
                        *tr.mixture);
  tr.noise = load(e.noise_wav);
  check_against_mixture(*tr.noise, "noise", *tr.mixture);
  tr.enrollment = load(e.enrollment_wav);
  if (tr.enrollment->sample_rate_hz != tr.mixture->sample_rate_hz)
    throw_data(where + "enrollment sample rate mismatch");
  if (!e.source_a_wav.empty()) {
    tr.source_a = load(e.source_a_wav);
    check_against_mixture(*tr.source_a, "source_a", *tr.mixture);
  }
  if (!e.source_b_wav.empty()) {
    tr.source_b = load(e.source_b_wav);
    check_against_mixture(*tr.source_b, "source_b", *tr.mixture);
  }
  return tr;
}

}  // namespace tsekit
