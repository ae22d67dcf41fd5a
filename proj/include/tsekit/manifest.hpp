#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsekit/simulator.hpp"

namespace tsekit {

// On-disk corpus exchange format: a JSON-lines manifest, one trial per line,
// with WAV paths relative to the manifest's directory. target_wav is null on
// inactive trials. source_a_wav/source_b_wav and the mixture speaker ids are
// written by the simulator but optional on externally supplied manifests.
struct ManifestEntry {
  std::string trial_id;
  bool active = false;
  std::string mixture_wav;
  std::string target_wav;  // empty encodes null
  std::string interference_wav;
  std::string noise_wav;
  std::string enrollment_wav;
  std::string source_a_wav;
  std::string source_b_wav;
  std::string target_speaker;
  std::string enrollment_speaker;
  std::string mixture_speaker_a;
  std::string mixture_speaker_b;
  double enrollment_duration_s = 0.0;
};

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
};

// Streams the whole corpus for spec to out_dir: float-32 WAVs under
// out_dir/wav plus out_dir/manifest.jsonl. jobs parallelizes synthesis per
// mixture; output bytes do not depend on it.
void write_corpus_tree(const CorpusSpec& spec,
                       const std::vector<SyntheticSpeaker>& speakers,
                       const std::filesystem::path& out_dir, int jobs = 1);

Manifest read_manifest(const std::filesystem::path& manifest_path);

// Loads one trial's audio from disk. Validates that reference, interference
// and noise match the mixture length and rate.
Trial load_trial(const Manifest& manifest, std::size_t index);

}  // namespace tsekit
