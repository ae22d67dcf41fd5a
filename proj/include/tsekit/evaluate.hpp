#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsekit/detection.hpp"
#include "tsekit/embedding.hpp"
#include "tsekit/extractors.hpp"
#include "tsekit/manifest.hpp"
#include "tsekit/metrics.hpp"

namespace tsekit {

// Abstract trial stream so evaluation can run over an in-memory corpus, a
// manifest on disk, or trials regenerated on the fly. get() is called from
// worker threads and must be safe for concurrent const use.
class TrialSource {
 public:
  virtual ~TrialSource() = default;
  virtual std::size_t size() const = 0;
  virtual Trial get(std::size_t index) const = 0;
};

class CorpusSource final : public TrialSource {
 public:
  explicit CorpusSource(const Corpus& corpus) : corpus_(corpus) {}
  std::size_t size() const override { return corpus_.trials.size(); }
  Trial get(std::size_t index) const override {
    return corpus_.trials.at(index);
  }

 private:
  const Corpus& corpus_;
};

class ManifestSource final : public TrialSource {
 public:
  explicit ManifestSource(const Manifest& manifest) : manifest_(manifest) {}
  std::size_t size() const override { return manifest_.size(); }
  Trial get(std::size_t index) const override {
    return load_trial(manifest_, index);
  }

 private:
  const Manifest& manifest_;
};

// Regenerates each trial from the corpus spec on demand; nothing is kept in
// memory or written to disk.
class GeneratedSource final : public TrialSource {
 public:
  explicit GeneratedSource(const CorpusSpec& spec)
      : spec_(spec), speakers_(sample_speakers(spec)) {}
  std::size_t size() const override { return spec_.n_trials(); }
  Trial get(std::size_t index) const override {
    return build_trial(spec_, speakers_, index);
  }

 private:
  CorpusSpec spec_;
  std::vector<SyntheticSpeaker> speakers_;
};

struct EvalOptions {
  Classifier classifier = Classifier::cos;
  // Overrides the EER-calibrated threshold of the selected classifier.
  std::optional<double> threshold_override;
  SdrConfig sdr;
  int jobs = 1;
  // When set, every estimate is written there as <trial_id>.wav (float-32).
  std::optional<std::filesystem::path> dump_estimates_dir;
};

struct EvalReport {
  std::size_t n_trials = 0, n_active = 0, n_inactive = 0;
  Classifier classifier = Classifier::cos;
  double threshold = 0.0;
  bool threshold_overridden = false;
  DetCurve det_att, det_cos;
  double mean_sdri_before_db = 0.0;  // over active trials, corpus order
  double mean_sdri_after_db = 0.0;
  double fail = 0.0;
  double fail_and_miss = 0.0;
  double mean_attenuation_active_db = 0.0;
  double mean_attenuation_inactive_db = 0.0;
  std::vector<TrialMetrics> trials;  // corpus order

  double eer() const {
    return classifier == Classifier::att ? det_att.eer : det_cos.eer;
  }
  const DetCurve& selected_det() const {
    return classifier == Classifier::att ? det_att : det_cos;
  }
};

// Runs extraction and scoring over every trial (parallelizable), calibrates
// both classifiers at their EER points on the evaluated set, applies the
// selected classifier's threshold, and aggregates all metrics. The cosine
// score of an estimate too short or silent to embed is floored at -1.
EvalReport evaluate(const TrialSource& source, const Extractor& extractor,
                    const EvalOptions& options);

const char* classifier_name(Classifier c);
Classifier parse_classifier(const std::string& name);

// Output files. All floating-point fields are printed with enough digits to
// round-trip exactly, so reports can be recomputed from the CSVs.
void write_per_trial_csv(const std::filesystem::path& path,
                         const EvalReport& report);
void write_attenuation_csv(const std::filesystem::path& path,
                           const EvalReport& report);
void write_report_json(const std::filesystem::path& path,
                       const EvalReport& report);

}  // namespace tsekit
