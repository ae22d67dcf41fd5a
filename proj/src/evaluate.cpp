#include "tsekit/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "tsekit/error.hpp"
#include "tsekit/parallel.hpp"
#include "tsekit/wav_io.hpp"

namespace tsekit {

namespace {

// Verification score of an estimate against the enrollment. Estimates that
// cannot be embedded (silent or shorter than one frame) score the floor -1,
// the cosine counterpart of the attenuation floor.
double cosine_score(const Waveform& estimate, const Embedding& enrollment,
                    const EmbedderConfig& cfg) {
  if (estimate.size() < cfg.stft.frame_len || estimate.is_zero()) return -1.0;
  return cosine(embed(estimate, cfg), enrollment);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_opt(const std::optional<double>& v) {
  return v.has_value() ? format_g17(*v) : std::string{};
}

}  // namespace

const char* classifier_name(Classifier c) {
  return c == Classifier::att ? "att" : "cos";
}

Classifier parse_classifier(const std::string& name) {
  if (name == "att") return Classifier::att;
  if (name == "cos") return Classifier::cos;
  throw_invalid("unknown classifier '" + name + "' (expected att|cos)");
}

EvalReport evaluate(const TrialSource& source, const Extractor& extractor,
                    const EvalOptions& options) {
  options.sdr.validate();
  const std::size_t n = source.size();
  if (n == 0) throw_invalid("evaluate: no trials");
  if (options.dump_estimates_dir)
    std::filesystem::create_directories(*options.dump_estimates_dir);

  EvalReport report;
  report.n_trials = n;
  report.classifier = options.classifier;
  report.trials.resize(n);

  // Per-trial extraction and threshold-free scoring, trial-parallel.
  parallel_for(n, options.jobs, [&](std::size_t i) {
    const Trial trial = source.get(i);
    if (!trial.mixture || !trial.enrollment)
      throw_data("trial " + trial.trial_id + " lacks mixture or enrollment");
    const Waveform& mix = *trial.mixture;

    Waveform est = extractor.extract(trial);
    if (est.size() != mix.size() || est.sample_rate_hz != mix.sample_rate_hz)
      throw_data("trial " + trial.trial_id + ": extractor " +
                 extractor.name() + " violated the output-shape contract");
    if (options.dump_estimates_dir)
      write_wav(*options.dump_estimates_dir / (trial.trial_id + ".wav"), est);

    TrialMetrics& r = report.trials[i];
    r.trial_id = trial.trial_id;
    r.active = trial.active;
    r.attenuation_db = attenuation(est, mix);
    r.score_att = r.attenuation_db;

    const EmbedderConfig ecfg =
        EmbedderConfig::default_for_rate(mix.sample_rate_hz);
    const Embedding enr = embed(*trial.enrollment, ecfg);
    r.score_cos = cosine_score(est, enr, ecfg);

    if (trial.active) {
      if (!trial.target_reference)
        throw_data("trial " + trial.trial_id + " lacks target reference");
      const double in = sdr(mix, *trial.target_reference, options.sdr);
      const double out = sdr(est, *trial.target_reference, options.sdr);
      r.sdr_in_db = in;
      r.sdr_out_db = out;
      r.sdri_db = out - in;
    }
  });

  // Classifier calibration on the evaluated set.
  std::vector<TrialScore> att_scores, cos_scores;
  att_scores.reserve(n);
  cos_scores.reserve(n);
  std::size_t active_seen = 0;
  for (const TrialMetrics& r : report.trials) {
    att_scores.push_back({r.trial_id, r.score_att, r.active});
    cos_scores.push_back({r.trial_id, r.score_cos, r.active});
    active_seen += r.active ? 1 : 0;
  }
  if (active_seen == 0 || active_seen == n)
    throw_data("evaluate: need both active and inactive trials");
  report.det_att = det_curve(att_scores);
  report.det_cos = det_curve(cos_scores);

  double th_att = report.det_att.eer_threshold;
  double th_cos = report.det_cos.eer_threshold;
  if (options.threshold_override.has_value()) {
    report.threshold_overridden = true;
    (options.classifier == Classifier::att ? th_att : th_cos) =
        *options.threshold_override;
  }
  report.threshold =
      options.classifier == Classifier::att ? th_att : th_cos;

  // Decisions, post-detection accounting and aggregates (corpus order).
  double sum_sdri = 0.0, sum_sdri_after = 0.0;
  double sum_att_active = 0.0, sum_att_inactive = 0.0;
  for (TrialMetrics& r : report.trials) {
    r.decision_att = classify(r.score_att, th_att, r.trial_id).c;
    r.decision_cos = classify(r.score_cos, th_cos, r.trial_id).c;
    const int c = options.classifier == Classifier::att ? r.decision_att
                                                        : r.decision_cos;
    if (r.active) {
      ++report.n_active;
      // A zeroed (missed) active trial is booked as output SDR 0 dB exactly.
      r.sdri_after_db = c == 1 ? *r.sdri_db : 0.0 - *r.sdr_in_db;
      r.is_failure = *r.sdri_db < options.sdr.fail_threshold_db;
      r.is_fail_or_miss = r.is_failure || c == 0;
      sum_sdri += *r.sdri_db;
      sum_sdri_after += *r.sdri_after_db;
      sum_att_active += r.attenuation_db;
    } else {
      ++report.n_inactive;
      sum_att_inactive += r.attenuation_db;
    }
  }
  report.mean_sdri_before_db =
      sum_sdri / static_cast<double>(report.n_active);
  report.mean_sdri_after_db =
      sum_sdri_after / static_cast<double>(report.n_active);
  report.mean_attenuation_active_db =
      sum_att_active / static_cast<double>(report.n_active);
  report.mean_attenuation_inactive_db =
      sum_att_inactive / static_cast<double>(report.n_inactive);
  report.fail = fail_rate(report.trials, options.sdr);
  report.fail_and_miss =
      fail_and_miss_rate(report.trials, options.classifier, options.sdr);
  return report;
}

void write_per_trial_csv(const std::filesystem::path& path,
                         const EvalReport& report) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(Error::Kind::io, "cannot open for write: " + path.string());
  os << "trial_id,active,score_att,score_cos,decision,sdr_in,sdr_out,sdri,"
        "sdri_after,attenuation\n";
  for (const TrialMetrics& r : report.trials) {
    const int decision = report.classifier == Classifier::att
                             ? r.decision_att
                             : r.decision_cos;
    os << r.trial_id << ',' << (r.active ? 1 : 0) << ','
       << format_g17(r.score_att) << ',' << format_g17(r.score_cos) << ','
       << decision << ',' << format_opt(r.sdr_in_db) << ','
       << format_opt(r.sdr_out_db) << ',' << format_opt(r.sdri_db) << ','
       << format_opt(r.sdri_after_db) << ',' << format_g17(r.attenuation_db)
       << '\n';
  }
  if (!os) throw Error(Error::Kind::io, "write failed: " + path.string());
}

void write_attenuation_csv(const std::filesystem::path& path,
                           const EvalReport& report) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(Error::Kind::io, "cannot open for write: " + path.string());
  os << "trial_id,attenuation_db\n";
  for (const auto& [trial_id, att] : attenuation_trace(report.trials))
    os << trial_id << ',' << format_g17(att) << '\n';
  if (!os) throw Error(Error::Kind::io, "write failed: " + path.string());
}

void write_report_json(const std::filesystem::path& path,
                       const EvalReport& report) {
  nlohmann::ordered_json j;
  j["n_trials"] = report.n_trials;
  j["n_active"] = report.n_active;
  j["n_inactive"] = report.n_inactive;
  j["classifier"] = classifier_name(report.classifier);
  j["threshold"] = report.threshold;
  j["threshold_overridden"] = report.threshold_overridden;
  j["eer"] = report.eer();
  j["eer_att"] = report.det_att.eer;
  j["eer_cos"] = report.det_cos.eer;
  j["eer_threshold_att"] = report.det_att.eer_threshold;
  j["eer_threshold_cos"] = report.det_cos.eer_threshold;
  j["sdri_before_db"] = report.mean_sdri_before_db;
  j["sdri_after_db"] = report.mean_sdri_after_db;
  j["fail"] = report.fail;
  j["fail_and_miss"] = report.fail_and_miss;
  j["attenuation_active_db"] = report.mean_attenuation_active_db;
  j["attenuation_inactive_db"] = report.mean_attenuation_inactive_db;

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(Error::Kind::io, "cannot open for write: " + path.string());
  os << j.dump(2) << "\n";
  if (!os) throw Error(Error::Kind::io, "write failed: " + path.string());
}

}  // namespace tsekit
