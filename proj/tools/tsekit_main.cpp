// tsekit command-line harness: corpus synthesis, extractor scoring with
// AS/IS detection, enrollment-duration sweeps, and loss gradient checks.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsekit/error.hpp"
#include "tsekit/evaluate.hpp"
#include "tsekit/extractors.hpp"
#include "tsekit/losses.hpp"
#include "tsekit/manifest.hpp"
#include "tsekit/rng.hpp"
#include "tsekit/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tsekit;

namespace {

// ---------------------------------------------------------------------------
// Config file handling. Flags override config-file values, which override
// built-in defaults; the merged result is echoed to resolved_config.json in
// the output directory (output locations themselves are not part of it, so
// runs into different directories stay byte-comparable).

nlohmann::json load_config_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw_invalid("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_invalid("config: " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw_invalid("config: top level must be an object");
  return j;
}

void check_config_keys(const nlohmann::json& cfg,
                       const std::vector<std::string>& allowed,
                       const std::string& subcommand) {
  for (const auto& [key, value] : cfg.items()) {
    (void)value;
    bool known = false;
    for (const std::string& k : allowed) known = known || k == key;
    if (!known)
      throw_invalid("config: unknown key '" + key + "' for " + subcommand);
  }
}

// Applies cfg[key] to target unless the flag was given on the command line.
template <typename T>
void take(const nlohmann::json& cfg, const char* key, const CLI::App& sub,
          const std::string& flag, T& target) {
  if (!cfg.contains(key) || sub.count(flag) > 0) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw_invalid(std::string("config: key '") + key + "': " + e.what());
  }
}

void take_pair(const nlohmann::json& cfg, const char* key, const CLI::App& sub,
               const std::string& lo_flag, const std::string& hi_flag,
               std::pair<double, double>& target) {
  if (!cfg.contains(key)) return;
  const nlohmann::json& v = cfg.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw_invalid(std::string("config: key '") + key +
                  "' must be a [low, high] number pair");
  if (sub.count(lo_flag) == 0) target.first = v[0].get<double>();
  if (sub.count(hi_flag) == 0) target.second = v[1].get<double>();
}

// ---------------------------------------------------------------------------
// Shared flag groups.

struct CorpusFlags {
  CorpusSpec spec;
  std::string protocol = "test";

  void add_options(CLI::App& sub) {
    sub.add_option("--n-speakers", spec.n_speakers, "speaker pool size");
    sub.add_option("--n-mixtures", spec.n_mixtures, "number of mixtures");
    sub.add_option("--rate", spec.sample_rate_hz, "sample rate in Hz");
    sub.add_option("--utterance-s", spec.utterance_s,
                   "utterance duration in seconds");
    sub.add_option("--snr-lo", spec.snr_range_db.first,
                   "speaker SNR range low edge in dB");
    sub.add_option("--snr-hi", spec.snr_range_db.second,
                   "speaker SNR range high edge in dB");
    sub.add_option("--noise-snr-lo", spec.noise_snr_db.first,
                   "noise level range low edge, dB below summed speech");
    sub.add_option("--noise-snr-hi", spec.noise_snr_db.second,
                   "noise level range high edge, dB below summed speech");
    sub.add_option("--enroll-concat", spec.enrollment_concat_count,
                   "utterances concatenated per enrollment");
    sub.add_option("--protocol", protocol, "trial protocol: test|train");
    sub.add_option("--train-is-fraction", spec.train_is_fraction,
                   "inactive-target fraction in the train protocol");
    sub.add_option("--seed", spec.seed, "master random seed");
  }

  static std::vector<std::string> config_keys() {
    return {"n_speakers",     "n_mixtures",  "sample_rate_hz",
            "utterance_s",    "snr_range_db", "noise_snr_db",
            "enrollment_concat_count", "protocol", "train_is_fraction",
            "seed"};
  }

  void apply_config(const nlohmann::json& cfg, const CLI::App& sub) {
    take(cfg, "n_speakers", sub, "--n-speakers", spec.n_speakers);
    take(cfg, "n_mixtures", sub, "--n-mixtures", spec.n_mixtures);
    take(cfg, "sample_rate_hz", sub, "--rate", spec.sample_rate_hz);
    take(cfg, "utterance_s", sub, "--utterance-s", spec.utterance_s);
    take_pair(cfg, "snr_range_db", sub, "--snr-lo", "--snr-hi",
              spec.snr_range_db);
    take_pair(cfg, "noise_snr_db", sub, "--noise-snr-lo", "--noise-snr-hi",
              spec.noise_snr_db);
    take(cfg, "enrollment_concat_count", sub, "--enroll-concat",
         spec.enrollment_concat_count);
    take(cfg, "protocol", sub, "--protocol", protocol);
    take(cfg, "train_is_fraction", sub, "--train-is-fraction",
         spec.train_is_fraction);
    take(cfg, "seed", sub, "--seed", spec.seed);
  }

  // Resolves the protocol string and validates every field.
  const CorpusSpec& resolve() {
    if (protocol == "test") {
      spec.protocol = CorpusSpec::Protocol::test;
    } else if (protocol == "train") {
      spec.protocol = CorpusSpec::Protocol::train;
    } else {
      throw_invalid("protocol must be test or train, got '" + protocol + "'");
    }
    spec.validate();
    return spec;
  }

  ordered_json resolved_json() const {
    ordered_json j;
    j["n_speakers"] = spec.n_speakers;
    j["n_mixtures"] = spec.n_mixtures;
    j["sample_rate_hz"] = spec.sample_rate_hz;
    j["utterance_s"] = spec.utterance_s;
    j["snr_range_db"] = {spec.snr_range_db.first, spec.snr_range_db.second};
    j["noise_snr_db"] = {spec.noise_snr_db.first, spec.noise_snr_db.second};
    j["enrollment_concat_count"] = spec.enrollment_concat_count;
    j["protocol"] = protocol;
    j["train_is_fraction"] = spec.train_is_fraction;
    j["seed"] = spec.seed;
    return j;
  }
};

struct ScoringFlags {
  std::string extractor = "oracle";
  std::string classifier = "cos";
  double threshold = 0.0;
  IsAwareOracleConfig is_aware;

  void add_options(CLI::App& sub, bool with_threshold) {
    sub.add_option("--extractor", extractor,
                   "oracle|irm|blind-irm|passthrough|zero|wrong|is-aware|"
                   "external:<dir>");
    sub.add_option("--classifier", classifier,
                   "AS/IS classifier for gating: att|cos");
    if (with_threshold)
      sub.add_option("--threshold", threshold,
                     "fixed decision threshold (default: EER calibration on "
                     "the evaluated set)");
    sub.add_option("--miss-prob", is_aware.miss_prob,
                   "is-aware extractor: active-trial miss probability");
    sub.add_option("--fa-prob", is_aware.false_alarm_prob,
                   "is-aware extractor: inactive-trial false-alarm "
                   "probability");
    sub.add_option("--residual-floor-db", is_aware.residual_floor_db,
                   "is-aware extractor: residual level on missed trials");
  }

  static std::vector<std::string> config_keys(bool with_threshold) {
    std::vector<std::string> keys = {"extractor", "classifier", "miss_prob",
                                     "fa_prob", "residual_floor_db"};
    if (with_threshold) keys.push_back("threshold");
    return keys;
  }

  void apply_config(const nlohmann::json& cfg, const CLI::App& sub) {
    take(cfg, "extractor", sub, "--extractor", extractor);
    take(cfg, "classifier", sub, "--classifier", classifier);
    take(cfg, "miss_prob", sub, "--miss-prob", is_aware.miss_prob);
    take(cfg, "fa_prob", sub, "--fa-prob", is_aware.false_alarm_prob);
    take(cfg, "residual_floor_db", sub, "--residual-floor-db",
         is_aware.residual_floor_db);
  }

  bool threshold_given(const nlohmann::json& cfg, const CLI::App& sub) {
    if (sub.count("--threshold") > 0) return true;
    if (!cfg.contains("threshold")) return false;
    take(cfg, "threshold", sub, "--threshold", threshold);
    return true;
  }

  ordered_json resolved_json() const {
    ordered_json j;
    j["extractor"] = extractor;
    j["classifier"] = classifier;
    j["miss_prob"] = is_aware.miss_prob;
    j["fa_prob"] = is_aware.false_alarm_prob;
    j["residual_floor_db"] = is_aware.residual_floor_db;
    return j;
  }
};

void write_resolved_config(const fs::path& out_dir, const ordered_json& j) {
  fs::create_directories(out_dir);
  const fs::path path = out_dir / "resolved_config.json";
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(Error::Kind::io, "cannot open for write: " + path.string());
  os << j.dump(2) << "\n";
  if (!os) throw Error(Error::Kind::io, "write failed: " + path.string());
}

void print_report(const EvalReport& r) {
  std::printf("trials: %zu (%zu active, %zu inactive)\n", r.n_trials,
              r.n_active, r.n_inactive);
  std::printf("classifier: %s  threshold: %.6g%s\n",
              classifier_name(r.classifier), r.threshold,
              r.threshold_overridden ? " (override)" : " (EER calibrated)");
  std::printf("eer: att %.4f  cos %.4f\n", r.det_att.eer, r.det_cos.eer);
  std::printf("sdri before(after): %.2f(%.2f) dB\n", r.mean_sdri_before_db,
              r.mean_sdri_after_db);
  std::printf("fail: %.4f  fail&miss: %.4f\n", r.fail, r.fail_and_miss);
  std::printf("attenuation: active %.2f dB, inactive %.2f dB\n",
              r.mean_attenuation_active_db, r.mean_attenuation_inactive_db);
}

void write_eval_outputs(const fs::path& out_dir, const EvalReport& report) {
  fs::create_directories(out_dir);
  write_per_trial_csv(out_dir / "per_trial.csv", report);
  write_det_csv(out_dir / "det_att.csv", report.det_att);
  write_det_csv(out_dir / "det_cos.csv", report.det_cos);
  write_attenuation_csv(out_dir / "attenuation.csv", report);
  write_report_json(out_dir / "report.json", report);
}

// ---------------------------------------------------------------------------
// Subcommands.

int run_simulate(const CLI::App& sub, const nlohmann::json& cfg,
                 CorpusFlags& corpus, const fs::path& out, int jobs) {
  auto keys = CorpusFlags::config_keys();
  keys.push_back("jobs");
  check_config_keys(cfg, keys, "simulate");
  corpus.apply_config(cfg, sub);
  take(cfg, "jobs", sub, "--jobs", jobs);
  const CorpusSpec& spec = corpus.resolve();

  const auto speakers = sample_speakers(spec);
  write_corpus_tree(spec, speakers, out, jobs);
  write_resolved_config(out, corpus.resolved_json());
  std::printf("wrote %zu trials (%zu mixtures, %s protocol) to %s\n",
              spec.n_trials(), spec.n_mixtures, corpus.protocol.c_str(),
              (out / "manifest.jsonl").string().c_str());
  return 0;
}

int run_evaluate(const CLI::App& sub, const nlohmann::json& cfg,
                 ScoringFlags& scoring, const fs::path& out, int jobs,
                 std::uint64_t seed, fs::path manifest_path,
                 fs::path dump_dir) {
  auto keys = ScoringFlags::config_keys(/*with_threshold=*/true);
  keys.insert(keys.end(), {"jobs", "seed", "manifest"});
  check_config_keys(cfg, keys, "evaluate");
  scoring.apply_config(cfg, sub);
  take(cfg, "jobs", sub, "--jobs", jobs);
  take(cfg, "seed", sub, "--seed", seed);
  {
    std::string m = manifest_path.string();
    take(cfg, "manifest", sub, "--manifest", m);
    manifest_path = m;
  }
  if (manifest_path.empty())
    throw_invalid("evaluate: --manifest is required (or 'manifest' in the "
                  "config file)");

  scoring.is_aware.seed = seed;
  EvalOptions options;
  options.classifier = parse_classifier(scoring.classifier);
  if (scoring.threshold_given(cfg, sub))
    options.threshold_override = scoring.threshold;
  options.jobs = jobs;
  if (!dump_dir.empty()) options.dump_estimates_dir = dump_dir;

  const auto extractor = make_extractor(scoring.extractor, scoring.is_aware);
  const Manifest manifest = read_manifest(manifest_path);
  const EvalReport report =
      evaluate(ManifestSource(manifest), *extractor, options);

  ordered_json rc = scoring.resolved_json();
  rc["manifest"] = manifest_path.string();
  rc["seed"] = seed;
  if (options.threshold_override.has_value())
    rc["threshold"] = *options.threshold_override;
  write_resolved_config(out, rc);
  write_eval_outputs(out, report);
  print_report(report);
  std::printf("wrote %s\n", (out / "report.json").string().c_str());
  return 0;
}

int run_sweep(const CLI::App& sub, const nlohmann::json& cfg,
              CorpusFlags& corpus, ScoringFlags& scoring, const fs::path& out,
              int jobs, std::vector<std::size_t> counts) {
  auto keys = CorpusFlags::config_keys();
  const auto skeys = ScoringFlags::config_keys(/*with_threshold=*/false);
  keys.insert(keys.end(), skeys.begin(), skeys.end());
  keys.insert(keys.end(), {"jobs", "counts"});
  check_config_keys(cfg, keys, "sweep-enrollment");
  corpus.apply_config(cfg, sub);
  scoring.apply_config(cfg, sub);
  take(cfg, "jobs", sub, "--jobs", jobs);
  take(cfg, "counts", sub, "--counts", counts);

  if (counts.empty()) throw_invalid("sweep-enrollment: counts must not be empty");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1 || counts[i] > 5)
      throw_invalid("sweep-enrollment: counts must lie in 1..5");
    for (std::size_t k = 0; k < i; ++k)
      if (counts[k] == counts[i])
        throw_invalid("sweep-enrollment: counts must be distinct");
  }
  CorpusSpec spec = corpus.resolve();

  // The extractor's own randomness must not collide with the corpus streams.
  scoring.is_aware.seed = derive_seed(spec.seed, "extractor");
  const auto extractor = make_extractor(scoring.extractor, scoring.is_aware);
  EvalOptions options;
  options.classifier = parse_classifier(scoring.classifier);
  options.jobs = jobs;

  fs::create_directories(out);
  const fs::path csv_path = out / "sweep.csv";
  std::ofstream os(csv_path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(Error::Kind::io,
                "cannot open for write: " + csv_path.string());
  os << "count,mean_duration_s,sdri,eer\n";
  std::printf("count  mean_duration_s  sdri_db  eer\n");
  for (std::size_t count : counts) {
    // Only the enrollment stream depends on the concat count; mixtures are
    // bit-identical across sweep points.
    spec.enrollment_concat_count = count;
    const GeneratedSource source(spec);
    // Enrollment durations are uniform across trials by construction, so one
    // probe measures the mean.
    const double mean_duration_s = source.get(0).enrollment->duration_s();
    const EvalReport report = evaluate(source, *extractor, options);
    char row[128];
    std::snprintf(row, sizeof row, "%zu,%.17g,%.17g,%.17g\n", count,
                  mean_duration_s, report.mean_sdri_before_db, report.eer());
    os << row;
    std::printf("%5zu  %15.2f  %7.2f  %.4f\n", count, mean_duration_s,
                report.mean_sdri_before_db, report.eer());
  }
  if (!os) throw Error(Error::Kind::io, "write failed: " + csv_path.string());
  os.close();

  ordered_json rc = corpus.resolved_json();
  const ordered_json scoring_rc = scoring.resolved_json();
  for (const auto& [k, v] : scoring_rc.items()) rc[k] = v;
  rc["counts"] = counts;
  write_resolved_config(out, rc);
  std::printf("wrote %s\n", csv_path.string().c_str());
  return 0;
}

// One random gradient-check point: dimensions 8..128, estimate scales swept
// log-uniformly over 1e-3..1e1 so both near-converged and wild outputs are
// covered.
Waveform random_waveform(Rng& rng, std::size_t n, double scale) {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples.resize(n);
  for (double& v : w.samples) v = scale * rng.normal();
  return w;
}

double centered_cosine(const Waveform& a, const Waveform& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a.samples[i];
    mb += b.samples[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double dot = 0.0, ea = 0.0, eb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a.samples[i] - ma, y = b.samples[i] - mb;
    dot += x * y;
    ea += x * x;
    eb += y * y;
  }
  if (ea <= 0.0 || eb <= 0.0) return 0.0;
  return dot / std::sqrt(ea * eb);
}

int run_losscheck(const CLI::App& sub, const nlohmann::json& cfg,
                  std::uint64_t seed, std::size_t n_points, double tolerance,
                  bool corrupt_gradient, const fs::path& out) {
  check_config_keys(
      cfg, {"seed", "n_points", "tolerance", "corrupt_gradient"}, "losscheck");
  take(cfg, "seed", sub, "--seed", seed);
  take(cfg, "n_points", sub, "--n-points", n_points);
  take(cfg, "tolerance", sub, "--tol", tolerance);
  take(cfg, "corrupt_gradient", sub, "--corrupt-gradient", corrupt_gradient);
  if (n_points < 1) throw_invalid("losscheck: n_points must be >= 1");
  if (tolerance <= 0) throw_invalid("losscheck: tolerance must be positive");

  const LossConfig loss_cfg;
  struct Check {
    const char* name;
    // Estimate magnitude sweep, log10 edges.
    double scale_lo, scale_hi;
    std::function<LossFn(Rng&, const Waveform&)> make;
  };
  const std::vector<Check> checks = {
      {"active", -3.0, 1.0,
       [&](Rng& rng, const Waveform& est) -> LossFn {
         auto ref = std::make_shared<Waveform>(
             random_waveform(rng, est.size(), 1.0));
         return [ref, &loss_cfg, corrupt_gradient](const Waveform& e) {
           LossValue v = loss_active(e, *ref, loss_cfg);
           if (corrupt_gradient) v.gradient[0] += 1e-3;
           return v;
         };
       }},
      {"inactive", -3.0, 1.0,
       [&](Rng& rng, const Waveform& est) -> LossFn {
         auto mix = std::make_shared<Waveform>(
             random_waveform(rng, est.size(), 1.0));
         return [mix, &loss_cfg](const Waveform& e) {
           return loss_inactive(e, *mix, loss_cfg);
         };
       }},
      // The scale-invariant loss is singular where the (centered) estimate
      // is orthogonal to the reference, so finite differences are only
      // trustworthy at points with a bounded angle to the reference;
      // references are redrawn until the point is well conditioned.
      {"si_snr", -1.0, 1.0,
       [&](Rng& rng, const Waveform& est) -> LossFn {
         auto ref = std::make_shared<Waveform>();
         for (;;) {
           *ref = random_waveform(rng, est.size(), 1.0);
           const double c = centered_cosine(est, *ref);
           if (std::abs(c) >= 0.05 && std::abs(c) <= 0.999) break;
         }
         return [ref](const Waveform& e) { return loss_si_snr(e, *ref); };
       }},
  };

  std::printf("gradient check: %zu points per loss, seed %" PRIu64 "\n",
              n_points, seed);
  std::printf("tau_active = %g, tau_inactive = %g\n", loss_cfg.tau_active,
              loss_cfg.tau_inactive);

  ordered_json report;
  report["seed"] = seed;
  report["n_points"] = n_points;
  report["tolerance"] = tolerance;
  report["tau_active"] = loss_cfg.tau_active;
  report["tau_inactive"] = loss_cfg.tau_inactive;
  ordered_json errors;
  double worst = 0.0;
  std::string worst_name;
  for (const Check& check : checks) {
    double max_err = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
      Rng rng(derive_seed(seed, std::string("losscheck:") + check.name, i));
      const std::size_t n = 8 + rng.below(121);
      const double scale =
          std::pow(10.0, rng.uniform(check.scale_lo, check.scale_hi));
      Waveform est = random_waveform(rng, n, scale);
      const LossFn fn = check.make(rng, est);
      max_err = std::max(max_err, check_gradient(fn, est));
    }
    std::printf("  %-8s max relative error %.3e  %s\n", check.name, max_err,
                max_err <= tolerance ? "ok" : "FAIL");
    errors[check.name] = max_err;
    if (max_err > worst) {
      worst = max_err;
      worst_name = check.name;
    }
  }
  report["max_relative_error"] = errors;
  report["pass"] = worst <= tolerance;

  if (!out.empty()) {
    fs::create_directories(out);
    const fs::path path = out / "losscheck.json";
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
      throw Error(Error::Kind::io, "cannot open for write: " + path.string());
    os << report.dump(2) << "\n";
    if (!os) throw Error(Error::Kind::io, "write failed: " + path.string());
    ordered_json rc;
    rc["seed"] = seed;
    rc["n_points"] = n_points;
    rc["tolerance"] = tolerance;
    if (corrupt_gradient) rc["corrupt_gradient"] = true;
    write_resolved_config(out, rc);
  }

  if (worst > tolerance) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "gradient check failed: %s loss max relative error %.3e "
                  "exceeds %g",
                  worst_name.c_str(), worst, tolerance);
    throw Error(Error::Kind::check_failed, msg);
  }
  std::printf("all gradients within %g\n", tolerance);
  return 0;
}

int exit_code_for(Error::Kind kind) {
  switch (kind) {
    case Error::Kind::invalid_argument:
      return 1;
    case Error::Kind::check_failed:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tsekit: synthetic target-speech-extraction corpora, inactive-speaker "
      "detection and scoring"};
  app.require_subcommand(1);

  fs::path config_path;
  CorpusFlags sim_corpus, sweep_corpus;
  ScoringFlags eval_scoring, sweep_scoring;
  fs::path sim_out, eval_out, sweep_out, loss_out;
  fs::path manifest_path, dump_dir;
  int sim_jobs = 1, eval_jobs = 1, sweep_jobs = 1;
  std::uint64_t eval_seed = 0, loss_seed = 0;
  std::vector<std::size_t> counts = {1, 2, 3, 4, 5};
  std::size_t n_points = 1000;
  double tolerance = 1e-4;
  bool corrupt_gradient = false;

  CLI::App* sim = app.add_subcommand(
      "simulate", "generate a synthetic corpus (manifest + WAV tree)");
  sim->add_option("--config", config_path, "JSON config file; flags override");
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--jobs", sim_jobs, "worker threads");
  sim_corpus.add_options(*sim);

  CLI::App* ev = app.add_subcommand(
      "evaluate", "run an extractor over a corpus and score it");
  ev->add_option("--config", config_path, "JSON config file; flags override");
  ev->add_option("--manifest", manifest_path, "manifest.jsonl from simulate");
  ev->add_option("--out", eval_out, "output directory")->required();
  ev->add_option("--jobs", eval_jobs, "worker threads");
  ev->add_option("--seed", eval_seed, "seed for stochastic extractors");
  ev->add_option("--dump-estimates", dump_dir,
                 "write every estimate there as <trial_id>.wav");
  eval_scoring.add_options(*ev, /*with_threshold=*/true);

  CLI::App* sw = app.add_subcommand(
      "sweep-enrollment",
      "evaluate a generated corpus at several enrollment concat counts");
  sw->add_option("--config", config_path, "JSON config file; flags override");
  sw->add_option("--out", sweep_out, "output directory")->required();
  sw->add_option("--jobs", sweep_jobs, "worker threads");
  sw->add_option("--counts", counts, "concat counts to sweep, each in 1..5");
  sweep_corpus.add_options(*sw);
  sweep_scoring.add_options(*sw, /*with_threshold=*/false);

  CLI::App* lc = app.add_subcommand(
      "losscheck", "verify analytic loss gradients against finite differences");
  lc->add_option("--config", config_path, "JSON config file; flags override");
  lc->add_option("--seed", loss_seed, "master random seed");
  lc->add_option("--n-points", n_points, "random points per loss");
  lc->add_option("--tol", tolerance, "max allowed relative gradient error");
  lc->add_flag("--corrupt-gradient", corrupt_gradient,
               "fault-injection hook: perturb one gradient component");
  lc->add_option("--out", loss_out, "optional directory for losscheck.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    nlohmann::json cfg = nlohmann::json::object();
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (sim->parsed())
      return run_simulate(*sim, cfg, sim_corpus, sim_out, sim_jobs);
    if (ev->parsed())
      return run_evaluate(*ev, cfg, eval_scoring, eval_out, eval_jobs,
                          eval_seed, manifest_path, dump_dir);
    if (sw->parsed())
      return run_sweep(*sw, cfg, sweep_corpus, sweep_scoring, sweep_out,
                       sweep_jobs, counts);
    if (lc->parsed())
      return run_losscheck(*lc, cfg, loss_seed, n_points, tolerance,
                           corrupt_gradient, loss_out);
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
