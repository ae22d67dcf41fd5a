#include "tsekit/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "tsekit/error.hpp"

namespace tsekit {

double attenuation(const Waveform& estimate, const Waveform& mixture) {
  require_same_shape(estimate, mixture, "attenuation");
  const double mix_energy = mixture.energy();
  if (mix_energy <= 0.0)
    throw_invalid("attenuation undefined for zero mixture");
  const double est_energy = estimate.energy();
  if (est_energy <= 0.0) return kAttenuationFloorDb;
  const double db = 10.0 * std::log10(est_energy / mix_energy);
  return std::max(db, kAttenuationFloorDb);
}

Decision classify(double score, double threshold,
                  const std::string& trial_id) {
  Decision d;
  d.trial_id = trial_id;
  d.c = score > threshold ? 1 : 0;
  return d;
}

DetCurve det_curve(const std::vector<TrialScore>& scores) {
  std::size_t n_active = 0, n_inactive = 0;
  for (const TrialScore& s : scores)
    (s.ground_truth_active ? n_active : n_inactive) += 1;
  if (n_active == 0 || n_inactive == 0)
    throw_invalid("DET undefined: need both active and inactive trials");

  std::vector<double> thresholds;
  thresholds.reserve(scores.size() + 2);
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  for (const TrialScore& s : scores) thresholds.push_back(s.score);
  std::sort(thresholds.begin() + 1, thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  DetCurve curve;
  curve.points.reserve(thresholds.size());
  for (double eta : thresholds) {
    std::size_t fa = 0, miss = 0;
    for (const TrialScore& s : scores) {
      const bool decided_active = s.score > eta;
      if (s.ground_truth_active) {
        if (!decided_active) ++miss;
      } else {
        if (decided_active) ++fa;
      }
    }
    DetPoint p;
    p.threshold = eta;
    p.fa_rate = static_cast<double>(fa) / static_cast<double>(n_inactive);
    p.miss_rate = static_cast<double>(miss) / static_cast<double>(n_active);
    curve.points.push_back(p);
  }

  // fa starts at 1 >= miss 0 and ends at 0 <= miss 1, so a sign change of
  // fa - miss exists; interpolate within the first segment that crosses.
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const DetPoint& a = curve.points[i];
    const DetPoint& b = curve.points[i + 1];
    const double da = a.fa_rate - a.miss_rate;
    const double db = b.fa_rate - b.miss_rate;
    if (da < 0.0 || db > 0.0) continue;
    const double span = da - db;
    const double t = span > 0.0 ? da / span : 0.0;
    curve.eer = a.fa_rate + (b.fa_rate - a.fa_rate) * t;
    if (std::isfinite(a.threshold) && std::isfinite(b.threshold))
      curve.eer_threshold = a.threshold + (b.threshold - a.threshold) * t;
    else if (std::isfinite(a.threshold))
      curve.eer_threshold = a.threshold;
    else if (std::isfinite(b.threshold))
      curve.eer_threshold = b.threshold;
    else
      curve.eer_threshold = 0.0;
    return curve;
  }
  throw_invalid("DET internal error: no fa/miss crossing found");
}

Waveform gate(const Waveform& estimate, const Decision& decision) {
  if (decision.c == 1) return estimate;
  return zeros_like(estimate);
}

void write_det_csv(const std::filesystem::path& path, const DetCurve& curve) {
  std::ofstream os(path, std::ios::trunc);
  if (!os)
    throw Error(Error::Kind::io, "cannot open for write: " + path.string());
  os << "threshold,fa_rate,miss_rate\n";
  char buf[128];
  for (const DetPoint& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.threshold,
                  p.fa_rate, p.miss_rate);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "eer,%.17g,%.17g\n", curve.eer,
                curve.eer_threshold);
  os << buf;
  if (!os) throw Error(Error::Kind::io, "write failed: " + path.string());
}

}  // namespace tsekit
