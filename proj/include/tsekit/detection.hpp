#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsekit/waveform.hpp"

namespace tsekit {

// Active/inactive scoring and thresholding. A trial's score is either the
// mixture attenuation in dB or a cosine similarity; higher means "target
// present" for both, so one sweep machinery serves both classifiers.
struct TrialScore {
  std::string trial_id;
  double score = 0.0;
  bool ground_truth_active = false;
};

struct DetPoint {
  double threshold = 0.0;
  double fa_rate = 0.0;    // inactive trials decided active
  double miss_rate = 0.0;  // active trials decided inactive
};

struct DetCurve {
  std::vector<DetPoint> points;  // ordered by increasing threshold
  double eer = 0.0;
  double eer_threshold = 0.0;
};

struct Decision {
  std::string trial_id;
  int c = 0;  // 1 iff score strictly exceeded the threshold
};

// Floor applied to the attenuation of (near-)zero estimates so scores stay
// finite and totally ordered.
inline constexpr double kAttenuationFloorDb = -150.0;

// 10*log10(||estimate||^2 / ||mixture||^2), clamped below at the floor.
double attenuation(const Waveform& estimate, const Waveform& mixture);

// c = 1 iff score > threshold; a tie goes to inactive.
Decision classify(double score, double threshold,
                  const std::string& trial_id = {});

// Sweeps thresholds over -inf, the sorted distinct scores, +inf. fa_rate and
// miss_rate at each threshold follow the strict-> rule of classify. EER is
// linearly interpolated between the two operating points straddling the
// fa = miss crossing. Needs at least one trial of each class.
DetCurve det_curve(const std::vector<TrialScore>& scores);

// x_bar = c * x_hat: pass the estimate through or zero it out.
Waveform gate(const Waveform& estimate, const Decision& decision);

// CSV rows `threshold,fa_rate,miss_rate` with a final `eer,<value>,<threshold>`
// footer line.
void write_det_csv(const std::filesystem::path& path, const DetCurve& curve);

}  // namespace tsekit
