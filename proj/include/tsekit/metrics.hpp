#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsekit/detection.hpp"
#include "tsekit/waveform.hpp"

namespace tsekit {

enum class Classifier { att, cos };

// SDR with an allowed time-invariant distortion filter: the target component
// is the least-squares FIR filtering (filter_len taps) of the reference that
// best approximates the estimate over the full convolution support. The
// Toeplitz normal equations are built from FFT correlations and solved by
// Levinson recursion with light diagonal loading, so degenerate systems give
// finite answers instead of errors.
struct SdrConfig {
  std::size_t filter_len = 512;
  double sdr_cap_db = 60.0;       // SDR clamped to [-cap, +cap]
  double fail_threshold_db = 1.0; // strict: sdri < threshold counts as Fail

  void validate() const;
};

struct TrialMetrics {
  std::string trial_id;
  bool active = false;
  double score_att = 0.0;
  double score_cos = 0.0;
  int decision_att = 0;
  int decision_cos = 0;
  // SDR fields are absent on inactive trials; those have no target reference.
  std::optional<double> sdr_in_db;
  std::optional<double> sdr_out_db;
  std::optional<double> sdri_db;
  std::optional<double> sdri_after_db;
  double attenuation_db = 0.0;
  bool is_failure = false;
  bool is_fail_or_miss = false;
};

// Solves T x = rhs for a symmetric Toeplitz T given by its first column.
// If the recursion degenerates (non-positive-definite input), the partial
// solution is frozen and padded with zero taps rather than erroring.
std::vector<double> solve_symmetric_toeplitz(const std::vector<double>& first_col,
                                             const std::vector<double>& rhs);

double sdr(const Waveform& estimate, const Waveform& reference,
           const SdrConfig& cfg = {});

// sdr(estimate, reference) - sdr(mixture, reference).
double sdri(const Waveform& estimate, const Waveform& reference,
            const Waveform& mixture, const SdrConfig& cfg = {});

// Post-detection improvement for an active trial. A pass decision keeps the
// plain sdri; a zeroed (miss-detected) trial is booked as output SDR 0 dB
// exactly, so its improvement is -sdr_in.
double sdri_after(const Waveform& estimate, const Decision& decision,
                  const Waveform& reference, const Waveform& mixture,
                  const SdrConfig& cfg = {});

// Fraction of active trials whose sdri lies strictly below the Fail
// threshold. Errors when no active trial is present.
double fail_rate(const std::vector<TrialMetrics>& trials,
                 const SdrConfig& cfg = {});

// Fraction of active trials that failed extraction or were decided inactive
// by the selected classifier (union, each trial counted once).
double fail_and_miss_rate(const std::vector<TrialMetrics>& trials,
                          Classifier classifier, const SdrConfig& cfg = {});

// (trial_id, attenuation) pairs, active trials first then inactive, each
// group preserving its corpus order.
std::vector<std::pair<std::string, double>> attenuation_trace(
    const std::vector<TrialMetrics>& trials);

}  // namespace tsekit
