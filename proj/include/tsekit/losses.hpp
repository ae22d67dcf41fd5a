#pragma once

#include <functional>
#include <vector>

#include "tsekit/waveform.hpp"

namespace tsekit {

// Training objectives for target extraction, each returning the scalar value
// together with its analytic gradient with respect to the estimate. The
// references and mixtures are treated as data; no gradient flows into them.
struct LossConfig {
  double tau_active = 1e-3;    // soft threshold inside the active-loss ratio
  double tau_inactive = 1e-2;  // mixture-energy threshold in the inactive loss
  double epsilon_floor = 1e-12;  // floor for log arguments

  void validate() const;
};

struct LossValue {
  double value = 0.0;             // dB-scaled scalar
  std::vector<double> gradient;   // d value / d estimate[i]
};

// Thresholded SNR loss for an active target:
//   -10*log10( ||x||^2 / (||x - xhat||^2 + tau*||x||^2) ).
// Bounded below by -10*log10(1/tau), attained exactly at estimate=reference.
LossValue loss_active(const Waveform& estimate, const Waveform& reference,
                      const LossConfig& cfg = {});

// Inactive-target loss: 10*log10( ||xhat||^2 + tau_inactive*||y||^2 ).
// Bounded below by 10*log10(tau_inactive*||y||^2), attained at estimate=0.
LossValue loss_inactive(const Waveform& estimate, const Waveform& mixture,
                        const LossConfig& cfg = {});

// Dispatch: active branch when a nonzero reference is present, inactive
// branch when the reference is absent or all-zero.
LossValue loss_composite(const Waveform& estimate,
                         const Waveform* reference_or_null,
                         const Waveform& mixture, const LossConfig& cfg = {});

// Negative SI-SNR with zero-mean centering and optimal scalar projection of
// the estimate onto the reference. Invariant to positive scaling of the
// estimate. Value clamped to [-120, +120] dB; the clamp fires when the
// residual (or the projection) vanishes, where the exact value is infinite.
LossValue loss_si_snr(const Waveform& estimate, const Waveform& reference);

// Verifies an analytic gradient against central finite differences with step
// h = 1e-6 * max(1, max|estimate[i]|). Returns the worst per-coordinate
// error |g_analytic - g_fd| / max(1, |g_analytic|, |g_fd|), i.e. relative
// error clamped to absolute below unit magnitude.
using LossFn = std::function<LossValue(const Waveform&)>;
double check_gradient(const LossFn& loss_op, const Waveform& estimate);

}  // namespace tsekit
