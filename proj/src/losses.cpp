#include "tsekit/losses.hpp"

#include <algorithm>
#include <cmath>

#include "tsekit/error.hpp"

namespace tsekit {

namespace {

constexpr double kLn10 = 2.3025850929940456840179914546844;
constexpr double kSiSnrCapDb = 120.0;

double energy_of(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

}  // namespace

void LossConfig::validate() const {
  if (!(tau_active > 0.0 && tau_active < 1.0))
    throw_invalid("LossConfig: tau_active must lie in (0, 1)");
  if (!(tau_inactive > 0.0 && tau_inactive < 1.0))
    throw_invalid("LossConfig: tau_inactive must lie in (0, 1)");
  if (!(epsilon_floor > 0.0))
    throw_invalid("LossConfig: epsilon_floor must be positive");
}

LossValue loss_active(const Waveform& estimate, const Waveform& reference,
                      const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(estimate, reference, "loss_active");
  if (reference.is_zero())
    throw_invalid("active loss undefined for zero reference");

  const std::size_t n = estimate.size();
  const double ref_energy = reference.energy();
  double err_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = reference.samples[i] - estimate.samples[i];
    err_energy += d * d;
  }
  const double den =
      std::max(err_energy + cfg.tau_active * ref_energy, cfg.epsilon_floor);
  const double num = std::max(ref_energy, cfg.epsilon_floor);

  LossValue out;
  out.value = -10.0 * std::log10(num / den);
  out.gradient.resize(n);
  const double scale = 20.0 / (kLn10 * den);
  for (std::size_t i = 0; i < n; ++i)
    out.gradient[i] = scale * (estimate.samples[i] - reference.samples[i]);
  return out;
}

LossValue loss_inactive(const Waveform& estimate, const Waveform& mixture,
                        const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(estimate, mixture, "loss_inactive");
  if (mixture.is_zero())
    throw_invalid("inactive loss undefined for zero mixture");

  const std::size_t n = estimate.size();
  const double arg = std::max(
      estimate.energy() + cfg.tau_inactive * mixture.energy(),
      cfg.epsilon_floor);

  LossValue out;
  out.value = 10.0 * std::log10(arg);
  out.gradient.resize(n);
  const double scale = 20.0 / (kLn10 * arg);
  for (std::size_t i = 0; i < n; ++i)
    out.gradient[i] = scale * estimate.samples[i];
  return out;
}

LossValue loss_composite(const Waveform& estimate,
                         const Waveform* reference_or_null,
                         const Waveform& mixture, const LossConfig& cfg) {
  const bool active =
      reference_or_null != nullptr && !reference_or_null->is_zero();
  return active ? loss_active(estimate, *reference_or_null, cfg)
                : loss_inactive(estimate, mixture, cfg);
}

LossValue loss_si_snr(const Waveform& estimate, const Waveform& reference) {
  require_same_shape(estimate, reference, "loss_si_snr");
  if (reference.is_zero())
    throw_invalid("si-snr undefined for zero reference");
  if (estimate.is_zero())
    throw_invalid("si-snr undefined for zero estimate");

  const std::size_t n = estimate.size();
  double ref_mean = 0.0, est_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ref_mean += reference.samples[i];
    est_mean += estimate.samples[i];
  }
  ref_mean /= static_cast<double>(n);
  est_mean /= static_cast<double>(n);

  std::vector<double> ref_c(n), est_c(n);
  for (std::size_t i = 0; i < n; ++i) {
    ref_c[i] = reference.samples[i] - ref_mean;
    est_c[i] = estimate.samples[i] - est_mean;
  }
  const double ref_energy = energy_of(ref_c);
  const double est_energy = energy_of(est_c);
  if (ref_energy <= 0.0)
    throw_invalid("si-snr undefined for constant reference");
  if (est_energy <= 0.0)
    throw_invalid("si-snr undefined for constant estimate");

  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += est_c[i] * ref_c[i];
  const double alpha = dot / ref_energy;
  const double target_energy = alpha * alpha * ref_energy;
  // Residual via Pythagoras: est_c decomposes orthogonally along ref_c.
  const double resid_energy = std::max(est_energy - target_energy, 0.0);

  LossValue out;
  out.gradient.assign(n, 0.0);
  const double tiny = 1e-300;
  if (target_energy <= tiny * est_energy) {
    out.value = kSiSnrCapDb;  // orthogonal estimate: loss clamps, flat region
    return out;
  }
  if (resid_energy <= tiny * est_energy) {
    out.value = -kSiSnrCapDb;  // perfect reconstruction up to scale
    return out;
  }

  const double si_snr = 10.0 * std::log10(target_energy / resid_energy);
  out.value = std::clamp(-si_snr, -kSiSnrCapDb, kSiSnrCapDb);
  if (out.value != -si_snr) return out;  // clamped: treat as flat

  // d(-si_snr)/d est_c[i] = -(20/ln10)(ref_c[i]/(alpha*||ref_c||^2)
  //                                    - resid[i]/||resid||^2),
  // then chained through centering, which subtracts the mean.
  std::vector<double> g(n);
  double g_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = est_c[i] - alpha * ref_c[i];
    g[i] = -(20.0 / kLn10) *
           (ref_c[i] / (alpha * ref_energy) - resid / resid_energy);
    g_mean += g[i];
  }
  g_mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out.gradient[i] = g[i] - g_mean;
  return out;
}

double check_gradient(const LossFn& loss_op, const Waveform& estimate) {
  const std::size_t n = estimate.size();
  if (n == 0) throw_invalid("check_gradient: empty estimate");

  double peak = 0.0;
  for (double v : estimate.samples) peak = std::max(peak, std::abs(v));
  const double h = 1e-6 * std::max(1.0, peak);

  const LossValue base = loss_op(estimate);
  if (base.gradient.size() != n)
    throw_invalid("check_gradient: gradient length mismatch");

  Waveform probe = estimate;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double orig = probe.samples[i];
    probe.samples[i] = orig + h;
    const double f_plus = loss_op(probe).value;
    probe.samples[i] = orig - h;
    const double f_minus = loss_op(probe).value;
    probe.samples[i] = orig;

    const double fd = (f_plus - f_minus) / (2.0 * h);
    const double ga = base.gradient[i];
    const double err =
        std::abs(ga - fd) / std::max({1.0, std::abs(ga), std::abs(fd)});
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace tsekit
