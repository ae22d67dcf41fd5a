#include "tsekit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tsekit/error.hpp"
#include "tsekit/fft.hpp"

namespace tsekit {

namespace {

constexpr double kDiagonalLoading = 1e-10;

// Autocorrelation of ref (lags 0..n_lags-1) and cross-correlation
// sum_u ref[u]*est[u+i] in one pair of FFTs over a common padded size.
void correlations(const std::vector<double>& ref,
                  const std::vector<double>& est, std::size_t n_lags,
                  std::vector<double>& autoc, std::vector<double>& cross) {
  const std::size_t m = next_power_of_two(ref.size() + n_lags);
  std::vector<double> ref_pad(m, 0.0), est_pad(m, 0.0);
  std::copy(ref.begin(), ref.end(), ref_pad.begin());
  std::copy(est.begin(), est.end(), est_pad.begin());
  const std::vector<cplx> rf = rfft(ref_pad);
  const std::vector<cplx> ef = rfft(est_pad);

  std::vector<cplx> spec(rf.size());
  for (std::size_t k = 0; k < rf.size(); ++k)
    spec[k] = rf[k] * std::conj(rf[k]);
  std::vector<double> ac = irfft(spec, m);
  autoc.assign(ac.begin(), ac.begin() + static_cast<std::ptrdiff_t>(n_lags));

  for (std::size_t k = 0; k < rf.size(); ++k)
    spec[k] = std::conj(rf[k]) * ef[k];
  std::vector<double> cc = irfft(spec, m);
  cross.assign(cc.begin(), cc.begin() + static_cast<std::ptrdiff_t>(n_lags));
}

}  // namespace

void SdrConfig::validate() const {
  if (filter_len < 1) throw_invalid("SdrConfig: filter_len must be >= 1");
  if (!(sdr_cap_db > fail_threshold_db))
    throw_invalid("SdrConfig: sdr_cap_db must exceed fail_threshold_db");
}

std::vector<double> solve_symmetric_toeplitz(
    const std::vector<double>& first_col, const std::vector<double>& rhs) {
  const std::size_t n = first_col.size();
  if (n == 0 || rhs.size() != n)
    throw_invalid("toeplitz solve: size mismatch");
  const double r0 = first_col[0];
  if (!(r0 > 0.0)) throw_invalid("toeplitz solve: first_col[0] must be > 0");

  std::vector<double> x(n, 0.0), f(n, 0.0), f_prev(n, 0.0);
  f[0] = 1.0 / r0;
  x[0] = rhs[0] / r0;

  for (std::size_t m = 1; m < n; ++m) {
    // eps_f extends the forward vector; eps_x extends the solution.
    double eps_f = 0.0, eps_x = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      eps_f += first_col[m - i] * f[i];
      eps_x += first_col[m - i] * x[i];
    }
    // Forward vector of the (m+1)-size system:
    //   f' = ([f;0] - eps_f*[0;rev(f)]) / (1 - eps_f^2).
    const double denom = 1.0 - eps_f * eps_f;
    if (!(std::abs(denom) > 1e-14) || !std::isfinite(denom))
      break;  // degenerate leading submatrix: freeze, remaining taps stay 0
    std::copy(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(m),
              f_prev.begin());
    for (std::size_t i = 0; i <= m; ++i) {
      const double head = i < m ? f_prev[i] : 0.0;
      const double tail = i > 0 ? f_prev[m - i] : 0.0;
      f[i] = (head - eps_f * tail) / denom;
    }
    // Backward vector is the reverse of f (symmetric Toeplitz).
    const double step = rhs[m] - eps_x;
    for (std::size_t i = 0; i <= m; ++i) x[i] += step * f[m - i];
  }
  return x;
}

double sdr(const Waveform& estimate, const Waveform& reference,
           const SdrConfig& cfg) {
  cfg.validate();
  require_same_shape(estimate, reference, "sdr");
  if (reference.is_zero()) throw_invalid("sdr undefined for zero reference");
  const double est_energy = estimate.energy();
  if (est_energy <= 0.0) return -cfg.sdr_cap_db;

  std::vector<double> autoc, cross;
  correlations(reference.samples, estimate.samples, cfg.filter_len, autoc,
               cross);
  const double load = kDiagonalLoading * (1.0 + autoc[0]);
  autoc[0] += load;

  const std::vector<double> h = solve_symmetric_toeplitz(autoc, cross);
  double hc = 0.0, hh = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    hc += h[i] * cross[i];
    hh += h[i] * h[i];
  }
  // With (R + load*I) h = c: h'Rh = h'c - load*||h||^2, so
  //   ||s_target||^2 = h'c - load*||h||^2
  //   ||e||^2 = ||est||^2 - 2 h'c + h'Rh = ||est||^2 - h'c - load*||h||^2.
  const double s_energy = std::max(hc - load * hh, 0.0);
  const double e_energy = std::max(est_energy - hc - load * hh, 0.0);

  if (s_energy <= 0.0) return -cfg.sdr_cap_db;
  if (e_energy <= 0.0) return cfg.sdr_cap_db;
  return std::clamp(10.0 * std::log10(s_energy / e_energy), -cfg.sdr_cap_db,
                    cfg.sdr_cap_db);
}

double sdri(const Waveform& estimate, const Waveform& reference,
            const Waveform& mixture, const SdrConfig& cfg) {
  return sdr(estimate, reference, cfg) - sdr(mixture, reference, cfg);
}

double sdri_after(const Waveform& estimate, const Decision& decision,
                  const Waveform& reference, const Waveform& mixture,
                  const SdrConfig& cfg) {
  if (decision.c == 1) return sdri(estimate, reference, mixture, cfg);
  return 0.0 - sdr(mixture, reference, cfg);
}

double fail_rate(const std::vector<TrialMetrics>& trials,
                 const SdrConfig& cfg) {
  std::size_t n_active = 0, n_fail = 0;
  for (const TrialMetrics& t : trials) {
    if (!t.active) continue;
    ++n_active;
    if (!t.sdri_db.has_value())
      throw_data("fail_rate: active trial " + t.trial_id + " lacks sdri");
    if (*t.sdri_db < cfg.fail_threshold_db) ++n_fail;
  }
  if (n_active == 0) throw_invalid("fail_rate undefined: no active trials");
  return static_cast<double>(n_fail) / static_cast<double>(n_active);
}

double fail_and_miss_rate(const std::vector<TrialMetrics>& trials,
                          Classifier classifier, const SdrConfig& cfg) {
  std::size_t n_active = 0, n_hit = 0;
  for (const TrialMetrics& t : trials) {
    if (!t.active) continue;
    ++n_active;
    if (!t.sdri_db.has_value())
      throw_data("fail_and_miss_rate: active trial " + t.trial_id +
                 " lacks sdri");
    const int c =
        classifier == Classifier::att ? t.decision_att : t.decision_cos;
    if (*t.sdri_db < cfg.fail_threshold_db || c == 0) ++n_hit;
  }
  if (n_active == 0)
    throw_invalid("fail_and_miss_rate undefined: no active trials");
  return static_cast<double>(n_hit) / static_cast<double>(n_active);
}

std::vector<std::pair<std::string, double>> attenuation_trace(
    const std::vector<TrialMetrics>& trials) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(trials.size());
  for (const TrialMetrics& t : trials)
    if (t.active) out.emplace_back(t.trial_id, t.attenuation_db);
  for (const TrialMetrics& t : trials)
    if (!t.active) out.emplace_back(t.trial_id, t.attenuation_db);
  return out;
}

}  // namespace tsekit
