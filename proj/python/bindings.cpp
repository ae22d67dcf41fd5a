// Python bindings over the numerical core: losses, AS/IS detection, speaker
// embeddings and SDR metrics on plain sample vectors.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "tsekit/detection.hpp"
#include "tsekit/embedding.hpp"
#include "tsekit/error.hpp"
#include "tsekit/losses.hpp"
#include "tsekit/metrics.hpp"
#include "tsekit/waveform.hpp"

namespace py = pybind11;
using namespace tsekit;

namespace {

Waveform to_wave(std::vector<double> samples, int sample_rate_hz) {
  Waveform w;
  w.samples = std::move(samples);
  w.sample_rate_hz = sample_rate_hz;
  return w;
}

std::pair<double, std::vector<double>> unpack(LossValue v) {
  return {v.value, std::move(v.gradient)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Target-speech-extraction scoring core: training losses with analytic "
      "gradients, active/inactive-speaker classifiers, DET/EER, speaker "
      "embeddings and SDR metrics.";
  m.attr("__version__") = "0.1.0";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == Error::Kind::invalid_argument)
        PyErr_SetString(PyExc_ValueError, e.what());
      else
        PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  m.def(
      "active_loss",
      [](std::vector<double> estimate, std::vector<double> reference,
         double tau) {
        LossConfig cfg;
        cfg.tau_active = tau;
        return unpack(loss_active(to_wave(std::move(estimate), 16000),
                                  to_wave(std::move(reference), 16000), cfg));
      },
      py::arg("estimate"), py::arg("reference"), py::arg("tau") = 1e-3,
      "Thresholded-SNR loss for active targets; returns (value_db, "
      "gradient).");

  m.def(
      "inactive_loss",
      [](std::vector<double> estimate, std::vector<double> mixture,
         double tau) {
        LossConfig cfg;
        cfg.tau_inactive = tau;
        return unpack(loss_inactive(to_wave(std::move(estimate), 16000),
                                    to_wave(std::move(mixture), 16000), cfg));
      },
      py::arg("estimate"), py::arg("mixture"), py::arg("tau") = 1e-2,
      "Inactive-target suppression loss; returns (value_db, gradient).");

  m.def(
      "si_snr_loss",
      [](std::vector<double> estimate, std::vector<double> reference) {
        return unpack(loss_si_snr(to_wave(std::move(estimate), 16000),
                                  to_wave(std::move(reference), 16000)));
      },
      py::arg("estimate"), py::arg("reference"),
      "Negative scale-invariant SNR; returns (value_db, gradient).");

  m.def(
      "attenuation_db",
      [](std::vector<double> estimate, std::vector<double> mixture) {
        return attenuation(to_wave(std::move(estimate), 16000),
                           to_wave(std::move(mixture), 16000));
      },
      py::arg("estimate"), py::arg("mixture"),
      "Estimate-to-mixture energy ratio in dB, floored at -150.");

  m.def(
      "classify",
      [](double score, double threshold) {
        return classify(score, threshold).c;
      },
      py::arg("score"), py::arg("threshold"),
      "1 if score > threshold (target judged active), else 0.");

  m.def(
      "det_curve",
      [](const std::vector<std::pair<double, bool>>& scored_trials) {
        std::vector<TrialScore> scores;
        scores.reserve(scored_trials.size());
        for (std::size_t i = 0; i < scored_trials.size(); ++i)
          scores.push_back({"t" + std::to_string(i), scored_trials[i].first,
                            scored_trials[i].second});
        const DetCurve curve = det_curve(scores);
        std::vector<std::tuple<double, double, double>> points;
        points.reserve(curve.points.size());
        for (const DetPoint& p : curve.points)
          points.emplace_back(p.threshold, p.fa_rate, p.miss_rate);
        py::dict out;
        out["points"] = points;
        out["eer"] = curve.eer;
        out["eer_threshold"] = curve.eer_threshold;
        return out;
      },
      py::arg("scored_trials"),
      "DET sweep over (score, is_active) pairs; returns points "
      "(threshold, fa_rate, miss_rate), eer and eer_threshold.");

  m.def(
      "embed",
      [](std::vector<double> samples, int sample_rate_hz) {
        const auto cfg = EmbedderConfig::default_for_rate(sample_rate_hz);
        return embed(to_wave(std::move(samples), sample_rate_hz), cfg).values;
      },
      py::arg("samples"), py::arg("sample_rate_hz") = 16000,
      "Log-mel statistics speaker embedding.");

  m.def(
      "cosine_similarity",
      [](std::vector<double> a, std::vector<double> b) {
        Embedding ea, eb;
        ea.values = std::move(a);
        eb.values = std::move(b);
        return cosine(ea, eb);
      },
      py::arg("a"), py::arg("b"), "Cosine similarity of two embeddings.");

  m.def(
      "sdr_db",
      [](std::vector<double> estimate, std::vector<double> reference,
         int sample_rate_hz) {
        return sdr(to_wave(std::move(estimate), sample_rate_hz),
                   to_wave(std::move(reference), sample_rate_hz));
      },
      py::arg("estimate"), py::arg("reference"),
      py::arg("sample_rate_hz") = 16000,
      "Signal-to-distortion ratio with a 512-tap allowed distortion filter, "
      "clamped to [-60, 60] dB.");

  m.def(
      "sdri_db",
      [](std::vector<double> estimate, std::vector<double> reference,
         std::vector<double> mixture, int sample_rate_hz) {
        return sdri(to_wave(std::move(estimate), sample_rate_hz),
                    to_wave(std::move(reference), sample_rate_hz),
                    to_wave(std::move(mixture), sample_rate_hz));
      },
      py::arg("estimate"), py::arg("reference"), py::arg("mixture"),
      py::arg("sample_rate_hz") = 16000,
      "SDR improvement of the estimate over the unprocessed mixture.");
}
