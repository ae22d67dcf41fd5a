#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "tsekit/detection.hpp"
#include "tsekit/error.hpp"
#include "tsekit/rng.hpp"

using namespace tsekit;
using testutil::TempDir;
using testutil::tone;

namespace {

std::vector<TrialScore> make_scores(const std::vector<double>& active,
                                    const std::vector<double>& inactive) {
  std::vector<TrialScore> s;
  std::size_t i = 0;
  for (double v : active) s.push_back({"as" + std::to_string(i++), v, true});
  i = 0;
  for (double v : inactive) s.push_back({"is" + std::to_string(i++), v, false});
  return s;
}

// Counting oracle, structured differently from the implementation: set-based
// threshold collection and per-threshold tallies.
void check_curve_against_oracle(const std::vector<TrialScore>& scores,
                                const DetCurve& curve) {
  std::set<double> distinct;
  for (const auto& s : scores) distinct.insert(s.score);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> want_thresholds;
  want_thresholds.push_back(-inf);
  want_thresholds.insert(want_thresholds.end(), distinct.begin(),
                         distinct.end());
  want_thresholds.push_back(inf);
  REQUIRE(curve.points.size() == want_thresholds.size());

  std::size_t n_active = 0, n_inactive = 0;
  for (const auto& s : scores) (s.ground_truth_active ? n_active : n_inactive)++;

  for (std::size_t i = 0; i < want_thresholds.size(); ++i) {
    const DetPoint& p = curve.points[i];
    CHECK(p.threshold == want_thresholds[i]);
    std::size_t fa = 0, miss = 0;
    for (const auto& s : scores) {
      if (s.ground_truth_active && s.score <= p.threshold) ++miss;
      if (!s.ground_truth_active && s.score > p.threshold) ++fa;
    }
    CHECK(p.fa_rate ==
          static_cast<double>(fa) / static_cast<double>(n_inactive));
    CHECK(p.miss_rate ==
          static_cast<double>(miss) / static_cast<double>(n_active));
    if (i > 0) {
      CHECK(p.fa_rate <= curve.points[i - 1].fa_rate);
      CHECK(p.miss_rate >= curve.points[i - 1].miss_rate);
    }
  }
  CHECK(curve.points.front().fa_rate == 1.0);
  CHECK(curve.points.front().miss_rate == 0.0);
  CHECK(curve.points.back().fa_rate == 0.0);
  CHECK(curve.points.back().miss_rate == 1.0);

  // Recompute the equal-error interpolation from the first crossing segment
  // and verify the two interpolated rates meet there.
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const DetPoint& a = curve.points[i];
    const DetPoint& b = curve.points[i + 1];
    const double da = a.fa_rate - a.miss_rate;
    const double db = b.fa_rate - b.miss_rate;
    if (da < 0.0 || db > 0.0) continue;
    const double t = (da - db) > 0.0 ? da / (da - db) : 0.0;
    const double fa_t = a.fa_rate + (b.fa_rate - a.fa_rate) * t;
    const double miss_t = a.miss_rate + (b.miss_rate - a.miss_rate) * t;
    CHECK(curve.eer == fa_t);
    CHECK(std::abs(fa_t - miss_t) <= 1e-9);
    return;
  }
  FAIL("no crossing segment found by the oracle");
}

}  // namespace

TEST_CASE("attenuation anchors") {
  const Waveform mix = tone(200.0, 1000, 16000, 0.2);

  CHECK(attenuation(mix, mix) == 0.0);

  Waveform tenth = mix;
  for (double& v : tenth.samples) v *= 0.1;
  CHECK(attenuation(tenth, mix) == doctest::Approx(-20.0).epsilon(1e-12));

  CHECK(attenuation(zeros_like(mix), mix) == kAttenuationFloorDb);
  CHECK(kAttenuationFloorDb == -150.0);

  // Nonzero but far below the floor clamps to the floor exactly.
  Waveform faint = mix;
  for (double& v : faint.samples) v *= 1e-9;
  CHECK(attenuation(faint, mix) == kAttenuationFloorDb);

  CHECK_THROWS_AS(attenuation(mix, zeros_like(mix)), Error);
  CHECK_THROWS_AS(attenuation(tone(200.0, 999), mix), Error);
}

TEST_CASE("classification is strict at the threshold") {
  CHECK(classify(0.5, 0.4).c == 1);
  CHECK(classify(0.4, 0.4).c == 0);  // tie goes to inactive
  CHECK(classify(0.3, 0.4).c == 0);
  CHECK(classify(0.5, 0.4, "t7").trial_id == "t7");
}

TEST_CASE("gate passes or zeroes the estimate") {
  const Waveform est = tone(440.0, 100);
  const Waveform kept = gate(est, classify(1.0, 0.0));
  CHECK(kept.samples == est.samples);
  const Waveform cut = gate(est, classify(0.0, 0.0));
  CHECK(cut.size() == est.size());
  CHECK(cut.is_zero());
}

TEST_CASE("det curve on the worked three-trial example") {
  const auto scores = make_scores({0.6, 0.2}, {0.4});
  const DetCurve curve = det_curve(scores);
  REQUIRE(curve.points.size() == 5);
  CHECK(curve.eer == 0.5);
  CHECK(curve.eer_threshold == doctest::Approx(0.3).epsilon(1e-12));
  check_curve_against_oracle(scores, curve);
}

TEST_CASE("det curve separable and anti-separable extremes") {
  const DetCurve sep = det_curve(make_scores({1.0, 2.0}, {-1.0, -2.0}));
  CHECK(sep.eer == 0.0);
  const DetCurve swapped = det_curve(make_scores({-1.0, -2.0}, {1.0, 2.0}));
  CHECK(swapped.eer == 1.0);
}

TEST_CASE("det curve requires both classes") {
  CHECK_THROWS_WITH_AS(det_curve(make_scores({0.1, 0.2}, {})),
                       "DET undefined: need both active and inactive trials",
                       Error);
  CHECK_THROWS_AS(det_curve(make_scores({}, {0.1})), Error);
  CHECK_THROWS_AS(det_curve({}), Error);
}

TEST_CASE("det curve matches the counting oracle on random corpora") {
  for (int c = 0; c < 200; ++c) {
    Rng rng(derive_seed(555, "det_oracle", static_cast<std::uint64_t>(c)));
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(49));
    std::vector<TrialScore> scores;
    std::size_t n_active = 0;
    for (std::size_t i = 0; i < n; ++i) {
      TrialScore s;
      s.trial_id = "t" + std::to_string(i);
      // Quantize half of the scores onto a coarse grid to force ties.
      s.score = rng.uniform() < 0.5
                    ? std::floor(rng.uniform(-5.0, 5.0) * 4.0) / 4.0
                    : rng.uniform(-5.0, 5.0);
      s.ground_truth_active = rng.uniform() < 0.5;
      n_active += s.ground_truth_active ? 1 : 0;
      scores.push_back(std::move(s));
    }
    // Guarantee both classes are present.
    if (n_active == 0) scores[0].ground_truth_active = true;
    if (n_active == n) scores[0].ground_truth_active = false;

    check_curve_against_oracle(scores, det_curve(scores));
  }
}

TEST_CASE("det curve sits near chance for identically distributed scores") {
  Rng rng(808);
  std::vector<TrialScore> scores;
  for (std::size_t i = 0; i < 4000; ++i)
    scores.push_back({"t" + std::to_string(i), rng.normal(), i % 2 == 0});
  const DetCurve curve = det_curve(scores);
  CHECK(curve.eer > 0.45);
  CHECK(curve.eer < 0.55);
}

TEST_CASE("det csv has one row per point and an eer footer") {
  TempDir tmp("det_csv");
  const auto p = tmp.path() / "det.csv";
  const DetCurve curve = det_curve(make_scores({0.6, 0.2}, {0.4}));
  write_det_csv(p, curve);

  std::istringstream is(testutil::slurp(p));
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "threshold,fa_rate,miss_rate");
  std::size_t rows = 0;
  std::string footer;
  while (std::getline(is, line)) {
    if (line.rfind("eer,", 0) == 0)
      footer = line;
    else
      ++rows;
  }
  CHECK(rows == curve.points.size());
  REQUIRE(!footer.empty());
  double eer = 0.0, thr = 0.0;
  REQUIRE(std::sscanf(footer.c_str(), "eer,%lf,%lf", &eer, &thr) == 2);
  CHECK(eer == curve.eer);
  CHECK(thr == curve.eer_threshold);
}
