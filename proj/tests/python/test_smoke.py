import math

import pytest

import tsekit


def tone(freq_hz, n=4000, rate=16000, amp=0.1):
    return [amp * math.sin(2.0 * math.pi * freq_hz * i / rate) for i in range(n)]


def test_active_loss_anchors():
    ref = tone(220.0)
    value, grad = tsekit.active_loss(ref, ref)
    assert value == pytest.approx(-30.0, abs=1e-9)
    assert len(grad) == len(ref)
    assert max(abs(g) for g in grad) < 1e-12

    value_zero, _ = tsekit.active_loss([0.0] * len(ref), ref)
    assert value_zero == pytest.approx(10.0 * math.log10(1.001), abs=1e-9)


def test_inactive_loss_anchor():
    mix = tone(180.0)
    scale = 1.0 / math.sqrt(sum(v * v for v in mix))
    unit_mix = [v * scale for v in mix]
    value, _ = tsekit.inactive_loss([0.0] * len(unit_mix), unit_mix)
    assert value == pytest.approx(-20.0, abs=1e-9)


def test_si_snr_scale_invariance():
    ref = tone(300.0)
    est = [v + 0.01 for v in tone(300.0, amp=0.07)]
    base, _ = tsekit.si_snr_loss(est, ref)
    scaled, _ = tsekit.si_snr_loss([3.7 * v for v in est], ref)
    assert scaled == pytest.approx(base, abs=1e-9)


def test_attenuation_and_classify():
    mix = tone(150.0)
    assert tsekit.attenuation_db(mix, mix) == pytest.approx(0.0, abs=1e-12)
    tenth = [0.1 * v for v in mix]
    assert tsekit.attenuation_db(tenth, mix) == pytest.approx(-20.0, abs=1e-9)
    assert tsekit.attenuation_db([0.0] * len(mix), mix) == -150.0
    assert tsekit.classify(0.5, 0.5) == 0
    assert tsekit.classify(0.6, 0.5) == 1


def test_det_curve_hand_example():
    out = tsekit.det_curve([(0.6, True), (0.2, True), (0.4, False)])
    assert len(out["points"]) == 5
    assert out["eer"] == pytest.approx(0.5, abs=1e-12)
    assert out["eer_threshold"] == pytest.approx(0.3, abs=1e-12)


def test_embedding_cosine():
    a = tsekit.embed(tone(220.0))
    same = tsekit.embed(tone(220.0))
    other = tsekit.embed(tone(470.0))
    assert tsekit.cosine_similarity(a, same) == pytest.approx(1.0, abs=1e-12)
    assert tsekit.cosine_similarity(a, other) < 1.0


def test_sdr_cap_and_sdri():
    ref = tone(260.0)
    assert tsekit.sdr_db(ref, ref) == 60.0
    assert tsekit.sdr_db([0.0] * len(ref), ref) == -60.0
    mix = [r + n for r, n in zip(ref, tone(333.0, amp=0.05))]
    assert tsekit.sdri_db(ref, ref, mix) > 10.0


def test_error_mapping():
    with pytest.raises(ValueError):
        tsekit.active_loss([], [])
    with pytest.raises(ValueError):
        tsekit.attenuation_db([0.0] * 16, [0.0] * 16)
