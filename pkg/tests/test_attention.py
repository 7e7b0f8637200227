import math
import random

import pytest

from bridgewatch.attention import (
    AFTimeline,
    attentional_focus,
    af_timeline,
    calibrate_pupil,
    event_locked_af,
    gaze_stability,
    pd_normalize,
    PupilCalibration,
)
from bridgewatch.errors import (
    DegenerateCalibration,
    EventOutsideSession,
    InsufficientPupilData,
    InvalidWeights,
    WindowTooSmall,
)
from bridgewatch.ingest import CalibrationSpec
from bridgewatch.model import ScreenGeometry

from .conftest import make_event, make_gaze, make_session

SCREEN_345 = ScreenGeometry(width_px=300, height_px=400)  # diagonal exactly 500
CAL = PupilCalibration(pd_min_mm=2.0, pd_max_mm=6.0, method="strict")


def gaze_with_pd(diameters):
    return [make_gaze(i * 20, pd=d) for i, d in enumerate(diameters)]


# -- calibration -------------------------------------------------------------

def test_strict_calibration_uses_extrema():
    cal = calibrate_pupil(gaze_with_pd([2.0, 4.0, 6.0]), CalibrationSpec(method="strict"))
    assert (cal.pd_min_mm, cal.pd_max_mm) == (2.0, 6.0)


def test_equal_diameters_are_degenerate():
    with pytest.raises(DegenerateCalibration):
        calibrate_pupil(gaze_with_pd([3.0, 3.0, 3.0]), CalibrationSpec(method="strict"))


def test_insufficient_pupil_data():
    with pytest.raises(InsufficientPupilData):
        calibrate_pupil([make_gaze(0, pd=3.0)], CalibrationSpec(method="strict"))


def test_robust_calibration_discards_outlier():
    rng = random.Random(3)
    diameters = [3.0 + 0.5 * rng.random() for _ in range(199)] + [9.0]
    # nearest-rank oracle: rank = ceil(p/100 * n), 1-indexed
    ordered = sorted(diameters)
    expect_low = ordered[max(1, math.ceil(0.01 * len(ordered))) - 1]
    expect_high = ordered[max(1, math.ceil(0.99 * len(ordered))) - 1]
    cal = calibrate_pupil(gaze_with_pd(diameters), CalibrationSpec("robust", p_low=1, p_high=99))
    assert cal.pd_min_mm == expect_low
    assert cal.pd_max_mm == expect_high
    assert cal.pd_max_mm < 9.0


def test_single_eye_fallback_in_mean_diameter():
    from dataclasses import replace

    left_only = replace(make_gaze(0, pd=4.0), pd_right_mm=None)
    assert left_only.mean_pupil_mm() == 4.0


# -- normalization -------------------------------------------------------------

def test_pd_normalize_endpoints_and_midpoint():
    assert pd_normalize(2.0, CAL) == 0.0
    assert pd_normalize(4.0, CAL) == 0.5
    assert pd_normalize(7.0, CAL) == 1.0


def test_pd_normalize_monotone():
    values = [pd_normalize(v, CAL) for v in [1.0, 2.5, 3.5, 5.9, 6.5]]
    assert values == sorted(values)


# -- gaze stability ---------------------------------------------------------------

def test_gs_identical_points():
    assert gaze_stability([(10.0, 10.0)] * 3, SCREEN_345) == 1.0


def test_gs_two_points_across_diagonal():
    assert abs(gaze_stability([(0.0, 0.0), (300.0, 400.0)], SCREEN_345) - 0.5) <= 1e-12


def test_gs_four_points_half_diagonal_hops():
    points = [(0.0, 0.0), (150.0, 200.0), (0.0, 0.0), (150.0, 200.0)]
    assert abs(gaze_stability(points, SCREEN_345) - 0.625) <= 1e-12


def test_gs_divisor_switch():
    points = [(0.0, 0.0), (300.0, 400.0)]
    assert gaze_stability(points, SCREEN_345, divisor="n_minus_1") == 0.0
    points = [(0.0, 0.0), (150.0, 200.0), (0.0, 0.0), (150.0, 200.0)]
    assert abs(gaze_stability(points, SCREEN_345, divisor="n_minus_1") - 0.5) <= 1e-12


def test_gs_window_too_small():
    with pytest.raises(WindowTooSmall):
        gaze_stability([(0.0, 0.0)], SCREEN_345)


def test_gs_bounds_on_random_windows():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(2, 40)
        points = [(rng.uniform(0, 300), rng.uniform(0, 400)) for _ in range(n)]
        gs = gaze_stability(points, SCREEN_345)
        assert 1.0 / n - 1e-12 <= gs <= 1.0 + 1e-12


def test_gs_scale_invariance():
    rng = random.Random(9)
    points = [(rng.uniform(0, 300), rng.uniform(0, 400)) for _ in range(12)]
    scaled = [(4.0 * x, 4.0 * y) for x, y in points]
    big = ScreenGeometry(width_px=1200, height_px=1600)
    assert abs(gaze_stability(points, SCREEN_345) - gaze_stability(scaled, big)) <= 1e-9


# -- attentional focus ----------------------------------------------------------------

def test_af_of_ones_is_one():
    assert attentional_focus(1.0, 1.0, 0.3, 0.7) == 1.0


def test_af_direct_arithmetic():
    assert abs(attentional_focus(0.8, 0.6, 0.5, 0.5) - 0.7) <= 1e-12


def test_af_invalid_weights():
    with pytest.raises(InvalidWeights):
        attentional_focus(0.5, 0.5, 0.7, 0.2)


def test_af_monotone_in_inputs():
    base = attentional_focus(0.4, 0.6, 0.5, 0.5)
    assert attentional_focus(0.5, 0.6, 0.5, 0.5) >= base
    assert attentional_focus(0.4, 0.7, 0.5, 0.5) >= base


# -- timeline ---------------------------------------------------------------------------

def test_flat_timeline_at_three_quarters(default_config):
    session = make_session(gaze=[make_gaze(i * 20, x=500.0, y=300.0, pd=4.0) for i in range(60)])
    timeline = af_timeline(session, default_config, calibration=CAL)
    assert timeline.samples
    for s in timeline.samples:
        assert abs(s.pd_norm - 0.5) <= 1e-12
        assert abs(s.gs - 1.0) <= 1e-12
        assert abs(s.af - 0.75) <= 1e-12
    assert timeline.gaps == ()


def test_pupil_step_raises_af_by_w1(default_config):
    gaze = [make_gaze(i * 20, pd=2.0) for i in range(100)] + [
        make_gaze(2000 + i * 20, pd=6.0) for i in range(100)
    ]
    timeline = af_timeline(make_session(gaze=gaze), default_config)
    pre = [s.af for s in timeline.samples if s.window_end_ms < 2000]
    post = [s.af for s in timeline.samples if s.window_start_ms >= 2000]
    assert pre and post
    assert abs(post[0] - pre[0] - default_config.w1) <= 1e-12


def test_all_invalid_yields_full_session_gap(default_config):
    gaze = [make_gaze(i * 20, valid=False) for i in range(50)]
    timeline = af_timeline(make_session(gaze=gaze), default_config, calibration=CAL)
    assert timeline.samples == ()
    assert timeline.gaps == ((0, 49 * 20),)


def test_window_with_too_few_valid_samples_becomes_gap(default_config):
    gaze = [make_gaze(i * 20, valid=(i >= 30)) for i in range(60)]
    timeline = af_timeline(make_session(gaze=gaze), default_config, calibration=CAL)
    assert timeline.gaps
    assert timeline.samples


# -- event locking ----------------------------------------------------------------------

def _timeline_session(default_config, bump_range=(1200, 2400)):
    gaze = []
    for i in range(200):
        t = i * 20
        pd = 4.0 if bump_range[0] <= t < bump_range[1] else 2.5
        gaze.append(make_gaze(t, pd=pd))
    return make_session(gaze=gaze, events=[make_event(t_ms=1200)])


def test_event_slice_contains_bump(default_config):
    session = _timeline_session(default_config)
    timeline = af_timeline(session, default_config)
    (slice_,) = event_locked_af(timeline, session.events, pre_ms=1000, post_ms=1000)
    assert slice_.baseline_mean_af is not None
    assert max(s.af for s in slice_.samples) > slice_.baseline_mean_af


def test_pre_window_truncated_at_zero(default_config):
    session = _timeline_session(default_config)
    timeline = af_timeline(session, default_config)
    (slice_,) = event_locked_af(timeline, [make_event(t_ms=100)], pre_ms=5000, post_ms=500)
    assert slice_.pre_start_ms == 0


def test_event_beyond_session_end(default_config):
    session = _timeline_session(default_config)
    timeline = af_timeline(session, default_config)
    with pytest.raises(EventOutsideSession):
        event_locked_af(timeline, [make_event(t_ms=10_000_000)], pre_ms=100, post_ms=100)


def test_empty_timeline_rejected():
    with pytest.raises(EventOutsideSession):
        event_locked_af(AFTimeline(samples=(), gaps=()), [make_event(t_ms=0)], 100, 100)
