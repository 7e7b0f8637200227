import pytest
from hypothesis import given, strategies as st

from bridgewatch.model import (
    GazeSample,
    ScreenGeometry,
    apply_clock_offsets,
    validate_session,
)

from .conftest import make_event, make_gaze, make_panel, make_session, make_utterance


def test_well_formed_session_has_empty_report():
    session = make_session(
        gaze=[make_gaze(0), make_gaze(20), make_gaze(40)],
        panels=[make_panel(0)],
        utterances=[make_utterance(0, "radio check")],
        events=[make_event()],
    )
    assert validate_session(session) == []


def test_gaze_timestamps_must_be_nondecreasing():
    session = make_session(gaze=[make_gaze(10), make_gaze(5)])
    report = validate_session(session)
    assert len(report) == 1
    assert (report[0].stream, report[0].index, report[0].rule) == ("gaze", 1, "non-decreasing")


def test_degenerate_bbox_is_flagged():
    session = make_session(panels=[make_panel(0, bbox=(50.0, 50.0, 40.0, 60.0))])
    report = validate_session(session)
    assert [v.rule for v in report] == ["x0 < x1"]


def test_valid_sample_requires_in_frame_gaze():
    inside = GazeSample(t_ms=0, gaze_px=(1920.0, 1080.0), valid=True)
    outside = GazeSample(t_ms=10, gaze_px=(1920.5, 0.0), valid=True)
    missing = GazeSample(t_ms=20, gaze_px=None, valid=True)
    report = validate_session(make_session(gaze=[inside, outside, missing]))
    assert [(v.index, v.rule) for v in report] == [
        (1, "gaze_px within screen"),
        (2, "valid sample requires gaze_px"),
    ]


def test_pupil_and_direction_invariants():
    bad_pd = GazeSample(t_ms=0, gaze_px=(1.0, 1.0), valid=True, pd_left_mm=-3.0)
    bad_dir = GazeSample(t_ms=10, gaze_px=(1.0, 1.0), valid=True, direction=(1.0, 1.0, 0.0))
    rules = {v.rule for v in validate_session(make_session(gaze=[bad_pd, bad_dir]))}
    assert "pd_left_mm > 0" in rules
    assert "direction unit norm" in rules


def test_utterance_and_event_invariants():
    session = make_session(
        utterances=[make_utterance(100, "   ", t1=50)],
        events=[make_event(kind="")],
    )
    rules = {v.rule for v in validate_session(session)}
    assert "t_start <= t_end" in rules
    assert "text non-empty" in rules
    assert "kind non-empty" in rules


def test_validate_is_idempotent_and_pure():
    session = make_session(gaze=[make_gaze(10), make_gaze(5)])
    first = validate_session(session)
    second = validate_session(session)
    assert first == second
    assert session.gaze[0].t_ms == 10


def test_zero_offsets_are_identity():
    session = make_session(
        gaze=[make_gaze(0), make_gaze(20)],
        utterances=[make_utterance(10, "hello there")],
        events=[make_event(t_ms=5)],
    )
    shifted, dropped = apply_clock_offsets(session, {"gaze": 0, "transcript": 0})
    assert shifted == session
    assert dropped == {"gaze": 0, "transcript": 0}


def test_negative_offset_drops_underflowing_samples():
    session = make_session(gaze=[make_gaze(10), make_gaze(30)])
    shifted, dropped = apply_clock_offsets(session, {"gaze": -20})
    assert [g.t_ms for g in shifted.gaze] == [10]
    assert dropped == {"gaze": 1}


def test_offsets_are_scoped_per_stream():
    session = make_session(
        gaze=[make_gaze(0)],
        utterances=[make_utterance(100, "unchanged text")],
    )
    shifted, _ = apply_clock_offsets(session, {"gaze": 100})
    assert shifted.utterances == session.utterances
    assert shifted.gaze[0].t_ms == 100


def test_transcript_offset_moves_both_endpoints():
    session = make_session(utterances=[make_utterance(100, "hello", t1=300)])
    shifted, _ = apply_clock_offsets(session, {"transcript": -50})
    assert (shifted.utterances[0].t0_ms, shifted.utterances[0].t1_ms) == (50, 250)


def test_unknown_stream_is_rejected():
    with pytest.raises(ValueError):
        apply_clock_offsets(make_session(), {"audio": 10})


@given(
    times=st.lists(st.integers(min_value=0, max_value=10_000), min_size=1, max_size=40),
    offset=st.integers(min_value=-5_000, max_value=5_000),
)
def test_uniform_shift_preserves_ordering(times, offset):
    session = make_session(gaze=[make_gaze(t) for t in sorted(times)])
    assert validate_session(session) == []
    shifted, _ = apply_clock_offsets(session, {"gaze": offset})
    assert not any(v.rule == "non-decreasing" for v in validate_session(shifted))


def test_screen_diagonal_is_derived():
    assert ScreenGeometry(width_px=300, height_px=400).diagonal_px == 500.0
