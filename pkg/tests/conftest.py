import pytest

from bridgewatch.ingest import AnalysisConfig
from bridgewatch.model import (
    ExerciseMeta,
    GazeSample,
    PanelObservation,
    ScreenGeometry,
    Session,
    TriggerEvent,
    Utterance,
)
from bridgewatch.simulate import default_scenario, generate_session

SCREEN = ScreenGeometry(width_px=1920, height_px=1080)


def make_gaze(t_ms, x=500.0, y=300.0, pd=3.0, valid=True):
    return GazeSample(
        t_ms=t_ms,
        gaze_px=(x, y) if valid else None,
        valid=valid,
        pd_left_mm=pd,
        pd_right_mm=pd,
    )


def make_session(gaze=(), panels=(), utterances=(), events=(), screen=SCREEN, audio_ref=None):
    return Session(
        id="test-session",
        screen=screen,
        gaze=tuple(gaze),
        panels=tuple(panels),
        utterances=tuple(utterances),
        events=tuple(events),
        exercise=ExerciseMeta(visibility="good", scenario="unit"),
        audio_ref=audio_ref,
    )


def make_panel(t_ms, panel_id="radar", bbox=(100.0, 100.0, 400.0, 300.0), conf=0.9, subpanel=None):
    return PanelObservation(
        t_ms=t_ms, panel_id=panel_id, bbox=bbox, confidence=conf, subpanel_id=subpanel
    )


def make_utterance(t0, text, speaker="trainee", t1=None):
    return Utterance(t0_ms=t0, t1_ms=t1 if t1 is not None else t0 + 2000, speaker=speaker, text=text)


def make_event(t_ms=60000, kind="main_engine_failure", label="ME failure"):
    return TriggerEvent(t_ms=t_ms, kind=kind, label=label)


@pytest.fixture(scope="session")
def sim_session_dir(tmp_path_factory):
    """One generated default-scenario session shared by read-only tests."""
    out = tmp_path_factory.mktemp("sim") / "session"
    generate_session(default_scenario(), str(out))
    return str(out)


@pytest.fixture()
def default_config():
    return AnalysisConfig()
