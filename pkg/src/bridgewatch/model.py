"""Canonical in-memory model of one training session.

A session bundles the synchronized streams captured during a simulator
exercise: eye-tracker gaze samples, panel detections, transcript segments
and trainer-injected events. All timestamps are integer milliseconds since
session start. Every type here is an immutable value; validation never
mutates and reports violations as data rather than raising.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

DIRECTION_NORM_TOL = 1e-6

# Streams that apply_clock_offsets knows how to shift.
OFFSETTABLE_STREAMS = ("gaze", "panels", "transcript", "events")


@dataclass(frozen=True)
class ScreenGeometry:
    """Scene-frame pixel dimensions of the recorded view."""

    width_px: int
    height_px: int

    @property
    def diagonal_px(self) -> float:
        return math.hypot(self.width_px, self.height_px)


@dataclass(frozen=True)
class GazeSample:
    t_ms: int
    gaze_px: Optional[Tuple[float, float]]
    valid: bool
    depth_m: Optional[float] = None
    pd_left_mm: Optional[float] = None
    pd_right_mm: Optional[float] = None
    direction: Optional[Tuple[float, float, float]] = None

    def mean_pupil_mm(self) -> Optional[float]:
        """Mean diameter of the eyes that reported one; None if neither did."""
        eyes = [d for d in (self.pd_left_mm, self.pd_right_mm) if d is not None]
        if not eyes:
            return None
        return sum(eyes) / len(eyes)


@dataclass(frozen=True)
class PanelObservation:
    t_ms: int
    panel_id: str
    bbox: Tuple[float, float, float, float]  # x0, y0, x1, y1
    confidence: float
    subpanel_id: Optional[str] = None

    def area(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return (x1 - x0) * (y1 - y0)


@dataclass(frozen=True)
class Utterance:
    t0_ms: int
    t1_ms: int
    speaker: str
    text: str


@dataclass(frozen=True)
class TriggerEvent:
    t_ms: int
    kind: str
    label: str = ""


@dataclass(frozen=True)
class ExerciseMeta:
    visibility: str = ""
    scenario: str = ""


@dataclass(frozen=True)
class Session:
    id: str
    screen: ScreenGeometry
    gaze: Tuple[GazeSample, ...] = ()
    panels: Tuple[PanelObservation, ...] = ()
    utterances: Tuple[Utterance, ...] = ()
    events: Tuple[TriggerEvent, ...] = ()
    exercise: ExerciseMeta = field(default_factory=ExerciseMeta)
    audio_ref: Optional[str] = None


@dataclass(frozen=True)
class Violation:
    stream: str
    index: int
    rule: str

    def __str__(self) -> str:
        return f"{self.stream}[{self.index}]: {self.rule}"


def _check_nondecreasing(times, stream, out) -> None:
    for i in range(1, len(times)):
        if times[i] < times[i - 1]:
            out.append(Violation(stream, i, "non-decreasing"))


def validate_session(session: Session) -> list[Violation]:
    """Check every type invariant; an empty list means the session is valid."""
    out: list[Violation] = []
    if not session.id:
        out.append(Violation("session", 0, "id non-empty"))
    if session.screen.width_px <= 0 or session.screen.height_px <= 0:
        out.append(Violation("session", 0, "screen dimensions positive"))

    w, h = session.screen.width_px, session.screen.height_px
    for i, g in enumerate(session.gaze):
        if g.t_ms < 0:
            out.append(Violation("gaze", i, "t_ms >= 0"))
        if g.valid:
            if g.gaze_px is None:
                out.append(Violation("gaze", i, "valid sample requires gaze_px"))
            else:
                x, y = g.gaze_px
                if not (0 <= x <= w and 0 <= y <= h):
                    out.append(Violation("gaze", i, "gaze_px within screen"))
        for name, pd in (("pd_left_mm", g.pd_left_mm), ("pd_right_mm", g.pd_right_mm)):
            if pd is not None and pd <= 0:
                out.append(Violation("gaze", i, f"{name} > 0"))
        if g.direction is not None:
            norm = math.sqrt(sum(c * c for c in g.direction))
            if abs(norm - 1.0) > DIRECTION_NORM_TOL:
                out.append(Violation("gaze", i, "direction unit norm"))
    _check_nondecreasing([g.t_ms for g in session.gaze], "gaze", out)

    for i, p in enumerate(session.panels):
        if p.t_ms < 0:
            out.append(Violation("panels", i, "t_ms >= 0"))
        x0, y0, x1, y1 = p.bbox
        if not x0 < x1:
            out.append(Violation("panels", i, "x0 < x1"))
        if not y0 < y1:
            out.append(Violation("panels", i, "y0 < y1"))
        if x0 < 0 or y0 < 0 or x1 > w or y1 > h:
            out.append(Violation("panels", i, "bbox within frame bounds"))
        if not 0.0 <= p.confidence <= 1.0:
            out.append(Violation("panels", i, "confidence in [0,1]"))
        if not p.panel_id:
            out.append(Violation("panels", i, "panel_id non-empty"))
    _check_nondecreasing([p.t_ms for p in session.panels], "panels", out)

    for i, u in enumerate(session.utterances):
        if u.t0_ms < 0:
            out.append(Violation("transcript", i, "t_ms >= 0"))
        if u.t0_ms > u.t1_ms:
            out.append(Violation("transcript", i, "t_start <= t_end"))
        if not u.text.strip():
            out.append(Violation("transcript", i, "text non-empty"))
    _check_nondecreasing([u.t0_ms for u in session.utterances], "transcript", out)

    for i, e in enumerate(session.events):
        if e.t_ms < 0:
            out.append(Violation("events", i, "t_ms >= 0"))
        if not e.kind:
            out.append(Violation("events", i, "kind non-empty"))
    _check_nondecreasing([e.t_ms for e in session.events], "events", out)

    return out


def apply_clock_offsets(
    session: Session, offsets: dict[str, int]
) -> tuple[Session, dict[str, int]]:
    """Shift each named stream by a signed millisecond offset.

    Records whose timestamp becomes negative are dropped; the returned dict
    counts drops per stream. Unknown stream names raise ValueError.
    """
    for name in offsets:
        if name not in OFFSETTABLE_STREAMS:
            raise ValueError(f"unknown stream '{name}' in offsets")

    dropped = {name: 0 for name in offsets}

    gaze = session.gaze
    if offsets.get("gaze"):
        off = offsets["gaze"]
        shifted = [replace(g, t_ms=g.t_ms + off) for g in gaze]
        kept = [g for g in shifted if g.t_ms >= 0]
        dropped["gaze"] = len(shifted) - len(kept)
        gaze = tuple(kept)

    panels = session.panels
    if offsets.get("panels"):
        off = offsets["panels"]
        shifted = [replace(p, t_ms=p.t_ms + off) for p in panels]
        kept = [p for p in shifted if p.t_ms >= 0]
        dropped["panels"] = len(shifted) - len(kept)
        panels = tuple(kept)

    utterances = session.utterances
    if offsets.get("transcript"):
        off = offsets["transcript"]
        shifted = [replace(u, t0_ms=u.t0_ms + off, t1_ms=u.t1_ms + off) for u in utterances]
        kept = [u for u in shifted if u.t0_ms >= 0]
        dropped["transcript"] = len(shifted) - len(kept)
        utterances = tuple(kept)

    events = session.events
    if offsets.get("events"):
        off = offsets["events"]
        shifted = [replace(e, t_ms=e.t_ms + off) for e in events]
        kept = [e for e in shifted if e.t_ms >= 0]
        dropped["events"] = len(shifted) - len(kept)
        events = tuple(kept)

    out = replace(session, gaze=gaze, panels=panels, utterances=utterances, events=events)
    return out, dropped
