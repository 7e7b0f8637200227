"""Attentional-focus analytics from pupil dilation and gaze stability.

Pupil diameters are min-max normalized against a per-session calibration.
Gaze stability over a window of points G_1..G_N is

    GS = 1 - (1/N) * sum_{i=1..N-1} |G_i - G_{i+1}| / diagonal_px

with the divisor N configurable to N-1 (``gs_divisor``). The focus score is
the weighted sum AF = w1 * pd_norm + w2 * GS with w1 + w2 = 1, evaluated on
sliding sample windows to produce a timeline, optionally re-sliced around
trigger events.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    DegenerateCalibration,
    EventOutsideSession,
    InsufficientPupilData,
    InvalidWeights,
    WindowTooSmall,
)
from .ingest import AnalysisConfig, CalibrationSpec
from .model import GazeSample, ScreenGeometry, Session, TriggerEvent

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class PupilCalibration:
    pd_min_mm: float
    pd_max_mm: float
    method: str


@dataclass(frozen=True)
class AFSample:
    window_start_ms: int
    window_end_ms: int
    pd_norm: float
    gs: float
    af: float


@dataclass(frozen=True)
class AFTimeline:
    samples: tuple[AFSample, ...]
    gaps: tuple[tuple[int, int], ...]  # (start_ms, end_ms) spans without AF coverage

    def coverage(self) -> Optional[tuple[int, int]]:
        spans = [(s.window_start_ms, s.window_end_ms) for s in self.samples] + list(self.gaps)
        if not spans:
            return None
        return min(s for s, _ in spans), max(e for _, e in spans)


@dataclass(frozen=True)
class EventLockedAF:
    event: TriggerEvent
    pre_start_ms: int
    post_end_ms: int
    baseline_mean_af: Optional[float]
    samples: tuple[AFSample, ...]


def _usable_diameters(gaze: Sequence[GazeSample]) -> list[float]:
    return [pd for pd in (g.mean_pupil_mm() for g in gaze) if pd is not None]


def _nearest_rank(sorted_values: list[float], p: float) -> float:
    n = len(sorted_values)
    rank = max(1, min(n, math.ceil(p / 100.0 * n)))
    return sorted_values[rank - 1]


def calibrate_pupil(gaze: Sequence[GazeSample], spec: CalibrationSpec) -> PupilCalibration:
    """Derive the normalization range from per-sample mean diameters."""
    diameters = _usable_diameters(gaze)
    if len(diameters) < 2:
        raise InsufficientPupilData(f"need >= 2 usable diameters, got {len(diameters)}")
    if spec.method == "strict":
        lo, hi = min(diameters), max(diameters)
    elif spec.method == "robust":
        ordered = sorted(diameters)
        lo = _nearest_rank(ordered, spec.p_low)
        hi = _nearest_rank(ordered, spec.p_high)
    else:
        raise ValueError(f"unknown calibration method '{spec.method}'")
    if not lo < hi:
        raise DegenerateCalibration(f"pd_min {lo} not below pd_max {hi}")
    return PupilCalibration(pd_min_mm=lo, pd_max_mm=hi, method=spec.method)


def pd_normalize(pd_mm: float, cal: PupilCalibration) -> float:
    """Min-max normalize a diameter, clamped to [0, 1]."""
    value = (pd_mm - cal.pd_min_mm) / (cal.pd_max_mm - cal.pd_min_mm)
    return min(1.0, max(0.0, value))


def gaze_stability(
    points: Sequence[tuple[float, float]], screen: ScreenGeometry, divisor: str = "n"
) -> float:
    """Stability of a window of gaze points; 1.0 means perfectly still."""
    n = len(points)
    if n < 2:
        raise WindowTooSmall(f"need >= 2 gaze points, got {n}")
    hops = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        hops += math.hypot(x1 - x0, y1 - y0)
    div = n if divisor == "n" else n - 1
    return 1.0 - hops / (div * screen.diagonal_px)


def attentional_focus(pd_norm: float, gs: float, w1: float, w2: float) -> float:
    if w1 < 0 or w2 < 0 or abs((w1 + w2) - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidWeights(f"w1={w1}, w2={w2} must be non-negative and sum to 1")
    return w1 * pd_norm + w2 * gs


def af_timeline(
    session: Session,
    config: AnalysisConfig,
    calibration: Optional[PupilCalibration] = None,
) -> AFTimeline:
    """Sliding-window AF series over the session's gaze stream.

    Windows cover ``af_window_n`` consecutive samples at ``af_stride`` steps;
    only valid samples inside a window contribute. Windows with fewer than
    two valid gaze points or no usable pupil data become gap spans.
    """
    gaze = session.gaze
    if calibration is None:
        calibration = calibrate_pupil(gaze, config.pd_calibration)

    n = config.af_window_n
    stride = config.af_stride
    samples: list[AFSample] = []
    gap_spans: list[tuple[int, int]] = []

    starts = range(0, len(gaze) - n + 1, stride)
    for start in starts:
        window = gaze[start : start + n]
        w_start, w_end = window[0].t_ms, window[-1].t_ms
        valid = [g for g in window if g.valid and g.gaze_px is not None]
        diameters = _usable_diameters([g for g in window if g.valid])
        if len(valid) < 2 or not diameters or w_end <= w_start:
            gap_spans.append((w_start, w_end))
            continue
        pd_norm = sum(pd_normalize(pd, calibration) for pd in diameters) / len(diameters)
        gs = gaze_stability([g.gaze_px for g in valid], session.screen, config.gs_divisor)
        af = attentional_focus(pd_norm, gs, config.w1, config.w2)
        samples.append(
            AFSample(window_start_ms=w_start, window_end_ms=w_end, pd_norm=pd_norm, gs=gs, af=af)
        )

    if not samples and gaze:
        gaps: list[tuple[int, int]] = [(gaze[0].t_ms, gaze[-1].t_ms)]
    else:
        gaps = []
        for span in sorted(gap_spans):
            if gaps and span[0] <= gaps[-1][1]:
                gaps[-1] = (gaps[-1][0], max(gaps[-1][1], span[1]))
            else:
                gaps.append(span)
    return AFTimeline(samples=tuple(samples), gaps=tuple(gaps))


def event_locked_af(
    timeline: AFTimeline, events: Sequence[TriggerEvent], pre_ms: int, post_ms: int
) -> list[EventLockedAF]:
    """Slice the AF series around each event with a pre-event baseline mean.

    A window midpoint decides membership; the pre-window is clipped at t=0.
    Events beyond the timeline's coverage raise EventOutsideSession.
    """
    coverage = timeline.coverage()
    if coverage is None:
        raise EventOutsideSession("timeline is empty")
    _, cov_end = coverage

    out = []
    for event in events:
        if event.t_ms > cov_end:
            raise EventOutsideSession(f"event at {event.t_ms} ms beyond timeline end {cov_end} ms")
        pre_start = max(0, event.t_ms - pre_ms)
        post_end = event.t_ms + post_ms
        in_slice = []
        baseline = []
        for s in timeline.samples:
            mid = (s.window_start_ms + s.window_end_ms) / 2.0
            if pre_start <= mid <= post_end:
                in_slice.append(s)
                if mid < event.t_ms:
                    baseline.append(s.af)
        mean = sum(baseline) / len(baseline) if baseline else None
        out.append(
            EventLockedAF(
                event=event,
                pre_start_ms=pre_start,
                post_end_ms=post_end,
                baseline_mean_af=mean,
                samples=tuple(in_slice),
            )
        )
    return out
