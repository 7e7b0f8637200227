"""Map gaze samples onto detected panels and aggregate dwell distributions.

Assignment matches each valid gaze sample against panel detections within a
temporal gate, picking the nearest-in-time containing bounding box.
Containment is closed-low/open-high so adjacent panels tile the screen
without double-assignment.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import AdapterUnavailable
from .model import GazeSample, PanelObservation

UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class GazeAssignment:
    t_ms: int
    panel_id: Optional[str] = None
    subpanel_id: Optional[str] = None
    source_observation_index: Optional[int] = None

    @property
    def assigned(self) -> bool:
        return self.panel_id is not None


@dataclass(frozen=True)
class DwellBin:
    bin_start_ms: int
    bin_ms: int
    valid_samples: int
    fractions: dict[str, float]  # panel_id plus "unassigned" -> fraction


@dataclass(frozen=True)
class DwellSummary:
    bins: list[DwellBin]
    total_valid_samples: int
    total_fractions: dict[str, float]


def point_in_bbox(point: tuple[float, float], bbox: tuple[float, float, float, float]) -> bool:
    """True iff x0 <= x < x1 and y0 <= y < y1."""
    x, y = point
    x0, y0, x1, y1 = bbox
    return x0 <= x < x1 and y0 <= y < y1


def assign_gaze(
    sample: GazeSample,
    panels: Sequence[PanelObservation],
    dt_max_ms: int,
    _times: Optional[Sequence[int]] = None,
) -> GazeAssignment:
    """Assign one valid gaze sample to the best containing panel observation.

    Candidates are observations within dt_max_ms whose bbox contains the
    gaze point; the temporally nearest wins, with ties broken by higher
    confidence, then smaller bbox area, then lower index. ``_times`` is an
    optional precomputed timestamp list for bisection over large streams.
    """
    if not sample.valid or sample.gaze_px is None:
        return GazeAssignment(t_ms=sample.t_ms)

    times = _times if _times is not None else [p.t_ms for p in panels]
    lo = bisect.bisect_left(times, sample.t_ms - dt_max_ms)
    hi = bisect.bisect_right(times, sample.t_ms + dt_max_ms)

    best: Optional[tuple[int, float, float, int]] = None  # dt, -conf, area, index
    for i in range(lo, hi):
        obs = panels[i]
        if not point_in_bbox(sample.gaze_px, obs.bbox):
            continue
        key = (abs(obs.t_ms - sample.t_ms), -obs.confidence, obs.area(), i)
        if best is None or key < best:
            best = key
    if best is None:
        return GazeAssignment(t_ms=sample.t_ms)
    winner = panels[best[3]]
    return GazeAssignment(
        t_ms=sample.t_ms,
        panel_id=winner.panel_id,
        subpanel_id=winner.subpanel_id,
        source_observation_index=best[3],
    )


def assign_session(
    gaze: Sequence[GazeSample], panels: Sequence[PanelObservation], dt_max_ms: int
) -> list[GazeAssignment]:
    """Assignments for every valid gaze sample, in stream order."""
    times = [p.t_ms for p in panels]
    return [
        assign_gaze(s, panels, dt_max_ms, _times=times)
        for s in gaze
        if s.valid and s.gaze_px is not None
    ]


def dwell_distribution(assignments: Sequence[GazeAssignment], bin_ms: int) -> DwellSummary:
    """Per-bin and whole-session fractions of samples on each panel.

    Bins are aligned to multiples of bin_ms from t=0 and span the assignment
    range; bins without samples carry empty fraction maps. Fractions over
    panel ids plus "unassigned" sum to 1 for every non-empty bin.
    """
    if bin_ms <= 0:
        raise ValueError("bin_ms must be positive")
    if not assignments:
        return DwellSummary(bins=[], total_valid_samples=0, total_fractions={})

    last_bin = max(a.t_ms for a in assignments) // bin_ms
    counts: list[dict[str, int]] = [dict() for _ in range(last_bin + 1)]
    totals: dict[str, int] = {}
    for a in assignments:
        key = a.panel_id if a.assigned else UNASSIGNED
        c = counts[a.t_ms // bin_ms]
        c[key] = c.get(key, 0) + 1
        totals[key] = totals.get(key, 0) + 1

    bins = []
    for k, c in enumerate(counts):
        n = sum(c.values())
        fractions = {key: c[key] / n for key in sorted(c)} if n else {}
        bins.append(DwellBin(bin_start_ms=k * bin_ms, bin_ms=bin_ms, valid_samples=n, fractions=fractions))

    n_total = len(assignments)
    total_fractions = {key: totals[key] / n_total for key in sorted(totals)}
    return DwellSummary(bins=bins, total_valid_samples=n_total, total_fractions=total_fractions)


class DetectorAdapter:
    """Interface for panel-detection backends queried by timestamp."""

    def detect(self, frame_ref: object, t_ms: int) -> list[PanelObservation]:
        raise NotImplementedError


class ScriptedDetector(DetectorAdapter):
    """Replays a recorded observation stream as if it were a live detector."""

    def __init__(self, observations: Sequence[PanelObservation], dt_max_ms: int = 100):
        self._observations = list(observations)
        self._times = [o.t_ms for o in self._observations]
        self._dt_max_ms = dt_max_ms

    def detect(self, frame_ref: object, t_ms: int) -> list[PanelObservation]:
        lo = bisect.bisect_left(self._times, t_ms - self._dt_max_ms)
        hi = bisect.bisect_right(self._times, t_ms + self._dt_max_ms)
        return self._observations[lo:hi]


class UnavailableDetector(DetectorAdapter):
    """Stand-in for a configured but unreachable detector backend."""

    def __init__(self, reason: str = "detector backend unreachable"):
        self._reason = reason

    def detect(self, frame_ref: object, t_ms: int) -> list[PanelObservation]:
        raise AdapterUnavailable(self._reason)
