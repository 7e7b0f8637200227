"""Parsers and writers for session input files and analysis configuration.

Formats (all UTF-8, newline terminated):
  gaze.jsonl        {"t_ms": int, "gx": float, "gy": float, "depth_m": float|null,
                     "pd_left_mm": float|null, "pd_right_mm": float|null,
                     "dir": [float, float, float]|null, "valid": bool}
  panels.jsonl      {"t_ms": int, "panel": str, "subpanel": str|null,
                     "bbox": [x0, y0, x1, y1], "conf": float}
  transcript.jsonl  {"t0_ms": int, "t1_ms": int, "speaker": str, "text": str}
  events.json       [{"t_ms": int, "kind": str, "label": str}]
  catalog.json      {"screen": {"w_px": int, "h_px": int},
                     "panels": [{"id": str, "name": str,
                                 "subpanels": [{"id": str, "name": str}]}]}
  offsets.json      {"gaze"|"panels"|"transcript"|"events": int ms}
  meta.json         {"id": str, "visibility": str, "scenario": str}   (optional)

High-rate streams are JSON Lines so malformed records can be skipped in
tolerant mode; timestamps are parsed as 64-bit integers, every other number
as a 64-bit real. Unknown fields are ignored; missing optional fields stay
absent (never defaulted to zero).
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Union

from .errors import (
    InvalidSession,
    MalformedLine,
    MissingField,
    MissingFile,
    OutOfRangeValue,
    SchemaError,
)
from .model import (
    ExerciseMeta,
    GazeSample,
    PanelObservation,
    ScreenGeometry,
    Session,
    TriggerEvent,
    Utterance,
    Violation,
    OFFSETTABLE_STREAMS,
    apply_clock_offsets,
    validate_session,
)

Source = Union[bytes, str, IO[bytes], IO[str]]

REQUIRED_FILES = ("gaze.jsonl", "panels.jsonl", "transcript.jsonl", "events.json", "catalog.json")
OPTIONAL_FILES = ("audio.wav", "offsets.json", "meta.json", "entities.json", "checklists.json")


# -- catalog ------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogSubpanel:
    subpanel_id: str
    display_name: str


@dataclass(frozen=True)
class CatalogPanel:
    panel_id: str
    display_name: str
    subpanels: tuple[CatalogSubpanel, ...] = ()


@dataclass(frozen=True)
class PanelCatalog:
    screen: ScreenGeometry
    panels: tuple[CatalogPanel, ...]

    def panel_ids(self) -> list[str]:
        return [p.panel_id for p in self.panels]

    def subpanel_ids(self, panel_id: str) -> list[str]:
        for p in self.panels:
            if p.panel_id == panel_id:
                return [s.subpanel_id for s in p.subpanels]
        return []


# -- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationSpec:
    """Pupil min/max calibration policy: extrema or percentile-based."""

    method: str = "strict"  # "strict" | "robust"
    p_low: float = 1.0
    p_high: float = 99.0


@dataclass(frozen=True)
class StressConfig:
    frame_ms: int = 40
    hop_ms: int = 10
    window_ms: int = 3000
    window_hop_ms: int = 1000
    baseline_ms: int = 30000
    median_filter_k: int = 5
    weights: tuple[float, float, float] = (0.5, 0.3, 0.2)
    slope: float = 2.0
    z0: float = 2.0
    voicing_peak: float = 0.5
    energy_floor: float = 1e-4
    f0_min_hz: float = 60.0
    f0_max_hz: float = 400.0
    min_voicing: float = 0.2


@dataclass(frozen=True)
class AnalysisConfig:
    w1: float = 0.5
    w2: float = 0.5
    af_window_n: int = 30
    af_stride: int = 10
    gs_divisor: str = "n"  # "n" | "n_minus_1"
    pd_calibration: CalibrationSpec = field(default_factory=CalibrationSpec)
    assign_dt_max_ms: int = 100
    dwell_bin_ms: int = 60000
    checklist_horizon_ms: int = 900000
    event_pre_ms: int = 30000
    event_post_ms: int = 60000
    stress: StressConfig = field(default_factory=StressConfig)

    def to_dict(self) -> dict:
        cal: dict = {"method": self.pd_calibration.method}
        if self.pd_calibration.method == "robust":
            cal["p_low"] = self.pd_calibration.p_low
            cal["p_high"] = self.pd_calibration.p_high
        return {
            "w1": self.w1,
            "w2": self.w2,
            "af_window_n": self.af_window_n,
            "af_stride": self.af_stride,
            "gs_divisor": self.gs_divisor,
            "pd_calibration": cal,
            "assign_dt_max_ms": self.assign_dt_max_ms,
            "dwell_bin_ms": self.dwell_bin_ms,
            "checklist_horizon_ms": self.checklist_horizon_ms,
            "event_pre_ms": self.event_pre_ms,
            "event_post_ms": self.event_post_ms,
            "stress": {
                "frame_ms": self.stress.frame_ms,
                "hop_ms": self.stress.hop_ms,
                "window_ms": self.stress.window_ms,
                "window_hop_ms": self.stress.window_hop_ms,
                "baseline_ms": self.stress.baseline_ms,
                "median_filter_k": self.stress.median_filter_k,
                "weights": list(self.stress.weights),
                "slope": self.stress.slope,
                "z0": self.stress.z0,
                "voicing_peak": self.stress.voicing_peak,
                "energy_floor": self.stress.energy_floor,
                "f0_min_hz": self.stress.f0_min_hz,
                "f0_max_hz": self.stress.f0_max_hz,
                "min_voicing": self.stress.min_voicing,
            },
        }


# -- low-level helpers --------------------------------------------------------

def _as_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _iter_lines(source: Source) -> Iterator[tuple[int, str]]:
    for i, line in enumerate(_as_text(source).split("\n"), start=1):
        if line.strip():
            yield i, line


def _require(obj: dict, key: str, line_no: int):
    if key not in obj or obj[key] is None:
        raise MissingField(key, line_no)
    return obj[key]


def _as_int(value, name: str, line_no: int | None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise OutOfRangeValue(f"{name} must be an integer", line_no)
    return value


def _as_float(value, name: str, line_no: int | None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise OutOfRangeValue(f"{name} must be a number", line_no)
    v = float(value)
    if math.isnan(v) or math.isinf(v):
        raise OutOfRangeValue(f"{name} must be finite", line_no)
    return v


def _parse_jsonl(source: Source, mode: str, parse_record) -> tuple[list, int]:
    if mode not in ("strict", "tolerant"):
        raise ValueError(f"unknown parse mode '{mode}'")
    records: list = []
    skipped = 0
    for line_no, line in _iter_lines(source):
        try:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise MalformedLine(line_no, "record is not a JSON object")
            records.append(parse_record(obj, line_no))
        except (MalformedLine, MissingField, OutOfRangeValue):
            if mode == "strict":
                raise
            skipped += 1
    return records, skipped


# -- stream parsers -----------------------------------------------------------

def _gaze_record(obj: dict, line_no: int) -> GazeSample:
    t_ms = _as_int(_require(obj, "t_ms", line_no), "t_ms", line_no)
    if t_ms < 0:
        raise OutOfRangeValue("t_ms must be >= 0", line_no)
    valid = _require(obj, "valid", line_no)
    if not isinstance(valid, bool):
        raise OutOfRangeValue("valid must be a boolean", line_no)

    gaze_px = None
    if obj.get("gx") is not None or obj.get("gy") is not None or valid:
        gx = _as_float(_require(obj, "gx", line_no), "gx", line_no)
        gy = _as_float(_require(obj, "gy", line_no), "gy", line_no)
        gaze_px = (gx, gy)

    depth = obj.get("depth_m")
    depth_m = None if depth is None else _as_float(depth, "depth_m", line_no)

    pds = []
    for name in ("pd_left_mm", "pd_right_mm"):
        raw = obj.get(name)
        if raw is None:
            pds.append(None)
            continue
        pd = _as_float(raw, name, line_no)
        if pd <= 0:
            raise OutOfRangeValue(f"{name} must be > 0", line_no)
        pds.append(pd)

    direction = None
    raw_dir = obj.get("dir")
    if raw_dir is not None:
        if not isinstance(raw_dir, list) or len(raw_dir) != 3:
            raise OutOfRangeValue("dir must be a 3-vector", line_no)
        direction = tuple(_as_float(c, "dir", line_no) for c in raw_dir)

    return GazeSample(
        t_ms=t_ms,
        gaze_px=gaze_px,
        valid=valid,
        depth_m=depth_m,
        pd_left_mm=pds[0],
        pd_right_mm=pds[1],
        direction=direction,
    )


def parse_gaze_jsonl(source: Source, mode: str = "strict") -> tuple[list[GazeSample], int]:
    """Parse gaze.jsonl; returns (samples, skipped_line_count)."""
    return _parse_jsonl(source, mode, _gaze_record)


def _panel_record(obj: dict, line_no: int) -> PanelObservation:
    t_ms = _as_int(_require(obj, "t_ms", line_no), "t_ms", line_no)
    if t_ms < 0:
        raise OutOfRangeValue("t_ms must be >= 0", line_no)
    panel = _require(obj, "panel", line_no)
    if not isinstance(panel, str) or not panel:
        raise OutOfRangeValue("panel must be a non-empty string", line_no)
    raw_bbox = _require(obj, "bbox", line_no)
    if not isinstance(raw_bbox, list) or len(raw_bbox) != 4:
        raise OutOfRangeValue("bbox must be [x0, y0, x1, y1]", line_no)
    x0, y0, x1, y1 = (_as_float(c, "bbox", line_no) for c in raw_bbox)
    if not x0 < x1:
        raise OutOfRangeValue("x0 < x1", line_no)
    if not y0 < y1:
        raise OutOfRangeValue("y0 < y1", line_no)
    conf = _as_float(_require(obj, "conf", line_no), "conf", line_no)
    if not 0.0 <= conf <= 1.0:
        raise OutOfRangeValue("conf must be in [0,1]", line_no)
    subpanel = obj.get("subpanel")
    if subpanel is not None and not isinstance(subpanel, str):
        raise OutOfRangeValue("subpanel must be a string", line_no)
    return PanelObservation(
        t_ms=t_ms, panel_id=panel, bbox=(x0, y0, x1, y1), confidence=conf, subpanel_id=subpanel
    )


def parse_panels_jsonl(source: Source, mode: str = "strict") -> tuple[list[PanelObservation], int]:
    """Parse panels.jsonl; contract mirrors parse_gaze_jsonl."""
    return _parse_jsonl(source, mode, _panel_record)


def _utterance_record(obj: dict, line_no: int) -> Utterance:
    t0 = _as_int(_require(obj, "t0_ms", line_no), "t0_ms", line_no)
    t1 = _as_int(_require(obj, "t1_ms", line_no), "t1_ms", line_no)
    if t0 < 0:
        raise OutOfRangeValue("t0_ms must be >= 0", line_no)
    if t0 > t1:
        raise OutOfRangeValue("t0_ms <= t1_ms", line_no)
    speaker = _require(obj, "speaker", line_no)
    if not isinstance(speaker, str):
        raise OutOfRangeValue("speaker must be a string", line_no)
    text = _require(obj, "text", line_no)
    if not isinstance(text, str) or not text.strip():
        raise OutOfRangeValue("text must be non-empty", line_no)
    return Utterance(t0_ms=t0, t1_ms=t1, speaker=speaker, text=text)


def parse_transcript_jsonl(source: Source, mode: str = "strict") -> tuple[list[Utterance], int]:
    """Parse transcript.jsonl; contract mirrors parse_gaze_jsonl."""
    return _parse_jsonl(source, mode, _utterance_record)


# -- single-document parsers --------------------------------------------------

def _load_doc(source: Source, name: str):
    try:
        return json.loads(_as_text(source))
    except json.JSONDecodeError as exc:
        raise SchemaError(name, f"invalid JSON: {exc.msg}") from exc


def parse_events_json(source: Source) -> list[TriggerEvent]:
    doc = _load_doc(source, "events")
    if not isinstance(doc, list):
        raise SchemaError("events", "expected an array")
    out = []
    for i, obj in enumerate(doc):
        path = f"events[{i}]"
        if not isinstance(obj, dict):
            raise SchemaError(path, "expected an object")
        if "t_ms" not in obj:
            raise SchemaError(f"{path}.t_ms", "missing")
        if isinstance(obj["t_ms"], bool) or not isinstance(obj["t_ms"], int):
            raise SchemaError(f"{path}.t_ms", "must be an integer")
        if obj["t_ms"] < 0:
            raise SchemaError(f"{path}.t_ms", "must be >= 0")
        kind = obj.get("kind")
        if not isinstance(kind, str) or not kind:
            raise SchemaError(f"{path}.kind", "must be a non-empty string")
        label = obj.get("label", "")
        if not isinstance(label, str):
            raise SchemaError(f"{path}.label", "must be a string")
        out.append(TriggerEvent(t_ms=obj["t_ms"], kind=kind, label=label))
    return out


def parse_catalog_json(source: Source) -> PanelCatalog:
    doc = _load_doc(source, "catalog")
    if not isinstance(doc, dict):
        raise SchemaError("catalog", "expected an object")
    screen = doc.get("screen")
    if not isinstance(screen, dict):
        raise SchemaError("catalog.screen", "missing or not an object")
    for key in ("w_px", "h_px"):
        v = screen.get(key)
        if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
            raise SchemaError(f"catalog.screen.{key}", "must be a positive integer")
    panels_doc = doc.get("panels")
    if not isinstance(panels_doc, list):
        raise SchemaError("catalog.panels", "missing or not an array")

    panels = []
    seen_ids: set[str] = set()
    for i, p in enumerate(panels_doc):
        path = f"catalog.panels[{i}]"
        if not isinstance(p, dict):
            raise SchemaError(path, "expected an object")
        pid = p.get("id")
        if not isinstance(pid, str) or not pid:
            raise SchemaError(f"{path}.id", "must be a non-empty string")
        if pid in seen_ids:
            raise SchemaError(f"{path}.id", f"duplicate id '{pid}'")
        seen_ids.add(pid)
        name = p.get("name", pid)
        if not isinstance(name, str):
            raise SchemaError(f"{path}.name", "must be a string")
        subpanels = []
        seen_sub: set[str] = set()
        for j, s in enumerate(p.get("subpanels", []) or []):
            spath = f"{path}.subpanels[{j}]"
            if not isinstance(s, dict):
                raise SchemaError(spath, "expected an object")
            sid = s.get("id")
            if not isinstance(sid, str) or not sid:
                raise SchemaError(f"{spath}.id", "must be a non-empty string")
            if sid in seen_sub:
                raise SchemaError(f"{spath}.id", f"duplicate id '{sid}'")
            seen_sub.add(sid)
            sname = s.get("name", sid)
            if not isinstance(sname, str):
                raise SchemaError(f"{spath}.name", "must be a string")
            subpanels.append(CatalogSubpanel(subpanel_id=sid, display_name=sname))
        panels.append(CatalogPanel(panel_id=pid, display_name=name, subpanels=tuple(subpanels)))

    return PanelCatalog(
        screen=ScreenGeometry(width_px=screen["w_px"], height_px=screen["h_px"]),
        panels=tuple(panels),
    )


def parse_offsets_json(source: Source) -> dict[str, int]:
    doc = _load_doc(source, "offsets")
    if not isinstance(doc, dict):
        raise SchemaError("offsets", "expected an object")
    out = {}
    for key, value in doc.items():
        if key not in OFFSETTABLE_STREAMS:
            raise SchemaError(f"offsets.{key}", "unknown stream")
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"offsets.{key}", "must be an integer")
        out[key] = value
    return out


def _pick_num(doc: dict, key: str, default, path: str = "config") -> float:
    v = doc.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}.{key}", "must be a number")
    return float(v)


def _pick_posint(doc: dict, key: str, default, path: str = "config") -> int:
    v = doc.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
        raise SchemaError(f"{path}.{key}", "must be a positive integer")
    return v


def parse_config(source: Source) -> AnalysisConfig:
    doc = _load_doc(source, "config")
    if not isinstance(doc, dict):
        raise SchemaError("config", "expected an object")
    defaults = AnalysisConfig()

    w1 = _pick_num(doc, "w1", defaults.w1)
    w2 = _pick_num(doc, "w2", defaults.w2)
    if w1 < 0 or w2 < 0:
        raise SchemaError("config.w1", "weights must be non-negative")
    if abs((w1 + w2) - 1.0) > 1e-9:
        raise SchemaError("config.w1", "w1+w2 must equal 1")

    af_window_n = _pick_posint(doc, "af_window_n", defaults.af_window_n)
    if af_window_n < 2:
        raise SchemaError("config.af_window_n", "must be >= 2")
    af_stride = _pick_posint(doc, "af_stride", defaults.af_stride)

    gs_divisor = doc.get("gs_divisor", defaults.gs_divisor)
    if gs_divisor not in ("n", "n_minus_1"):
        raise SchemaError("config.gs_divisor", "must be 'n' or 'n_minus_1'")

    cal_doc = doc.get("pd_calibration", {"method": defaults.pd_calibration.method})
    if not isinstance(cal_doc, dict):
        raise SchemaError("config.pd_calibration", "expected an object")
    method = cal_doc.get("method", "strict")
    if method not in ("strict", "robust"):
        raise SchemaError("config.pd_calibration.method", "must be 'strict' or 'robust'")
    p_low = _pick_num(cal_doc, "p_low", 1.0, "config.pd_calibration")
    p_high = _pick_num(cal_doc, "p_high", 99.0, "config.pd_calibration")
    if not 0 <= p_low < p_high <= 100:
        raise SchemaError("config.pd_calibration", "need 0 <= p_low < p_high <= 100")
    calibration = CalibrationSpec(method=method, p_low=p_low, p_high=p_high)

    s_doc = doc.get("stress", {})
    if not isinstance(s_doc, dict):
        raise SchemaError("config.stress", "expected an object")
    sd = StressConfig()
    weights_raw = s_doc.get("weights", list(sd.weights))
    if (
        not isinstance(weights_raw, list)
        or len(weights_raw) != 3
        or any(isinstance(w, bool) or not isinstance(w, (int, float)) or w < 0 for w in weights_raw)
    ):
        raise SchemaError("config.stress.weights", "must be 3 non-negative numbers")
    k = _pick_posint(s_doc, "median_filter_k", sd.median_filter_k, "config.stress")
    if k % 2 == 0:
        raise SchemaError("config.stress.median_filter_k", "must be odd")
    stress = StressConfig(
        frame_ms=_pick_posint(s_doc, "frame_ms", sd.frame_ms, "config.stress"),
        hop_ms=_pick_posint(s_doc, "hop_ms", sd.hop_ms, "config.stress"),
        window_ms=_pick_posint(s_doc, "window_ms", sd.window_ms, "config.stress"),
        window_hop_ms=_pick_posint(s_doc, "window_hop_ms", sd.window_hop_ms, "config.stress"),
        baseline_ms=_pick_posint(s_doc, "baseline_ms", sd.baseline_ms, "config.stress"),
        median_filter_k=k,
        weights=(float(weights_raw[0]), float(weights_raw[1]), float(weights_raw[2])),
        slope=_pick_num(s_doc, "slope", sd.slope, "config.stress"),
        z0=_pick_num(s_doc, "z0", sd.z0, "config.stress"),
        voicing_peak=_pick_num(s_doc, "voicing_peak", sd.voicing_peak, "config.stress"),
        energy_floor=_pick_num(s_doc, "energy_floor", sd.energy_floor, "config.stress"),
        f0_min_hz=_pick_num(s_doc, "f0_min_hz", sd.f0_min_hz, "config.stress"),
        f0_max_hz=_pick_num(s_doc, "f0_max_hz", sd.f0_max_hz, "config.stress"),
        min_voicing=_pick_num(s_doc, "min_voicing", sd.min_voicing, "config.stress"),
    )

    return AnalysisConfig(
        w1=w1,
        w2=w2,
        af_window_n=af_window_n,
        af_stride=af_stride,
        gs_divisor=gs_divisor,
        pd_calibration=calibration,
        assign_dt_max_ms=_pick_posint(doc, "assign_dt_max_ms", defaults.assign_dt_max_ms),
        dwell_bin_ms=_pick_posint(doc, "dwell_bin_ms", defaults.dwell_bin_ms),
        checklist_horizon_ms=_pick_posint(doc, "checklist_horizon_ms", defaults.checklist_horizon_ms),
        event_pre_ms=_pick_posint(doc, "event_pre_ms", defaults.event_pre_ms),
        event_post_ms=_pick_posint(doc, "event_post_ms", defaults.event_post_ms),
        stress=stress,
    )


# -- session directory I/O ----------------------------------------------------

def _catalog_violations(session: Session, catalog: PanelCatalog) -> list[Violation]:
    """Panel/subpanel ids in the stream must exist in the catalog."""
    known = {p.panel_id: set(s.subpanel_id for s in p.subpanels) for p in catalog.panels}
    out = []
    for i, obs in enumerate(session.panels):
        if obs.panel_id not in known:
            out.append(Violation("panels", i, "panel_id in catalog"))
        elif obs.subpanel_id is not None and obs.subpanel_id not in known[obs.panel_id]:
            out.append(Violation("panels", i, "subpanel_id in catalog"))
    return out


def load_session(dir_path: str, config: AnalysisConfig | None = None, mode: str = "strict") -> Session:
    """Load and validate a session directory.

    Applies offsets.json before validation when present. In strict mode any
    parse error or validation violation raises; tolerant mode skips bad
    stream lines and returns the best-effort session. ``config`` is accepted
    for pipeline symmetry; parsing does not depend on it.
    """
    del config
    if not os.path.isdir(dir_path):
        raise MissingFile(dir_path)
    for name in REQUIRED_FILES:
        if not os.path.isfile(os.path.join(dir_path, name)):
            raise MissingFile(name)

    def read(name: str) -> bytes:
        with open(os.path.join(dir_path, name), "rb") as fh:
            return fh.read()

    catalog = parse_catalog_json(read("catalog.json"))
    gaze, _ = parse_gaze_jsonl(read("gaze.jsonl"), mode)
    panels, _ = parse_panels_jsonl(read("panels.jsonl"), mode)
    utterances, _ = parse_transcript_jsonl(read("transcript.jsonl"), mode)
    events = parse_events_json(read("events.json"))

    session_id = os.path.basename(os.path.normpath(dir_path)) or "session"
    exercise = ExerciseMeta()
    meta_path = os.path.join(dir_path, "meta.json")
    if os.path.isfile(meta_path):
        meta = _load_doc(read("meta.json"), "meta")
        if not isinstance(meta, dict):
            raise SchemaError("meta", "expected an object")
        session_id = meta.get("id", session_id) or session_id
        exercise = ExerciseMeta(
            visibility=str(meta.get("visibility", "")),
            scenario=str(meta.get("scenario", "")),
        )

    audio_path = os.path.join(dir_path, "audio.wav")
    audio_ref = audio_path if os.path.isfile(audio_path) else None

    session = Session(
        id=session_id,
        screen=catalog.screen,
        gaze=tuple(gaze),
        panels=tuple(panels),
        utterances=tuple(utterances),
        events=tuple(events),
        exercise=exercise,
        audio_ref=audio_ref,
    )

    offsets_path = os.path.join(dir_path, "offsets.json")
    if os.path.isfile(offsets_path):
        offsets = parse_offsets_json(read("offsets.json"))
        session, _ = apply_clock_offsets(session, offsets)

    violations = validate_session(session) + _catalog_violations(session, catalog)
    if violations and mode == "strict":
        raise InvalidSession(violations)
    return session


def _dump_jsonl(path: str, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def gaze_to_record(g: GazeSample) -> dict:
    return {
        "t_ms": g.t_ms,
        "gx": None if g.gaze_px is None else g.gaze_px[0],
        "gy": None if g.gaze_px is None else g.gaze_px[1],
        "depth_m": g.depth_m,
        "pd_left_mm": g.pd_left_mm,
        "pd_right_mm": g.pd_right_mm,
        "dir": None if g.direction is None else list(g.direction),
        "valid": g.valid,
    }


def panel_to_record(p: PanelObservation) -> dict:
    return {
        "t_ms": p.t_ms,
        "panel": p.panel_id,
        "subpanel": p.subpanel_id,
        "bbox": list(p.bbox),
        "conf": p.confidence,
    }


def catalog_to_doc(catalog: PanelCatalog) -> dict:
    return {
        "screen": {"w_px": catalog.screen.width_px, "h_px": catalog.screen.height_px},
        "panels": [
            {
                "id": p.panel_id,
                "name": p.display_name,
                "subpanels": [{"id": s.subpanel_id, "name": s.display_name} for s in p.subpanels],
            }
            for p in catalog.panels
        ],
    }


def write_session(session: Session, catalog: PanelCatalog, dir_path: str) -> None:
    """Write a session as a loadable directory (audio is not copied)."""
    os.makedirs(dir_path, exist_ok=True)

    _dump_jsonl(os.path.join(dir_path, "gaze.jsonl"), (gaze_to_record(g) for g in session.gaze))
    _dump_jsonl(os.path.join(dir_path, "panels.jsonl"), (panel_to_record(p) for p in session.panels))
    _dump_jsonl(
        os.path.join(dir_path, "transcript.jsonl"),
        (
            {"t0_ms": u.t0_ms, "t1_ms": u.t1_ms, "speaker": u.speaker, "text": u.text}
            for u in session.utterances
        ),
    )
    with open(os.path.join(dir_path, "events.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(
            [{"t_ms": e.t_ms, "kind": e.kind, "label": e.label} for e in session.events],
            fh,
            indent=2,
        )
        fh.write("\n")
    with open(os.path.join(dir_path, "catalog.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(catalog_to_doc(catalog), fh, indent=2)
        fh.write("\n")
    with open(os.path.join(dir_path, "meta.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(
            {
                "id": session.id,
                "visibility": session.exercise.visibility,
                "scenario": session.exercise.scenario,
            },
            fh,
            indent=2,
        )
        fh.write("\n")
