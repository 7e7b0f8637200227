"""Deterministic synthetic-session generator with a ground-truth sidecar.

A scenario scripts everything the analyses should later recover: which
panel the gaze tracks per phase, a pupil bump around the trigger event,
the utterance script, and an audio pitch shift. Randomness comes from a
documented 64-bit linear congruential generator (Knuth MMIX multiplier,
Box-Muller for normals), so a fixed seed reproduces identical file bytes.
Ground-truth assertions carry tolerances rather than exact sample values.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .comms import ChecklistDefinition, ChecklistItem, EntityEntry, EntityLexicon
from .errors import InvalidScenario, SchemaError, SchemaMismatch
from .ingest import PanelCatalog, CatalogPanel, CatalogSubpanel, write_session
from .model import (
    ExerciseMeta,
    GazeSample,
    PanelObservation,
    ScreenGeometry,
    Session,
    TriggerEvent,
    Utterance,
)
from .stress import AudioClip, write_wav

GAZE_RATE_HZ = 50
PANEL_RATE_HZ = 25


class Lcg:
    """64-bit linear congruential generator: x' = 6364136223846793005*x + 1442695040888963407 (mod 2^64)."""

    _MULT = 6364136223846793005
    _INC = 1442695040888963407
    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = (seed ^ 0x9E3779B97F4A7C15) & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state * self._MULT + self._INC) & self._MASK
        return self._state

    def uniform(self) -> float:
        """Uniform in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Box-Muller transform of two uniforms."""
        u1 = max(self.uniform(), 2.0**-53)
        u2 = self.uniform()
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@dataclass(frozen=True)
class SimPanel:
    panel_id: str
    display_name: str
    bbox: tuple[float, float, float, float]
    subpanels: tuple[tuple[str, str], ...] = ()  # (id, name)


@dataclass(frozen=True)
class GazePhase:
    t0_ms: int
    t1_ms: int
    target: Optional[str]  # panel id, or None for free scanning
    scatter_px: float = 25.0


@dataclass(frozen=True)
class PupilProfile:
    baseline_mm: float = 3.0
    bump_mm: float = 1.0
    bump_t0_ms: int = 0
    bump_t1_ms: int = 0
    noise_mm: float = 0.02


@dataclass(frozen=True)
class AudioProfile:
    sample_rate_hz: int = 8000
    pre_f0_hz: float = 200.0
    post_f0_hz: float = 300.0
    post_jitter_hz: float = 8.0
    transition_t_ms: int = 0
    amplitude: float = 0.5


@dataclass(frozen=True)
class ScriptedUtterance:
    t_ms: int
    speaker: str
    text: str


@dataclass(frozen=True)
class Scenario:
    id: str
    name: str
    visibility: str
    duration_ms: int
    seed: int
    screen: ScreenGeometry
    event: TriggerEvent
    panels: tuple[SimPanel, ...]
    gaze_phases: tuple[GazePhase, ...]
    pupil: PupilProfile
    audio: AudioProfile
    script: tuple[ScriptedUtterance, ...]
    lexicon: EntityLexicon
    checklist: ChecklistDefinition
    expected_checklist: dict[str, bool]
    expected_entities: dict[str, int]
    dwell_tolerance: float = 0.05


@dataclass(frozen=True)
class GroundTruthCheck:
    name: str
    passed: bool
    detail: str = ""


def validate_scenario(scenario: Scenario) -> None:
    if scenario.duration_ms <= 0:
        raise InvalidScenario("duration_ms must be positive")
    if not 0 <= scenario.event.t_ms < scenario.duration_ms:
        raise InvalidScenario("event must lie within the session duration")
    phases = scenario.gaze_phases
    if not phases:
        raise InvalidScenario("at least one gaze phase is required")
    if phases[0].t0_ms != 0:
        raise InvalidScenario("phases must start at t=0")
    for a, b in zip(phases, phases[1:]):
        if a.t1_ms != b.t0_ms:
            raise InvalidScenario("phases must be contiguous and non-overlapping")
    for p in phases:
        if p.t0_ms >= p.t1_ms:
            raise InvalidScenario("phase range must be non-empty")
    if phases[-1].t1_ms != scenario.duration_ms:
        raise InvalidScenario("phases must cover the full duration")
    panel_ids = {p.panel_id for p in scenario.panels}
    for p in phases:
        if p.target is not None and p.target not in panel_ids:
            raise InvalidScenario(f"phase targets unknown panel '{p.target}'")
    w, h = scenario.screen.width_px, scenario.screen.height_px
    for panel in scenario.panels:
        x0, y0, x1, y1 = panel.bbox
        if not (0 <= x0 < x1 <= w and 0 <= y0 < y1 <= h):
            raise InvalidScenario(f"panel '{panel.panel_id}' bbox outside screen")
    if not 0 <= scenario.audio.transition_t_ms < scenario.duration_ms:
        raise InvalidScenario("audio transition must lie within the session duration")


def _phase_at(phases: Sequence[GazePhase], t_ms: int) -> GazePhase:
    for p in phases:
        if p.t0_ms <= t_ms < p.t1_ms:
            return p
    return phases[-1]


def _synthesize_audio(profile: AudioProfile, duration_ms: int) -> AudioClip:
    rate = profile.sample_rate_hz
    n = int(duration_ms * rate / 1000)
    t = np.arange(n, dtype=np.float64) / rate
    freq = np.where(
        t * 1000.0 < profile.transition_t_ms,
        profile.pre_f0_hz,
        profile.post_f0_hz + profile.post_jitter_hz * np.sin(2.0 * np.pi * 1.3 * t),
    )
    phase = 2.0 * np.pi * np.cumsum(freq) / rate
    return AudioClip(sample_rate_hz=rate, samples=profile.amplitude * np.sin(phase))


def _build_ground_truth(scenario: Scenario) -> dict:
    dwell = [
        {
            "t0_ms": p.t0_ms,
            "t1_ms": p.t1_ms,
            "panel": p.target,
            "min_fraction": round(1.0 - scenario.dwell_tolerance, 6),
        }
        for p in scenario.gaze_phases
        if p.target is not None
    ]
    pupil = scenario.pupil
    # Conservative lower bound: the bump spans nearly the whole calibrated
    # range, shrunk by the widest plausible noise spread (12 sigma).
    pd_delta = pupil.bump_mm / (pupil.bump_mm + 12.0 * pupil.noise_mm)
    af_spike = {
        "pre_t0_ms": max(0, pupil.bump_t0_ms - 30000),
        "pre_t1_ms": pupil.bump_t0_ms,
        "post_t0_ms": pupil.bump_t0_ms,
        "post_t1_ms": pupil.bump_t1_ms,
        "min_delta": round(0.5 * pd_delta / 2.0, 6),
    }
    transition = scenario.audio.transition_t_ms
    stress_flip = {
        "calm_t0_ms": 0,
        "calm_t1_ms": max(0, transition - 6000),
        "stressed_t0_ms": transition + 6000,
        "stressed_t1_ms": min(scenario.duration_ms, transition + 40000),
    }
    by_category = {"external": 0, "internal": 0}
    for name, count in scenario.expected_entities.items():
        by_category[scenario.lexicon.category_of(name)] += count
    return {
        "dwell": dwell,
        "af_spike": af_spike,
        "checklist": dict(scenario.expected_checklist),
        "entities": {"by_entity": dict(scenario.expected_entities), "by_category": by_category},
        "stress_flip": stress_flip,
    }


def generate_session(scenario: Scenario, out_dir: str, seed: Optional[int] = None) -> dict:
    """Write a complete loadable session directory plus ground_truth.json.

    Returns the ground-truth document. Gaze runs at 50 Hz, detections at
    25 Hz; everything is reproducible from the scenario seed.
    """
    if seed is not None:
        scenario = replace(scenario, seed=seed)
    validate_scenario(scenario)
    rng = Lcg(scenario.seed)
    w, h = scenario.screen.width_px, scenario.screen.height_px
    panels_by_id = {p.panel_id: p for p in scenario.panels}

    gaze = []
    gaze_step = 1000 // GAZE_RATE_HZ
    for t in range(0, scenario.duration_ms, gaze_step):
        phase = _phase_at(scenario.gaze_phases, t)
        if phase.target is not None:
            x0, y0, x1, y1 = panels_by_id[phase.target].bbox
            gx = min(w - 1.0, max(0.0, rng.gauss((x0 + x1) / 2.0, phase.scatter_px)))
            gy = min(h - 1.0, max(0.0, rng.gauss((y0 + y1) / 2.0, phase.scatter_px)))
        else:
            gx = rng.uniform() * (w - 1.0)
            gy = rng.uniform() * (h - 1.0)
        pupil = scenario.pupil
        pd = pupil.baseline_mm + rng.gauss(0.0, pupil.noise_mm)
        if pupil.bump_t0_ms <= t < pupil.bump_t1_ms:
            pd += pupil.bump_mm
        pd = max(0.1, pd)
        gaze.append(
            GazeSample(
                t_ms=t,
                gaze_px=(round(gx, 3), round(gy, 3)),
                valid=True,
                depth_m=1.5,
                pd_left_mm=round(pd, 4),
                pd_right_mm=round(pd, 4),
            )
        )

    observations = []
    panel_step = 1000 // PANEL_RATE_HZ
    for t in range(0, scenario.duration_ms, panel_step):
        for panel in scenario.panels:
            observations.append(
                PanelObservation(
                    t_ms=t,
                    panel_id=panel.panel_id,
                    bbox=panel.bbox,
                    confidence=round(0.9 + 0.08 * rng.uniform(), 4),
                    subpanel_id=panel.subpanels[0][0] if panel.subpanels else None,
                )
            )

    utterances = tuple(
        Utterance(
            t0_ms=u.t_ms,
            t1_ms=u.t_ms + 800 + 200 * len(u.text.split()),
            speaker=u.speaker,
            text=u.text,
        )
        for u in scenario.script
    )

    session = Session(
        id=scenario.id,
        screen=scenario.screen,
        gaze=tuple(gaze),
        panels=tuple(observations),
        utterances=utterances,
        events=(scenario.event,),
        exercise=ExerciseMeta(visibility=scenario.visibility, scenario=scenario.name),
        audio_ref=os.path.join(out_dir, "audio.wav"),
    )

    catalog = PanelCatalog(
        screen=scenario.screen,
        panels=tuple(
            CatalogPanel(
                panel_id=p.panel_id,
                display_name=p.display_name,
                subpanels=tuple(CatalogSubpanel(sid, sname) for sid, sname in p.subpanels),
            )
            for p in scenario.panels
        ),
    )

    os.makedirs(out_dir, exist_ok=True)
    write_session(session, catalog, out_dir)
    write_wav(os.path.join(out_dir, "audio.wav"), _synthesize_audio(scenario.audio, scenario.duration_ms))

    def dump(name: str, doc) -> None:
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    dump(
        "entities.json",
        [
            {"name": e.name, "aliases": list(e.aliases), "category": e.category}
            for e in scenario.lexicon.entries
        ],
    )
    dump(
        "checklists.json",
        [
            {
                "event_kind": scenario.checklist.event_kind,
                "items": [
                    {
                        "id": item.item_id,
                        "description": item.description,
                        "match": {"all_of": [list(g) for g in item.all_of]},
                    }
                    for item in scenario.checklist.items
                ],
            }
        ],
    )
    ground_truth = _build_ground_truth(scenario)
    dump("ground_truth.json", ground_truth)
    return ground_truth


# -- ground-truth checking -------------------------------------------------------

def _require_section(report: dict, key: str):
    if key not in report or report[key] is None:
        raise SchemaMismatch(f"report is missing the '{key}' section required by ground truth")
    return report[key]


def check_against_ground_truth(report: dict, ground_truth: dict) -> list[GroundTruthCheck]:
    """Evaluate every ground-truth assertion against an analysis report."""
    checks: list[GroundTruthCheck] = []

    if "dwell" in ground_truth:
        focus = _require_section(report, "focus")
        bins = focus.get("bins")
        if bins is None:
            raise SchemaMismatch("focus section has no bins")
        for entry in ground_truth["dwell"]:
            selected = [b for b in bins if entry["t0_ms"] <= b["t0_ms"] < entry["t1_ms"]]
            total = sum(b["valid_samples"] for b in selected)
            on_panel = sum(
                b["fractions"].get(entry["panel"], 0.0) * b["valid_samples"] for b in selected
            )
            fraction = on_panel / total if total else 0.0
            checks.append(
                GroundTruthCheck(
                    name=f"dwell:{entry['panel']}@{entry['t0_ms']}",
                    passed=fraction >= entry["min_fraction"],
                    detail=f"fraction {fraction:.4f} vs min {entry['min_fraction']:.4f}",
                )
            )

    if "af_spike" in ground_truth:
        af = _require_section(report, "af")
        timeline = af.get("timeline")
        if timeline is None:
            raise SchemaMismatch("af section has no timeline")
        spike = ground_truth["af_spike"]

        def mid(s: dict) -> float:
            return (s["t0_ms"] + s["t1_ms"]) / 2.0

        pre = [s["af"] for s in timeline if spike["pre_t0_ms"] <= mid(s) < spike["pre_t1_ms"]]
        post = [s["af"] for s in timeline if spike["post_t0_ms"] <= mid(s) <= spike["post_t1_ms"]]
        if not pre or not post:
            checks.append(GroundTruthCheck("af_spike", False, "no AF samples in pre/post window"))
        else:
            pre_mean = sum(pre) / len(pre)
            delta = max(post) - pre_mean
            checks.append(
                GroundTruthCheck(
                    name="af_spike",
                    passed=delta >= spike["min_delta"],
                    detail=f"delta {delta:.4f} vs min {spike['min_delta']:.4f}",
                )
            )

    if "checklist" in ground_truth:
        blocks = _require_section(report, "checklists")
        if not blocks:
            raise SchemaMismatch("report has no checklist blocks")
        got = {item["item_id"]: item["completed"] for item in blocks[0]["items"]}
        for item_id, expected in ground_truth["checklist"].items():
            actual = got.get(item_id)
            checks.append(
                GroundTruthCheck(
                    name=f"checklist:{item_id}",
                    passed=actual == expected,
                    detail=f"expected {expected}, got {actual}",
                )
            )

    if "entities" in ground_truth:
        entities = _require_section(report, "entities")
        got_entities = {e["name"]: e["count"] for e in entities.get("by_entity", [])}
        expected_entities = ground_truth["entities"]["by_entity"]
        for name, expected in expected_entities.items():
            checks.append(
                GroundTruthCheck(
                    name=f"entity:{name}",
                    passed=got_entities.get(name, 0) == expected,
                    detail=f"expected {expected}, got {got_entities.get(name, 0)}",
                )
            )
        extras = sorted(set(got_entities) - set(expected_entities))
        checks.append(
            GroundTruthCheck(
                name="entity_names",
                passed=not extras,
                detail=f"unexpected entities: {extras}" if extras else "no unexpected entities",
            )
        )
        for cat, expected in ground_truth["entities"]["by_category"].items():
            actual = entities.get("by_category", {}).get(cat, 0)
            checks.append(
                GroundTruthCheck(
                    name=f"category:{cat}",
                    passed=actual == expected,
                    detail=f"expected {expected}, got {actual}",
                )
            )

    if "stress_flip" in ground_truth:
        stress = _require_section(report, "stress")
        samples = stress.get("samples")
        if samples is None:
            raise SchemaMismatch("stress section has no samples")
        flip = ground_truth["stress_flip"]
        calm = [s["binary"] for s in samples if flip["calm_t0_ms"] <= s["t_ms"] < flip["calm_t1_ms"]]
        stressed = [
            s["binary"]
            for s in samples
            if flip["stressed_t0_ms"] <= s["t_ms"] <= flip["stressed_t1_ms"]
        ]
        checks.append(
            GroundTruthCheck(
                name="stress:calm",
                passed=bool(calm) and max(calm) == 0,
                detail=f"{sum(calm)} stressed of {len(calm)} calm-window samples",
            )
        )
        checks.append(
            GroundTruthCheck(
                name="stress:flip",
                passed=bool(stressed) and max(stressed) == 1,
                detail=f"{sum(stressed)} stressed of {len(stressed)} transition-window samples",
            )
        )

    return checks


# -- scenario files ---------------------------------------------------------------

def parse_scenario(source) -> Scenario:
    """Parse a scenario.json document into a validated Scenario."""
    from .comms import load_checklists, load_lexicon

    doc = json.loads(source.decode("utf-8") if isinstance(source, bytes) else source)
    if not isinstance(doc, dict):
        raise SchemaError("scenario", "expected an object")

    def need(key: str):
        if key not in doc:
            raise SchemaError(f"scenario.{key}", "missing")
        return doc[key]

    screen_doc = need("screen")
    screen = ScreenGeometry(width_px=screen_doc["w_px"], height_px=screen_doc["h_px"])
    event_doc = need("event")
    event = TriggerEvent(
        t_ms=event_doc["t_ms"], kind=event_doc["kind"], label=event_doc.get("label", "")
    )
    panels = tuple(
        SimPanel(
            panel_id=p["id"],
            display_name=p.get("name", p["id"]),
            bbox=tuple(float(c) for c in p["bbox"]),
            subpanels=tuple((s["id"], s.get("name", s["id"])) for s in p.get("subpanels", [])),
        )
        for p in need("panels")
    )
    phases = tuple(
        GazePhase(
            t0_ms=p["t0_ms"],
            t1_ms=p["t1_ms"],
            target=p.get("target"),
            scatter_px=float(p.get("scatter_px", 25.0)),
        )
        for p in need("gaze_phases")
    )
    pupil_doc = doc.get("pupil_profile", {})
    pupil = PupilProfile(
        baseline_mm=float(pupil_doc.get("baseline_mm", 3.0)),
        bump_mm=float(pupil_doc.get("bump_mm", 1.0)),
        bump_t0_ms=int(pupil_doc.get("bump_t0_ms", 0)),
        bump_t1_ms=int(pupil_doc.get("bump_t1_ms", 0)),
        noise_mm=float(pupil_doc.get("noise_mm", 0.02)),
    )
    audio_doc = doc.get("audio_profile", {})
    audio = AudioProfile(
        sample_rate_hz=int(audio_doc.get("sample_rate_hz", 8000)),
        pre_f0_hz=float(audio_doc.get("pre_f0_hz", 200.0)),
        post_f0_hz=float(audio_doc.get("post_f0_hz", 300.0)),
        post_jitter_hz=float(audio_doc.get("post_jitter_hz", 8.0)),
        transition_t_ms=int(audio_doc.get("transition_t_ms", 0)),
        amplitude=float(audio_doc.get("amplitude", 0.5)),
    )
    script = tuple(
        ScriptedUtterance(t_ms=u["t_ms"], speaker=u.get("speaker", "trainee"), text=u["text"])
        for u in doc.get("utterance_script", [])
    )
    lexicon = load_lexicon(json.dumps(need("lexicon")))
    checklist = load_checklists(json.dumps(need("checklist")))[0]
    expected = doc.get("expected", {})

    scenario = Scenario(
        id=str(doc.get("id", "sim-session")),
        name=str(doc.get("name", "")),
        visibility=str(doc.get("visibility", "")),
        duration_ms=int(need("duration_ms")),
        seed=int(doc.get("seed", 1)),
        screen=screen,
        event=event,
        panels=panels,
        gaze_phases=phases,
        pupil=pupil,
        audio=audio,
        script=script,
        lexicon=lexicon,
        checklist=checklist,
        expected_checklist=dict(expected.get("checklist", {})),
        expected_entities=dict(expected.get("entities", {})),
        dwell_tolerance=float(expected.get("dwell_tolerance", 0.05)),
    )
    validate_scenario(scenario)
    return scenario


def default_lexicon() -> EntityLexicon:
    return EntityLexicon(
        entries=(
            EntityEntry(name="Engine Room", category="internal"),
            EntityEntry(name="Engineer", category="internal"),
            EntityEntry(name="Port Control", category="external"),
            EntityEntry(name="Keppel Control", category="external"),
            EntityEntry(name="SMA Voyager", category="external"),
            EntityEntry(name="MV Aurora", category="external"),
        )
    )


def default_checklist() -> ChecklistDefinition:
    return ChecklistDefinition(
        event_kind="main_engine_failure",
        items=(
            ChecklistItem(
                item_id="contacted_engine_room",
                description="Contacted engine room to know status",
                all_of=(("engine room",), ("status", "condition")),
            ),
            ChecklistItem(
                item_id="updated_nearby_vessels",
                description="Updated nearby vessels",
                all_of=(
                    ("all ships", "nearby vessels", "vessels in the vicinity"),
                    ("engine failure", "not under command"),
                ),
            ),
            ChecklistItem(
                item_id="anchoring_standby",
                description="Kept anchoring stations on stand by",
                all_of=(("anchoring stations", "anchor party"), ("stand by", "standby")),
            ),
            ChecklistItem(
                item_id="updated_port_control",
                description="Updated port control",
                all_of=(
                    ("port control", "keppel control"),
                    ("engine failure", "engine problem", "not under command"),
                ),
            ),
            ChecklistItem(
                item_id="contacted_tug_assistance",
                description="Contacted tug assistance",
                all_of=(("tug",), ("assistance", "assist", "stand by", "standby")),
            ),
            ChecklistItem(
                item_id="contacted_port_marine_safety",
                description="Contacted port marine safety",
                all_of=(("marine safety", "port marine safety"),),
            ),
        ),
    )


def default_scenario(seed: int = 7) -> Scenario:
    """Engine-failure drill: gaze shifts to the main engine panel, the pupil
    widens with the alarm, the voice pitch jumps, and the radio traffic turns
    to the engine room and port control."""
    screen = ScreenGeometry(width_px=1920, height_px=1080)
    panels = (
        SimPanel("ecdis", "ECDIS", (80.0, 80.0, 920.0, 500.0)),
        SimPanel("radar", "Radar", (1000.0, 80.0, 1840.0, 500.0)),
        SimPanel("main_engine", "Main Engine", (80.0, 580.0, 920.0, 1000.0)),
        SimPanel(
            "sms",
            "Ship Management System",
            (1000.0, 580.0, 1840.0, 1000.0),
            subpanels=(("lateral_speed", "Lateral Speed"),),
        ),
    )
    script = (
        ScriptedUtterance(5000, "trainee", "Keppel Control, Keppel Control, this is SMA Voyager, we are headed for Brani 7, over."),
        ScriptedUtterance(20000, "trainee", "Engine Room, bridge, routine check, all systems normal?"),
        ScriptedUtterance(40000, "mv_aurora", "SMA Voyager, this is MV Aurora, passing on your port side, over."),
        ScriptedUtterance(65000, "trainee", "Engine Room, bridge, we have lost propulsion, what is the status of the main engine?"),
        ScriptedUtterance(75000, "trainee", "Engineer, report to the bridge immediately."),
        ScriptedUtterance(85000, "trainee", "Keppel Control, Keppel Control, this is SMA Voyager, we have an engine failure, request traffic clearance, over."),
        ScriptedUtterance(100000, "trainee", "Engine Room, bridge, any update? How long until we can restore power?"),
        ScriptedUtterance(115000, "keppel", "SMA Voyager, Keppel Control, understood, keep us informed, over."),
        ScriptedUtterance(130000, "trainee", "Engineer, give me a full report when the engine is back online."),
    )
    return Scenario(
        id="sim-engine-failure",
        name="main engine failure drill",
        visibility="good",
        duration_ms=150000,
        seed=seed,
        screen=screen,
        event=TriggerEvent(t_ms=60000, kind="main_engine_failure", label="ME failure"),
        panels=panels,
        gaze_phases=(
            GazePhase(0, 60000, "ecdis"),
            GazePhase(60000, 120000, "main_engine"),
            GazePhase(120000, 150000, "radar"),
        ),
        pupil=PupilProfile(baseline_mm=3.0, bump_mm=1.0, bump_t0_ms=60000, bump_t1_ms=90000, noise_mm=0.02),
        audio=AudioProfile(
            sample_rate_hz=8000,
            pre_f0_hz=200.0,
            post_f0_hz=300.0,
            post_jitter_hz=8.0,
            transition_t_ms=60000,
            amplitude=0.5,
        ),
        script=script,
        lexicon=default_lexicon(),
        checklist=default_checklist(),
        expected_checklist={
            "contacted_engine_room": True,
            "updated_nearby_vessels": False,
            "anchoring_standby": False,
            "updated_port_control": True,
            "contacted_tug_assistance": False,
            "contacted_port_marine_safety": False,
        },
        expected_entities={
            "Keppel Control": 5,
            "SMA Voyager": 4,
            "Engine Room": 3,
            "Engineer": 2,
            "MV Aurora": 1,
        },
    )
