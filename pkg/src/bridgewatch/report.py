"""Consolidated session report: build, render (JSON/CSV/SVG) and compare.

The report mirrors the trainer dashboard as static files: dwell
distribution, attentional-focus timeline with event slices, communication
entity counts, checklist adherence and the stress timeline. JSON output is
canonical (sorted keys, floats fixed to 6 decimals) and SVG output is
fully deterministic, so repeated runs are byte-identical.
"""
from __future__ import annotations

import csv
import html
import io
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import attention, comms, focus, stress
from .errors import (
    BridgewatchError,
    CatalogMismatch,
    EventOutsideSession,
    UnknownChart,
    UnknownSection,
)
from .ingest import AnalysisConfig, PanelCatalog
from .model import Session

SVG_WIDTH = 960
SVG_HEIGHT = 540

CSV_SECTIONS = ("focus", "focus_totals", "af", "entities", "checklist", "stress", "events")
SVG_CHARTS = ("focus_bars", "af_line", "entity_bars", "checklist_table", "stress_line")


@dataclass(frozen=True)
class Adapters:
    """Optional external backends; the engine works fully without them."""

    judge: Optional[comms.JudgeAdapter] = None
    stress_model: Optional[stress.StressModelAdapter] = None
    detector: Optional[focus.DetectorAdapter] = None


@dataclass(frozen=True)
class SessionReport:
    meta: dict
    events: list
    focus: Optional[dict]
    af: Optional[dict]
    entities: Optional[dict]
    checklists: list
    stress: Optional[dict]
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "events": self.events,
            "focus": self.focus,
            "af": self.af,
            "entities": self.entities,
            "checklists": self.checklists,
            "stress": self.stress,
            "flags": self.flags,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SessionReport":
        return cls(
            meta=doc.get("meta", {}),
            events=doc.get("events", []),
            focus=doc.get("focus"),
            af=doc.get("af"),
            entities=doc.get("entities"),
            checklists=doc.get("checklists", []),
            stress=doc.get("stress"),
            flags=doc.get("flags", []),
        )


# -- section builders --------------------------------------------------------------

def _focus_section(session: Session, config: AnalysisConfig) -> dict:
    assignments = focus.assign_session(session.gaze, session.panels, config.assign_dt_max_ms)
    summary = focus.dwell_distribution(assignments, config.dwell_bin_ms)
    return {
        "bin_ms": config.dwell_bin_ms,
        "bins": [
            {"t0_ms": b.bin_start_ms, "valid_samples": b.valid_samples, "fractions": b.fractions}
            for b in summary.bins
        ],
        "totals": {
            "valid_samples": summary.total_valid_samples,
            "fractions": summary.total_fractions,
        },
    }


def _af_sample_doc(s: attention.AFSample) -> dict:
    return {
        "t0_ms": s.window_start_ms,
        "t1_ms": s.window_end_ms,
        "pd_norm": s.pd_norm,
        "gs": s.gs,
        "af": s.af,
    }


def _af_section(session: Session, config: AnalysisConfig, flags: list[str]) -> Optional[dict]:
    try:
        calibration = attention.calibrate_pupil(session.gaze, config.pd_calibration)
    except BridgewatchError as exc:
        flags.append(f"af_missing: {exc}")
        return None
    timeline = attention.af_timeline(session, config, calibration)
    event_docs = []
    for i, event in enumerate(session.events):
        try:
            (slice_,) = attention.event_locked_af(timeline, [event], config.event_pre_ms, config.event_post_ms)
        except EventOutsideSession:
            flags.append(f"af_event_outside_timeline: {event.kind}@{event.t_ms}")
            continue
        event_docs.append(
            {
                "event_index": i,
                "kind": event.kind,
                "t_ms": event.t_ms,
                "pre_start_ms": slice_.pre_start_ms,
                "post_end_ms": slice_.post_end_ms,
                "baseline_mean_af": slice_.baseline_mean_af,
                "samples": [_af_sample_doc(s) for s in slice_.samples],
            }
        )
    return {
        "calibration": {
            "pd_min_mm": calibration.pd_min_mm,
            "pd_max_mm": calibration.pd_max_mm,
            "method": calibration.method,
        },
        "timeline": [_af_sample_doc(s) for s in timeline.samples],
        "gaps": [[a, b] for a, b in timeline.gaps],
        "events": event_docs,
    }


def _entities_section(session: Session, lexicon: Optional[comms.EntityLexicon], flags: list[str]) -> dict:
    if lexicon is None:
        flags.append("lexicon_missing")
        lexicon = comms.EntityLexicon(entries=())
    summary = comms.entity_summary(session, lexicon)
    return {
        "by_entity": [
            {"name": c.name, "category": c.category, "count": c.count} for c in summary.per_entity
        ],
        "by_category": summary.per_category,
        "total_mentions": summary.total_mentions,
    }


def _checklists_section(
    session: Session,
    config: AnalysisConfig,
    checklists: Sequence[comms.ChecklistDefinition],
    adapters: Adapters,
) -> list:
    by_kind: dict[str, comms.ChecklistDefinition] = {}
    for definition in checklists:
        by_kind.setdefault(definition.event_kind, definition)
    blocks = []
    for i, event in enumerate(session.events):
        definition = by_kind.get(event.kind)
        if definition is None:
            continue
        results = comms.judge_with_fallback(
            adapters.judge, definition, session.utterances, event, config.checklist_horizon_ms
        )
        descriptions = {item.item_id: item.description for item in definition.items}
        blocks.append(
            {
                "event_index": i,
                "event_kind": event.kind,
                "event_t_ms": event.t_ms,
                "items": [
                    {
                        "item_id": r.item_id,
                        "description": descriptions.get(r.item_id, ""),
                        "completed": r.completed,
                        "uncertain": r.uncertain,
                        "evidence": None
                        if r.evidence is None
                        else {
                            "utterance_index": r.evidence.utterance_index,
                            "matched_terms": list(r.evidence.matched_terms),
                            "note": r.evidence.note,
                        },
                    }
                    for r in results
                ],
            }
        )
    return blocks


def _stress_section(session: Session, config: AnalysisConfig, adapters: Adapters, flags: list[str]) -> Optional[dict]:
    if session.audio_ref is None or not os.path.isfile(session.audio_ref):
        flags.append("stress_missing: no audio")
        return None
    try:
        clip = stress.read_wav(session.audio_ref)
        samples = stress.stress_timeline(clip, config.stress, adapter=adapters.stress_model)
    except BridgewatchError as exc:
        flags.append(f"stress_failed: {exc}")
        return None
    return {
        "baseline_ms": config.stress.baseline_ms,
        "samples": [
            {"t_ms": s.t_ms, "score": s.score, "binary": s.binary, "gap": s.gap} for s in samples
        ],
    }


def build_report(
    session: Session,
    config: AnalysisConfig,
    lexicon: Optional[comms.EntityLexicon] = None,
    checklists: Sequence[comms.ChecklistDefinition] = (),
    adapters: Optional[Adapters] = None,
    catalog: Optional[PanelCatalog] = None,
) -> SessionReport:
    """Run every analysis over the session; optional stages degrade to flags."""
    adapters = adapters or Adapters()
    flags: list[str] = []

    if catalog is not None:
        panel_ids = sorted(catalog.panel_ids())
    else:
        panel_ids = sorted({p.panel_id for p in session.panels})

    focus_doc = _focus_section(session, config)
    af_doc = _af_section(session, config, flags)
    entities_doc = _entities_section(session, lexicon, flags)
    checklists_doc = _checklists_section(session, config, checklists, adapters)
    stress_doc = _stress_section(session, config, adapters, flags)

    meta = {
        "session_id": session.id,
        "exercise": {"visibility": session.exercise.visibility, "scenario": session.exercise.scenario},
        "panel_ids": panel_ids,
        "config": config.to_dict(),
    }
    events_doc = [{"t_ms": e.t_ms, "kind": e.kind, "label": e.label} for e in session.events]
    return SessionReport(
        meta=meta,
        events=events_doc,
        focus=focus_doc,
        af=af_doc,
        entities=entities_doc,
        checklists=checklists_doc,
        stress=stress_doc,
        flags=sorted(flags),
    )


# -- canonical JSON -----------------------------------------------------------------

def _canon_value(value, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            raise ValueError("non-finite float in report")
        out.append(f"{value + 0.0:.6f}" if value != 0 else "0.000000")
    elif isinstance(value, str):
        out.append(_json_escape(value))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _canon_value(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            out.append(_json_escape(str(key)))
            out.append(":")
            _canon_value(value[key], out)
        out.append("}")
    else:
        raise TypeError(f"unsupported type in report: {type(value)!r}")


def _json_escape(s: str) -> str:
    import json

    return json.dumps(s, ensure_ascii=True)


def render_json(report: SessionReport) -> bytes:
    """Canonical JSON: sorted keys, floats fixed to 6 decimal places."""
    out: list[str] = []
    _canon_value(report.to_dict(), out)
    return ("".join(out) + "\n").encode("utf-8")


# -- CSV -----------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    if value is None:
        return ""
    return str(value)


def render_csv(report: SessionReport, section: str) -> bytes:
    """One documented CSV table per report section."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")

    if section == "focus":
        if report.focus is None:
            raise UnknownSection("focus section absent from report")
        writer.writerow(["bin_start_ms", "bin_ms", "valid_samples", "panel", "fraction"])
        for b in report.focus["bins"]:
            for panel in sorted(b["fractions"]):
                writer.writerow(
                    [b["t0_ms"], report.focus["bin_ms"], b["valid_samples"], panel, _fmt(b["fractions"][panel])]
                )
    elif section == "focus_totals":
        if report.focus is None:
            raise UnknownSection("focus section absent from report")
        writer.writerow(["panel", "fraction"])
        totals = report.focus["totals"]["fractions"]
        for panel in sorted(totals):
            writer.writerow([panel, _fmt(totals[panel])])
    elif section == "af":
        if report.af is None:
            raise UnknownSection("af section absent from report")
        writer.writerow(["window_start_ms", "window_end_ms", "pd_norm", "gs", "af"])
        for s in report.af["timeline"]:
            writer.writerow([s["t0_ms"], s["t1_ms"], _fmt(s["pd_norm"]), _fmt(s["gs"]), _fmt(s["af"])])
    elif section == "entities":
        if report.entities is None:
            raise UnknownSection("entities section absent from report")
        writer.writerow(["name", "category", "count"])
        for e in report.entities["by_entity"]:
            writer.writerow([e["name"], e["category"], e["count"]])
    elif section == "checklist":
        writer.writerow(["event_index", "event_kind", "event_t_ms", "item_id", "completed", "evidence_utterance_index"])
        for block in report.checklists:
            for item in block["items"]:
                evidence = item.get("evidence") or {}
                writer.writerow(
                    [
                        block["event_index"],
                        block["event_kind"],
                        block["event_t_ms"],
                        item["item_id"],
                        _fmt(item["completed"]),
                        _fmt(evidence.get("utterance_index")),
                    ]
                )
    elif section == "stress":
        if report.stress is None:
            raise UnknownSection("stress section absent from report")
        writer.writerow(["t_ms", "score", "binary", "gap"])
        for s in report.stress["samples"]:
            writer.writerow([s["t_ms"], _fmt(s["score"]), s["binary"], _fmt(s["gap"])])
    elif section == "events":
        writer.writerow(["t_ms", "kind", "label"])
        for e in report.events:
            writer.writerow([e["t_ms"], e["kind"], e["label"]])
    else:
        raise UnknownSection(f"unknown CSV section '{section}'")

    return buf.getvalue().encode("utf-8")


# -- SVG -----------------------------------------------------------------------------

_PALETTE = ("#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2", "#9d755d")


def _svg_open(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="#ffffff"/>',
        f'<text x="{SVG_WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="18" fill="#222222">'
        f"{html.escape(title)}</text>",
    ]


def _svg_no_data(title: str) -> bytes:
    parts = _svg_open(title)
    parts.append(
        f'<text x="{SVG_WIDTH / 2:.1f}" y="{SVG_HEIGHT / 2:.1f}" text-anchor="middle" '
        f'font-size="14" fill="#888888">no data</text>'
    )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def _bar_chart(title: str, labels: list[str], values: list[float], value_fmt: str, colors: list[str]) -> bytes:
    if not values:
        return _svg_no_data(title)
    parts = _svg_open(title)
    margin_l, margin_r, margin_t, margin_b = 70, 30, 60, 90
    plot_w = SVG_WIDTH - margin_l - margin_r
    plot_h = SVG_HEIGHT - margin_t - margin_b
    vmax = max(max(values), 1e-9)
    slot = plot_w / len(values)
    bar_w = slot * 0.7
    baseline = SVG_HEIGHT - margin_b
    parts.append(
        f'<line x1="{margin_l}" y1="{baseline}" x2="{SVG_WIDTH - margin_r}" y2="{baseline}" stroke="#999999"/>'
    )
    for i, (label, value) in enumerate(zip(labels, values)):
        x = margin_l + i * slot + (slot - bar_w) / 2
        bar_h = plot_h * (value / vmax)
        y = baseline - bar_h
        color = colors[i % len(colors)]
        parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" height="{bar_h:.2f}" fill="{color}"/>')
        parts.append(
            f'<text x="{x + bar_w / 2:.2f}" y="{y - 6:.2f}" text-anchor="middle" font-size="12" '
            f'fill="#333333">{value_fmt % value}</text>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2:.2f}" y="{baseline + 16:.2f}" text-anchor="end" font-size="11" '
            f'fill="#555555" transform="rotate(-35 {x + bar_w / 2:.2f} {baseline + 16:.2f})">'
            f"{html.escape(label)}</text>"
        )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def _line_chart(title: str, points: list[tuple[float, float]], y_min: float, y_max: float, markers: list[float] = ()) -> bytes:
    if not points:
        return _svg_no_data(title)
    parts = _svg_open(title)
    margin_l, margin_r, margin_t, margin_b = 70, 30, 60, 50
    plot_w = SVG_WIDTH - margin_l - margin_r
    plot_h = SVG_HEIGHT - margin_t - margin_b
    t0 = points[0][0]
    t1 = max(points[-1][0], t0 + 1.0)

    def sx(t: float) -> float:
        return margin_l + plot_w * (t - t0) / (t1 - t0)

    def sy(v: float) -> float:
        return margin_t + plot_h * (1.0 - (v - y_min) / (y_max - y_min))

    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(y_min + frac * (y_max - y_min))
        parts.append(
            f'<line x1="{margin_l}" y1="{y:.2f}" x2="{SVG_WIDTH - margin_r}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{margin_l - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11" '
            f'fill="#555555">{y_min + frac * (y_max - y_min):.2f}</text>'
        )
    for marker in markers:
        x = sx(marker)
        parts.append(
            f'<line x1="{x:.2f}" y1="{margin_t}" x2="{x:.2f}" y2="{SVG_HEIGHT - margin_b}" '
            f'stroke="#e45756" stroke-width="1.5" stroke-dasharray="6 3"/>'
        )
    path = " ".join(f"{sx(t):.2f},{sy(v):.2f}" for t, v in points)
    parts.append(f'<polyline points="{path}" fill="none" stroke="#4c78a8" stroke-width="2"/>')
    parts.append(
        f'<text x="{SVG_WIDTH / 2:.1f}" y="{SVG_HEIGHT - 14}" text-anchor="middle" font-size="12" '
        f'fill="#555555">time (ms)</text>'
    )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def render_svg(report: SessionReport, chart: str) -> bytes:
    """Deterministic 960x540 SVG for one dashboard chart."""
    if chart == "focus_bars":
        if report.focus is None:
            return _svg_no_data("Visual focus")
        totals = report.focus["totals"]["fractions"]
        labels = sorted(totals)
        return _bar_chart(
            "Visual focus by panel (session fraction)",
            labels,
            [totals[k] for k in labels],
            "%.2f",
            list(_PALETTE),
        )
    if chart == "af_line":
        if report.af is None or not report.af["timeline"]:
            return _svg_no_data("Attentional focus")
        points = [((s["t0_ms"] + s["t1_ms"]) / 2.0, s["af"]) for s in report.af["timeline"]]
        markers = [float(e["t_ms"]) for e in report.events]
        return _line_chart("Attentional focus", points, 0.0, 1.0, markers)
    if chart == "entity_bars":
        if report.entities is None or not report.entities["by_entity"]:
            return _svg_no_data("Communication entities")
        entries = report.entities["by_entity"]
        labels = [f"{e['name']} ({e['category']})" for e in entries]
        colors = ["#4c78a8" if e["category"] == "internal" else "#f58518" for e in entries]
        return _bar_chart(
            "Communication entities (mentions)",
            labels,
            [float(e["count"]) for e in entries],
            "%.0f",
            colors,
        )
    if chart == "checklist_table":
        if not report.checklists:
            return _svg_no_data("Checklist adherence")
        block = report.checklists[0]
        parts = _svg_open(f"Checklist adherence: {block['event_kind']}")
        y = 80
        parts.append('<text x="80" y="60" font-size="13" fill="#555555">checklist</text>')
        parts.append('<text x="760" y="60" font-size="13" fill="#555555">is_completed</text>')
        for item in block["items"]:
            label = item["description"] or item["item_id"]
            verdict = "yes" if item["completed"] else "no"
            color = "#54a24b" if item["completed"] else "#e45756"
            parts.append(f'<line x1="70" y1="{y - 16}" x2="890" y2="{y - 16}" stroke="#eeeeee"/>')
            parts.append(f'<text x="80" y="{y}" font-size="14" fill="#222222">{html.escape(label)}</text>')
            parts.append(f'<text x="760" y="{y}" font-size="14" fill="{color}">{verdict}</text>')
            y += 40
        parts.append("</svg>")
        return ("\n".join(parts) + "\n").encode("utf-8")
    if chart == "stress_line":
        if report.stress is None or not report.stress["samples"]:
            return _svg_no_data("Stress")
        points = [(float(s["t_ms"]), float(s["binary"])) for s in report.stress["samples"]]
        markers = [float(e["t_ms"]) for e in report.events]
        return _line_chart("Stress (binary)", points, 0.0, 1.0, markers)
    raise UnknownChart(f"unknown chart '{chart}'")


# -- comparison -----------------------------------------------------------------------

def compare_reports(a: SessionReport, b: SessionReport) -> dict:
    """Key-aligned deltas (b minus a) between two sessions' reports."""
    if a.meta.get("panel_ids") != b.meta.get("panel_ids"):
        raise CatalogMismatch(
            f"panel catalogs differ: {a.meta.get('panel_ids')} vs {b.meta.get('panel_ids')}"
        )

    def aligned(map_a: dict, map_b: dict) -> dict:
        out = {}
        for key in sorted(set(map_a) | set(map_b)):
            va = map_a.get(key, 0)
            vb = map_b.get(key, 0)
            out[key] = {"a": va, "b": vb, "delta": vb - va}
        return out

    focus_a = a.focus["totals"]["fractions"] if a.focus else {}
    focus_b = b.focus["totals"]["fractions"] if b.focus else {}

    ent_a = {e["name"]: e["count"] for e in a.entities["by_entity"]} if a.entities else {}
    ent_b = {e["name"]: e["count"] for e in b.entities["by_entity"]} if b.entities else {}
    cat_a = a.entities["by_category"] if a.entities else {}
    cat_b = b.entities["by_category"] if b.entities else {}

    def mean_af(r: SessionReport) -> Optional[float]:
        if r.af is None or not r.af["timeline"]:
            return None
        values = [s["af"] for s in r.af["timeline"]]
        return sum(values) / len(values)

    def stressed_fraction(r: SessionReport) -> Optional[float]:
        if r.stress is None or not r.stress["samples"]:
            return None
        values = [s["binary"] for s in r.stress["samples"]]
        return sum(values) / len(values)

    def scalar(va: Optional[float], vb: Optional[float]) -> dict:
        return {
            "a": va,
            "b": vb,
            "delta": None if va is None or vb is None else vb - va,
        }

    return {
        "sessions": {"a": a.meta.get("session_id", ""), "b": b.meta.get("session_id", "")},
        "focus_totals": aligned(focus_a, focus_b),
        "entities": aligned(ent_a, ent_b),
        "categories": aligned(cat_a, cat_b),
        "af_mean": scalar(mean_af(a), mean_af(b)),
        "stress_fraction": scalar(stressed_fraction(a), stressed_fraction(b)),
    }


def render_comparison_json(comparison: dict) -> bytes:
    out: list[str] = []
    _canon_value(comparison, out)
    return ("".join(out) + "\n").encode("utf-8")
