"""Objective analytics for simulator-based maritime training sessions."""

from .ingest import AnalysisConfig, PanelCatalog, load_session, write_session
from .model import (
    GazeSample,
    PanelObservation,
    ScreenGeometry,
    Session,
    TriggerEvent,
    Utterance,
    apply_clock_offsets,
    validate_session,
)
from .report import Adapters, SessionReport, build_report, compare_reports, render_csv, render_json, render_svg

__version__ = "0.1.0"

__all__ = [
    "Adapters",
    "AnalysisConfig",
    "GazeSample",
    "PanelCatalog",
    "PanelObservation",
    "ScreenGeometry",
    "Session",
    "SessionReport",
    "TriggerEvent",
    "Utterance",
    "apply_clock_offsets",
    "build_report",
    "compare_reports",
    "load_session",
    "render_csv",
    "render_json",
    "render_svg",
    "validate_session",
    "write_session",
    "__version__",
]
