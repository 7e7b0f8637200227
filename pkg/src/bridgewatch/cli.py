"""Command-line interface.

Subcommands: analyze, compare, simulate, wer, validate. Diagnostics go to
stderr; machine-readable output goes to files or stdout. Exit codes:
0 success, 1 usage error, 2 input/validation error, 3 internal error.
Set BRIDGEWATCH_LOG=debug|info|warning for stderr verbosity.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional, Sequence

from . import comms, report, simulate
from .errors import BridgewatchError, InvalidSession, MissingFile
from .ingest import AnalysisConfig, load_session, parse_catalog_json, parse_config
from .model import validate_session

log = logging.getLogger("bridgewatch")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we map usage errors to 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="bridgewatch", description="Maritime training session analytics")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_analyze = sub.add_parser("analyze", help="analyze a session directory into report files")
    p_analyze.add_argument("--session", required=True, help="session directory")
    p_analyze.add_argument("--config", help="analysis config JSON (defaults applied if omitted)")
    p_analyze.add_argument("--out", required=True, help="output directory")
    p_analyze.add_argument("--format", default="json", help="comma-separated: json,csv,svg")
    p_analyze.add_argument("--lexicon", help="entities.json (defaults to session dir copy)")
    p_analyze.add_argument("--checklists", help="checklists.json (defaults to session dir copy)")

    p_compare = sub.add_parser("compare", help="compare two analyzed report directories")
    p_compare.add_argument("--a", required=True, dest="dir_a")
    p_compare.add_argument("--b", required=True, dest="dir_b")
    p_compare.add_argument("--out", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic session with ground truth")
    p_sim.add_argument("--scenario", help="scenario JSON (built-in engine-failure drill if omitted)")
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--seed", type=int, help="override the scenario seed")

    p_wer = sub.add_parser("wer", help="word error rate between two text files")
    p_wer.add_argument("--ref", required=True)
    p_wer.add_argument("--hyp", required=True)

    p_validate = sub.add_parser("validate", help="validate a session directory")
    p_validate.add_argument("--session", required=True)

    return parser


def _read_bytes(path: str) -> bytes:
    if not os.path.isfile(path):
        raise MissingFile(os.path.basename(path) or path)
    with open(path, "rb") as fh:
        return fh.read()


def _load_aux(session_dir: str, override: Optional[str], default_name: str) -> Optional[bytes]:
    if override:
        return _read_bytes(override)
    candidate = os.path.join(session_dir, default_name)
    if os.path.isfile(candidate):
        return _read_bytes(candidate)
    return None


def _cmd_analyze(args) -> int:
    formats = {f.strip() for f in args.format.split(",") if f.strip()}
    unknown = formats - {"json", "csv", "svg"}
    if unknown:
        raise _UsageError(f"unknown format(s): {sorted(unknown)}")

    config = parse_config(_read_bytes(args.config)) if args.config else AnalysisConfig()
    session = load_session(args.session, config, mode="strict")
    catalog = parse_catalog_json(_read_bytes(os.path.join(args.session, "catalog.json")))

    lexicon_bytes = _load_aux(args.session, args.lexicon, "entities.json")
    lexicon = comms.load_lexicon(lexicon_bytes) if lexicon_bytes else None
    checklist_bytes = _load_aux(args.session, args.checklists, "checklists.json")
    checklists = comms.load_checklists(checklist_bytes) if checklist_bytes else []

    built = report.build_report(session, config, lexicon, checklists, catalog=catalog)

    os.makedirs(args.out, exist_ok=True)

    def write(name: str, data: bytes) -> None:
        with open(os.path.join(args.out, name), "wb") as fh:
            fh.write(data)

    if "json" in formats:
        write("report.json", report.render_json(built))
    if "csv" in formats:
        for section in report.CSV_SECTIONS:
            try:
                write(f"report_{section}.csv", report.render_csv(built, section))
            except BridgewatchError as exc:
                log.info("skipping CSV section %s: %s", section, exc)
    if "svg" in formats:
        for chart in report.SVG_CHARTS:
            write(f"chart_{chart}.svg", report.render_svg(built, chart))

    log.info("wrote report for session %s to %s", session.id, args.out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    def load(dir_path: str) -> report.SessionReport:
        return report.SessionReport.from_dict(
            json.loads(_read_bytes(os.path.join(dir_path, "report.json")))
        )

    comparison = report.compare_reports(load(args.dir_a), load(args.dir_b))
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "comparison.json"), "wb") as fh:
        fh.write(report.render_comparison_json(comparison))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if args.scenario:
        scenario = simulate.parse_scenario(_read_bytes(args.scenario))
    else:
        scenario = simulate.default_scenario()
    simulate.generate_session(scenario, args.out, seed=args.seed)
    log.info("generated scenario '%s' into %s", scenario.id, args.out)
    return EXIT_OK


def _cmd_wer(args) -> int:
    reference = _read_bytes(args.ref).decode("utf-8")
    hypothesis = _read_bytes(args.hyp).decode("utf-8")
    result = comms.word_error_rate(reference, hypothesis)
    sys.stdout.write(f"wer {result.wer:.6f}\n")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        session = load_session(args.session, mode="strict")
    except InvalidSession as exc:
        for violation in exc.violations:
            sys.stdout.write(f"{violation}\n")
        return EXIT_INPUT
    # strict load re-validates; report emptiness explicitly for trust
    violations = validate_session(session)
    for violation in violations:
        sys.stdout.write(f"{violation}\n")
    return EXIT_OK if not violations else EXIT_INPUT


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    level = os.environ.get("BRIDGEWATCH_LOG", "warning").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.WARNING))

    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        handler = {
            "analyze": _cmd_analyze,
            "compare": _cmd_compare,
            "simulate": _cmd_simulate,
            "wer": _cmd_wer,
            "validate": _cmd_validate,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except (BridgewatchError, OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
