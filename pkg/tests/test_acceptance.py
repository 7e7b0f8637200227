"""Acceptance gate: one test per release criterion, each printing a verdict.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Every tolerance is fixed here, not configurable.
"""
import json
import os
import random
import time

import numpy as np

from bridgewatch.attention import (
    PupilCalibration,
    af_timeline,
    attentional_focus,
    gaze_stability,
    pd_normalize,
)
from bridgewatch.cli import cli_main
from bridgewatch.comms import extract_entities, judge_checklist, tokenize, word_error_rate
from bridgewatch.ingest import AnalysisConfig
from bridgewatch.model import ScreenGeometry
from bridgewatch.simulate import check_against_ground_truth, default_checklist
from bridgewatch.stress import AudioClip, pitch_frames

from .conftest import make_event, make_gaze, make_session, make_utterance
from .fixtures_comms import WER_ROWS, build_entity_fixture
from .test_comms import brute_edit_distance, memo_edit_distance


def _verdict(ok: bool, name: str, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


# -- criterion 1: metric bounds over randomized windows -----------------------------

def test_criterion_1_metric_bounds():
    started = time.perf_counter()
    rng = random.Random(20_260_808)
    screen = ScreenGeometry(width_px=1920, height_px=1080)
    violations = 0
    for _ in range(10_000):
        n = rng.randint(2, 40)
        points = [(rng.uniform(0, 1920), rng.uniform(0, 1080)) for _ in range(n)]
        gs = gaze_stability(points, screen)
        if not (1.0 / n - 1e-12 <= gs <= 1.0 + 1e-12):
            violations += 1
        w1 = rng.random()
        af = attentional_focus(rng.random(), gs, w1, 1.0 - w1)
        if not (0.0 - 1e-12 <= af <= 1.0 + 1e-12):
            violations += 1
    elapsed = time.perf_counter() - started
    _verdict(
        violations == 0 and elapsed < 10.0,
        "criterion 1: GS in [1/N,1] and AF in [0,1] over 10,000 windows",
        f"{violations} violations, {elapsed:.2f}s",
    )


# -- criterion 2: closed-form fidelity of the three formulas -------------------------

def test_criterion_2_equation_fidelity():
    screen = ScreenGeometry(width_px=300, height_px=400)  # diagonal 500 exactly
    cal = PupilCalibration(pd_min_mm=2.0, pd_max_mm=6.0, method="strict")
    cases = []

    # normalized pupil dilation
    cases.append(abs(pd_normalize(2.0, cal) - 0.0))
    cases.append(abs(pd_normalize(4.0, cal) - 0.5))
    cases.append(abs(pd_normalize(7.0, cal) - 1.0))

    # gaze stability, divisor n
    cases.append(abs(gaze_stability([(10.0, 10.0)] * 3, screen) - 1.0))
    cases.append(abs(gaze_stability([(0.0, 0.0), (300.0, 400.0)], screen) - 0.5))
    hop_half = [(0.0, 0.0), (150.0, 200.0), (0.0, 0.0), (150.0, 200.0)]
    cases.append(abs(gaze_stability(hop_half, screen) - 0.625))

    # weighted combination
    cases.append(abs(attentional_focus(1.0, 1.0, 0.25, 0.75) - 1.0))
    cases.append(abs(attentional_focus(0.8, 0.6, 0.5, 0.5) - 0.7))

    # full pipeline on a constant window: 0.5*0.5 + 0.5*1.0
    session = make_session(gaze=[make_gaze(i * 20, pd=4.0) for i in range(60)])
    timeline = af_timeline(session, AnalysisConfig(), calibration=cal)
    cases.extend(abs(s.af - 0.75) for s in timeline.samples)

    # a pupil step from the calibration floor to its ceiling moves AF by w1
    stepped = make_session(
        gaze=[make_gaze(i * 20, pd=2.0) for i in range(100)]
        + [make_gaze(2000 + i * 20, pd=6.0) for i in range(100)]
    )
    step_line = af_timeline(stepped, AnalysisConfig())
    low = [s.af for s in step_line.samples if s.window_end_ms < 2000]
    high = [s.af for s in step_line.samples if s.window_start_ms >= 2000]
    cases.append(abs(high[0] - low[0] - 0.5))

    # the divisor switch rescales the motion term by exactly n/(n-1)
    rng = random.Random(2)
    divisor_error = 0.0
    for _ in range(200):
        n = rng.randint(2, 30)
        points = [(rng.uniform(0, 300), rng.uniform(0, 400)) for _ in range(n)]
        gs_n = gaze_stability(points, screen, divisor="n")
        gs_m = gaze_stability(points, screen, divisor="n_minus_1")
        divisor_error = max(divisor_error, abs((1.0 - gs_m) - (1.0 - gs_n) * n / (n - 1)))

    worst = max(cases)
    _verdict(
        worst <= 1e-12 and divisor_error <= 1e-12,
        "criterion 2: hand-computed formula cases match to 1e-12",
        f"worst case {worst:.2e}, divisor relation {divisor_error:.2e}",
    )


# -- criterion 3: WER against brute force and the transcription fixture ---------------

def test_criterion_3_wer_oracle():
    started = time.perf_counter()
    rng = random.Random(31337)
    mismatches = 0
    for _ in range(1_000):
        ref = [rng.choice("abcd") for _ in range(rng.randint(1, 6))]
        hyp = [rng.choice("abcd") for _ in range(rng.randint(0, 6))]
        result = word_error_rate(" ".join(ref), " ".join(hyp))
        edits = result.substitutions + result.deletions + result.insertions
        if edits != brute_edit_distance(ref, hyp):
            mismatches += 1

    directional = True
    for row in WER_ROWS:
        baseline = word_error_rate(row["reference"], row["baseline"])
        adapted = word_error_rate(row["reference"], row["adapted"])
        base_edits = baseline.substitutions + baseline.deletions + baseline.insertions
        oracle = memo_edit_distance(
            tuple(tokenize(row["reference"])), tuple(tokenize(row["baseline"]))
        )
        directional = directional and base_edits == oracle and adapted.wer < baseline.wer

    elapsed = time.perf_counter() - started
    _verdict(
        mismatches == 0 and directional and elapsed < 30.0,
        "criterion 3: DP WER equals brute force; adapted beats baseline on fixture",
        f"{mismatches} mismatches, {elapsed:.2f}s",
    )


# -- criterion 4: checklist vector and single-utterance sensitivity -------------------

# one scripted utterance per checklist item; (completing variant, near-miss variant)
CHECKLIST_SCRIPT = [
    (
        "Engine room, bridge, what is the status of the main engine?",
        "Engine room, bridge, routine watch report.",
    ),
    (
        "All ships, all ships, this is SMA Voyager, we have an engine failure.",
        "All ships, all ships, this is SMA Voyager, proceeding as planned.",
    ),
    (
        "Bosun, keep the anchoring stations on stand by.",
        "Bosun, keep the anchoring stations ready for later.",
    ),
    (
        "Port control, be advised we have an engine failure.",
        "Port control, good afternoon, radio check.",
    ),
    (
        "Harbour tug services, we request tug assistance at our position.",
        "Harbour launch services, no extra support needed at our position.",
    ),
    (
        "Port marine safety, please be informed our vessel is disabled.",
        "Duty officer, please log the incident for the record.",
    ),
]

FIGURE_VECTOR = (True, False, False, True, False, False)  # yes, no, no, yes, no, no


def _script_vector(selected: tuple) -> list:
    event = make_event(t_ms=60_000)
    utterances = [
        make_utterance(65_000 + 5_000 * i, CHECKLIST_SCRIPT[i][0 if yes else 1])
        for i, yes in enumerate(selected)
    ]
    results = judge_checklist(default_checklist(), utterances, event, horizon_ms=900_000)
    return [r.completed for r in results]


def test_criterion_4_checklist_fixture():
    base = _script_vector(FIGURE_VECTOR)
    exact = tuple(base) == FIGURE_VECTOR

    sensitive = True
    for flip_at in range(6):
        mutated = list(FIGURE_VECTOR)
        mutated[flip_at] = not mutated[flip_at]
        vector = _script_vector(tuple(mutated))
        expected = list(FIGURE_VECTOR)
        expected[flip_at] = not expected[flip_at]
        sensitive = sensitive and vector == expected

    _verdict(
        exact and sensitive,
        "criterion 4: scripted transcript yields (yes,no,no,yes,no,no); flips are item-exact",
        f"base vector {base}",
    )


# -- criterion 5: gazetteer extraction against the span-labeled fixture ---------------

def test_criterion_5_entity_fixture():
    lexicon, fixture = build_entity_fixture(n_utterances=50, seed=1234)
    assert len(fixture) == 50
    disagreements = 0
    labeled_mentions = 0
    for i, (raw, expected) in enumerate(fixture):
        got = [(m.start, m.end, m.name) for m in extract_entities(raw, lexicon, i)]
        labeled_mentions += len(expected)
        if got != expected:
            disagreements += 1
    _verdict(
        disagreements == 0 and labeled_mentions > 0,
        "criterion 5: 100% exact-span agreement on the 50-utterance fixture",
        f"{labeled_mentions} labeled mentions, {disagreements} disagreeing utterances",
    )


# -- criterion 6: pitch estimation on synthesized tones -------------------------------

def test_criterion_6_pitch_oracle():
    started = time.perf_counter()
    rate = 16_000
    ok = True
    details = []
    for f0 in (120.0, 220.0, 320.0):
        t = np.arange(int(1.5 * rate)) / rate
        clip = AudioClip(sample_rate_hz=rate, samples=0.5 * np.sin(2 * np.pi * f0 * t))
        frames = pitch_frames(clip)
        voiced = [f for f in frames if f.voiced]
        within = sum(abs(f.f0_hz - f0) <= 3.0 for f in voiced)
        share = within / len(voiced) if voiced else 0.0
        details.append(f"{f0:.0f}Hz: {share:.3f}")
        ok = ok and bool(voiced) and share >= 0.95

    silence = AudioClip(sample_rate_hz=rate, samples=np.zeros(rate))
    voiced_in_silence = sum(f.voiced for f in pitch_frames(silence))
    elapsed = time.perf_counter() - started
    _verdict(
        ok and voiced_in_silence == 0 and elapsed < 5.0,
        "criterion 6: tones within +/-3 Hz on >=95% of voiced frames; silence unvoiced",
        ", ".join(details) + f", silence voiced={voiced_in_silence}, {elapsed:.2f}s",
    )


# -- criterion 7: end-to-end simulator oracle ------------------------------------------

def test_criterion_7_end_to_end(tmp_path):
    started = time.perf_counter()
    session_dir = tmp_path / "session"
    out_dir = tmp_path / "analysis"
    assert cli_main(["simulate", "--out", str(session_dir)]) == 0
    assert cli_main(["analyze", "--session", str(session_dir), "--out", str(out_dir)]) == 0
    with open(out_dir / "report.json", "rb") as fh:
        report = json.load(fh)
    with open(session_dir / "ground_truth.json", "rb") as fh:
        ground_truth = json.load(fh)
    checks = check_against_ground_truth(report, ground_truth)
    elapsed = time.perf_counter() - started
    failing = [c.name for c in checks if not c.passed]
    _verdict(
        bool(checks) and not failing and elapsed < 60.0,
        "criterion 7: simulate+analyze passes every ground-truth assertion",
        f"{len(checks)} assertions, failing={failing}, {elapsed:.1f}s",
    )


# -- criterion 8: byte-identical repeated analysis --------------------------------------

def test_criterion_8_determinism(sim_session_dir, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        rc = cli_main(
            ["analyze", "--session", sim_session_dir, "--out", str(out), "--format", "json,csv,svg"]
        )
        assert rc == 0
    names_a = sorted(os.listdir(out_a))
    names_b = sorted(os.listdir(out_b))
    identical = names_a == names_b and all(
        (out_a / name).read_bytes() == (out_b / name).read_bytes() for name in names_a
    )
    _verdict(
        identical and len(names_a) >= 3,
        "criterion 8: repeated analyze runs are byte-identical",
        f"{len(names_a)} output files compared",
    )
