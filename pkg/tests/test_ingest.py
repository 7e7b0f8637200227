import json

import pytest

from bridgewatch.errors import (
    InvalidSession,
    MalformedLine,
    MissingField,
    MissingFile,
    OutOfRangeValue,
    SchemaError,
)
from bridgewatch.ingest import (
    AnalysisConfig,
    CatalogPanel,
    PanelCatalog,
    load_session,
    parse_catalog_json,
    parse_config,
    parse_events_json,
    parse_gaze_jsonl,
    parse_offsets_json,
    parse_panels_jsonl,
    parse_transcript_jsonl,
    write_session,
)
from bridgewatch.model import ScreenGeometry

from .conftest import make_event, make_gaze, make_panel, make_session, make_utterance

GAZE_LINE = (
    '{"t_ms":0,"gx":100.0,"gy":50.0,"depth_m":1.2,"pd_left_mm":3.1,'
    '"pd_right_mm":3.0,"dir":[0,0,1],"valid":true}'
)


def test_parse_gaze_line_maps_fields():
    samples, skipped = parse_gaze_jsonl(GAZE_LINE)
    assert skipped == 0
    (s,) = samples
    assert s.t_ms == 0
    assert s.gaze_px == (100.0, 50.0)
    assert s.depth_m == 1.2
    assert (s.pd_left_mm, s.pd_right_mm) == (3.1, 3.0)
    assert s.direction == (0.0, 0.0, 1.0)
    assert s.valid is True


def test_empty_file_parses_to_nothing():
    assert parse_gaze_jsonl(b"") == ([], 0)


def test_tolerant_mode_skips_and_counts():
    data = "\n".join([GAZE_LINE, "not-json", GAZE_LINE, GAZE_LINE])
    samples, skipped = parse_gaze_jsonl(data, mode="tolerant")
    assert len(samples) == 3
    assert skipped == 1


def test_strict_mode_fails_on_first_malformed_line():
    data = "\n".join([GAZE_LINE, "not-json"])
    with pytest.raises(MalformedLine) as err:
        parse_gaze_jsonl(data, mode="strict")
    assert err.value.line_no == 2


def test_missing_required_field():
    with pytest.raises(MissingField) as err:
        parse_gaze_jsonl('{"t_ms":0}')
    assert err.value.field == "valid"


def test_valid_sample_requires_coordinates():
    with pytest.raises(MissingField):
        parse_gaze_jsonl('{"t_ms":0,"valid":true}')
    samples, _ = parse_gaze_jsonl('{"t_ms":0,"valid":false}')
    assert samples[0].gaze_px is None


def test_gaze_range_errors():
    with pytest.raises(OutOfRangeValue):
        parse_gaze_jsonl('{"t_ms":0,"gx":1.0,"gy":1.0,"valid":true,"pd_left_mm":-1.0}')
    with pytest.raises(OutOfRangeValue):
        parse_gaze_jsonl('{"t_ms":0.5,"gx":1.0,"gy":1.0,"valid":true}')


def test_unknown_fields_are_ignored():
    samples, _ = parse_gaze_jsonl('{"t_ms":0,"gx":1.0,"gy":2.0,"valid":true,"extra":"x"}')
    assert samples[0].gaze_px == (1.0, 2.0)


def test_parse_panels_line_with_subpanel():
    line = '{"t_ms":40,"panel":"sms","subpanel":"lateral_speed","bbox":[100,100,400,300],"conf":0.97}'
    observations, skipped = parse_panels_jsonl(line)
    assert skipped == 0
    (o,) = observations
    assert o.panel_id == "sms"
    assert o.subpanel_id == "lateral_speed"
    assert o.bbox == (100.0, 100.0, 400.0, 300.0)
    assert o.confidence == 0.97


def test_degenerate_bbox_rejected():
    with pytest.raises(OutOfRangeValue, match="x0 < x1"):
        parse_panels_jsonl('{"t_ms":0,"panel":"p","bbox":[400,100,100,300],"conf":0.5}')


def test_confidence_out_of_range_rejected():
    with pytest.raises(OutOfRangeValue):
        parse_panels_jsonl('{"t_ms":0,"panel":"p","bbox":[0,0,10,10],"conf":1.5}')


def test_parse_transcript_invariants():
    line = '{"t0_ms":100,"t1_ms":200,"speaker":"trainee","text":"radio check"}'
    utterances, _ = parse_transcript_jsonl(line)
    assert utterances[0].text == "radio check"
    with pytest.raises(OutOfRangeValue):
        parse_transcript_jsonl('{"t0_ms":200,"t1_ms":100,"speaker":"a","text":"x"}')
    with pytest.raises(OutOfRangeValue):
        parse_transcript_jsonl('{"t0_ms":0,"t1_ms":1,"speaker":"a","text":"   "}')


def test_parse_events_json():
    events = parse_events_json('[{"t_ms":600000,"kind":"main_engine_failure","label":"ME failure"}]')
    assert len(events) == 1
    assert events[0].kind == "main_engine_failure"
    with pytest.raises(SchemaError):
        parse_events_json('[{"t_ms":0,"kind":""}]')


def test_config_weight_invariant():
    with pytest.raises(SchemaError, match="w1\\+w2"):
        parse_config('{"w1":0.6,"w2":0.5}')


def test_config_defaults_and_robust_calibration():
    config = parse_config("{}")
    assert config == AnalysisConfig()
    config = parse_config('{"pd_calibration":{"method":"robust","p_low":5,"p_high":95}}')
    assert config.pd_calibration.method == "robust"
    assert config.pd_calibration.p_low == 5.0


def test_config_rejects_even_median_filter():
    with pytest.raises(SchemaError):
        parse_config('{"stress":{"median_filter_k":4}}')


def test_catalog_duplicate_panel_id():
    doc = {
        "screen": {"w_px": 100, "h_px": 100},
        "panels": [{"id": "a", "name": "A"}, {"id": "a", "name": "B"}],
    }
    with pytest.raises(SchemaError, match="duplicate"):
        parse_catalog_json(json.dumps(doc))


def test_offsets_unknown_stream():
    with pytest.raises(SchemaError):
        parse_offsets_json('{"audio": 5}')
    assert parse_offsets_json('{"gaze": -20}') == {"gaze": -20}


def _write_fixture_dir(path, offsets=None):
    session = make_session(
        gaze=[make_gaze(10), make_gaze(30)],
        panels=[make_panel(0)],
        utterances=[make_utterance(0, "radio check")],
        events=[make_event(t_ms=20)],
    )
    catalog = PanelCatalog(
        screen=ScreenGeometry(1920, 1080),
        panels=(CatalogPanel(panel_id="radar", display_name="Radar"),),
    )
    write_session(session, catalog, str(path))
    if offsets is not None:
        (path / "offsets.json").write_text(json.dumps(offsets))
    return session


def test_load_session_round_trip(tmp_path):
    session = _write_fixture_dir(tmp_path / "test-session")
    loaded = load_session(str(tmp_path / "test-session"))
    assert loaded == session


def test_load_session_missing_file(tmp_path):
    path = tmp_path / "s"
    _write_fixture_dir(path)
    (path / "panels.jsonl").unlink()
    with pytest.raises(MissingFile) as err:
        load_session(str(path))
    assert err.value.name == "panels.jsonl"


def test_load_session_applies_offsets_before_validation(tmp_path):
    path = tmp_path / "s"
    _write_fixture_dir(path, offsets={"gaze": -20})
    loaded = load_session(str(path))
    assert [g.t_ms for g in loaded.gaze] == [10]


def test_load_session_strict_rejects_unknown_panel_ids(tmp_path):
    path = tmp_path / "s"
    _write_fixture_dir(path)
    with open(path / "panels.jsonl", "a", encoding="utf-8") as fh:
        fh.write('{"t_ms":50,"panel":"ghost","bbox":[0,0,10,10],"conf":0.5}\n')
    with pytest.raises(InvalidSession) as err:
        load_session(str(path))
    assert any(v.rule == "panel_id in catalog" for v in err.value.violations)


def test_tolerant_output_is_subsequence_of_strict_prefix():
    good = [GAZE_LINE, GAZE_LINE.replace('"t_ms":0', '"t_ms":20')]
    strict_samples, _ = parse_gaze_jsonl("\n".join(good), mode="strict")
    tolerant_samples, skipped = parse_gaze_jsonl("\n".join(good + ["garbage"]), mode="tolerant")
    assert tolerant_samples == strict_samples
    assert skipped == 1


def test_parsing_is_deterministic():
    data = "\n".join([GAZE_LINE] * 5).encode("utf-8")
    assert parse_gaze_jsonl(data) == parse_gaze_jsonl(data)


def test_load_session_tolerant_skips_bad_lines(tmp_path):
    path = tmp_path / "s"
    _write_fixture_dir(path)
    original = (path / "gaze.jsonl").read_text()
    (path / "gaze.jsonl").write_text("garbage\n" + original)
    loaded = load_session(str(path), mode="tolerant")
    assert [g.t_ms for g in loaded.gaze] == [10, 30]


def test_config_rejects_bad_stress_weights():
    with pytest.raises(SchemaError):
        parse_config('{"stress":{"weights":[0.5,0.3]}}')
