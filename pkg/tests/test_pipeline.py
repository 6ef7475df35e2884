import json

import numpy as np
import pytest

from affectaware.config import ConfigError, RunConfig, load_config
from affectaware.emotion.dataset import gaussian_blobs
from affectaware.emotion.learners import train
from affectaware.engine import Event
from affectaware.labels import Emotion, Outcome, Valence
from affectaware.pipeline import PipelineReport, model_resolver, run_pipeline
from affectaware.simulation import Scenario, ScenarioItem, bundled_scenario, simulate_trace
from affectaware.ux import LearnedPredictor, train_ux, UXSample


@pytest.fixture(scope="module")
def routine(request):
    from affectaware.model import Registry, load_bundled
    registry = Registry(load_bundled())
    return registry, simulate_trace(registry, bundled_scenario())


def test_routine_mood_chain(routine):
    registry, events = routine
    report = run_pipeline(registry, events)
    assert [r.code for r in report.records] == ["CFWK", "UWM", "DOW", "WT", "MB"]
    assert [r.valence for r in report.records] == [Valence.NEGATIVE] * 3 + [Valence.POSITIVE, Valence.NEGATIVE]
    assert all(r.outcome is Outcome.SUCCESS for r in report.records)
    assert report.final_mood is Valence.NEGATIVE
    assert report.next_forecast["if_success"]["ux"] == "Positive"
    assert report.next_forecast["if_failure"]["ux"] == "Negative"


def test_forecasts_precede_their_occurrence(routine):
    registry, events = routine
    report = run_pipeline(registry, events)
    assert len(report.forecasts) == 5
    for fc in report.forecasts:
        rec = report.records[fc["occurrence"]]
        assert fc["code"] == rec.code
        assert fc["timestamp_ms"] < rec.end_ms


def test_forecast_uses_mood_at_opening(registry):
    # two happy activities lift the mood before the third opens
    items = [ScenarioItem("GS", emotions=Emotion.HAPPY, start_offset_min=0),
             ScenarioItem("SF", emotions=Emotion.HAPPY, start_offset_min=20),
             ScenarioItem("WD", emotions=Emotion.SAD, start_offset_min=40)]
    report = run_pipeline(registry, simulate_trace(registry, Scenario(tuple(items))),
                          RunConfig(mood_window=1))
    assert [f["mood"] for f in report.forecasts] == ["Negative", "Positive", "Positive"]
    assert report.final_mood is Valence.NEGATIVE


def test_no_evidence_occurrence_does_not_move_mood(registry):
    items = [ScenarioItem("GS", emotions=Emotion.HAPPY), ScenarioItem("SF", start_offset_min=20)]
    report = run_pipeline(registry, simulate_trace(registry, Scenario(tuple(items))), RunConfig(mood_window=1))
    assert report.records[1].no_evidence
    assert report.mood_timeline[1]["counted"] is False
    assert report.final_mood is Valence.POSITIVE


def test_empty_log():
    from affectaware.model import Registry, load_bundled
    report = run_pipeline(Registry(load_bundled()), [])
    assert report.records == [] and report.forecasts == []
    assert report.final_mood is Valence.NEGATIVE


def test_feature_rows_resolved_through_model(registry):
    ds = gaussian_blobs(20, 4, seed=1)
    model = train("knn", ds, {"k": 1})
    happy_rows = np.flatnonzero(ds.y == Emotion.HAPPY.index)
    gs = registry["GS"]
    events = [Event(i * 1000, sid, True, None, int(happy_rows[i]), "GS") for i, sid in enumerate(gs.step_ids)]
    report = run_pipeline(registry, events, resolve_emotion=model_resolver(model, ds.X))
    assert report.records[0].overall_emotion is Emotion.HAPPY


def test_learned_predictor_plugs_in(routine):
    registry, events = routine
    model = train_ux([UXSample("Negative", "Positive", "Negative")] * 5)
    report = run_pipeline(registry, events, ux_predictor=LearnedPredictor(model))
    assert report.next_forecast["if_success"]["ux"] == "Negative"


def test_pipeline_is_deterministic(routine):
    registry, events = routine
    assert run_pipeline(registry, events).to_json() == run_pipeline(registry, events).to_json()


def test_report_round_trip(routine):
    registry, events = routine
    text = run_pipeline(registry, events).to_json()
    again = PipelineReport.from_dict(json.loads(text))
    assert again.to_json() == text


def test_config_precedence_and_validation():
    cfg = load_config('{"seed": 3, "mood_window": 4}', {"seed": 9})
    assert (cfg.seed, cfg.mood_window) == (9, 4)
    with pytest.raises(ConfigError, match="unknown config keys: bogus"):
        load_config('{"bogus": 1}')
    with pytest.raises(ConfigError):
        load_config('{"mood_window": 0}')
