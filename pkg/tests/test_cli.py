import json
import subprocess
import sys

import pytest

from affectaware.cli import main
from affectaware.emotion.dataset import gaussian_blobs, write_generic_csv
from affectaware.model import bundled_path

from conftest import FIXTURES



def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def scenario_path():
    from importlib import resources
    return str(resources.files("affectaware") / "data" / "scenarios" / "morning_routine.json")


@pytest.fixture
def dataset_path(tmp_path):
    p = tmp_path / "blobs.csv"
    p.write_text(write_generic_csv(gaussian_blobs(12, 4, seed=3)))
    return str(p)


def test_validate_bundled(capsys):
    code, out, _ = run(capsys, "validate", str(bundled_path("grooming")))
    assert code == 0
    assert out.strip().endswith("AG: ok")


def test_validate_reports_violations(capsys, tmp_path):
    doc = json.loads(bundled_path("grooming").read_text())
    doc[0]["threshold"] = 1.5
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1
    assert "threshold must be in (0,1]" in out


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/defs.json")
    assert code == 2
    assert "cannot read" in err


def test_argparse_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compare-learners", "--format", "yaml"])
    assert exc.value.code == 2


def test_simulate_then_recognize(capsys, tmp_path, scenario_path):
    log = tmp_path / "events.csv"
    assert run(capsys, "simulate", "--scenario", scenario_path, "--out", str(log))[0] == 0
    assert log.read_text().splitlines()[0] == "timestamp_ms,step_id,context_ok,emotion,activity"
    code, out, _ = run(capsys, "recognize", "--events", str(log))
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["code"] for r in recs] == ["CFWK", "UWM", "DOW", "WT", "MB"]


def test_malformed_event_line(capsys, tmp_path):
    log = tmp_path / "events.csv"
    log.write_text("timestamp_ms,step_id,context_ok,emotion\n0,1,true,Happy\n10,oops,true,Sad\n")
    code, _, err = run(capsys, "recognize", "--events", str(log))
    assert code == 1
    assert "line 3" in err


def test_pipeline_formats(capsys, scenario_path):
    code, out, _ = run(capsys, "pipeline", "--scenario", scenario_path, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"]["final_mood"] == "Negative"
    assert doc["next_forecast"]["if_success"]["ux"] == "Positive"
    code, out, _ = run(capsys, "pipeline", "--scenario", scenario_path, "--format", "csv")
    assert out.splitlines()[0] == "occurrence,code,start_ms,end_ms,score,outcome,overall_emotion,valence,mood"
    assert len(out.splitlines()) == 6
    code, out, _ = run(capsys, "pipeline", "--scenario", scenario_path, "--format", "table")
    assert "final mood Negative" in out


def test_pipeline_needs_one_source(capsys, scenario_path):
    code, _, err = run(capsys, "pipeline")
    assert code == 2
    assert "exactly one" in err


def test_compare_learners_csv(capsys, dataset_path):
    code, out, _ = run(capsys, "compare-learners", "--dataset", dataset_path, "--format", "csv", "--seed", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "learner,accuracy,lowest_precision,highest_precision"
    assert len(lines) == 5


def test_train_and_eval_emotion(capsys, tmp_path, dataset_path):
    model = tmp_path / "m.json"
    code, out, _ = run(capsys, "train-emotion", "--dataset", dataset_path, "--learner", "knn",
                       "--out", str(model), "--format", "json")
    assert code == 0 and json.loads(out)["n_test"] > 0
    code, out, _ = run(capsys, "eval-emotion", "--dataset", dataset_path, "--model", str(model),
                       "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "label,precision,recall"


def test_eval_dimension_mismatch(capsys, tmp_path, dataset_path):
    model = tmp_path / "m.json"
    run(capsys, "train-emotion", "--dataset", dataset_path, "--learner", "naive_bayes", "--out", str(model))
    other = tmp_path / "other.csv"
    other.write_text(write_generic_csv(gaussian_blobs(2, 6, seed=1)))
    code, _, err = run(capsys, "eval-emotion", "--dataset", str(other), "--model", str(model))
    assert code == 1
    assert "dimension" in err


def test_ux_eval_rule(capsys):
    code, out, _ = run(capsys, "ux-eval", "--samples", str(FIXTURES / "ux_rows.csv"), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["confusion"]["accuracy"] == pytest.approx(11 / 15)


def test_ux_eval_learned_saves_model(capsys, tmp_path, scenario_path):
    m = tmp_path / "ux.json"
    code, out, _ = run(capsys, "ux-eval", "--samples", str(FIXTURES / "ux_rows.csv"), "--predictor", "learned",
                       "--save-model", str(m), "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "row,ux,prediction,confidence_positive,confidence_negative,mood,outcome"
    code, out, _ = run(capsys, "pipeline", "--scenario", scenario_path, "--ux-model", str(m))
    assert code == 0


def test_unknown_config_key(capsys, tmp_path, scenario_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"colour": "red"}')
    code, _, err = run(capsys, "pipeline", "--scenario", scenario_path, "--config", str(cfg))
    assert code == 1
    assert "colour" in err


def test_repeated_runs_are_identical(capsys, scenario_path, dataset_path):
    for argv in (["pipeline", "--scenario", scenario_path, "--seed", "5"],
                 ["compare-learners", "--dataset", dataset_path, "--seed", "5"],
                 ["simulate", "--scenario", scenario_path, "--seed", "5"]):
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_module_entry_point(scenario_path):
    proc = subprocess.run([sys.executable, "-m", "affectaware", "pipeline", "--scenario", scenario_path,
                           "--format", "table"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "final mood Negative" in proc.stdout
