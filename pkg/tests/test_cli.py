import json
import subprocess
import sys
from pathlib import Path

import pytest

from enrollcast.cli import main

PKG_ROOT = Path(__file__).resolve().parents[1]


def run_cli(args, cwd, env_store=None, stdin=None):
    """Run the CLI in a subprocess so exit codes and streams are the real thing."""
    import os

    env = dict(os.environ)
    env["PYTHONPATH"] = str(PKG_ROOT / "src")
    if env_store is not None:
        env["ENROLLCAST_STORE"] = str(env_store)
    else:
        env.pop("ENROLLCAST_STORE", None)
    return subprocess.run(
        [sys.executable, "-m", "enrollcast", *args],
        capture_output=True, text=True, cwd=str(cwd), env=env, input=stdin,
    )


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    result = run_cli(
        ["synth", "--rows", "400", "--features", "6", "--informative", "3",
         "--seed", "9", "--out-dir", str(out)],
        cwd=out,
    )
    assert result.returncode == 0, result.stderr
    return out


class TestSynth:
    def test_writes_three_files(self, synth_dir):
        assert (synth_dir / "data.csv").is_file()
        assert (synth_dir / "schema.json").is_file()
        truth = json.loads((synth_dir / "truth.json").read_text())
        assert len(truth["informative_indices"]) == 3
        assert truth["schema"]["target"] == "Enrolled"

    def test_stdout_mode_pipes_csv(self, tmp_path):
        result = run_cli(
            ["synth", "--rows", "5", "--features", "3", "--informative", "2",
             "--seed", "1", "--stdout"],
            cwd=tmp_path,
        )
        assert result.returncode == 0
        lines = result.stdout.splitlines()
        assert len(lines) == 6
        assert lines[0].startswith("id,")
        assert lines[0].endswith(",Enrolled")

    def test_deterministic(self, tmp_path):
        a = run_cli(["synth", "--rows", "20", "--seed", "3", "--stdout"], cwd=tmp_path)
        b = run_cli(["synth", "--rows", "20", "--seed", "3", "--stdout"], cwd=tmp_path)
        assert a.stdout == b.stdout


class TestIngestTrainEvaluate:
    def test_ingest_then_train_by_id(self, synth_dir, tmp_path):
        store = tmp_path / "store"
        ingest = run_cli(
            ["ingest", "--data", str(synth_dir / "data.csv"),
             "--schema", str(synth_dir / "schema.json"), "--store", str(store)],
            cwd=tmp_path,
        )
        assert ingest.returncode == 0, ingest.stderr
        dataset_id = json.loads(ingest.stdout)["dataset_id"]

        out = tmp_path / "model.json"
        train = run_cli(
            ["train", "--dataset", dataset_id, "--seed", "4", "--folds", "5",
             "--store", str(store), "--out", str(out)],
            cwd=tmp_path,
        )
        assert train.returncode == 0, train.stderr
        summary = json.loads(train.stdout)
        assert summary["dataset_id"] == dataset_id
        assert out.is_file()
        assert 0.0 <= summary["cv"]["pooled_accuracy"] <= 1.0

    def test_train_twice_byte_identical(self, synth_dir, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            result = run_cli(
                ["train", "--data", str(synth_dir / "data.csv"),
                 "--schema", str(synth_dir / "schema.json"),
                 "--seed", "7", "--folds", "5",
                 "--store", str(tmp_path / "store"), "--out", str(tmp_path / name)],
                cwd=tmp_path,
            )
            assert result.returncode == 0, result.stderr
            outs.append((tmp_path / name).read_bytes())
        assert outs[0] == outs[1]

    def test_env_var_overrides_store_flag(self, synth_dir, tmp_path):
        env_store = tmp_path / "env-store"
        result = run_cli(
            ["ingest", "--data", str(synth_dir / "data.csv"),
             "--schema", str(synth_dir / "schema.json"),
             "--store", str(tmp_path / "flag-store")],
            cwd=tmp_path, env_store=env_store,
        )
        assert result.returncode == 0, result.stderr
        assert env_store.is_dir()
        assert not (tmp_path / "flag-store").exists()

    def test_evaluate_model_on_data(self, synth_dir, tmp_path):
        out = tmp_path / "model.json"
        run = run_cli(
            ["train", "--data", str(synth_dir / "data.csv"),
             "--schema", str(synth_dir / "schema.json"),
             "--seed", "1", "--folds", "5",
             "--store", str(tmp_path / "store"), "--out", str(out)],
            cwd=tmp_path,
        )
        assert run.returncode == 0, run.stderr
        result = run_cli(
            ["evaluate", "--model", str(out), "--data", str(synth_dir / "data.csv")],
            cwd=tmp_path,
        )
        assert result.returncode == 0, result.stderr
        report = json.loads(result.stdout)["report"]
        assert {"confusion", "positive", "negative", "weighted", "roc"} <= set(report)

    def test_synth_pipe_into_train(self, tmp_path):
        synth = run_cli(
            ["synth", "--rows", "300", "--features", "4", "--informative", "2",
             "--seed", "2", "--stdout"],
            cwd=tmp_path,
        )
        train = run_cli(
            ["train", "--data", "-", "--seed", "2", "--folds", "5",
             "--store", str(tmp_path / "store")],
            cwd=tmp_path, stdin=synth.stdout,
        )
        assert train.returncode == 0, train.stderr
        assert json.loads(train.stdout)["model_id"]


class TestPredictCli:
    def test_predict_and_missing_feature_exit_codes(self, synth_dir, tmp_path):
        out = tmp_path / "model.json"
        run_cli(
            ["train", "--data", str(synth_dir / "data.csv"),
             "--schema", str(synth_dir / "schema.json"),
             "--seed", "3", "--folds", "5",
             "--store", str(tmp_path / "store"), "--out", str(out)],
            cwd=tmp_path,
        )
        schema = json.loads((synth_dir / "schema.json").read_text())
        row = {}
        for feature in schema["features"]:
            row[feature["name"]] = feature["levels"][1] if "levels" in feature else 2
        (tmp_path / "row.json").write_text(json.dumps({"feature_values": row}))
        good = run_cli(
            ["predict", "--model", str(out), "--input", str(tmp_path / "row.json")],
            cwd=tmp_path,
        )
        assert good.returncode == 0, good.stderr
        record = json.loads(good.stdout)
        assert record["percentage"] == round(100.0 * record["probability"], 1)

        dropped = dict(row)
        removed = sorted(dropped)[0]
        dropped.pop(removed)
        (tmp_path / "bad.json").write_text(json.dumps({"feature_values": dropped}))
        bad = run_cli(
            ["predict", "--model", str(out), "--input", str(tmp_path / "bad.json")],
            cwd=tmp_path,
        )
        assert bad.returncode == 2
        error = json.loads(bad.stderr)
        assert error["code"] == "missing_feature"
        assert error["field"] == removed

    def test_usage_error_exits_one(self, tmp_path):
        result = run_cli(["train", "--nonsense"], cwd=tmp_path)
        assert result.returncode == 1

    def test_unknown_model_exits_two(self, tmp_path):
        (tmp_path / "row.json").write_text("{}")
        result = run_cli(
            ["predict", "--model", "missing-id", "--input", str(tmp_path / "row.json"),
             "--store", str(tmp_path / "store")],
            cwd=tmp_path,
        )
        assert result.returncode == 2
        assert json.loads(result.stderr)["code"] == "not_found"


class TestInProcessMain:
    def test_main_returns_zero(self, synth_dir, tmp_path, capsys):
        code = main(
            ["train", "--data", str(synth_dir / "data.csv"),
             "--schema", str(synth_dir / "schema.json"),
             "--seed", "5", "--folds", "5", "--store", str(tmp_path / "store")]
        )
        assert code == 0
        assert json.loads(capsys.readouterr().out)["model_id"]
