import json
import subprocess
import sys

import pytest

from deepvqc.cli import main
from deepvqc.data_io import load_csv, save_csv
from deepvqc.synthetic import make_blobs


@pytest.fixture(scope="module")
def blob_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "blobs.csv"
    save_csv(make_blobs(n_samples=40, n_features=16, seed=2), path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestIngest:
    def test_toy_summary(self, capsys, toy_csv):
        code, out, _ = run(capsys, "ingest", "--data", toy_csv)
        assert code == 0
        assert json.loads(out) == {"n_samples": 3, "n_features": 2, "class_names": ["a", "b"], "class_counts": [2, 1]}

    def test_writes_summary_file(self, capsys, toy_csv, tmp_path):
        run(capsys, "ingest", "--data", toy_csv, "--out", tmp_path)
        doc = json.loads((tmp_path / "summary.json").read_text())
        assert doc["n_samples"] == 3 and doc["config"]["label_column"] == "type"

    def test_bad_path(self, capsys, tmp_path):
        code, _, err = run(capsys, "ingest", "--data", tmp_path / "nope.csv")
        assert code == 2 and "nope.csv" in err

    def test_parse_error(self, capsys, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("samples,type,g\ns,a,x\n")
        code, _, err = run(capsys, "ingest", "--data", p)
        assert code == 2 and "line 2" in err


class TestUsage:
    def test_unknown_flag(self, capsys, toy_csv):
        with pytest.raises(SystemExit) as exc:
            main(["ingest", "--data", str(toy_csv), "--bogus"])
        assert exc.value.code == 1

    def test_epochs_zero_rejected(self, capsys, blob_csv, tmp_path):
        code, _, err = run(capsys, "train", "--data", blob_csv, "--epochs", 0, "--out", tmp_path)
        assert code == 1 and "epochs" in err

    def test_missing_data(self, capsys):
        code, _, err = run(capsys, "train")
        assert code == 1 and "--data" in err

    def test_config_file_with_override(self, capsys, toy_csv, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"data": str(toy_csv), "label_column": "nope"}))
        code, _, _ = run(capsys, "ingest", "--config", cfg)
        assert code == 2
        code, out, _ = run(capsys, "ingest", "--config", cfg, "--label-column", "type")
        assert code == 0 and json.loads(out)["n_samples"] == 3

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"colour": "red"}))
        code, _, _ = run(capsys, "gradcheck", "--config", cfg)
        assert code == 1


class TestPreprocess:
    def test_pca_off_keeps_features(self, capsys, blob_csv, tmp_path):
        code, out, _ = run(capsys, "preprocess", "--data", blob_csv, "--out", tmp_path)
        assert code == 0
        assert json.loads(out)["n_output_features"] == 16
        reduced = load_csv(tmp_path / "preprocessed.csv")
        assert reduced.n_features == 16 and reduced.n_samples == 40
        assert reduced.features.min() >= 0 and reduced.features.max() <= 1

    def test_pca_on_all_scope(self, capsys, blob_csv, tmp_path):
        code, out, _ = run(capsys, "preprocess", "--data", blob_csv, "--pca", "on", "--fit-scope", "all", "--out", tmp_path)
        summary = json.loads(out)
        assert code == 0 and summary["n_output_features"] < 16 and summary["explained_variance"] >= 0.95
        model = json.loads((tmp_path / "preprocess_model.json").read_text())
        assert model["config"] == {"pca": True, "pca_variance": 0.95, "fit_scope": "all"}

    def test_byte_identical_rerun(self, capsys, blob_csv, tmp_path):
        for d in ("a", "b"):
            run(capsys, "preprocess", "--data", blob_csv, "--pca", "on", "--out", tmp_path / d)
        for name in ("preprocess_model.json", "preprocessed.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestTrain:
    def test_outputs(self, capsys, blob_csv, tmp_path):
        code, out, _ = run(capsys, "train", "--data", blob_csv, "--layers", 1, "--epochs", 3,
                           "--learning-rate", 0.3, "--out", tmp_path)
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["config"]["epochs"] == 3 and report["seed"] == 0
        assert report["model_config"]["ansatz"]["n_qubits"] == 5
        assert len((tmp_path / "curves.csv").read_text().splitlines()) == 4
        ck = json.loads((tmp_path / "checkpoint.json").read_text())
        assert len(ck["theta"]) == 4 * 5 * 1
        assert json.loads(out)["val_accuracy"] == report["val_accuracy"]

    def test_zero_learning_rate_flat(self, capsys, blob_csv, tmp_path):
        run(capsys, "train", "--data", blob_csv, "--layers", 1, "--epochs", 3, "--learning-rate", 0, "--out", tmp_path)
        rows = (tmp_path / "curves.csv").read_text().splitlines()[1:]
        assert len({r.split(",", 1)[1] for r in rows}) == 1

    def test_deterministic_and_thread_independent(self, capsys, blob_csv, tmp_path):
        for d, threads in (("a", 1), ("b", 1), ("c", 3)):
            run(capsys, "train", "--data", blob_csv, "--layers", 1, "--epochs", 2, "--seed", 4,
                "--threads", threads, "--out", tmp_path / d)
        for name in ("report.json", "curves.csv", "checkpoint.json"):
            a = (tmp_path / "a" / name).read_bytes()
            assert a == (tmp_path / "b" / name).read_bytes()
        # the thread cap is echoed in the config, so compare everything else
        ra, rc = (json.loads((tmp_path / d / "report.json").read_text()) for d in "ac")
        ra["config"].pop("threads"), rc["config"].pop("threads")
        assert ra == rc


class TestCrossval:
    def test_report(self, capsys, blob_csv, tmp_path):
        code, out, _ = run(capsys, "crossval", "--data", blob_csv, "--layers", 1, "--epochs", 2,
                           "--folds", 3, "--out", tmp_path)
        assert code == 0
        summary = json.loads(out)
        assert sorted(summary["fold_test_sizes"]) == [13, 13, 14]
        report = json.loads((tmp_path / "cv_report.json").read_text())
        accs = [f["test_accuracy"] for f in report["folds"]]
        assert abs(report["mean_test_accuracy"] - sum(accs) / 3) <= 1e-12
        assert report["reference"]["reference_accuracies"]["SVM"] == 0.95
        assert "within_band" in report["reference"]
        assert len((tmp_path / "cv_curves.csv").read_text().splitlines()) == 3

    def test_folds_below_two(self, capsys, blob_csv, tmp_path):
        code, _, _ = run(capsys, "crossval", "--data", blob_csv, "--folds", 1, "--out", tmp_path)
        assert code == 1


class TestGradcheck:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "gradcheck", "--cases", 4, "--max-qubits", 3, "--max-layers", 1)
        assert code == 0 and "pass" in out

    def test_sign_flip_fails(self, capsys):
        code, _, err = run(capsys, "gradcheck", "--cases", 4, "--max-qubits", 3, "--max-layers", 1, "--inject-sign-flip")
        assert code == 3 and "seed 0" in err

    def test_reproducible(self, capsys):
        outs = [run(capsys, "gradcheck", "--cases", 3, "--max-qubits", 3, "--seed", 9)[1] for _ in range(2)]
        assert outs[0] == outs[1]


def test_console_entry_point(toy_csv):
    proc = subprocess.run([sys.executable, "-m", "deepvqc.cli", "ingest", "--data", str(toy_csv)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["n_features"] == 2
