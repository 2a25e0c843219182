import json
from pathlib import Path

import numpy as np
import pytest

from swarmvqc.cli import main
from swarmvqc.experiment import (
    ExperimentConfig,
    collect_results,
    config_from_sources,
    evaluate,
    load_config_file,
    run_experiment,
    sampled_expectations,
)
from swarmvqc.circuit import Circuit, Gate, text_to_circuit
from swarmvqc.synth import two_gaussians, write_dataset_csv


@pytest.fixture(scope="module")
def gaussian_csvs(tmp_path_factory):
    root = tmp_path_factory.mktemp("gauss-data")
    train, val, test = two_gaussians(120, 60, 60, seed=3)
    paths = {}
    for split, tag in ((train, "train"), (val, "val"), (test, "test")):
        path = root / f"gauss_{tag}.csv"
        write_dataset_csv(split, path)
        paths[tag] = str(path)
    return paths


def _config(paths, method, out_dir, **overrides):
    defaults = dict(
        dataset="gauss", train_csv=paths["train"], val_csv=paths["val"],
        test_csv=paths["test"], method=method, out_dir=str(out_dir), seed=0,
        dimensions=12, n_particles=8, iterations=8, epochs=3, batch_size=32,
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


def _read(run_dir: Path, name: str) -> str:
    return (Path(run_dir) / name).read_text(encoding="utf-8")


class TestConfigValidation:
    def test_bad_dimensions_fail_before_compute(self, gaussian_csvs, tmp_path):
        config = _config(gaussian_csvs, "pso", tmp_path / "run", dimensions=41)
        with pytest.raises(ValueError, match="multiple of 4"):
            run_experiment(config)
        assert not (tmp_path / "run").exists()

    def test_bad_method(self, gaussian_csvs, tmp_path):
        config = _config(gaussian_csvs, "pso", tmp_path / "run")
        config.method = "sgd"
        with pytest.raises(ValueError, match="method"):
            config.validate()

    def test_pca_qubit_coupling(self, gaussian_csvs, tmp_path):
        config = _config(gaussian_csvs, "pso", tmp_path / "run", pca_k=4)
        with pytest.raises(ValueError, match="pca_k"):
            config.validate()

    def test_missing_dataset_file(self, gaussian_csvs, tmp_path):
        config = _config(gaussian_csvs, "pso", tmp_path / "run",
                         train_csv=str(tmp_path / "nope.csv"))
        with pytest.raises(OSError):
            run_experiment(config)


class TestConfigFile:
    def test_round_trip_with_flag_override(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# demo config\n"
            "dataset = toy\n"
            "train_csv = a.csv\nval_csv = b.csv\ntest_csv = c.csv\n"
            "method = pso\nout_dir = out\n"
            "dimensions = 80\nseed = 5\nshots = none\n"
        )
        values = load_config_file(path)
        config = config_from_sources(values, {"seed": 9, "shots": 1024})
        assert config.dimensions == 80
        assert config.seed == 9          # flag wins
        assert config.shots == 1024
        assert config.dataset == "toy"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("datast = typo\n")
        with pytest.raises(ValueError, match="unknown config key"):
            config_from_sources(load_config_file(path), {})

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("just words\n")
        with pytest.raises(ValueError, match="line 1"):
            load_config_file(path)

    def test_missing_required(self):
        with pytest.raises(ValueError, match="missing required"):
            config_from_sources({}, {"dataset": "x"})


class TestRunExperiment:
    def test_pso_run_artifacts(self, gaussian_csvs, tmp_path):
        config = _config(gaussian_csvs, "pso", tmp_path / "run", shots=128)
        run_dir = run_experiment(config)
        manifest = json.loads(_read(run_dir, "manifest.json"))
        assert manifest["format_version"] == 1
        assert manifest["splits"] == {"train": 120, "val": 60, "test": 60}
        for name in manifest["artifacts"]:
            assert (run_dir / name).exists(), name
        circuit = text_to_circuit(_read(run_dir, "circuit.txt"))
        assert len(circuit) == config.dimensions // 4
        assert circuit.n_qubits == 8
        results = _read(run_dir, "results.csv").splitlines()
        assert results[0] == "dataset,method,split,accuracy"
        splits = [line.split(",")[2] for line in results[1:]]
        assert splits == ["train", "val", "test", "test_shots"]
        history = _read(run_dir, "history.csv").splitlines()
        assert history[0] == "iteration,gbest_fitness,mean_fitness"
        assert len(history) == 1 + config.iterations

    def test_adam_run_artifacts(self, gaussian_csvs, tmp_path):
        config = _config(gaussian_csvs, "adam", tmp_path / "run")
        run_dir = run_experiment(config)
        history = _read(run_dir, "history.csv").splitlines()
        assert history[0] == "epoch,train_loss,train_acc,val_loss,val_acc"
        assert len(history) == 1 + config.epochs
        # both the selected and the final model are persisted
        assert (run_dir / "circuit.txt").exists()
        assert (run_dir / "circuit_final.txt").exists()
        methods = {line.split(",")[1] for line in
                   _read(run_dir, "results.csv").splitlines()[1:]}
        assert methods == {"adam", "adam-final"}
        circuit = text_to_circuit(_read(run_dir, "circuit.txt"))
        assert len(circuit) == 2 * 2 * 8

    def test_reruns_are_byte_identical(self, gaussian_csvs, tmp_path):
        compared = ["circuit.txt", "results.csv", "class_report.csv", "history.csv"]
        for method in ("pso", "adam"):
            first = run_experiment(_config(gaussian_csvs, method, tmp_path / f"{method}-a"))
            second = run_experiment(_config(gaussian_csvs, method, tmp_path / f"{method}-b"))
            for name in compared:
                assert _read(first, name) == _read(second, name), (method, name)

    def test_evaluate_matches_persisted_metrics(self, gaussian_csvs, tmp_path):
        config = _config(gaussian_csvs, "pso", tmp_path / "run")
        run_dir = run_experiment(config)
        persisted = {
            line.split(",")[2]: float(line.split(",")[3])
            for line in _read(run_dir, "results.csv").splitlines()[1:]
        }
        for split in ("train", "val", "test"):
            record = evaluate(run_dir, split)
            assert record["accuracy"] == persisted[split]

    def test_evaluate_shots_stays_close(self, gaussian_csvs, tmp_path):
        config = _config(gaussian_csvs, "pso", tmp_path / "run")
        run_dir = run_experiment(config)
        exact = evaluate(run_dir, "test")["accuracy"]
        sampled = []
        for seed in (1, 2):
            sampled.append(evaluate(run_dir, "test", shots=1024, seed=seed)["accuracy"])
            assert abs(sampled[-1] - exact) <= 0.05
        assert abs(sampled[0] - sampled[1]) <= 0.05

    def test_evaluate_unknown_split(self, gaussian_csvs, tmp_path):
        run_dir = run_experiment(_config(gaussian_csvs, "pso", tmp_path / "run"))
        with pytest.raises(ValueError, match="split"):
            evaluate(run_dir, "holdout")


class TestSampledExpectations:
    def test_deterministic_per_seed(self):
        circuit = Circuit(2, (Gate("RY", 0, angle=1.0),))
        features = np.full((5, 2), 1.0)
        a = sampled_expectations(circuit, features, 64, np.random.default_rng(0))
        b = sampled_expectations(circuit, features, 64, np.random.default_rng(0))
        np.testing.assert_array_equal(a, b)

    def test_extreme_probabilities_exact(self):
        circuit = Circuit(1, ())
        features = np.array([[0.0], [np.pi]])
        values = sampled_expectations(circuit, features, 32, np.random.default_rng(1))
        np.testing.assert_array_equal(values, [1.0, -1.0])


class TestCli:
    def test_train_and_report(self, gaussian_csvs, tmp_path, capsys):
        out = tmp_path / "cli-run"
        code = main([
            "train-pso", "--dataset", "gauss",
            "--train-csv", gaussian_csvs["train"],
            "--val-csv", gaussian_csvs["val"],
            "--test-csv", gaussian_csvs["test"],
            "--dims", "12", "--particles", "6", "--iterations", "5",
            "--seed", "1", "--out", str(out),
        ])
        assert code == 0
        assert (out / "manifest.json").exists()
        capsys.readouterr()

        code = main(["report", "--runs", str(out), "--split", "test"])
        assert code == 0
        table = capsys.readouterr().out
        assert "| dataset | pso12 |" in table
        assert "gauss" in table

    def test_evaluate_command(self, gaussian_csvs, tmp_path, capsys):
        out = tmp_path / "cli-run2"
        main([
            "train-pso", "--dataset", "gauss",
            "--train-csv", gaussian_csvs["train"],
            "--val-csv", gaussian_csvs["val"],
            "--test-csv", gaussian_csvs["test"],
            "--dims", "12", "--particles", "6", "--iterations", "5",
            "--seed", "1", "--out", str(out),
        ])
        capsys.readouterr()
        code = main(["evaluate", "--run", str(out), "--split", "val"])
        assert code == 0
        record = json.loads(capsys.readouterr().out)
        assert record["split"] == "val"
        assert 0.0 <= record["accuracy"] <= 1.0

    def test_prune_and_qasm_commands(self, tmp_path, capsys):
        circuit_file = tmp_path / "c.txt"
        circuit_file.write_text("qubits 3\nRZ 2 0.5\nRX 0 1.0\n")
        assert main(["prune", "--circuit", str(circuit_file)]) == 0
        out = capsys.readouterr().out
        assert "effective gates: 1" in out

        assert main(["export-qasm", "--circuit", str(circuit_file)]) == 0
        qasm = capsys.readouterr().out
        assert qasm.startswith("OPENQASM 2.0;")
        assert "rx(1.0) q[0];" in qasm

    def test_config_error_exits_nonzero(self, gaussian_csvs, tmp_path, capsys):
        code = main([
            "train-pso", "--dataset", "gauss",
            "--train-csv", gaussian_csvs["train"],
            "--val-csv", gaussian_csvs["val"],
            "--test-csv", gaussian_csvs["test"],
            "--dims", "41", "--out", str(tmp_path / "bad"),
        ])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_collect_results_pivot(self, tmp_path):
        run = tmp_path / "r1"
        run.mkdir()
        (run / "results.csv").write_text(
            "dataset,method,split,accuracy\n"
            "toy,adam,test,0.7\n"
            "toy,pso40,test,0.75\n"
            "toy,pso40,val,0.8\n"
        )
        rows = collect_results([run], "test")
        assert rows == [{"dataset": "toy", "adam": 0.7, "pso40": 0.75}]
