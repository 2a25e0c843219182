"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

The heavy end-to-end runs (separable Gaussians, synthetic digits) are
shared module fixtures; their wall-clock budgets are asserted alongside
the accuracy floors.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from swarmvqc.baseline import loss, parameter_shift_gradient
from swarmvqc.circuit import decode_particle, text_to_circuit
from swarmvqc.data import load_csv, pca_transform, scale_apply
from swarmvqc.experiment import (
    ExperimentConfig,
    _load_preprocessing,
    run_experiment,
)
from swarmvqc.metrics import class_report
from swarmvqc.prune import prune_dead_gates
from swarmvqc.pso import SwarmConfig, optimize
from swarmvqc.simulator import apply_circuit, batch_expectations, init_state
from swarmvqc.synth import digits01, two_gaussians, write_dataset_csv

from _oracles import dense_simulate, random_circuit


def _criterion(name: str, ok: bool, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'}: {name}{suffix}")
    assert ok, f"{name}{suffix}"


def _write_splits(root: Path, name: str, splits, fmt=None) -> dict[str, str]:
    paths = {}
    for split, tag in zip(splits, ("train", "val", "test")):
        path = root / f"{name}_{tag}.csv"
        write_dataset_csv(split, path, fmt=fmt)
        paths[tag] = str(path)
    return paths


def _experiment(paths, name, method, out_dir, **overrides) -> ExperimentConfig:
    return ExperimentConfig(
        dataset=name, train_csv=paths["train"], val_csv=paths["val"],
        test_csv=paths["test"], method=method, out_dir=str(out_dir), seed=0,
        **overrides,
    )


def _accuracy(run_dir, split: str) -> float:
    lines = (Path(run_dir) / "results.csv").read_text().splitlines()[1:]
    for line in lines:
        dataset, method, row_split, accuracy = line.split(",")
        if row_split == split and not method.endswith("-final"):
            return float(accuracy)
    raise AssertionError(f"split {split} missing from {run_dir}")


@pytest.fixture(scope="module")
def gauss_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("accept-gauss")
    paths = _write_splits(root, "gauss", two_gaussians(500, 200, 200, seed=0))
    started = time.monotonic()
    pso_dir = run_experiment(_experiment(paths, "gauss", "pso", root / "pso",
                                         dimensions=40))
    adam_dir = run_experiment(_experiment(paths, "gauss", "adam", root / "adam"))
    return {"paths": paths, "pso": pso_dir, "adam": adam_dir,
            "elapsed": time.monotonic() - started}


@pytest.fixture(scope="module")
def digit_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("accept-digits")
    paths = _write_splits(root, "digits", digits01(1000, 200, 200, seed=0),
                          fmt="%.6g")
    started = time.monotonic()
    pso_dir = run_experiment(_experiment(paths, "digits", "pso", root / "pso",
                                         dimensions=40, shots=1024))
    pso_elapsed = time.monotonic() - started
    started = time.monotonic()
    adam_dir = run_experiment(_experiment(paths, "digits", "adam", root / "adam"))
    adam_elapsed = time.monotonic() - started
    return {"paths": paths, "pso": pso_dir, "adam": adam_dir,
            "pso_elapsed": pso_elapsed, "adam_elapsed": adam_elapsed}


def test_simulator_oracle_equivalence():
    rng = np.random.default_rng(2024)
    started = time.monotonic()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        circuit = random_circuit(rng, n, int(rng.integers(1, 13)))
        state = apply_circuit(init_state(n), circuit)
        worst = max(worst, float(np.max(np.abs(
            state.amplitudes - dense_simulate(circuit)))))
    elapsed = time.monotonic() - started
    _criterion(
        "simulator oracle equivalence (200 circuits, n<=4)",
        worst <= 1e-10 and elapsed < 10.0,
        f"max amplitude error {worst:.2e}, {elapsed:.1f}s",
    )


def test_gradient_correctness():
    rng = np.random.default_rng(7)
    h = 1e-5
    started = time.monotonic()
    worst = 0.0
    for _ in range(20):
        params = rng.uniform(0, 2 * math.pi, 16)
        features = rng.uniform(0, math.pi, size=(1, 8))
        labels = rng.integers(0, 2, 1)
        gradient = parameter_shift_gradient(params, features, labels)
        for k in range(16):
            up, dn = params.copy(), params.copy()
            up[k] += h
            dn[k] -= h
            fd = (loss(up, features, labels) - loss(dn, features, labels)) / (2 * h)
            worst = max(worst, abs(gradient[k] - fd))
    elapsed = time.monotonic() - started
    _criterion(
        "parameter-shift gradient vs central finite differences",
        worst < 1e-6 and elapsed < 60.0,
        f"max component error {worst:.2e}, {elapsed:.1f}s",
    )


def test_pso_convergence():
    def sphere(x):
        return float(np.sum((x - 0.5) ** 2))

    started = time.monotonic()
    fitnesses = []
    for seed in range(5):
        config = SwarmConfig(dimensions=40, n_particles=50, iterations=100, seed=seed)
        fitnesses.append(optimize(sphere, config, progress=False).best_fitness)
    elapsed = time.monotonic() - started
    passing = sum(f <= 1e-3 for f in fitnesses)
    _criterion(
        "swarm convergence on 40-d sphere (default schedules)",
        passing >= 4 and elapsed < 10.0,
        f"{passing}/5 seeds <= 1e-3, best {min(fitnesses):.2e}, {elapsed:.1f}s",
    )


def test_decoder_totality():
    rng = np.random.default_rng(99)
    checked = 0
    for d in (40, 80):
        positions = [rng.uniform(size=d) for _ in range(5000)]
        positions += [np.zeros(d), np.ones(d)]
        for position in positions:
            circuit = decode_particle(position, 8)
            assert len(circuit) == d // 4
            assert circuit.n_qubits == 8
            for gate in circuit.gates:
                assert all(0 <= q < 8 for q in gate.qubits())
            if d == 40:
                assert len(circuit) <= 10
            checked += 1
    _criterion("decoder totality over the unit cube", checked == 10004,
               f"{checked} positions decoded, gate count always d/4")


def test_pruning_soundness():
    rng = np.random.default_rng(4242)
    worst = 0.0
    for _ in range(100):
        circuit = random_circuit(rng, 8, int(rng.integers(4, 24)))
        report = prune_dead_gates(circuit, 0)
        features = rng.uniform(0, math.pi, size=(20, 8))
        before = batch_expectations(circuit, features)
        after = batch_expectations(report.kept_circuit, features)
        worst = max(worst, float(np.max(np.abs(before - after))))
        again = prune_dead_gates(report.kept_circuit, 0)
        assert again.removed_gates == (), "pruning is not idempotent"
    _criterion(
        "pruning soundness (100 circuits x 20 encoded inputs)",
        worst <= 1e-10,
        f"max readout shift {worst:.2e}, idempotent",
    )


def test_end_to_end_synthetic(gauss_runs):
    pso_acc = _accuracy(gauss_runs["pso"], "test")
    adam_acc = _accuracy(gauss_runs["adam"], "test")
    circuit = text_to_circuit(
        (gauss_runs["pso"] / "circuit.txt").read_text(encoding="utf-8"))
    elapsed = gauss_runs["elapsed"]
    _criterion(
        "end-to-end separable Gaussians (swarm + baseline)",
        pso_acc >= 0.95 and adam_acc >= 0.90 and len(circuit) == 10
        and elapsed < 300.0,
        f"swarm {pso_acc:.3f} (>=0.95), adam {adam_acc:.3f} (>=0.90), "
        f"10-gate circuit, {elapsed:.0f}s",
    )


def test_digit_desk_scale(digit_runs):
    pso_acc = _accuracy(digit_runs["pso"], "test")
    adam_acc = _accuracy(digit_runs["adam"], "test")
    _criterion(
        "digit 0/1 desk-scale (synthetic stand-in, 1000 train / 200 test)",
        pso_acc >= 0.70 and adam_acc >= 0.65
        and digit_runs["pso_elapsed"] < 900.0 and digit_runs["adam_elapsed"] < 900.0,
        f"swarm {pso_acc:.3f} (>=0.70, {digit_runs['pso_elapsed']:.0f}s), "
        f"adam {adam_acc:.3f} (>=0.65, {digit_runs['adam_elapsed']:.0f}s)",
    )


def test_shot_noise_consistency(digit_runs):
    run_dir = digit_runs["pso"]
    sampled = _accuracy(run_dir, "test_shots")
    # exact accuracy on the same 100-sample subset the sampled row used
    circuit = text_to_circuit((run_dir / "circuit.txt").read_text(encoding="utf-8"))
    pca, scaler = _load_preprocessing(run_dir)
    test = load_csv(digit_runs["paths"]["test"])
    features = scale_apply(scaler, pca_transform(pca, test.features))[:100]
    labels = test.labels[:100]
    exact = float(np.mean(
        (batch_expectations(circuit, features) <= 0.0).astype(int) == labels))
    _criterion(
        "1024-shot readout matches exact expectation accuracy",
        abs(sampled - exact) <= 0.05,
        f"sampled {sampled:.3f} vs exact {exact:.3f} on 100 samples",
    )


def test_degenerate_predictor_metrics():
    labels = np.array([1] * 73 + [0] * 27)
    predictions = np.ones(100, dtype=int)
    report = class_report(predictions, labels)
    zeros_exact = report[0] == {"precision": 0.0, "recall": 0.0, "f1": 0.0}
    _criterion(
        "degenerate constant predictor reproduces single-class pattern",
        zeros_exact and report[1]["recall"] >= report[1]["precision"],
        f"class 0 = (0, 0, 0), class 1 recall {report[1]['recall']:.2f} >= "
        f"precision {report[1]['precision']:.2f}",
    )


def test_training_determinism(tmp_path_factory):
    root = tmp_path_factory.mktemp("accept-determinism")
    paths = _write_splits(root, "gauss", two_gaussians(120, 60, 60, seed=1))
    compared = ("circuit.txt", "results.csv", "class_report.csv", "history.csv")
    identical = True
    for method, overrides in (("pso", {"dimensions": 12, "n_particles": 10,
                                       "iterations": 10}),
                              ("adam", {"epochs": 3})):
        first = run_experiment(_experiment(paths, "gauss", method,
                                           root / f"{method}-a", **overrides))
        second = run_experiment(_experiment(paths, "gauss", method,
                                            root / f"{method}-b", **overrides))
        for name in compared:
            if (first / name).read_bytes() != (second / name).read_bytes():
                identical = False
    _criterion(
        "repeated runs emit byte-identical metrics and circuit files",
        identical,
        "train-pso and train-adam, same config and seed",
    )
