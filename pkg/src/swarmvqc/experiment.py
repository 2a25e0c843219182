"""End-to-end experiment orchestration and artifact persistence.

A run directory is self-contained: the manifest records the exact
configuration and split sizes, the preprocessing arrays let ``evaluate``
re-map raw CSV rows without refitting, and metrics/history/circuit
files are written with full float precision so a re-run with the same
seed reproduces every byte.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from . import baseline, metrics, pso
from .circuit import circuit_to_text, decode_particle, text_to_circuit
from .data import (
    Dataset,
    PcaModel,
    ScalerModel,
    filter_first_two_classes,
    load_csv,
    make_fitness,
    pca_transform,
    preprocess_splits,
    scale_apply,
)
from .prune import format_prune_report, prune_dead_gates
from .simulator import READOUT_QUBIT, batch_expectations

FORMAT_VERSION = 1

_PREPROCESSING_ARRAYS = ("pca_mean", "pca_components", "pca_variance",
                         "scaler_min", "scaler_max")


@dataclass
class ExperimentConfig:
    dataset: str
    train_csv: str
    val_csv: str
    test_csv: str
    method: str
    out_dir: str
    seed: int = 0
    n_qubits: int = 8
    pca_k: int = 8
    shots: int | None = None
    # swarm search
    dimensions: int = 40
    n_particles: int = 50
    iterations: int = 100
    c1_start: float = 2.5
    c1_end: float = 0.5
    c2_start: float = 0.5
    c2_end: float = 2.5
    w_start: float = 0.9
    w_end: float = 0.4
    v_max: float = 0.08
    v_max_end: float = 0.005
    fitness_mode: str = "error_rate"
    # gradient baseline
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 0.01
    n_layers: int = 2

    def validate(self) -> None:
        if self.method not in ("pso", "adam"):
            raise ValueError(f"method must be 'pso' or 'adam', got {self.method!r}")
        if self.method == "pso" and self.dimensions % 4 != 0:
            raise ValueError(
                f"dimensions must be a multiple of 4, got {self.dimensions}"
            )
        if self.pca_k != self.n_qubits:
            raise ValueError(
                f"pca_k ({self.pca_k}) must equal n_qubits ({self.n_qubits})"
            )
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")
        for field in ("train_csv", "val_csv", "test_csv"):
            if not getattr(self, field):
                raise ValueError(f"{field} is required")

    @property
    def method_id(self) -> str:
        return f"pso{self.dimensions}" if self.method == "pso" else "adam"


def load_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` file; '#' comments and blank lines ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def config_from_sources(file_values: Mapping[str, str],
                        flag_values: Mapping[str, object]) -> ExperimentConfig:
    """Merge config-file entries and CLI flags (flags win) into a config."""
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    merged: dict[str, object] = {}
    for key, raw in file_values.items():
        if key not in fields:
            raise ValueError(f"unknown config key {key!r}")
        merged[key] = _coerce(raw, fields[key].type, key)
    for key, value in flag_values.items():
        if value is not None:
            merged[key] = value
    missing = [name for name in ("dataset", "train_csv", "val_csv", "test_csv",
                                 "method", "out_dir") if name not in merged]
    if missing:
        raise ValueError(f"missing required config fields: {', '.join(missing)}")
    return ExperimentConfig(**merged)


def _coerce(raw: str, annotation: object, key: str):
    text = str(annotation)
    try:
        if "int | None" in text:
            return None if raw.lower() in ("none", "") else int(raw)
        if text in ("<class 'int'>", "int"):
            return int(raw)
        if text in ("<class 'float'>", "float"):
            return float(raw)
    except ValueError:
        raise ValueError(f"config key {key!r}: cannot parse {raw!r}") from None
    return raw


def _load_splits(config: ExperimentConfig) -> tuple[Dataset, Dataset, Dataset]:
    train = filter_first_two_classes(load_csv(config.train_csv))
    val = filter_first_two_classes(load_csv(config.val_csv))
    test = filter_first_two_classes(load_csv(config.test_csv))
    train.split_tag, val.split_tag, test.split_tag = "train", "val", "test"
    return train, val, test


def _save_preprocessing(run_dir: Path, pca: PcaModel, scaler: ScalerModel) -> None:
    arrays = {
        "pca_mean": pca.mean,
        "pca_components": pca.components,
        "pca_variance": pca.explained_variance,
        "scaler_min": scaler.minimum,
        "scaler_max": scaler.maximum,
    }
    for name in _PREPROCESSING_ARRAYS:
        np.save(run_dir / f"{name}.npy", arrays[name])


def _load_preprocessing(run_dir: Path) -> tuple[PcaModel, ScalerModel]:
    loaded = {name: np.load(run_dir / f"{name}.npy") for name in _PREPROCESSING_ARRAYS}
    pca = PcaModel(loaded["pca_mean"], loaded["pca_components"], loaded["pca_variance"])
    scaler = ScalerModel(loaded["scaler_min"], loaded["scaler_max"])
    return pca, scaler


def sampled_expectations(circuit, features: np.ndarray, shots: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Shot-sampled readout for each row (batched binomial draws)."""
    exact = batch_expectations(circuit, features)
    p_zero = np.clip((1.0 + exact) / 2.0, 0.0, 1.0)
    counts = rng.binomial(shots, p_zero)
    return 2.0 * counts / shots - 1.0


def _metric_rows(config: ExperimentConfig, method_id: str, circuit,
                 splits: dict[str, Dataset]) -> tuple[list[dict], list[dict]]:
    accuracy_rows = []
    class_rows = []
    for tag, split in splits.items():
        expectations = batch_expectations(circuit, split.features)
        predicted = (expectations <= 0.0).astype(np.int64)
        accuracy_rows.append({
            "dataset": config.dataset, "method": method_id,
            "split": tag, "accuracy": metrics.accuracy(predicted, split.labels),
        })
        if tag == "test":
            report = metrics.class_report(predicted, split.labels)
            for cls in (0, 1):
                class_rows.append({
                    "dataset": config.dataset, "method": method_id, "class": cls,
                    **report[cls],
                })
    return accuracy_rows, class_rows


def run_experiment(config: ExperimentConfig) -> Path:
    """Train, evaluate, and persist one experiment; returns the run dir."""
    config.validate()
    train, val, test = _load_splits(config)
    pca, scaler, train2, (val2, test2) = preprocess_splits(
        train, [val, test], config.pca_k)

    run_dir = Path(config.out_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    _save_preprocessing(run_dir, pca, scaler)

    artifacts = [f"{name}.npy" for name in _PREPROCESSING_ARRAYS]
    accuracy_rows: list[dict] = []
    class_rows: list[dict] = []

    if config.method == "pso":
        fitness = make_fitness(train2, config.n_qubits, config.fitness_mode)
        swarm_config = pso.SwarmConfig(
            dimensions=config.dimensions, n_particles=config.n_particles,
            iterations=config.iterations, c1_start=config.c1_start,
            c1_end=config.c1_end, c2_start=config.c2_start, c2_end=config.c2_end,
            w_start=config.w_start, w_end=config.w_end, v_max=config.v_max,
            v_max_end=config.v_max_end, seed=config.seed,
        )
        result = pso.optimize(fitness, swarm_config)
        circuit = decode_particle(result.best_position, config.n_qubits)
        pso.write_history_csv(result, run_dir / "history.csv")
    else:
        train_config = baseline.TrainConfig(
            epochs=config.epochs, batch_size=config.batch_size,
            learning_rate=config.learning_rate, seed=config.seed,
            n_layers=config.n_layers,
        )
        result = baseline.train_baseline(train2, val2, train_config)
        circuit = result.best.circuit()
        baseline.write_history_csv(result.history, run_dir / "history.csv")
        final_circuit = result.final.circuit()
        (run_dir / "circuit_final.txt").write_text(
            circuit_to_text(final_circuit), encoding="utf-8")
        artifacts.append("circuit_final.txt")
        final_acc, _ = _metric_rows(config, "adam-final", final_circuit,
                                    {"val": val2, "test": test2})
        accuracy_rows.extend(final_acc)
    artifacts.append("history.csv")

    (run_dir / "circuit.txt").write_text(circuit_to_text(circuit), encoding="utf-8")
    artifacts.append("circuit.txt")

    splits = {"train": train2, "val": val2, "test": test2}
    rows, cls_rows = _metric_rows(config, config.method_id, circuit, splits)
    accuracy_rows = rows + accuracy_rows
    class_rows.extend(cls_rows)

    if config.shots is not None:
        subset = min(100, len(test2))
        rng = np.random.default_rng(
            np.random.SeedSequence(config.seed, spawn_key=(1_000_001,)))
        estimates = sampled_expectations(
            circuit, test2.features[:subset], config.shots, rng)
        predicted = (estimates <= 0.0).astype(np.int64)
        accuracy_rows.append({
            "dataset": config.dataset, "method": config.method_id,
            "split": "test_shots",
            "accuracy": metrics.accuracy(predicted, test2.labels[:subset]),
        })

    metrics.write_results_csv(accuracy_rows, run_dir / "results.csv")
    metrics.write_class_report_csv(class_rows, run_dir / "class_report.csv")
    artifacts.extend(["results.csv", "class_report.csv"])

    report = prune_dead_gates(circuit, READOUT_QUBIT)
    (run_dir / "prune.txt").write_text(format_prune_report(report), encoding="utf-8")
    artifacts.append("prune.txt")

    manifest = {
        "format_version": FORMAT_VERSION,
        "config": dataclasses.asdict(config),
        "splits": {"train": len(train2), "val": len(val2), "test": len(test2)},
        "artifacts": sorted(artifacts),
    }
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return run_dir


def evaluate(run_dir, split: str, shots: int | None = None,
             seed: int = 0, csv_path: str | None = None) -> dict:
    """Re-evaluate a stored run's circuit on one split.

    Preprocessing arrays and the circuit are loaded from the run
    directory; the split CSV comes from the manifest unless overridden.
    """
    run_dir = Path(run_dir)
    manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
    if csv_path is None:
        key = {"train": "train_csv", "val": "val_csv", "test": "test_csv"}.get(split)
        if key is None:
            raise ValueError(f"unknown split {split!r}")
        csv_path = manifest["config"][key]
    dataset = filter_first_two_classes(load_csv(csv_path))
    pca, scaler = _load_preprocessing(run_dir)
    features = scale_apply(scaler, pca_transform(pca, dataset.features))
    circuit = text_to_circuit((run_dir / "circuit.txt").read_text(encoding="utf-8"))
    if features.shape[1] != circuit.n_qubits:
        raise ValueError(
            f"{features.shape[1]} features after preprocessing but circuit "
            f"has {circuit.n_qubits} qubits"
        )
    if shots is None:
        expectations = batch_expectations(circuit, features)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1_000_001,)))
        expectations = sampled_expectations(circuit, features, shots, rng)
    predicted = (expectations <= 0.0).astype(np.int64)
    report = metrics.class_report(predicted, dataset.labels)
    return {
        "dataset": manifest["config"]["dataset"],
        "split": split,
        "shots": shots,
        "accuracy": metrics.accuracy(predicted, dataset.labels),
        "class_report": report,
    }


def collect_results(run_dirs: list, split: str) -> list[dict]:
    """Pivot stored results.csv rows into dataset-by-method records."""
    table: dict[str, dict[str, object]] = {}
    methods: list[str] = []
    for run_dir in run_dirs:
        path = Path(run_dir) / "results.csv"
        lines = path.read_text(encoding="utf-8").splitlines()[1:]
        for line in lines:
            dataset, method, row_split, accuracy = line.split(",")
            if row_split != split:
                continue
            table.setdefault(dataset, {"dataset": dataset})[method] = float(accuracy)
            if method not in methods:
                methods.append(method)
    rows = []
    for dataset in sorted(table):
        row = {"dataset": dataset}
        for method in methods:
            row[method] = table[dataset].get(method, "-")
        rows.append(row)
    return rows
