"""Dataset ingestion, PCA compression, angle scaling, and swarm fitness.

CSV grammar: header ``label,f0,...,f{m-1}``, one sample per row, label a
nonnegative integer, features decimal reals.  Preprocessing is fitted on
the training split only and then applied to every split: PCA to k
components followed by per-feature min-max scaling into [0, pi], the
range the angle encoder expects.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Literal

import numpy as np

from .circuit import decode_particle
from .simulator import (
    READOUT_QUBIT,
    _expectations_rows,
    apply_circuit_to_states,
    encode_states,
)

FitnessMode = Literal["error_rate", "cross_entropy"]

BCE_CLIP = 1e-7


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    split_tag: str = "train"

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError(
                f"{self.features.shape[0]} samples but {self.labels.shape} labels"
            )

    def __len__(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray          # (k, n_features), orthonormal rows
    explained_variance: np.ndarray  # (k,), non-increasing


@dataclass(frozen=True)
class ScalerModel:
    minimum: np.ndarray
    maximum: np.ndarray


def load_csv(path) -> Dataset:
    """Parse a dataset CSV; malformed rows fail with their row number."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[0] != "label" or len(header) < 2:
        raise ValueError(f"{path}: header must be 'label,f0,...', got {lines[0]!r}")
    width = len(header)
    labels = []
    rows = []
    for row_number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != width:
            raise ValueError(
                f"{path}: row {row_number} has {len(cells)} columns, expected {width}"
            )
        try:
            label = int(cells[0])
            values = [float(cell) for cell in cells[1:]]
        except ValueError:
            raise ValueError(f"{path}: row {row_number} has a non-numeric cell") from None
        if label < 0:
            raise ValueError(f"{path}: row {row_number} has negative label {label}")
        labels.append(label)
        rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no samples")
    return Dataset(np.array(rows, dtype=float), np.array(labels, dtype=np.int64))


def filter_first_two_classes(dataset: Dataset) -> Dataset:
    """Keep rows labeled 0 or 1 in the source labeling.

    Source labels are taken at face value: the first two classes are the
    ones labeled 0 and 1, and both must be present.
    """
    mask = (dataset.labels == 0) | (dataset.labels == 1)
    kept = dataset.labels[mask]
    if not (np.any(kept == 0) and np.any(kept == 1)):
        raise ValueError("classes 0 and 1 must both be present")
    return replace(dataset, features=dataset.features[mask], labels=kept)


def pca_fit(features: np.ndarray, k: int) -> PcaModel:
    """Top-k principal axes of the sample covariance (divisor n-1).

    Component rows are orthonormal, sorted by descending eigenvalue, and
    sign-fixed so each row's largest-magnitude entry is positive.
    """
    matrix = np.asarray(features, dtype=float)
    n_samples, n_features = matrix.shape
    if n_samples < 2:
        raise ValueError("need at least 2 samples to fit PCA")
    if not 1 <= k <= min(n_samples, n_features):
        raise ValueError(
            f"k={k} out of range for {n_samples} samples x {n_features} features"
        )
    mean = matrix.mean(axis=0)
    centered = matrix - mean
    covariance = centered.T @ centered / (n_samples - 1)
    if np.trace(covariance) <= 0.0:
        raise ValueError("zero variance: all rows identical")
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1][:k]
    components = eigenvectors[:, order].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaModel(
        mean=mean,
        components=components,
        explained_variance=np.maximum(eigenvalues[order], 0.0),
    )


def pca_transform(model: PcaModel, features: np.ndarray) -> np.ndarray:
    matrix = np.asarray(features, dtype=float)
    if matrix.shape[1] != model.mean.shape[0]:
        raise ValueError(
            f"feature width {matrix.shape[1]} does not match model width {model.mean.shape[0]}"
        )
    return (matrix - model.mean) @ model.components.T


def scale_fit(train_features: np.ndarray) -> ScalerModel:
    matrix = np.asarray(train_features, dtype=float)
    minimum = matrix.min(axis=0)
    maximum = matrix.max(axis=0)
    constant = maximum == minimum
    if np.any(constant):
        warnings.warn(
            f"{int(constant.sum())} constant feature(s); they will map to pi/2",
            stacklevel=2,
        )
    return ScalerModel(minimum=minimum, maximum=maximum)


def scale_apply(model: ScalerModel, features: np.ndarray) -> np.ndarray:
    """Map features into [0, pi]; out-of-train values clamp to the ends."""
    matrix = np.asarray(features, dtype=float)
    span = model.maximum - model.minimum
    safe_span = np.where(span == 0.0, 1.0, span)
    scaled = np.pi * (matrix - model.minimum) / safe_span
    scaled = np.where(span == 0.0, np.pi / 2.0, scaled)
    return np.clip(scaled, 0.0, np.pi)


def preprocess_splits(train: Dataset, others: list[Dataset], k: int)\
        -> tuple[PcaModel, ScalerModel, Dataset, list[Dataset]]:
    """Fit PCA + scaler on the training split and apply to every split."""
    pca = pca_fit(train.features, k)
    scaler = scale_fit(pca_transform(pca, train.features))

    def apply(ds: Dataset) -> Dataset:
        return replace(ds, features=scale_apply(scaler, pca_transform(pca, ds.features)))

    return pca, scaler, apply(train), [apply(ds) for ds in others]


def bce_loss(probabilities: np.ndarray, labels: np.ndarray) -> float:
    p = np.clip(probabilities, BCE_CLIP, 1.0 - BCE_CLIP)
    y = np.asarray(labels, dtype=float)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def make_fitness(train: Dataset, n_qubits: int,
                 mode: FitnessMode = "error_rate") -> Callable[[np.ndarray], float]:
    """Fitness over particle positions: decode, classify the training
    split, return 1 - accuracy (or mean cross-entropy).

    The returned closure captures read-only arrays only, so concurrent
    evaluation is safe, and it is deterministic for a fixed split.
    """
    if mode not in ("error_rate", "cross_entropy"):
        raise ValueError(f"unknown fitness mode {mode!r}")
    if train.features.shape[1] != n_qubits:
        raise ValueError(
            f"training split has {train.features.shape[1]} features, expected {n_qubits}"
        )
    # The encoding prefix is position-independent: prepare it once and
    # restart every evaluation from a copy.
    encoded = encode_states(train.features, n_qubits)
    labels = train.labels.copy()
    positive = labels == 1

    def fitness(position: np.ndarray) -> float:
        circuit = decode_particle(position, n_qubits)
        states = apply_circuit_to_states(encoded.copy(), circuit)
        expectations = _expectations_rows(states, n_qubits, READOUT_QUBIT)
        if mode == "error_rate":
            return float(np.mean((expectations <= 0.0) != positive))
        return bce_loss((1.0 - expectations) / 2.0, labels)

    return fitness
