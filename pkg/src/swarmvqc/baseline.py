"""Gradient-descent comparison arm: a fixed ring ansatz trained with Adam.

The ansatz stacks layers of one RY rotation per qubit followed by a ring
of CNOTs (control q, target q+1 mod n, ascending q).  Eight qubits and
two layers give 32 gates and 16 trainable angles.  Gradients come from
the exact parameter-shift rule for rotation angles, chained through the
binary cross-entropy readout loss.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circuit import Circuit, Gate
from .data import BCE_CLIP, Dataset
from .simulator import READOUT_QUBIT, _expectations_rows, apply_circuit_to_states, encode_states

SHIFT = math.pi / 2


@dataclass
class FixedAnsatz:
    n_qubits: int = 8
    n_layers: int = 2
    parameters: np.ndarray = field(default_factory=lambda: np.zeros(16))

    def __post_init__(self):
        self.parameters = np.asarray(self.parameters, dtype=float)
        expected = self.n_layers * self.n_qubits
        if self.parameters.shape != (expected,):
            raise ValueError(
                f"expected {expected} parameters for {self.n_layers} layers "
                f"x {self.n_qubits} qubits, got {self.parameters.shape}"
            )

    def circuit(self) -> Circuit:
        return build_fixed_ansatz(self.parameters, self.n_qubits, self.n_layers)


def build_fixed_ansatz(params: np.ndarray, n_qubits: int = 8, n_layers: int = 2) -> Circuit:
    """RY layer then CNOT ring, repeated; n_layers * 2 * n_qubits gates."""
    if n_qubits < 2:
        raise ValueError("ring topology needs at least 2 qubits")
    params = np.asarray(params, dtype=float)
    if params.shape != (n_layers * n_qubits,):
        raise ValueError(
            f"expected {n_layers * n_qubits} parameters, got {params.shape}"
        )
    gates: list[Gate] = []
    for layer in range(n_layers):
        for q in range(n_qubits):
            gates.append(Gate("RY", target=q, angle=params[layer * n_qubits + q]))
        for q in range(n_qubits):
            gates.append(Gate("CNOT", target=(q + 1) % n_qubits, control=q))
    return Circuit(n_qubits, tuple(gates))


CircuitBuilder = Callable[[np.ndarray], Circuit]


def _expectations(builder: CircuitBuilder, params: np.ndarray,
                  encoded: np.ndarray, n_qubits: int) -> np.ndarray:
    states = encoded.copy()
    apply_circuit_to_states(states, builder(params))
    return _expectations_rows(states, n_qubits, READOUT_QUBIT)


def shift_rule_expectation_gradients(
        builder: CircuitBuilder, params: np.ndarray,
        features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample readout expectations and their exact parameter gradients.

    dE/dtheta_k = (E(theta_k + pi/2) - E(theta_k - pi/2)) / 2, which is
    exact whenever parameter k enters the circuit as one rotation angle.
    Returns (expectations, gradients) with shapes (n,) and (n, n_params).
    """
    params = np.asarray(params, dtype=float)
    features = np.asarray(features, dtype=float)
    n_qubits = features.shape[1]
    encoded = encode_states(features, n_qubits)
    expectations = _expectations(builder, params, encoded, n_qubits)
    gradients = np.empty((features.shape[0], params.size))
    for k in range(params.size):
        shifted = params.copy()
        shifted[k] = params[k] + SHIFT
        plus = _expectations(builder, shifted, encoded, n_qubits)
        shifted[k] = params[k] - SHIFT
        minus = _expectations(builder, shifted, encoded, n_qubits)
        gradients[:, k] = (plus - minus) / 2.0
    return expectations, gradients


def _ansatz_builder(n_qubits: int, n_layers: int) -> CircuitBuilder:
    return lambda p: build_fixed_ansatz(p, n_qubits, n_layers)


def ansatz_expectations(params: np.ndarray, features: np.ndarray,
                        n_layers: int = 2) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    n_qubits = features.shape[1]
    encoded = encode_states(features, n_qubits)
    return _expectations(_ansatz_builder(n_qubits, n_layers), params, encoded, n_qubits)


def loss(params: np.ndarray, features: np.ndarray, labels: np.ndarray,
         n_layers: int = 2) -> float:
    """Mean binary cross-entropy of the ansatz on a batch."""
    if len(features) == 0:
        raise ValueError("empty batch")
    expectations = ansatz_expectations(params, features, n_layers)
    p = np.clip((1.0 - expectations) / 2.0, BCE_CLIP, 1.0 - BCE_CLIP)
    y = np.asarray(labels, dtype=float)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def parameter_shift_gradient(params: np.ndarray, features: np.ndarray,
                             labels: np.ndarray, n_layers: int = 2) -> np.ndarray:
    """Exact gradient of :func:`loss` via the shift rule.

    Samples whose probability sits inside the clip band contribute zero,
    matching the derivative of the clipped loss.
    """
    if len(features) == 0:
        raise ValueError("empty batch")
    features = np.asarray(features, dtype=float)
    builder = _ansatz_builder(features.shape[1], n_layers)
    expectations, gradients = shift_rule_expectation_gradients(builder, params, features)
    raw = (1.0 - expectations) / 2.0
    inside = (raw > BCE_CLIP) & (raw < 1.0 - BCE_CLIP)
    p = np.clip(raw, BCE_CLIP, 1.0 - BCE_CLIP)
    y = np.asarray(labels, dtype=float)
    # dL/dE = (y/p - (1-y)/(1-p)) / (2B); the clip derivative gates it.
    dl_de = (y / p - (1.0 - y) / (1.0 - p)) * inside / (2.0 * len(features))
    return dl_de @ gradients


@dataclass
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def initial(cls, n_params: int, learning_rate: float = 0.01) -> "AdamState":
        return cls(np.zeros(n_params), np.zeros(n_params), learning_rate=learning_rate)


def adam_step(state: AdamState, params: np.ndarray,
              gradient: np.ndarray) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; returns (new state, new params)."""
    params = np.asarray(params, dtype=float)
    gradient = np.asarray(gradient, dtype=float)
    if params.shape != gradient.shape or params.shape != state.first_moment.shape:
        raise ValueError("parameter/gradient/moment length mismatch")
    t = state.step_count + 1
    first = state.beta1 * state.first_moment + (1.0 - state.beta1) * gradient
    second = state.beta2 * state.second_moment + (1.0 - state.beta2) * gradient ** 2
    first_hat = first / (1.0 - state.beta1 ** t)
    second_hat = second / (1.0 - state.beta2 ** t)
    updated = params - state.learning_rate * first_hat / (np.sqrt(second_hat) + state.epsilon)
    new_state = AdamState(first, second, t, state.learning_rate,
                          state.beta1, state.beta2, state.epsilon)
    return new_state, updated


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 0.01
    seed: int = 0
    n_layers: int = 2


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float


@dataclass
class BaselineResult:
    final: FixedAnsatz
    best: FixedAnsatz       # highest validation accuracy seen
    best_epoch: int
    history: list[EpochRecord]


def _split_accuracy(params: np.ndarray, split: Dataset, n_layers: int) -> float:
    expectations = ansatz_expectations(params, split.features, n_layers)
    predicted = (expectations <= 0.0).astype(np.int64)
    return float(np.mean(predicted == split.labels))


def train_baseline(train: Dataset, val: Dataset, config: TrainConfig) -> BaselineResult:
    """Minibatch Adam over shuffled epochs; tracks the best-validation model."""
    n_qubits = train.features.shape[1]
    n_params = config.n_layers * n_qubits
    rng = np.random.default_rng(config.seed)
    params = rng.uniform(0.0, 2.0 * math.pi, size=n_params)
    state = AdamState.initial(n_params, config.learning_rate)

    batch_size = config.batch_size
    if len(train) < batch_size:
        warnings.warn(
            f"dataset of {len(train)} samples is smaller than one batch "
            f"({batch_size}); training on full batches",
            stacklevel=2,
        )
        batch_size = len(train)

    best_params = params.copy()
    best_acc = -1.0
    best_epoch = 0
    history: list[EpochRecord] = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(train))
        for start in range(0, len(train), batch_size):
            batch = order[start:start + batch_size]
            gradient = parameter_shift_gradient(
                params, train.features[batch], train.labels[batch], config.n_layers)
            state, params = adam_step(state, params, gradient)
        record = EpochRecord(
            epoch=epoch,
            train_loss=loss(params, train.features, train.labels, config.n_layers),
            train_acc=_split_accuracy(params, train, config.n_layers),
            val_loss=loss(params, val.features, val.labels, config.n_layers),
            val_acc=_split_accuracy(params, val, config.n_layers),
        )
        history.append(record)
        if record.val_acc > best_acc:
            best_acc = record.val_acc
            best_params = params.copy()
            best_epoch = epoch

    return BaselineResult(
        final=FixedAnsatz(n_qubits, config.n_layers, params),
        best=FixedAnsatz(n_qubits, config.n_layers, best_params),
        best_epoch=best_epoch,
        history=history,
    )


def write_history_csv(history: list[EpochRecord], path) -> None:
    """Persist per-epoch curves as epoch,train_loss,train_acc,val_loss,val_acc."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("epoch,train_loss,train_acc,val_loss,val_acc\n")
        for r in history:
            handle.write(
                f"{r.epoch},{r.train_loss!r},{r.train_acc!r},{r.val_loss!r},{r.val_acc!r}\n"
            )
