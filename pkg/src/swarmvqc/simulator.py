"""Exact statevector simulation with single-qubit Z readout.

Amplitudes are stored little-endian: basis index b assigns bit k of b to
qubit k, so qubit 0 is the least significant bit.  Gates are applied by
stride iteration over the amplitude array; no 2^n x 2^n matrices are
ever materialized.

Classification readout measures <Z> on qubit 0 and maps it to a class-1
probability via p1 = (1 - <Z>)/2: the all-|0> state reads +1 (class 0)
and feature angles near pi push the readout toward -1 (class 1).
Features must arrive pre-scaled to [0, pi]; they are loaded with one RY
rotation per qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate

MAX_QUBITS = 24
READOUT_QUBIT = 0

_FEATURE_TOLERANCE = 1e-9


@dataclass
class Statevector:
    """Complex amplitude array of length 2^n_qubits, unit norm."""

    amplitudes: np.ndarray
    n_qubits: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class ReadoutResult:
    """Readout of one classified sample.

    probability_class1 = (1 - expectation)/2 and the predicted label is
    1 exactly when that probability reaches 0.5.
    """

    expectation: float
    predicted_label: int
    probability_class1: float


def init_state(n_qubits: int) -> Statevector:
    """Prepare |0...0>."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return Statevector(amplitudes, n_qubits)


def _rotation_coefficients(kind: str, angle) -> tuple:
    """2x2 rotation matrix entries ((a, b), (c, d)); angle may be an array."""
    half = np.multiply(angle, 0.5)
    cos, sin = np.cos(half), np.sin(half)
    if kind == "RX":
        return cos, -1j * sin, -1j * sin, cos
    if kind == "RY":
        return cos, -sin, sin, cos
    if kind == "RZ":
        return cos - 1j * sin, 0.0, 0.0, cos + 1j * sin
    raise ValueError(f"not a rotation kind: {kind!r}")


def _apply_rotation_rows(amps: np.ndarray, n_qubits: int, kind: str, angle, target: int):
    """Apply a rotation to every row of an (n_rows, 2^n) amplitude array.

    ``angle`` is a scalar or a per-row array (used for feature encoding).
    """
    low = 1 << target
    high = amps.shape[1] >> (target + 1)
    view = amps.reshape(-1, high, 2, low)
    a, b, c, d = _rotation_coefficients(kind, angle)
    if np.ndim(a) == 1:  # per-row coefficients broadcast over strides
        a, b, c, d = (np.reshape(x, (-1, 1, 1)) for x in (a, b, c, d))
    s0 = view[:, :, 0, :].copy()
    s1 = view[:, :, 1, :]
    view[:, :, 0, :] = a * s0 + b * s1
    view[:, :, 1, :] = c * s0 + d * s1


def _cnot_swap_indices(n_qubits: int, control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << n_qubits)
    src = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    return src, src | (1 << target)


def _apply_cnot_rows(amps: np.ndarray, n_qubits: int, control: int, target: int):
    src, dst = _cnot_swap_indices(n_qubits, control, target)
    tmp = amps[:, src].copy()
    amps[:, src] = amps[:, dst]
    amps[:, dst] = tmp


def _apply_gate_rows(amps: np.ndarray, n_qubits: int, gate: Gate):
    for q in gate.qubits():
        if q >= n_qubits:
            raise ValueError(f"gate qubit {q} out of range for {n_qubits} qubits")
    if gate.kind == "CNOT":
        _apply_cnot_rows(amps, n_qubits, gate.control, gate.target)
    else:
        _apply_rotation_rows(amps, n_qubits, gate.kind, gate.angle, gate.target)


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Apply one gate in place; returns the same statevector."""
    _apply_gate_rows(state.amplitudes.reshape(1, -1), state.n_qubits, gate)
    return state


def apply_circuit(state: Statevector, circuit: Circuit) -> Statevector:
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit is on {circuit.n_qubits} qubits, state on {state.n_qubits}"
        )
    rows = state.amplitudes.reshape(1, -1)
    for gate in circuit.gates:
        _apply_gate_rows(rows, state.n_qubits, gate)
    return state


def angle_encode(features: np.ndarray) -> Circuit:
    """Encoding prefix: RY(feature_i) on qubit i.

    Features must already be scaled into [0, pi]; anything outside that
    range signals a missing scaling step upstream.
    """
    values = np.asarray(features, dtype=float)
    if values.ndim != 1 or values.size < 1:
        raise ValueError(f"features must be a non-empty vector, got shape {values.shape}")
    if np.any(values < -_FEATURE_TOLERANCE) or np.any(values > math.pi + _FEATURE_TOLERANCE):
        raise ValueError(f"features outside [0, pi]: {values}")
    gates = tuple(Gate("RY", target=i, angle=v) for i, v in enumerate(values))
    return Circuit(values.size, gates)


def expectation_z(state: Statevector, qubit: int) -> float:
    """<Z> on one qubit: +1 weight for basis states with bit ``qubit`` = 0."""
    return float(_expectations_rows(state.amplitudes.reshape(1, -1), state.n_qubits, qubit)[0])


def _expectations_rows(amps: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
    low = 1 << qubit
    high = amps.shape[1] >> (qubit + 1)
    probs = (amps.real ** 2 + amps.imag ** 2).reshape(-1, high, 2, low)
    return probs[:, :, 0, :].sum(axis=(1, 2)) - probs[:, :, 1, :].sum(axis=(1, 2))


def run_and_classify(circuit: Circuit, features: np.ndarray) -> ReadoutResult:
    """Encode features, run the circuit, and read out qubit 0."""
    values = np.asarray(features, dtype=float)
    if values.size != circuit.n_qubits:
        raise ValueError(
            f"got {values.size} features for a {circuit.n_qubits}-qubit circuit"
        )
    state = init_state(circuit.n_qubits)
    apply_circuit(state, angle_encode(values))
    apply_circuit(state, circuit)
    return readout_from_expectation(expectation_z(state, READOUT_QUBIT))


def readout_from_expectation(expectation: float) -> ReadoutResult:
    probability_class1 = (1.0 - expectation) / 2.0
    return ReadoutResult(
        expectation=expectation,
        predicted_label=1 if probability_class1 >= 0.5 else 0,
        probability_class1=probability_class1,
    )


def sample_expectation(state: Statevector, qubit: int, shots: int,
                       rng: np.random.Generator) -> float:
    """Shot-based <Z> estimate: 2 * count(bit=0)/shots - 1.

    Deterministic for a given generator state.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    exact = _expectations_rows(state.amplitudes.reshape(1, -1), state.n_qubits, qubit)[0]
    p_zero = min(max((1.0 + exact) / 2.0, 0.0), 1.0)
    count_zero = rng.binomial(shots, p_zero)
    return 2.0 * count_zero / shots - 1.0


# Batched evaluation: one (n_samples, 2^n) array, gates vectorized over rows.
# Feeding every sample through at once is what makes swarm-fitness and
# gradient evaluation affordable; results match the single-state path.

def encode_states(features: np.ndarray, n_qubits: int) -> np.ndarray:
    """Encoded statevectors for every feature row, shape (n_samples, 2^n)."""
    matrix = np.asarray(features, dtype=float)
    if matrix.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {matrix.shape}")
    if matrix.shape[1] != n_qubits:
        raise ValueError(f"got {matrix.shape[1]} features per row for {n_qubits} qubits")
    if np.any(matrix < -_FEATURE_TOLERANCE) or np.any(matrix > math.pi + _FEATURE_TOLERANCE):
        raise ValueError("features outside [0, pi]")
    amps = np.zeros((matrix.shape[0], 1 << n_qubits), dtype=np.complex128)
    amps[:, 0] = 1.0
    for q in range(n_qubits):
        _apply_rotation_rows(amps, n_qubits, "RY", matrix[:, q], q)
    return amps


def apply_circuit_to_states(states: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Apply a circuit in place to a batch of statevector rows."""
    if states.shape[1] != (1 << circuit.n_qubits):
        raise ValueError(
            f"state rows of length {states.shape[1]} do not match "
            f"{circuit.n_qubits}-qubit circuit"
        )
    for gate in circuit.gates:
        _apply_gate_rows(states, circuit.n_qubits, gate)
    return states


def batch_expectations(circuit: Circuit, features: np.ndarray,
                       qubit: int = READOUT_QUBIT) -> np.ndarray:
    """Readout <Z_qubit> for each feature row after encode + circuit."""
    states = encode_states(features, circuit.n_qubits)
    apply_circuit_to_states(states, circuit)
    return _expectations_rows(states, circuit.n_qubits, qubit)


def predict_labels(circuit: Circuit, features: np.ndarray) -> np.ndarray:
    """Predicted labels for each feature row (1 where p1 >= 0.5)."""
    return (batch_expectations(circuit, features) <= 0.0).astype(np.int64)
