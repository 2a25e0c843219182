"""Independent reference implementations used as test oracles.

Everything here recomputes expected values from first principles with
dense 2^n x 2^n matrices, deliberately avoiding the package's stride
kernels.  Keep it slow and obvious.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from swarmvqc.circuit import Circuit, Gate


def dense_rotation(kind: str, angle: float) -> np.ndarray:
    h = angle / 2.0
    if kind == "RX":
        return np.array(
            [[math.cos(h), -1j * math.sin(h)],
             [-1j * math.sin(h), math.cos(h)]], dtype=complex)
    if kind == "RY":
        return np.array(
            [[math.cos(h), -math.sin(h)],
             [math.sin(h), math.cos(h)]], dtype=complex)
    if kind == "RZ":
        return np.array(
            [[cmath.exp(-1j * h), 0.0],
             [0.0, cmath.exp(1j * h)]], dtype=complex)
    raise ValueError(kind)


def dense_single_qubit(matrix: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    # Little-endian: qubit k is bit k of the basis index, so the operator
    # sits between identity blocks of size 2^(n-1-k) (high) and 2^k (low).
    high = np.eye(2 ** (n_qubits - 1 - qubit))
    low = np.eye(2 ** qubit)
    return np.kron(np.kron(high, matrix), low)


def dense_cnot(control: int, target: int, n_qubits: int) -> np.ndarray:
    dim = 2 ** n_qubits
    matrix = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        j = i ^ (1 << target) if (i >> control) & 1 else i
        matrix[j, i] = 1.0
    return matrix


def dense_gate(gate: Gate, n_qubits: int) -> np.ndarray:
    if gate.kind == "CNOT":
        return dense_cnot(gate.control, gate.target, n_qubits)
    return dense_single_qubit(dense_rotation(gate.kind, gate.angle), gate.target, n_qubits)


def dense_simulate(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    state = np.zeros(2 ** circuit.n_qubits, dtype=complex)
    state[0] = 1.0
    if initial is not None:
        state = np.asarray(initial, dtype=complex).copy()
    for gate in circuit.gates:
        state = dense_gate(gate, circuit.n_qubits) @ state
    return state


def dense_encoded_state(features: np.ndarray) -> np.ndarray:
    n = len(features)
    state = np.zeros(2 ** n, dtype=complex)
    state[0] = 1.0
    for q, angle in enumerate(features):
        state = dense_single_qubit(dense_rotation("RY", angle), q, n) @ state
    return state


def dense_expectation_z(state: np.ndarray, qubit: int) -> float:
    total = 0.0
    for index, amplitude in enumerate(state):
        sign = 1.0 if ((index >> qubit) & 1) == 0 else -1.0
        total += sign * abs(amplitude) ** 2
    return total


def random_circuit(rng: np.random.Generator, n_qubits: int, n_gates: int) -> Circuit:
    gates = []
    for _ in range(n_gates):
        kind = rng.choice(["RX", "RY", "RZ", "CNOT"])
        if kind == "CNOT" and n_qubits >= 2:
            control, target = rng.choice(n_qubits, size=2, replace=False)
            gates.append(Gate("CNOT", target=int(target), control=int(control)))
        else:
            kind = kind if kind != "CNOT" else "RY"
            gates.append(Gate(str(kind), target=int(rng.integers(n_qubits)),
                              angle=float(rng.uniform(0.0, 2.0 * math.pi))))
    return Circuit(n_qubits, tuple(gates))
