"""Gates, circuits, and the particle-position encoding.

A circuit is an ordered list of gates drawn from a four-gate alphabet
(RX, RY, RZ rotations and CNOT) over a fixed qubit register.  Candidate
circuits are encoded as real vectors in the unit hypercube: each group
of four consecutive slots (g, t, c, a) selects the gate kind, the target
qubit, the control qubit (CNOT only) and the rotation angle (rotations
only).  Slots not used by the selected gate kind are ignored but still
occupy their positions, so the search space dimension is fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

ROTATION_KINDS = ("RX", "RY", "RZ")
GATE_KINDS = ROTATION_KINDS + ("CNOT",)

_TWO_PI = 2.0 * math.pi

# Allowed numerical slack when validating particle components against [0, 1].
POSITION_TOLERANCE = 1e-12


def _normalize_angle(angle: float) -> float:
    """Map an angle into [0, 2*pi).

    Rotation gates are 2*pi-periodic up to a global phase, which is
    unobservable for every readout this package performs.
    """
    a = float(angle) % _TWO_PI
    if a >= _TWO_PI or a < 0.0:  # float modulo can land exactly on 2*pi
        a = 0.0
    return a


@dataclass(frozen=True)
class Gate:
    """One quantum operation: a rotation (kind, target, angle) or a CNOT.

    Rotations carry an angle and no control; CNOTs carry a control and
    no angle, with control != target.
    """

    kind: str
    target: int
    control: int | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.target < 0:
            raise ValueError(f"negative target qubit {self.target}")
        if self.kind == "CNOT":
            if self.control is None:
                raise ValueError("CNOT requires a control qubit")
            if self.angle is not None:
                raise ValueError("CNOT takes no angle")
            if self.control < 0:
                raise ValueError(f"negative control qubit {self.control}")
            if self.control == self.target:
                raise ValueError("CNOT control and target must differ")
        else:
            if self.control is not None:
                raise ValueError(f"{self.kind} takes no control qubit")
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
            object.__setattr__(self, "angle", _normalize_angle(self.angle))

    @property
    def is_rotation(self) -> bool:
        return self.kind != "CNOT"

    def qubits(self) -> tuple[int, ...]:
        if self.kind == "CNOT":
            return (self.control, self.target)
        return (self.target,)


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence over ``n_qubits`` qubits."""

    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for i, gate in enumerate(self.gates):
            for q in gate.qubits():
                if q >= self.n_qubits:
                    raise ValueError(
                        f"gate {i} ({gate.kind}) references qubit {q} "
                        f"on a {self.n_qubits}-qubit circuit"
                    )

    def __len__(self) -> int:
        return len(self.gates)


def round_half_up(x: float) -> int:
    """Round a nonnegative value with halves going up, so 2.5 -> 3.

    Implemented explicitly: platform ``round`` uses banker's rounding.
    """
    return int(math.floor(x + 0.5))


def _slot_to_index(value: float, size: int) -> int:
    """Map a slot in [0, 1] onto {0, ..., size-1}.

    The raw map is round(1 + size * value); values of exactly 1.0 would
    overflow to size + 1, so the result is clamped to the valid range.
    """
    idx = round_half_up(1.0 + size * value)
    return min(max(idx, 1), size) - 1


def decode_particle(position: Sequence[float] | np.ndarray, n_qubits: int) -> Circuit:
    """Decode a particle position in [0, 1]^d into a circuit of d/4 gates.

    Each slot group (g, t, c, a) yields one gate: g selects the kind
    (RX, RY, RZ, CNOT in that order), t the target qubit, c the control
    qubit (CNOT only; shifted to (control+1) mod n_qubits when it
    collides with the target) and a the angle, scaled to [0, 2*pi).
    Decoding is deterministic and total on valid positions.
    """
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be positive, got {n_qubits}")
    values = np.asarray(position, dtype=float)
    if values.ndim != 1:
        raise ValueError(f"position must be a flat vector, got shape {values.shape}")
    if values.size == 0 or values.size % 4 != 0:
        raise ValueError(f"position length must be a positive multiple of 4, got {values.size}")
    if np.any(values < -POSITION_TOLERANCE) or np.any(values > 1.0 + POSITION_TOLERANCE):
        bad = values[(values < -POSITION_TOLERANCE) | (values > 1.0 + POSITION_TOLERANCE)]
        raise ValueError(f"position components outside [0, 1]: {bad[:4]}")
    values = np.clip(values, 0.0, 1.0)

    gates = []
    for g, t, c, a in values.reshape(-1, 4):
        kind = GATE_KINDS[_slot_to_index(g, len(GATE_KINDS))]
        target = _slot_to_index(t, n_qubits)
        if kind == "CNOT":
            control = _slot_to_index(c, n_qubits)
            if control == target:
                control = (control + 1) % n_qubits
            gates.append(Gate("CNOT", target=target, control=control))
        else:
            gates.append(Gate(kind, target=target, angle=_TWO_PI * a))
    return Circuit(n_qubits, tuple(gates))


def circuit_to_text(circuit: Circuit) -> str:
    """Serialize a circuit to the line-based text format.

    First line is ``qubits <n>``, then one gate per line: rotations as
    ``<KIND> <target> <angle>`` and CNOTs as ``CNOT <control> <target>``.
    Angles print with full round-trip precision.
    """
    lines = [f"qubits {circuit.n_qubits}"]
    for gate in circuit.gates:
        if gate.kind == "CNOT":
            lines.append(f"CNOT {gate.control} {gate.target}")
        else:
            lines.append(f"{gate.kind} {gate.target} {gate.angle!r}")
    return "\n".join(lines) + "\n"


def text_to_circuit(text: str) -> Circuit:
    """Parse the text format produced by :func:`circuit_to_text`.

    Blank lines are skipped and ``#`` starts a comment.  Malformed lines
    raise ValueError with the 1-based line number.
    """
    n_qubits = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if n_qubits is None:
                if fields[0] != "qubits" or len(fields) != 2:
                    raise ValueError("expected 'qubits <n>' header")
                n_qubits = int(fields[1])
                if n_qubits < 1:
                    raise ValueError("qubit count must be positive")
                continue
            kind = fields[0]
            if kind == "CNOT":
                if len(fields) != 3:
                    raise ValueError("expected 'CNOT <control> <target>'")
                gate = Gate("CNOT", target=int(fields[2]), control=int(fields[1]))
            elif kind in ROTATION_KINDS:
                if len(fields) != 3:
                    raise ValueError(f"expected '{kind} <target> <angle>'")
                gate = Gate(kind, target=int(fields[1]), angle=float(fields[2]))
            else:
                raise ValueError(f"unknown gate {kind!r}")
            for q in gate.qubits():
                if q >= n_qubits:
                    raise ValueError(f"qubit index {q} out of range for {n_qubits} qubits")
            gates.append(gate)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if n_qubits is None:
        raise ValueError("empty circuit text: missing 'qubits <n>' header")
    return Circuit(n_qubits, tuple(gates))


_QASM_NAMES = {"RX": "rx", "RY": "ry", "RZ": "rz"}


def circuit_to_qasm(circuit: Circuit) -> str:
    """Export to OpenQASM 2.0 text (rotations as rx/ry/rz, CNOT as cx)."""
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.n_qubits}];",
    ]
    for gate in circuit.gates:
        if gate.kind == "CNOT":
            lines.append(f"cx q[{gate.control}],q[{gate.target}];")
        else:
            lines.append(f"{_QASM_NAMES[gate.kind]}({gate.angle!r}) q[{gate.target}];")
    return "\n".join(lines) + "\n"
