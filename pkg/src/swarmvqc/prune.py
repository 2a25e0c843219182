"""Removal of gates that cannot influence the readout qubit.

Walking the gate list backward while growing a live-qubit set (seeded
with the readout qubit) yields the backward light cone of the readout:
a rotation is kept iff its target is live, and a CNOT is kept iff it
touches any live qubit, in which case both of its qubits become live.
A removed gate therefore commutes past every kept gate that follows it
and acts entirely outside the readout qubit, so deleting it cannot move
a single-qubit Z expectation.  Keeping every CNOT that touches the live
set is deliberately conservative: a CNOT whose target is dead but whose
control is live only decorates dead qubits, yet proving that safe buys
nothing here, and keeping it can never break soundness.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit


@dataclass(frozen=True)
class PruneReport:
    original_count: int
    pruned_count: int
    removed_gates: tuple[int, ...]
    kept_circuit: Circuit


def prune_dead_gates(circuit: Circuit, readout_qubit: int) -> PruneReport:
    """Drop gates outside the backward light cone of ``readout_qubit``."""
    if not 0 <= readout_qubit < circuit.n_qubits:
        raise ValueError(
            f"readout qubit {readout_qubit} out of range for {circuit.n_qubits} qubits"
        )
    live = {readout_qubit}
    keep = [False] * len(circuit.gates)
    for index in range(len(circuit.gates) - 1, -1, -1):
        gate = circuit.gates[index]
        if gate.kind == "CNOT":
            if gate.target in live or gate.control in live:
                keep[index] = True
                live.add(gate.target)
                live.add(gate.control)
        elif gate.target in live:
            keep[index] = True
    kept = tuple(g for g, k in zip(circuit.gates, keep) if k)
    removed = tuple(i for i, k in enumerate(keep) if not k)
    return PruneReport(
        original_count=len(circuit.gates),
        pruned_count=len(kept),
        removed_gates=removed,
        kept_circuit=Circuit(circuit.n_qubits, kept),
    )


def effective_gate_count(circuit: Circuit, readout_qubit: int) -> int:
    return prune_dead_gates(circuit, readout_qubit).pruned_count


def format_prune_report(report: PruneReport) -> str:
    lines = [
        f"original gates:  {report.original_count}",
        f"effective gates: {report.pruned_count}",
        f"removed indices: {list(report.removed_gates)}",
    ]
    return "\n".join(lines) + "\n"
