"""Structure search for variational quantum circuit classifiers.

Swarm optimization picks the gates, wiring, and angles of a small
circuit end to end; a fixed-ansatz gradient baseline, an exact
statevector simulator, and an experiment harness round out the package.
"""

from .circuit import (
    Circuit,
    Gate,
    circuit_to_qasm,
    circuit_to_text,
    decode_particle,
    text_to_circuit,
)
from .simulator import (
    ReadoutResult,
    Statevector,
    angle_encode,
    apply_circuit,
    apply_gate,
    batch_expectations,
    expectation_z,
    init_state,
    run_and_classify,
    sample_expectation,
)
from .pso import SwarmConfig, SwarmResult, optimize, schedule

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "Gate",
    "ReadoutResult",
    "Statevector",
    "SwarmConfig",
    "SwarmResult",
    "angle_encode",
    "apply_circuit",
    "apply_gate",
    "batch_expectations",
    "circuit_to_qasm",
    "circuit_to_text",
    "decode_particle",
    "expectation_z",
    "init_state",
    "optimize",
    "run_and_classify",
    "sample_expectation",
    "schedule",
    "text_to_circuit",
]
