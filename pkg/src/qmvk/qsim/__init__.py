"""Dense statevector simulation of the layered encoding circuit.

`gates` and `simulator` form a small general-purpose circuit simulator used
as the reference implementation; `ansatz` builds the specific circuit family;
`engine` exposes batched state/jacobian propagation with a compiled core and
a pure-numpy fallback.
"""

from .gates import Circuit, GateOp, StateVector
from .ansatz import (
    AnsatzParams,
    build_ansatz_circuit,
    build_overlap_circuit,
    cnot_gate_count,
    inverse_circuit,
    single_qubit_gate_count,
)
from .simulator import apply_gate, run_circuit, zero_probability
from . import engine

__all__ = [
    "AnsatzParams",
    "Circuit",
    "GateOp",
    "StateVector",
    "apply_gate",
    "build_ansatz_circuit",
    "build_overlap_circuit",
    "cnot_gate_count",
    "engine",
    "inverse_circuit",
    "run_circuit",
    "single_qubit_gate_count",
    "zero_probability",
]
