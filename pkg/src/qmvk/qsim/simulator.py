"""Reference statevector simulator: applies one gate at a time.

Slow but straightforward; the batched engines are checked against it.
"""

from __future__ import annotations

import math

import numpy as np

from .gates import (
    GATE_CNOT,
    GATE_H,
    GATE_RX,
    GATE_RY,
    GATE_RZ,
    Circuit,
    GateOp,
    StateVector,
)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _check_qubits(gate: GateOp, num_qubits: int) -> None:
    if gate.target >= num_qubits:
        raise ValueError(
            f"gate targets qubit {gate.target} but state has {num_qubits} qubits"
        )
    if gate.control is not None and gate.control >= num_qubits:
        raise ValueError(
            f"gate controls on qubit {gate.control} but state has {num_qubits} qubits"
        )


def _apply_inplace(amps: np.ndarray, num_qubits: int, gate: GateOp) -> None:
    """Apply `gate` to a flat amplitude array, mutating it."""
    if gate.kind == GATE_CNOT:
        idx = np.arange(amps.shape[0])
        src = idx[((idx >> gate.control) & 1 == 1) & ((idx >> gate.target) & 1 == 0)]
        dst = src | (1 << gate.target)
        tmp = amps[src].copy()
        amps[src] = amps[dst]
        amps[dst] = tmp
        return
    q = gate.target
    # view axes: (higher bits, bit q, lower bits)
    view = amps.reshape(amps.shape[0] >> (q + 1), 2, 1 << q)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    if gate.kind == GATE_H:
        view[:, 0, :] = (a0 + a1) * _INV_SQRT2
        view[:, 1, :] = (a0 - a1) * _INV_SQRT2
    elif gate.kind == GATE_RY:
        c, s = math.cos(gate.angle / 2.0), math.sin(gate.angle / 2.0)
        view[:, 0, :] = c * a0 - s * a1
        view[:, 1, :] = s * a0 + c * a1
    elif gate.kind == GATE_RX:
        c, s = math.cos(gate.angle / 2.0), math.sin(gate.angle / 2.0)
        view[:, 0, :] = c * a0 - 1j * s * a1
        view[:, 1, :] = -1j * s * a0 + c * a1
    elif gate.kind == GATE_RZ:
        half = gate.angle / 2.0
        view[:, 0, :] = a0 * complex(math.cos(half), -math.sin(half))
        view[:, 1, :] = a1 * complex(math.cos(half), math.sin(half))
    else:  # pragma: no cover - GateOp validation rules this out
        raise ValueError(f"unknown gate kind {gate.kind!r}")


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Return the state after one gate; the input state is untouched."""
    _check_qubits(gate, state.num_qubits)
    amps = state.amplitudes.copy()
    _apply_inplace(amps, state.num_qubits, gate)
    return StateVector(state.num_qubits, amps)


def run_circuit(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Run every gate in order starting from `initial` (default |0...0>)."""
    if initial is None:
        initial = StateVector.zero(circuit.num_qubits)
    elif initial.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"initial state has {initial.num_qubits} qubits, circuit has "
            f"{circuit.num_qubits}"
        )
    amps = initial.amplitudes.copy()
    for gate in circuit.gates:
        _apply_inplace(amps, circuit.num_qubits, gate)
    return StateVector(circuit.num_qubits, amps)


def zero_probability(state: StateVector) -> float:
    """Probability of measuring |0...0>, clamped into [0, 1]."""
    p = float(abs(state.amplitudes[0]) ** 2)
    return min(max(p, 0.0), 1.0)
