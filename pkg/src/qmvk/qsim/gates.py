"""Gate, circuit and state containers for the statevector simulator.

Basis ordering is little-endian throughout: qubit 0 is the least significant
bit of the basis index, so basis index 5 = 0b101 has qubits 0 and 2 set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GATE_H = "H"
GATE_RX = "RX"
GATE_RY = "RY"
GATE_RZ = "RZ"
GATE_CNOT = "CNOT"

ROTATION_GATES = frozenset({GATE_RX, GATE_RY, GATE_RZ})
VALID_GATES = ROTATION_GATES | {GATE_H, GATE_CNOT}

MAX_QUBITS = 12


@dataclass(frozen=True)
class GateOp:
    """A single gate application.

    `kind` is one of H, RX, RY, RZ, CNOT. Rotations carry an angle, CNOT
    carries a control qubit, H carries neither.
    """

    kind: str
    target: int
    control: int | None = None
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in VALID_GATES:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.target < 0:
            raise ValueError(f"negative target qubit {self.target}")
        if self.kind == GATE_CNOT:
            if self.control is None:
                raise ValueError("CNOT requires a control qubit")
            if self.control < 0:
                raise ValueError(f"negative control qubit {self.control}")
            if self.control == self.target:
                raise ValueError("CNOT control and target must differ")
            if self.angle is not None:
                raise ValueError("CNOT does not take an angle")
        else:
            if self.control is not None:
                raise ValueError(f"{self.kind} does not take a control qubit")
            if self.kind in ROTATION_GATES:
                if self.angle is None or not np.isfinite(self.angle):
                    raise ValueError(f"{self.kind} requires a finite angle")
            elif self.angle is not None:
                raise ValueError("H does not take an angle")

    def inverse(self) -> GateOp:
        """Gatewise inverse: rotations flip their angle, H and CNOT are involutions."""
        if self.kind in ROTATION_GATES:
            return GateOp(self.kind, self.target, angle=-self.angle)
        return self


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over a fixed qubit count."""

    num_qubits: int
    gates: tuple[GateOp, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(
                f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}"
            )
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            if gate.target >= self.num_qubits:
                raise ValueError(
                    f"gate targets qubit {gate.target} but circuit has "
                    f"{self.num_qubits} qubits"
                )
            if gate.control is not None and gate.control >= self.num_qubits:
                raise ValueError(
                    f"gate controls on qubit {gate.control} but circuit has "
                    f"{self.num_qubits} qubits"
                )

    def __len__(self) -> int:
        return len(self.gates)


@dataclass
class StateVector:
    """Dense complex128 amplitudes over all 2**num_qubits basis states."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(
                f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}"
            )
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        expected = (2**self.num_qubits,)
        if self.amplitudes.shape != expected:
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} does not match "
                f"{self.num_qubits} qubits (expected {expected})"
            )

    @classmethod
    def zero(cls, num_qubits: int) -> StateVector:
        """The all-zeros computational basis state |0...0>."""
        amps = np.zeros(2**num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(num_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> StateVector:
        return StateVector(self.num_qubits, self.amplitudes.copy())
