"""Builders for the layered encoding circuit and its overlap form.

One qubit per feature. The circuit starts with H on every qubit, then repeats
for each layer p: RY(x_q) on every qubit q (the data re-enters every layer),
an open-chain entangler CNOT(q, q+1), RZ(gamma_p) on q+1, CNOT(q, q+1) for
q = 0..d-2, and RX(2 * beta_p) on every qubit. The Hadamards sit at the start
rather than the end so they do not cancel against the inverse copy in the
overlap circuit.

Kernel values are overlaps |<0|W(x_j)^dag W(x_i)|0>|^2, evaluated by running
W(x_i) followed by the gatewise inverse of W(x_j) and reading the |0...0>
probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import GATE_CNOT, GATE_H, GATE_RX, GATE_RY, GATE_RZ, Circuit, GateOp


@dataclass(frozen=True)
class AnsatzParams:
    """Trainable angles: one beta and one gamma per layer."""

    betas: np.ndarray
    gammas: np.ndarray

    def __post_init__(self) -> None:
        betas = np.asarray(self.betas, dtype=np.float64).reshape(-1)
        gammas = np.asarray(self.gammas, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "gammas", gammas)
        if betas.shape[0] == 0:
            raise ValueError("depth must be at least 1")
        if betas.shape[0] != gammas.shape[0]:
            raise ValueError(
                f"betas and gammas must have equal length, got "
                f"{betas.shape[0]} and {gammas.shape[0]}"
            )
        if not (np.all(np.isfinite(betas)) and np.all(np.isfinite(gammas))):
            raise ValueError("parameters must be finite")

    @property
    def depth(self) -> int:
        return int(self.betas.shape[0])

    @property
    def num_params(self) -> int:
        return 2 * self.depth

    @classmethod
    def random(cls, depth: int, rng: np.random.Generator) -> AnsatzParams:
        """Angles drawn uniformly from [0, 2*pi), betas first then gammas."""
        if depth < 1:
            raise ValueError("depth must be at least 1")
        return cls(
            betas=rng.uniform(0.0, 2.0 * np.pi, size=depth),
            gammas=rng.uniform(0.0, 2.0 * np.pi, size=depth),
        )

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> AnsatzParams:
        """Inverse of `as_vector`: first half betas, second half gammas."""
        vec = np.asarray(vec, dtype=np.float64).reshape(-1)
        if vec.shape[0] == 0 or vec.shape[0] % 2 != 0:
            raise ValueError(f"parameter vector length must be even, got {vec.shape[0]}")
        half = vec.shape[0] // 2
        return cls(betas=vec[:half], gammas=vec[half:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.betas, self.gammas])


def _check_input(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"input must be a 1-D feature vector, got shape {x.shape}")
    if x.shape[0] == 0:
        raise ValueError("input vector must have at least one feature")
    if not np.all(np.isfinite(x)):
        raise ValueError("input vector must be finite")
    return x


def build_ansatz_circuit(x: np.ndarray, params: AnsatzParams) -> Circuit:
    """The full encoding circuit W(x) on len(x) qubits."""
    x = _check_input(x)
    d = x.shape[0]
    gates: list[GateOp] = [GateOp(GATE_H, q) for q in range(d)]
    for p in range(params.depth):
        for q in range(d):
            gates.append(GateOp(GATE_RY, q, angle=float(x[q])))
        for q in range(d - 1):
            gates.append(GateOp(GATE_CNOT, q + 1, control=q))
            gates.append(GateOp(GATE_RZ, q + 1, angle=float(params.gammas[p])))
            gates.append(GateOp(GATE_CNOT, q + 1, control=q))
        for q in range(d):
            gates.append(GateOp(GATE_RX, q, angle=2.0 * float(params.betas[p])))
    return Circuit(d, tuple(gates))


def inverse_circuit(circuit: Circuit) -> Circuit:
    """Gatewise inverses in reverse order."""
    return Circuit(
        circuit.num_qubits, tuple(g.inverse() for g in reversed(circuit.gates))
    )


def build_overlap_circuit(
    x_i: np.ndarray, x_j: np.ndarray, params: AnsatzParams
) -> Circuit:
    """W(x_j)^dag W(x_i): its |0...0> probability is the kernel value."""
    x_i = _check_input(x_i)
    x_j = _check_input(x_j)
    if x_i.shape[0] != x_j.shape[0]:
        raise ValueError(
            f"inputs must have equal length, got {x_i.shape[0]} and {x_j.shape[0]}"
        )
    forward = build_ansatz_circuit(x_i, params)
    backward = inverse_circuit(build_ansatz_circuit(x_j, params))
    return Circuit(forward.num_qubits, forward.gates + backward.gates)


def single_qubit_gate_count(d: int, p: int) -> int:
    """Single-qubit gates in W(x): d Hadamards plus p layers of d RY, (d-1) RZ, d RX."""
    if d < 1 or p < 1:
        raise ValueError("d and p must be at least 1")
    return d + p * (3 * d - 1)


def cnot_gate_count(d: int, p: int) -> int:
    """CNOTs in W(x): two per chain link per layer."""
    if d < 1 or p < 1:
        raise ValueError("d and p must be at least 1")
    return 2 * p * (d - 1)
