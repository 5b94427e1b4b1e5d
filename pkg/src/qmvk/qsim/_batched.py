"""Pure-numpy batched propagation of the layered encoding circuit.

Processes a whole batch of inputs at once. The chain entangler
CNOT(q, q+1) RZ(gamma) CNOT(q, q+1) is diagonal in the computational basis
(a phase exp(-i*gamma/2 * z_q * z_{q+1}) per basis state), so the whole
chain sublayer is applied as one precomputed phase vector; the reference
simulator keeps the literal gate sequence.

`ansatz_states_with_jacobian` additionally propagates one derivative state
per parameter (forward mode). Within a layer the RX factors share an angle
and commute, so d/dbeta_p injects sum_q(-i X_q) applied to the state right
after the RX sublayer; likewise d/dgamma_p injects (-i/2) sum_q(Z_q Z_{q+1})
right after the chain sublayer.
"""

from __future__ import annotations

import math

import numpy as np

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _pair(arr: np.ndarray, q: int) -> np.ndarray:
    """View with the target qubit's bit split out: (..., hi, 2, lo)."""
    hi = arr.shape[-1] >> (q + 1)
    return arr.reshape(arr.shape[:-1] + (hi, 2, 1 << q))


def _coef(c, slice_ndim: int):
    """Reshape a per-sample coefficient vector to broadcast over a pair slice."""
    c = np.asarray(c)
    if c.ndim == 0:
        return c
    return c.reshape(c.shape + (1,) * (slice_ndim - 1))


def _apply_h(arr: np.ndarray, q: int) -> None:
    v = _pair(arr, q)
    a0 = v[..., 0, :].copy()
    a1 = v[..., 1, :]
    v[..., 0, :] = (a0 + a1) * _INV_SQRT2
    v[..., 1, :] = (a0 - a1) * _INV_SQRT2


def _apply_ry(arr: np.ndarray, q: int, c, s) -> None:
    v = _pair(arr, q)
    a0 = v[..., 0, :].copy()
    a1 = v[..., 1, :]
    c = _coef(c, a0.ndim)
    s = _coef(s, a0.ndim)
    v[..., 0, :] = c * a0 - s * a1
    v[..., 1, :] = s * a0 + c * a1


def _apply_rx(arr: np.ndarray, q: int, c: float, s: float) -> None:
    v = _pair(arr, q)
    a0 = v[..., 0, :].copy()
    a1 = v[..., 1, :]
    v[..., 0, :] = c * a0 - 1j * s * a1
    v[..., 1, :] = -1j * s * a0 + c * a1


def _zz_sign_sum(d: int) -> np.ndarray:
    """Per basis state: sum over chain links of +1 (equal bits) or -1."""
    idx = np.arange(1 << d)
    total = np.zeros(1 << d, dtype=np.float64)
    for q in range(d - 1):
        equal = ((idx >> q) & 1) == ((idx >> (q + 1)) & 1)
        total += np.where(equal, 1.0, -1.0)
    return total


def _check(x: np.ndarray, betas: np.ndarray, gammas: np.ndarray):
    x = np.ascontiguousarray(x, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64).reshape(-1)
    gammas = np.ascontiguousarray(gammas, dtype=np.float64).reshape(-1)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D input batch, got shape {x.shape}")
    if betas.shape != gammas.shape or betas.shape[0] < 1:
        raise ValueError("betas and gammas must be equal-length and non-empty")
    return x, betas, gammas


def ansatz_states(x: np.ndarray, betas: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """Rows of W(x_i)|0...0> for every input row, shape (n, 2**d)."""
    x, betas, gammas = _check(x, betas, gammas)
    n, d = x.shape
    depth = betas.shape[0]
    dim = 1 << d
    psi = np.zeros((n, dim), dtype=np.complex128)
    psi[:, 0] = 1.0
    for q in range(d):
        _apply_h(psi, q)
    ch = np.cos(x / 2.0)
    sh = np.sin(x / 2.0)
    zsum = _zz_sign_sum(d)
    for p in range(depth):
        for q in range(d):
            _apply_ry(psi, q, ch[:, q], sh[:, q])
        if d > 1:
            psi *= np.exp(-0.5j * gammas[p] * zsum)
        cb, sb = math.cos(betas[p]), math.sin(betas[p])
        for q in range(d):
            _apply_rx(psi, q, cb, sb)
    return psi


def ansatz_states_with_jacobian(
    x: np.ndarray, betas: np.ndarray, gammas: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """States plus per-parameter derivative states.

    Returns (states, jac) with states (n, 2**d) and jac (n, 2*depth, 2**d);
    jac rows 0..depth-1 are d/dbeta_p, rows depth..2*depth-1 are d/dgamma_p.
    """
    x, betas, gammas = _check(x, betas, gammas)
    n, d = x.shape
    depth = betas.shape[0]
    dim = 1 << d
    # slot 0 is the state, slots 1.. are derivative states; gates are unitary
    # and map zero slots to zero, so they can act on every slot at once
    arr = np.zeros((n, 2 * depth + 1, dim), dtype=np.complex128)
    arr[:, 0, 0] = 1.0
    for q in range(d):
        _apply_h(arr, q)
    ch = np.cos(x / 2.0)
    sh = np.sin(x / 2.0)
    zsum = _zz_sign_sum(d)
    for p in range(depth):
        for q in range(d):
            _apply_ry(arr, q, ch[:, q], sh[:, q])
        if d > 1:
            arr *= np.exp(-0.5j * gammas[p] * zsum)
            arr[:, 1 + depth + p, :] += (-0.5j * zsum) * arr[:, 0, :]
        cb, sb = math.cos(betas[p]), math.sin(betas[p])
        for q in range(d):
            _apply_rx(arr, q, cb, sb)
        psi = arr[:, 0, :]
        jb = arr[:, 1 + p, :]
        for q in range(d):
            v = _pair(psi, q)
            vj = _pair(jb, q)
            vj[..., 0, :] += -1j * v[..., 1, :]
            vj[..., 1, :] += -1j * v[..., 0, :]
    states = np.ascontiguousarray(arr[:, 0, :])
    jac = np.ascontiguousarray(arr[:, 1:, :])
    return states, jac
