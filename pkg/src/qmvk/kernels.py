"""Kernel construction: circuit-overlap kernels, a Gaussian baseline,
their gradients, convex combination, and a plain-text matrix format.

Overlap kernels come from batched statevectors: with S holding one encoded
state per row, c = S S^H has c[i,j] = <psi_j|psi_i> and K = |c|^2. Entries
are evaluated once per unordered pair (the upper triangle is mirrored), the
diagonal is exactly 1 and everything is clamped into [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qsim import engine
from .qsim.ansatz import AnsatzParams, build_overlap_circuit
from .qsim.simulator import run_circuit, zero_probability


def _check_matrix_input(X: np.ndarray, min_rows: int = 1) -> np.ndarray:
    try:
        X = np.asarray(X, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"input rows must form a rectangular matrix: {exc}") from exc
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D batch of inputs, got shape {X.shape}")
    if X.shape[0] < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("inputs must be finite")
    return X


def _mirror_upper(K: np.ndarray) -> np.ndarray:
    """Keep the upper triangle and reflect it below the diagonal."""
    upper = np.triu(K, 1)
    return upper + upper.T + np.diag(np.diag(K))


def quantum_kernel_value(
    x_i: np.ndarray, x_j: np.ndarray, params: AnsatzParams
) -> float:
    """One kernel entry through the literal overlap circuit (reference path)."""
    circuit = build_overlap_circuit(x_i, x_j, params)
    return zero_probability(run_circuit(circuit))


def quantum_kernel_matrix(X: np.ndarray, params: AnsatzParams) -> np.ndarray:
    """Train-set kernel matrix via batched statevectors."""
    X = _check_matrix_input(X, min_rows=2)
    S = engine.encode_states(X, params)
    c = S @ S.conj().T
    K = np.abs(c) ** 2
    K = _mirror_upper(K)
    np.fill_diagonal(K, 1.0)
    return np.clip(K, 0.0, 1.0)


def quantum_kernel_gradient(
    x_i: np.ndarray, x_j: np.ndarray, params: AnsatzParams
) -> np.ndarray:
    """d kappa(x_i, x_j) / d(betas, gammas), length 2 * depth."""
    pair = np.stack(
        [np.asarray(x_i, dtype=np.float64), np.asarray(x_j, dtype=np.float64)]
    )
    S, J = engine.encode_states_with_jacobian(pair, params)
    c = np.vdot(S[1], S[0])
    grad = np.empty(params.num_params, dtype=np.float64)
    for l in range(params.num_params):
        dc = np.vdot(S[1], J[0, l]) + np.vdot(J[1, l], S[0])
        grad[l] = 2.0 * (np.conj(c) * dc).real
    return grad


def quantum_kernel_matrix_with_gradient(
    X: np.ndarray, params: AnsatzParams
) -> tuple[np.ndarray, np.ndarray]:
    """Kernel matrix plus per-entry parameter gradients, shape (N, N, 2*depth)."""
    X = _check_matrix_input(X, min_rows=2)
    S, J = engine.encode_states_with_jacobian(X, params)
    n = X.shape[0]
    nparams = params.num_params
    c = S @ S.conj().T
    K = _mirror_upper(np.abs(c) ** 2)
    np.fill_diagonal(K, 1.0)
    K = np.clip(K, 0.0, 1.0)
    G = np.empty((n, n, nparams), dtype=np.float64)
    c_conj = np.conj(c)
    for l in range(nparams):
        A = J[:, l, :] @ S.conj().T
        dc = A + A.conj().T
        G[:, :, l] = 2.0 * (c_conj * dc).real
    for l in range(nparams):
        G[:, :, l] = _mirror_upper(G[:, :, l])
        np.fill_diagonal(G[:, :, l], 0.0)
    return K, G


def cross_kernel_matrix(
    X_left: np.ndarray, X_right: np.ndarray, params: AnsatzParams
) -> np.ndarray:
    """Rectangular kernel block between two input sets (rows x rows)."""
    X_left = _check_matrix_input(X_left)
    X_right = _check_matrix_input(X_right)
    if X_left.shape[1] != X_right.shape[1]:
        raise ValueError(
            f"feature counts differ: {X_left.shape[1]} vs {X_right.shape[1]}"
        )
    S_left = engine.encode_states(X_left, params)
    S_right = engine.encode_states(X_right, params)
    K = np.abs(S_left @ S_right.conj().T) ** 2
    return np.clip(K, 0.0, 1.0)


def mean_pairwise_distance(X: np.ndarray) -> float:
    """Mean Euclidean distance over unordered row pairs (Gaussian bandwidth)."""
    X = _check_matrix_input(X, min_rows=2)
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    iu = np.triu_indices(X.shape[0], k=1)
    sigma = float(np.mean(dist[iu]))
    if sigma <= 0.0:
        raise ValueError("all rows are identical, bandwidth would be zero")
    return sigma


def gaussian_kernel_matrix(X: np.ndarray, sigma: float | None = None) -> np.ndarray:
    """exp(-|x_i - x_j|^2 / (2 sigma^2)); sigma defaults to the mean pairwise distance."""
    X = _check_matrix_input(X, min_rows=2)
    if sigma is None:
        sigma = mean_pairwise_distance(X)
    if sigma <= 0.0 or not np.isfinite(sigma):
        raise ValueError(f"sigma must be positive and finite, got {sigma}")
    diff = X[:, None, :] - X[None, :, :]
    sq = np.sum(diff * diff, axis=-1)
    K = np.exp(-sq / (2.0 * sigma * sigma))
    np.fill_diagonal(K, 1.0)
    return K


def gaussian_cross_kernel_matrix(
    X_left: np.ndarray, X_right: np.ndarray, sigma: float
) -> np.ndarray:
    """Rectangular Gaussian block with a bandwidth fixed by the caller."""
    X_left = _check_matrix_input(X_left)
    X_right = _check_matrix_input(X_right)
    if X_left.shape[1] != X_right.shape[1]:
        raise ValueError(
            f"feature counts differ: {X_left.shape[1]} vs {X_right.shape[1]}"
        )
    if sigma <= 0.0 or not np.isfinite(sigma):
        raise ValueError(f"sigma must be positive and finite, got {sigma}")
    diff = X_left[:, None, :] - X_right[None, :, :]
    sq = np.sum(diff * diff, axis=-1)
    return np.exp(-sq / (2.0 * sigma * sigma))


def combine_kernels(matrices, weights) -> np.ndarray:
    """Weighted sum of same-shape kernel matrices with nonnegative weights."""
    if isinstance(matrices, ViewKernelSet):
        matrices = matrices.matrices
    if len(matrices) == 0:
        raise ValueError("need at least one kernel matrix")
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)
    if weights.shape[0] != len(matrices):
        raise ValueError(
            f"got {len(matrices)} matrices but {weights.shape[0]} weights"
        )
    if not np.all(np.isfinite(weights)) or np.any(weights < 0.0):
        raise ValueError("weights must be finite and nonnegative")
    shape = matrices[0].shape
    out = np.zeros(shape, dtype=np.float64)
    for K, w in zip(matrices, weights):
        if K.shape != shape:
            raise ValueError(f"kernel shape mismatch: {K.shape} vs {shape}")
        out += w * K
    return out


@dataclass
class ViewKernelSet:
    """Per-view train kernels sharing one instance ordering.

    `params` holds circuit parameters for overlap kernels, `sigmas` holds
    bandwidths for Gaussian kernels; either may be None for the other family.
    """

    names: list[str]
    matrices: list[np.ndarray]
    params: list[AnsatzParams] | None = None
    sigmas: list[float] | None = None

    def __post_init__(self) -> None:
        if len(self.names) == 0 or len(self.names) != len(self.matrices):
            raise ValueError("names and matrices must be non-empty and equal-length")
        shape = self.matrices[0].shape
        for K in self.matrices:
            if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape != shape:
                raise ValueError("all view kernels must be square and same-shape")
        if self.params is not None and len(self.params) != len(self.names):
            raise ValueError("params must match the number of views")
        if self.sigmas is not None and len(self.sigmas) != len(self.names):
            raise ValueError("sigmas must match the number of views")

    @property
    def num_views(self) -> int:
        return len(self.names)

    @property
    def num_instances(self) -> int:
        return self.matrices[0].shape[0]


def save_kernel_matrix(path, K: np.ndarray) -> None:
    """Plain text: first line "rows cols", then one row per line, 17 significant digits."""
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {K.shape}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{K.shape[0]} {K.shape[1]}\n")
        for row in K:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_kernel_matrix(path) -> np.ndarray:
    """Inverse of save_kernel_matrix, validating the declared shape."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"malformed header in {path!s}")
        rows, cols = int(header[0]), int(header[1])
        K = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    if K.shape != (rows, cols):
        raise ValueError(
            f"declared shape ({rows}, {cols}) but found {K.shape} in {path!s}"
        )
    return K
