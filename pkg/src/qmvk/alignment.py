"""Kernel-target alignment scores, neighbor sets, and their gradients.

The global score compares a kernel with the label outer product yy^T:
TA(K) = sum_ij y_i y_j K_ij / (N * sqrt(sum_ij K_ij^2)); the sqrt of
<yy^T, yy^T> = N^2 is folded into the 1/N. The local score averages the
same quantity over k-sized neighborhoods (normalizer k instead of N), and
the hybrid score blends the two with a weight lam in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NEIGHBOR_MODES = ("distance", "kernel")


@dataclass(frozen=True)
class AlignmentConfig:
    """Hybrid weight `lam` (0 = all local, 1 = all global) and neighborhood size `k`."""

    lam: float = 0.125
    k: int = 8

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")


@dataclass(frozen=True)
class NeighborSets:
    """One row of neighbor indices per anchor instance.

    With include_self (the default) each row holds the anchor itself first,
    then the k-1 closest others; without it the row holds the k closest
    others and the anchor is absent.
    """

    indices: np.ndarray
    mode: str
    include_self: bool = True

    def __post_init__(self) -> None:
        indices = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", indices)
        if self.mode not in NEIGHBOR_MODES:
            raise ValueError(f"mode must be one of {NEIGHBOR_MODES}, got {self.mode!r}")
        if indices.ndim != 2 or indices.shape[1] < 1:
            raise ValueError(f"indices must be (N, k) with k >= 1, got {indices.shape}")
        if np.any(indices < 0):
            raise ValueError("negative neighbor index")
        for i, row in enumerate(indices):
            if len(set(row.tolist())) != row.shape[0]:
                raise ValueError(f"duplicate neighbor indices in row {i}")
            if self.include_self and row[0] != i:
                raise ValueError(f"row {i} must start with its anchor, got {row[0]}")
            if not self.include_self and i in row:
                raise ValueError(f"row {i} contains its anchor {i}")

    @property
    def num_anchors(self) -> int:
        return int(self.indices.shape[0])

    @property
    def k(self) -> int:
        return int(self.indices.shape[1])


def _check_labels(labels: np.ndarray, n: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    if labels.shape[0] != n:
        raise ValueError(f"expected {n} labels, got {labels.shape[0]}")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    return labels


def _check_kernel(K: np.ndarray) -> np.ndarray:
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"kernel must be square, got shape {K.shape}")
    return K


def frobenius_inner(A: np.ndarray, B: np.ndarray) -> float:
    """Entrywise inner product <A, B> = sum_ij A_ij B_ij."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.sum(A * B))


def target_kernel(labels: np.ndarray) -> np.ndarray:
    """The label outer product yy^T."""
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    labels = _check_labels(labels, labels.shape[0])
    return np.outer(labels, labels)


def target_alignment(K: np.ndarray, labels: np.ndarray) -> float:
    """Global alignment of K with yy^T, in [-1, 1]."""
    K = _check_kernel(K)
    n = K.shape[0]
    labels = _check_labels(labels, n)
    v = float(np.sum(K * K))
    if v <= 0.0:
        raise ValueError("kernel matrix is identically zero")
    u = float(labels @ K @ labels)
    return u / (n * np.sqrt(v))


def local_target_alignment(
    K: np.ndarray, labels: np.ndarray, neighbors: NeighborSets
) -> float:
    """Mean alignment of the neighborhood submatrices with their label blocks."""
    K = _check_kernel(K)
    n = K.shape[0]
    labels = _check_labels(labels, n)
    if neighbors.num_anchors != n:
        raise ValueError(
            f"neighbor sets cover {neighbors.num_anchors} anchors, kernel has {n}"
        )
    if np.any(neighbors.indices >= n):
        raise ValueError("neighbor index out of range for this kernel")
    total = 0.0
    for i in range(n):
        idx = neighbors.indices[i]
        sub = K[np.ix_(idx, idx)]
        y_sub = labels[idx]
        v = float(np.sum(sub * sub))
        if v <= 0.0:
            raise ValueError(f"neighborhood submatrix of anchor {i} is identically zero")
        u = float(y_sub @ sub @ y_sub)
        total += u / (idx.shape[0] * np.sqrt(v))
    return total / n


def hybrid_alignment(
    K: np.ndarray,
    labels: np.ndarray,
    neighbors: NeighborSets,
    config: AlignmentConfig,
) -> float:
    """(1 - lam) * local + lam * global."""
    lam = config.lam
    local_part = local_target_alignment(K, labels, neighbors) if lam < 1.0 else 0.0
    global_part = target_alignment(K, labels) if lam > 0.0 else 0.0
    return (1.0 - lam) * local_part + lam * global_part


def knn_by_distance(X: np.ndarray, k: int, include_self: bool = True) -> NeighborSets:
    """Neighbor rows by Euclidean distance; ties broken by smaller index."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D batch of inputs, got shape {X.shape}")
    n = X.shape[0]
    n_others = k - 1 if include_self else k
    if not 0 <= n_others <= n - 1:
        raise ValueError(f"k={k} is out of range for {n} instances")
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sum(diff * diff, axis=-1)
    rows = np.empty((n, k), dtype=np.int64)
    order_cols = np.arange(n)
    for i in range(n):
        order = np.lexsort((order_cols, dist[i]))
        others = order[order != i][:n_others]
        rows[i] = np.concatenate(([i], others)) if include_self else others
    return NeighborSets(rows, mode="distance", include_self=include_self)


def knn_by_kernel(K: np.ndarray, k: int, include_self: bool = True) -> NeighborSets:
    """Neighbor rows by kernel similarity (largest first); ties take the smaller index."""
    K = _check_kernel(K)
    n = K.shape[0]
    n_others = k - 1 if include_self else k
    if not 0 <= n_others <= n - 1:
        raise ValueError(f"k={k} is out of range for {n} instances")
    rows = np.empty((n, k), dtype=np.int64)
    order_cols = np.arange(n)
    for i in range(n):
        order = np.lexsort((order_cols, -K[i]))
        others = order[order != i][:n_others]
        rows[i] = np.concatenate(([i], others)) if include_self else others
    return NeighborSets(rows, mode="kernel", include_self=include_self)


def alignment_gradient(
    K: np.ndarray, K_grad: np.ndarray, labels: np.ndarray
) -> np.ndarray:
    """Parameter gradient of target_alignment given per-entry kernel gradients.

    With u = <yy^T, K>, v = <K, K>: d TA = (u' v - u <K, K'>) / (N v^(3/2)).
    """
    K = _check_kernel(K)
    n = K.shape[0]
    labels = _check_labels(labels, n)
    K_grad = np.asarray(K_grad, dtype=np.float64)
    if K_grad.shape[:2] != (n, n) or K_grad.ndim != 3:
        raise ValueError(
            f"kernel gradient must be (N, N, L) with N={n}, got {K_grad.shape}"
        )
    v = float(np.sum(K * K))
    if v <= 0.0:
        raise ValueError("kernel matrix is identically zero")
    yy = np.outer(labels, labels)
    u = float(np.sum(yy * K))
    u_prime = np.einsum("ij,ijl->l", yy, K_grad)
    w = np.einsum("ij,ijl->l", K, K_grad)
    return (u_prime * v - u * w) / (n * v**1.5)


def local_alignment_gradients(
    K: np.ndarray,
    K_grad: np.ndarray,
    labels: np.ndarray,
    neighbors: NeighborSets,
) -> np.ndarray:
    """One local-alignment gradient row per anchor, shape (N, L)."""
    K = _check_kernel(K)
    n = K.shape[0]
    labels = _check_labels(labels, n)
    if neighbors.num_anchors != n or np.any(neighbors.indices >= n):
        raise ValueError("neighbor sets do not match this kernel")
    nparams = K_grad.shape[2]
    out = np.empty((n, nparams), dtype=np.float64)
    for i in range(n):
        idx = neighbors.indices[i]
        sub = K[np.ix_(idx, idx)]
        sub_grad = K_grad[np.ix_(idx, idx)]
        out[i] = alignment_gradient(sub, sub_grad, labels[idx])
    return out


def hybrid_alignment_gradient(
    K: np.ndarray,
    K_grad: np.ndarray,
    labels: np.ndarray,
    neighbors: NeighborSets,
    config: AlignmentConfig,
) -> np.ndarray:
    """Gradient of hybrid_alignment with respect to the circuit parameters."""
    lam = config.lam
    nparams = np.asarray(K_grad).shape[2]
    out = np.zeros(nparams, dtype=np.float64)
    if lam < 1.0:
        locals_ = local_alignment_gradients(K, K_grad, labels, neighbors)
        out += (1.0 - lam) * locals_.mean(axis=0)
    if lam > 0.0:
        out += lam * alignment_gradient(K, K_grad, labels)
    return out
