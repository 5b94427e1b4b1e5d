"""Backend selection for batched ansatz propagation.

Prefers the compiled core and falls back to the pure-numpy implementation;
set QMVK_PURE_PYTHON=1 to force the fallback. Both backends share entry
points and conventions, so callers only go through this module.
"""

from __future__ import annotations

import os

import numpy as np

from . import _batched
from .ansatz import AnsatzParams
from .gates import MAX_QUBITS

if os.environ.get("QMVK_PURE_PYTHON", "") == "1":
    _backend = _batched
    _backend_name = "python"
else:
    try:
        from . import _core as _backend  # type: ignore[no-redef]

        _backend_name = "compiled"
    except ImportError:
        _backend = _batched
        _backend_name = "python"


def backend_name() -> str:
    """Active backend: "compiled" or "python"."""
    return _backend_name


def _check_batch(X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D input batch, got shape {X.shape}")
    n, d = X.shape
    if n < 1:
        raise ValueError("input batch is empty")
    if not 1 <= d <= MAX_QUBITS:
        raise ValueError(f"feature count must be in [1, {MAX_QUBITS}], got {d}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input batch must be finite")
    return X


def encode_states(X: np.ndarray, params: AnsatzParams) -> np.ndarray:
    """W(x)|0...0> for every row of X, shape (n, 2**d)."""
    X = _check_batch(X)
    return _backend.ansatz_states(X, params.betas, params.gammas)


def encode_states_with_jacobian(
    X: np.ndarray, params: AnsatzParams
) -> tuple[np.ndarray, np.ndarray]:
    """States plus derivative states, ordered betas then gammas."""
    X = _check_batch(X)
    return _backend.ansatz_states_with_jacobian(X, params.betas, params.gammas)
