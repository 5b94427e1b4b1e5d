"""Soft-margin binary SVM on precomputed kernels.

The dual is solved by maximal-violating-pair working-set selection: pick the
most violating index pair, take the exact two-variable step along the
equality constraint, repeat until the KKT gap m - M falls within tol. All
tie-breaks go to the first index, so training is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SvmModel:
    """Fitted dual state; `decision_values` caches K @ (alpha*y) + bias on the train set."""

    alpha: np.ndarray
    bias: float
    support_indices: np.ndarray
    labels: np.ndarray
    C: float
    decision_values: np.ndarray


def _check_fit_inputs(K: np.ndarray, labels: np.ndarray, C: float):
    K = np.asarray(K, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"kernel must be square, got shape {K.shape}")
    n = K.shape[0]
    if labels.shape[0] != n:
        raise ValueError(f"got {n} instances but {labels.shape[0]} labels")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if not (np.any(labels == 1.0) and np.any(labels == -1.0)):
        raise ValueError("both classes must be present")
    if np.max(np.abs(K - K.T)) > 1e-8:
        raise ValueError("kernel matrix must be symmetric")
    if C <= 0.0 or not np.isfinite(C):
        raise ValueError(f"C must be positive and finite, got {C}")
    return K, labels


def svm_fit(
    K: np.ndarray,
    labels: np.ndarray,
    C: float = 1.0,
    tol: float = 1e-3,
    max_steps: int = 1_000_000,
) -> SvmModel:
    """Train on a precomputed kernel; returns the fitted dual model."""
    K, y = _check_fit_inputs(K, labels, C)
    n = K.shape[0]
    Q = np.outer(y, y) * K
    alpha = np.zeros(n)
    grad = -np.ones(n)

    for _ in range(max_steps):
        up_mask = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low_mask = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        scores = -y * grad
        up_scores = np.where(up_mask, scores, -np.inf)
        low_scores = np.where(low_mask, scores, np.inf)
        i = int(np.argmax(up_scores))
        j = int(np.argmin(low_scores))
        m_up = up_scores[i]
        m_low = low_scores[j]
        if m_up - m_low <= tol:
            break
        # step t along +y_i e_i, -y_j e_j keeps sum(alpha*y) fixed
        quad = Q[i, i] + Q[j, j] - 2.0 * y[i] * y[j] * Q[i, j]
        t = (m_up - m_low) / max(quad, 1e-12)
        t = min(t, C - alpha[i] if y[i] > 0 else alpha[i])
        t = min(t, alpha[j] if y[j] > 0 else C - alpha[j])
        alpha[i] += y[i] * t
        alpha[j] -= y[j] * t
        alpha[i] = min(max(alpha[i], 0.0), C)
        alpha[j] = min(max(alpha[j], 0.0), C)
        grad += t * (y[i] * Q[i] - y[j] * Q[j])
    else:
        raise RuntimeError(f"SVM did not reach the KKT gap in {max_steps} steps")

    free = (alpha > 1e-8 * C) & (alpha < C * (1.0 - 1e-8))
    if np.any(free):
        bias = float(np.mean(-y[free] * grad[free]))
    else:
        bias = float((m_up + m_low) / 2.0)
    support = np.flatnonzero(alpha > 1e-12)
    decision = K @ (alpha * y) + bias
    return SvmModel(
        alpha=alpha,
        bias=bias,
        support_indices=support,
        labels=y,
        C=float(C),
        decision_values=decision,
    )


def svm_decision_values(model: SvmModel, K_cross: np.ndarray) -> np.ndarray:
    """K_cross rows are test instances, columns align with the training set."""
    K_cross = np.asarray(K_cross, dtype=np.float64)
    if K_cross.ndim != 2 or K_cross.shape[1] != model.alpha.shape[0]:
        raise ValueError(
            f"cross kernel must have {model.alpha.shape[0]} columns, "
            f"got shape {K_cross.shape}"
        )
    return K_cross @ (model.alpha * model.labels) + model.bias


def svm_predict(model: SvmModel, K_cross: np.ndarray) -> np.ndarray:
    """Signs of the decision values; exact zero goes to +1."""
    values = svm_decision_values(model, K_cross)
    return np.where(values >= 0.0, 1.0, -1.0)


def accuracy(predicted: np.ndarray, actual: np.ndarray) -> float:
    predicted = np.asarray(predicted, dtype=np.float64).reshape(-1)
    actual = np.asarray(actual, dtype=np.float64).reshape(-1)
    if predicted.shape != actual.shape or predicted.shape[0] == 0:
        raise ValueError("prediction and label vectors must be equal-length, non-empty")
    return float(np.mean(predicted == actual))


def save_svm_model(path, model: SvmModel) -> None:
    """Plain text key=value lines; vectors are comma-joined with full precision."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"C={model.C!r}\n")
        fh.write(f"bias={model.bias!r}\n")
        fh.write("alpha=" + ",".join(repr(float(v)) for v in model.alpha) + "\n")
        fh.write("labels=" + ",".join(repr(float(v)) for v in model.labels) + "\n")
        fh.write(
            "support=" + ",".join(str(int(v)) for v in model.support_indices) + "\n"
        )
        fh.write(
            "decision="
            + ",".join(repr(float(v)) for v in model.decision_values)
            + "\n"
        )


def load_svm_model(path) -> SvmModel:
    fields: dict[str, str] = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            fields[key] = value
    try:
        support = fields["support"]
        return SvmModel(
            alpha=np.array([float(v) for v in fields["alpha"].split(",")]),
            bias=float(fields["bias"]),
            support_indices=(
                np.array([int(v) for v in support.split(",")], dtype=np.int64)
                if support
                else np.empty(0, dtype=np.int64)
            ),
            labels=np.array([float(v) for v in fields["labels"].split(",")]),
            C=float(fields["C"]),
            decision_values=np.array(
                [float(v) for v in fields["decision"].split(",")]
            ),
        )
    except KeyError as exc:
        raise ValueError(f"missing field {exc} in {path!s}") from exc
