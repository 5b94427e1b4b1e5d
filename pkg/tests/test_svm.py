"""Precomputed-kernel SVM: dual feasibility, oracles, prediction, serialization."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qmvk.svm import (
    accuracy,
    load_svm_model,
    save_svm_model,
    svm_decision_values,
    svm_fit,
    svm_predict,
)


def random_instance(rng, n, separable):
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    y[0], y[1] = 1.0, -1.0  # both classes guaranteed
    if separable:
        base = np.outer(y, y).astype(np.float64)
        noise = rng.normal(scale=0.05, size=(n, n))
        K = base + noise @ noise.T
    else:
        A = rng.normal(size=(n, n))
        K = A @ A.T
    K /= np.abs(K).max()
    K = (K + K.T) / 2
    np.fill_diagonal(K, 1.0)
    # Shift to PSD if noise pushed an eigenvalue slightly negative.
    w = np.linalg.eigvalsh(K).min()
    if w < 0:
        K += (1e-10 - w) * np.eye(n)
    return K, y


def test_identity_kernel_oracle():
    K = np.eye(2)
    y = np.array([1.0, -1.0])
    model = svm_fit(K, y, C=1.0)
    assert_allclose(model.alpha, [1.0, 1.0], atol=1e-9)
    assert model.bias == pytest.approx(0.0, abs=1e-9)
    assert svm_predict(model, K).tolist() == [1, -1]


def test_ideal_kernel_reaches_full_training_accuracy():
    rng = np.random.default_rng(0)
    y = np.where(rng.random(12) < 0.5, -1.0, 1.0)
    y[:2] = [1.0, -1.0]
    K = np.outer(y, y)
    model = svm_fit(K, y, C=1.0)
    pred = svm_predict(model, K)
    assert accuracy(pred, y) == 1.0


def test_contradictory_pair_fits_at_half_accuracy():
    K = np.ones((2, 2))
    y = np.array([1.0, -1.0])
    model = svm_fit(K, y, C=1.0)
    pred = svm_predict(model, K)
    assert accuracy(pred, y) == 0.5


def test_sign_zero_predicts_positive():
    K = np.eye(2)
    y = np.array([1.0, -1.0])
    model = svm_fit(K, y, C=1.0)
    # Zero cross row with b = 0: decision value is exactly 0 -> +1.
    pred = svm_predict(model, np.zeros((1, 2)))
    assert pred.tolist() == [1]


def test_zero_row_with_positive_bias():
    y = np.array([1.0, -1.0, 1.0])
    K = np.outer(y, y) * 0.9 + 0.1 * np.eye(3)
    np.fill_diagonal(K, 1.0)
    model = svm_fit(K, y, C=10.0)
    expect = 1 if model.bias >= 0 else -1
    assert svm_predict(model, np.zeros((1, 3))).tolist() == [expect]


def test_dual_feasibility_on_random_instances():
    rng = np.random.default_rng(1)
    for trial in range(30):
        n = int(rng.integers(4, 20))
        C = float(rng.choice([0.1, 1.0, 10.0]))
        K, y = random_instance(rng, n, separable=trial % 2 == 0)
        model = svm_fit(K, y, C=C)
        assert np.all(model.alpha >= -1e-12)
        assert np.all(model.alpha <= C + 1e-12)
        assert abs(np.dot(model.alpha, y)) <= 1e-6
        # KKT gap at termination: max violating pair within tolerance.
        G = (K * np.outer(y, y)) @ model.alpha - 1.0
        scores = -y * G
        up = (y > 0) & (model.alpha < C - 1e-12) | (y < 0) & (model.alpha > 1e-12)
        low = (y > 0) & (model.alpha > 1e-12) | (y < 0) & (model.alpha < C - 1e-12)
        assert scores[up].max() - scores[low].min() <= 1e-3 + 1e-9


def test_decision_cache_matches_predict_exactly():
    rng = np.random.default_rng(2)
    K, y = random_instance(rng, 10, separable=False)
    model = svm_fit(K, y, C=1.0)
    assert np.array_equal(svm_decision_values(model, K), model.decision_values)


def test_label_flip_equivariance():
    rng = np.random.default_rng(3)
    K, y = random_instance(rng, 8, separable=True)
    m_pos = svm_fit(K, y, C=1.0)
    m_neg = svm_fit(K, -y, C=1.0)
    rng2 = np.random.default_rng(4)
    K_cross = np.abs(rng2.normal(size=(5, 8)))
    dv_pos = svm_decision_values(m_pos, K_cross)
    dv_neg = svm_decision_values(m_neg, K_cross)
    assert_allclose(dv_neg, -dv_pos, atol=1e-9)


def test_determinism():
    rng = np.random.default_rng(5)
    K, y = random_instance(rng, 9, separable=False)
    m1 = svm_fit(K, y, C=1.0)
    m2 = svm_fit(K, y, C=1.0)
    assert np.array_equal(m1.alpha, m2.alpha)
    assert m1.bias == m2.bias


def test_fit_input_validation():
    y = np.array([1.0, -1.0])
    with pytest.raises(ValueError):
        svm_fit(np.eye(2), np.array([1.0, 1.0]), C=1.0)  # single class
    with pytest.raises(ValueError):
        svm_fit(np.array([[1.0, 0.5], [0.0, 1.0]]), y, C=1.0)  # asymmetric
    with pytest.raises(ValueError):
        svm_fit(np.eye(2), y, C=0.0)
    with pytest.raises(ValueError):
        svm_fit(np.eye(3), y, C=1.0)  # size mismatch
    with pytest.raises(ValueError):
        svm_fit(np.eye(2), np.array([1.0, -2.0]), C=1.0)  # not plus/minus one


def test_predict_column_mismatch():
    model = svm_fit(np.eye(2), np.array([1.0, -1.0]), C=1.0)
    with pytest.raises(ValueError):
        svm_predict(model, np.zeros((3, 5)))


def test_accuracy():
    a = np.array([1, -1, 1, -1])
    assert accuracy(a, a) == 1.0
    assert accuracy(a, -a) == 0.0
    b = np.array([1, -1, 1, 1])
    assert accuracy(b, a) == 0.75
    with pytest.raises(ValueError):
        accuracy(a, a[:3])
    with pytest.raises(ValueError):
        accuracy(np.array([]), np.array([]))


def test_model_serialization_roundtrip(tmp_path):
    rng = np.random.default_rng(6)
    K, y = random_instance(rng, 7, separable=True)
    model = svm_fit(K, y, C=2.5)
    path = tmp_path / "model.txt"
    save_svm_model(path, model)
    loaded = load_svm_model(path)
    assert np.array_equal(loaded.alpha, model.alpha)
    assert loaded.bias == model.bias
    assert np.array_equal(loaded.support_indices, model.support_indices)
    assert np.array_equal(loaded.labels, model.labels)
    assert loaded.C == model.C
    assert np.array_equal(loaded.decision_values, model.decision_values)
    K_cross = np.abs(np.random.default_rng(7).normal(size=(4, 7)))
    assert np.array_equal(
        svm_predict(loaded, K_cross), svm_predict(model, K_cross)
    )
