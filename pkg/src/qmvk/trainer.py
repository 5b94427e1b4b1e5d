"""Two-stage alignment training.

Stage 1 fits each view's circuit angles by gradient ascent on the hybrid
alignment of that view's kernel (full-batch or subsampled gradients; the
alignment trace is always full-batch). Stage 2 fits convex fusion weights
over the per-view kernels: each iteration rebuilds kernel-similarity
neighborhoods of the combined kernel, computes local/global linear terms,
and solves a small nonnegative quadratic program by coordinate descent,
warm-started from the previous solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alignment import (
    AlignmentConfig,
    NeighborSets,
    hybrid_alignment,
    hybrid_alignment_gradient,
    knn_by_distance,
    knn_by_kernel,
)
from .kernels import combine_kernels, quantum_kernel_matrix, quantum_kernel_matrix_with_gradient
from .qsim.ansatz import AnsatzParams

WEIGHT_FLOOR = 1e-8


class TrainingDivergedError(RuntimeError):
    """Gradient stopped being finite; `iteration` says when."""

    def __init__(self, iteration: int, message: str):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters shared by both training stages."""

    lam: float = 0.125
    k1: int = 8
    k2: int = 8
    learning_rate: float = 0.05
    max_iters_stage1: int = 50
    max_iters_stage2: int = 20
    eps1: float = 1e-4
    eps2: float = 1e-4
    batch_size: int = 16
    seed: int = 0
    include_self: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")
        if self.k1 < 2 or self.k2 < 2:
            raise ValueError(f"k1 and k2 must be at least 2, got {self.k1}, {self.k2}")
        if self.learning_rate <= 0.0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.max_iters_stage1 < 1 or self.max_iters_stage2 < 1:
            raise ValueError("iteration caps must be at least 1")
        if self.eps1 < 0.0 or self.eps2 < 0.0:
            raise ValueError("stopping tolerances must be nonnegative")
        if self.batch_size < 0:
            raise ValueError(f"batch_size must be nonnegative, got {self.batch_size}")
        if 0 < self.batch_size < self.k1:
            raise ValueError(
                f"batch_size {self.batch_size} is smaller than k1={self.k1}; "
                "subsampled neighborhoods need at least k1 instances"
            )


@dataclass
class ViewTrainResult:
    """Stage-1 output for one view."""

    params: AnsatzParams
    initial_params: AnsatzParams
    hta_trace: list[float]
    initial_hta: float
    final_hta: float
    kernel: np.ndarray
    neighbors: NeighborSets

    @property
    def iterations(self) -> int:
        return len(self.hta_trace)


@dataclass
class Stage1Result:
    views: dict[str, ViewTrainResult]


@dataclass
class Stage2Result:
    """Fusion-weight training output."""

    eta: np.ndarray
    hta_trace: list[float]
    initial_hta: float
    final_hta: float
    combined_kernel: np.ndarray

    @property
    def iterations(self) -> int:
        return len(self.hta_trace)


def _check_training_inputs(X: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError(f"need a 2-D matrix with at least 2 rows, got shape {X.shape}")
    if labels.shape[0] != X.shape[0]:
        raise ValueError(f"got {X.shape[0]} rows but {labels.shape[0]} labels")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    return X, labels


def _distance_ranking(X: np.ndarray) -> np.ndarray:
    """Row i: all other indices ordered by (distance to i, index)."""
    n = X.shape[0]
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sum(diff * diff, axis=-1)
    cols = np.arange(n)
    ranking = np.empty((n, n - 1), dtype=np.int64)
    for i in range(n):
        order = np.lexsort((cols, dist[i]))
        ranking[i] = order[order != i]
    return ranking


def _batch_neighbor_sets(
    batch: np.ndarray, ranking: np.ndarray, k: int, include_self: bool
) -> NeighborSets:
    """Neighborhoods inside a batch, read off the full-dataset distance ranking."""
    n = ranking.shape[0]
    in_batch = np.zeros(n, dtype=bool)
    in_batch[batch] = True
    local = np.full(n, -1, dtype=np.int64)
    local[batch] = np.arange(batch.shape[0])
    n_others = k - 1 if include_self else k
    rows = np.empty((batch.shape[0], k), dtype=np.int64)
    for a, i in enumerate(batch):
        picked = [j for j in ranking[i] if in_batch[j]][:n_others]
        if len(picked) < n_others:
            raise ValueError(
                f"batch of {batch.shape[0]} holds only {len(picked)} neighbors "
                f"for anchor {i}, need {n_others}"
            )
        if include_self:
            rows[a] = np.concatenate(([a], local[picked]))
        else:
            rows[a] = local[picked]
    return NeighborSets(rows, mode="distance", include_self=include_self)


def _append_checkpoint(path, record: dict) -> None:
    parts = []
    for key, value in record.items():
        if isinstance(value, np.ndarray):
            value = ",".join(repr(float(v)) for v in value)
        parts.append(f"{key}={value}")
    with open(path, "a", encoding="ascii") as fh:
        fh.write(" ".join(parts) + "\n")


def read_checkpoints(path) -> list[dict]:
    """Parse checkpoint lines back into dicts; theta/eta become float arrays."""
    records = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = {}
            for part in line.split(" "):
                key, _, value = part.partition("=")
                if key in ("theta", "eta"):
                    record[key] = np.array([float(v) for v in value.split(",")])
                elif key in ("iteration",):
                    record[key] = int(value)
                elif key in ("hta",):
                    record[key] = float(value)
                else:
                    record[key] = value
            records.append(record)
    return records


def train_base_kernel(
    X: np.ndarray,
    labels: np.ndarray,
    initial_params: AnsatzParams,
    config: TrainConfig,
    rng: np.random.Generator | None = None,
    checkpoint_path=None,
    view_name: str = "view",
) -> ViewTrainResult:
    """Gradient-ascent fit of one view's circuit angles.

    Each iteration logs the full-batch hybrid alignment, takes one ascent
    step (full gradient, or a batch gradient when batch_size > 0), and stops
    when the alignment change falls within eps1 or the iteration cap hits.
    The trace starts from an implicit 0, so the first iteration only stops
    for alignment values that are themselves within eps1 of zero.
    """
    X, labels = _check_training_inputs(X, labels)
    n = X.shape[0]
    if config.k1 > n:
        raise ValueError(f"k1={config.k1} exceeds the {n} training instances")
    if config.batch_size > n:
        raise ValueError(f"batch_size={config.batch_size} exceeds the {n} instances")
    if " " in view_name:
        raise ValueError(f"view name must not contain spaces: {view_name!r}")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    acfg = AlignmentConfig(lam=config.lam, k=config.k1)
    neighbors = knn_by_distance(X, config.k1, config.include_self)
    use_batches = 0 < config.batch_size < n
    ranking = _distance_ranking(X) if use_batches else None

    params = initial_params
    trace: list[float] = []
    prev_hta = 0.0
    for t in range(1, config.max_iters_stage1 + 1):
        if use_batches:
            K = quantum_kernel_matrix(X, params)
            hta = hybrid_alignment(K, labels, neighbors, acfg)
            batch = np.sort(rng.choice(n, size=config.batch_size, replace=False))
            sub_neighbors = _batch_neighbor_sets(
                batch, ranking, config.k1, config.include_self
            )
            K_b, G_b = quantum_kernel_matrix_with_gradient(X[batch], params)
            grad = hybrid_alignment_gradient(
                K_b, G_b, labels[batch], sub_neighbors, acfg
            )
        else:
            K, G = quantum_kernel_matrix_with_gradient(X, params)
            hta = hybrid_alignment(K, labels, neighbors, acfg)
            grad = hybrid_alignment_gradient(K, G, labels, neighbors, acfg)
        trace.append(hta)
        if not np.all(np.isfinite(grad)):
            raise TrainingDivergedError(t, f"non-finite gradient for view {view_name}")
        params = AnsatzParams.from_vector(
            params.as_vector() + config.learning_rate * grad
        )
        if checkpoint_path is not None:
            _append_checkpoint(
                checkpoint_path,
                {
                    "record": "stage1",
                    "view": view_name,
                    "iteration": t,
                    "hta": repr(float(hta)),
                    "theta": params.as_vector(),
                },
            )
        if abs(hta - prev_hta) <= config.eps1:
            break
        prev_hta = hta

    final_kernel = quantum_kernel_matrix(X, params)
    final_hta = hybrid_alignment(final_kernel, labels, neighbors, acfg)
    return ViewTrainResult(
        params=params,
        initial_params=initial_params,
        hta_trace=trace,
        initial_hta=trace[0],
        final_hta=final_hta,
        kernel=final_kernel,
        neighbors=neighbors,
    )


def train_all_views(
    views: dict[str, np.ndarray],
    labels: np.ndarray,
    initial_params: dict[str, AnsatzParams],
    config: TrainConfig,
    checkpoint_path=None,
) -> Stage1Result:
    """Stage 1 over every view, in dict order."""
    if set(views) != set(initial_params):
        raise ValueError("views and initial_params must have the same keys")
    results: dict[str, ViewTrainResult] = {}
    for name, X in views.items():
        results[name] = train_base_kernel(
            X,
            labels,
            initial_params[name],
            config,
            checkpoint_path=checkpoint_path,
            view_name=name,
        )
    return Stage1Result(views=results)


def _check_view_matrices(matrices, labels) -> tuple[list[np.ndarray], np.ndarray, int]:
    if len(matrices) == 0:
        raise ValueError("need at least one view kernel")
    mats = [np.asarray(K, dtype=np.float64) for K in matrices]
    n = mats[0].shape[0]
    for K in mats:
        if K.ndim != 2 or K.shape != (n, n):
            raise ValueError("view kernels must be square and same-shape")
        if np.max(np.abs(K - K.T)) > 1e-8:
            raise ValueError("view kernels must be symmetric")
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    if labels.shape[0] != n:
        raise ValueError(f"got {n} instances but {labels.shape[0]} labels")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    return mats, labels, n


def local_gram_tensor(matrices, neighbors: NeighborSets) -> np.ndarray:
    """Per-anchor Gram matrices of the restricted view kernels, shape (N, M, M)."""
    m = len(matrices)
    n = neighbors.num_anchors
    out = np.empty((n, m, m), dtype=np.float64)
    for i in range(n):
        idx = neighbors.indices[i]
        flat = np.stack([K[np.ix_(idx, idx)].ravel() for K in matrices])
        out[i] = flat @ flat.T
    return out


def compute_tau(
    eta: np.ndarray, local_grams: np.ndarray, global_gram: np.ndarray
) -> np.ndarray:
    """Per-anchor share of the combined kernel's squared norm held by the neighborhood."""
    eta = np.asarray(eta, dtype=np.float64).reshape(-1)
    denom = float(eta @ global_gram @ eta)
    if denom <= 0.0:
        raise ValueError("combined kernel has nonpositive squared norm")
    return np.einsum("q,iqr,r->i", eta, local_grams, eta) / denom


def compute_linear_terms(
    matrices, labels: np.ndarray, neighbors: NeighborSets, tau: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Local (a) and global (b) linear coefficients of the fusion objective.

    a_q averages the neighborhood inner products <K_i^q, y_i y_i^T> scaled by
    1/sqrt(tau_i) over anchors, divided by k; b_q = <K^q, yy^T> / N.
    """
    mats, labels, n = _check_view_matrices(matrices, labels)
    tau = np.asarray(tau, dtype=np.float64).reshape(-1)
    if tau.shape[0] != n:
        raise ValueError(f"expected {n} tau values, got {tau.shape[0]}")
    if np.any(tau <= 0.0):
        raise ValueError("tau values must be positive")
    k = neighbors.k
    m = len(mats)
    a = np.zeros(m, dtype=np.float64)
    b = np.empty(m, dtype=np.float64)
    inv_sqrt_tau = 1.0 / np.sqrt(tau)
    for q, K in enumerate(mats):
        b[q] = float(labels @ K @ labels) / n
        acc = 0.0
        for i in range(n):
            idx = neighbors.indices[i]
            y_sub = labels[idx]
            acc += inv_sqrt_tau[i] * float(y_sub @ K[np.ix_(idx, idx)] @ y_sub)
        a[q] = acc / (n * k)
    return a, b


def qp_objective(
    mu: np.ndarray, gram: np.ndarray, a: np.ndarray, b: np.ndarray, lam: float
) -> float:
    """mu^T gram mu - (1-lam) a^T mu - lam b^T mu."""
    mu = np.asarray(mu, dtype=np.float64).reshape(-1)
    return float(mu @ gram @ mu - (1.0 - lam) * (a @ mu) - lam * (b @ mu))


def _average_exchangeable(gram: np.ndarray, c: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Equalize coordinates the problem cannot tell apart.

    Coordinates with identical gains and identical gram rows span a flat
    direction along which sweep order would otherwise pick an arbitrary
    vertex; averaging a convex exchange-invariant objective over the group
    orbit never increases it, so the symmetric point is always admissible.
    """
    m = mu.shape[0]
    assigned = np.zeros(m, dtype=bool)
    for i in range(m):
        if assigned[i]:
            continue
        group = [i]
        for j in range(i + 1, m):
            if assigned[j] or c[i] != c[j] or gram[i, i] != gram[j, j]:
                continue
            mask = np.ones(m, dtype=bool)
            mask[[i, j]] = False
            if np.array_equal(gram[i, mask], gram[j, mask]):
                group.append(j)
        assigned[group] = True
        if len(group) > 1:
            mu[group] = mu[group].mean()
    return mu


def solve_nonneg_qp(
    gram: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    lam: float,
    initial: np.ndarray | None = None,
    floor: float = WEIGHT_FLOOR,
    max_sweeps: int = 10_000,
    tol: float = 1e-10,
) -> np.ndarray:
    """Coordinate descent on the fusion QP with a positivity floor.

    Each coordinate takes its exact minimizer clipped at the floor; sweeps
    stop when no coordinate moved more than tol. Exactly exchangeable
    coordinates end up with equal weights.
    """
    gram = np.asarray(gram, dtype=np.float64)
    m = gram.shape[0]
    if gram.shape != (m, m):
        raise ValueError(f"gram matrix must be square, got {gram.shape}")
    if np.max(np.abs(gram - gram.T)) > 1e-8 * max(1.0, float(np.max(np.abs(gram)))):
        raise ValueError("gram matrix must be symmetric")
    eigs = np.linalg.eigvalsh((gram + gram.T) / 2.0)
    if eigs[0] < -1e-8 * max(1.0, abs(eigs[-1])):
        raise ValueError(f"gram matrix is not positive semidefinite (min eig {eigs[0]})")
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape[0] != m or b.shape[0] != m:
        raise ValueError("linear term lengths must match the gram size")
    c = (1.0 - lam) * a + lam * b
    if initial is None:
        mu = np.full(m, 1.0 / m)
    else:
        mu = np.maximum(np.asarray(initial, dtype=np.float64).reshape(-1), floor)
        if mu.shape[0] != m:
            raise ValueError("initial point length must match the gram size")
    for _ in range(max_sweeps):
        delta = 0.0
        for q in range(m):
            g_q = 2.0 * float(gram[q] @ mu) - c[q]
            if gram[q, q] > 0.0:
                new = max(floor, mu[q] - g_q / (2.0 * gram[q, q]))
            elif c[q] > 0.0:
                raise ValueError(
                    f"coordinate {q} is unbounded below (zero curvature, positive gain)"
                )
            else:
                new = floor
            delta = max(delta, abs(new - mu[q]))
            mu[q] = new
        if delta <= tol:
            return _average_exchangeable(gram, c, mu)
    raise RuntimeError(f"coordinate descent did not converge in {max_sweeps} sweeps")


def project_to_weight_simplex(mu: np.ndarray, floor: float = WEIGHT_FLOOR) -> np.ndarray:
    """Normalize to sum 1 while keeping every weight at least `floor`."""
    mu = np.asarray(mu, dtype=np.float64).reshape(-1)
    if mu.shape[0] == 0 or not np.all(np.isfinite(mu)):
        raise ValueError("weights must be non-empty and finite")
    if mu.shape[0] * floor >= 1.0:
        raise ValueError("floor too large for this many weights")
    if mu.sum() <= 0.0:
        raise ValueError("weights must have positive total mass")
    eta = np.maximum(mu, floor)
    eta = eta / eta.sum()
    eta = np.maximum(eta, floor)
    eta[int(np.argmax(eta))] -= eta.sum() - 1.0
    return eta


def train_weights(
    matrices,
    labels: np.ndarray,
    config: TrainConfig,
    initial_eta: np.ndarray | None = None,
    checkpoint_path=None,
) -> Stage2Result:
    """Stage 2: alignment-trained convex fusion weights over view kernels."""
    mats, labels, n = _check_view_matrices(matrices, labels)
    m = len(mats)
    if config.k2 > n:
        raise ValueError(f"k2={config.k2} exceeds the {n} training instances")
    acfg = AlignmentConfig(lam=config.lam, k=config.k2)
    if initial_eta is None:
        initial_eta = np.full(m, 1.0 / m)
    else:
        initial_eta = np.asarray(initial_eta, dtype=np.float64).reshape(-1)
        if initial_eta.shape[0] != m:
            raise ValueError("initial weights must match the number of views")
        if np.any(initial_eta < 0.0) or abs(initial_eta.sum() - 1.0) > 1e-9:
            raise ValueError("initial weights must lie on the probability simplex")
    eta = project_to_weight_simplex(initial_eta)

    if m == 1:
        combined = mats[0]
        nbrs = knn_by_kernel(combined, config.k2, config.include_self)
        hta = hybrid_alignment(combined, labels, nbrs, acfg)
        return Stage2Result(
            eta=np.array([1.0]),
            hta_trace=[],
            initial_hta=hta,
            final_hta=hta,
            combined_kernel=combined,
        )

    flat = np.stack([K.ravel() for K in mats])
    global_gram = flat @ flat.T
    mu = eta.copy()
    trace: list[float] = []
    prev_hta = 0.0
    for t in range(1, config.max_iters_stage2 + 1):
        combined = combine_kernels(mats, eta)
        nbrs = knn_by_kernel(combined, config.k2, config.include_self)
        hta = hybrid_alignment(combined, labels, nbrs, acfg)
        trace.append(hta)
        local_grams = local_gram_tensor(mats, nbrs)
        tau = compute_tau(eta, local_grams, global_gram)
        a, b = compute_linear_terms(mats, labels, nbrs, tau)
        obj_before = qp_objective(mu, global_gram, a, b, config.lam)
        mu = solve_nonneg_qp(global_gram, a, b, config.lam, initial=mu)
        obj_after = qp_objective(mu, global_gram, a, b, config.lam)
        if obj_after > obj_before + 1e-12 * max(1.0, abs(obj_before)):
            raise RuntimeError(
                f"fusion objective increased at iteration {t}: "
                f"{obj_before} -> {obj_after}"
            )
        eta = project_to_weight_simplex(mu)
        if checkpoint_path is not None:
            _append_checkpoint(
                checkpoint_path,
                {
                    "record": "stage2",
                    "iteration": t,
                    "hta": repr(float(hta)),
                    "eta": eta,
                },
            )
        if abs(hta - prev_hta) <= config.eps2:
            break
        prev_hta = hta

    combined = combine_kernels(mats, eta)
    nbrs = knn_by_kernel(combined, config.k2, config.include_self)
    final_hta = hybrid_alignment(combined, labels, nbrs, acfg)
    return Stage2Result(
        eta=eta,
        hta_trace=trace,
        initial_hta=trace[0],
        final_hta=final_hta,
        combined_kernel=combined,
    )
