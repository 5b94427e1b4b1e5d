"""Dataset loading, preprocessing, splitting, and synthesis.

The handwritten-digit corpus is six text files (one per feature view) of
2000 rows each, 200 per digit in class order, named mfeat-fou, mfeat-fac,
mfeat-kar, mfeat-pix, mfeat-zer, mfeat-mor (bare names without the prefix
are accepted too). Per-view preprocessing is PCA to a small dimension and
min-max scaling into [0, pi], both fitted on training rows only.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

MFEAT_VIEWS = (
    ("fou", 76),
    ("fac", 216),
    ("kar", 64),
    ("pix", 240),
    ("zer", 47),
    ("mor", 6),
)
MFEAT_ROWS = 2000
MFEAT_ROWS_PER_DIGIT = 200


@dataclass
class MultiViewDataset:
    """Aligned feature views over one instance set."""

    views: list[np.ndarray]
    labels: np.ndarray
    view_names: list[str]
    provenance: str

    def __post_init__(self) -> None:
        if len(self.views) == 0 or len(self.views) != len(self.view_names):
            raise ValueError("views and view_names must be non-empty and equal-length")
        n = self.views[0].shape[0]
        for name, view in zip(self.view_names, self.views):
            if view.ndim != 2 or view.shape[0] != n:
                raise ValueError(f"view {name!r} must be 2-D with {n} rows")
        self.labels = np.asarray(self.labels).reshape(-1)
        if self.labels.shape[0] != n:
            raise ValueError(f"expected {n} labels, got {self.labels.shape[0]}")

    @property
    def num_instances(self) -> int:
        return int(self.views[0].shape[0])

    @property
    def num_views(self) -> int:
        return len(self.views)


def load_mfeat(directory) -> MultiViewDataset:
    """Read the six view files and attach digit labels by row block."""
    views = []
    names = []
    for name, dim in MFEAT_VIEWS:
        path = None
        for candidate in (f"mfeat-{name}", name):
            p = os.path.join(directory, candidate)
            if os.path.isfile(p):
                path = p
                break
        if path is None:
            raise FileNotFoundError(
                f"view file for {name!r} not found in {directory!s} "
                f"(looked for mfeat-{name} and {name})"
            )
        view = np.loadtxt(path, dtype=np.float64, ndmin=2)
        if view.shape != (MFEAT_ROWS, dim):
            raise ValueError(
                f"view {name!r}: expected shape ({MFEAT_ROWS}, {dim}), "
                f"found {view.shape}"
            )
        views.append(view)
        names.append(name)
    labels = np.arange(MFEAT_ROWS) // MFEAT_ROWS_PER_DIGIT
    return MultiViewDataset(
        views=views, labels=labels, view_names=names, provenance=f"mfeat:{directory}"
    )


@dataclass
class PcaTransform:
    """Centering vector and projection matrix fitted on one row subset."""

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray

    def transform(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        return (rows - self.mean) @ self.components


def pca_reduce(
    view: np.ndarray, dim: int, fit_indices: np.ndarray
) -> tuple[np.ndarray, PcaTransform]:
    """Project all rows onto the top `dim` covariance eigenvectors of the fit rows.

    Eigenvalues come out descending; each component's sign is fixed so its
    largest-magnitude coordinate (first on ties) is positive. Asking for more
    dimensions than the fit covariance's numerical rank is an error.
    """
    view = np.asarray(view, dtype=np.float64)
    if view.ndim != 2:
        raise ValueError(f"expected a 2-D view matrix, got shape {view.shape}")
    fit_indices = np.asarray(fit_indices, dtype=np.int64).reshape(-1)
    if fit_indices.shape[0] < 2:
        raise ValueError("need at least 2 fit rows")
    if np.any(fit_indices < 0) or np.any(fit_indices >= view.shape[0]):
        raise ValueError("fit index out of range")
    d = view.shape[1]
    if not 1 <= dim <= d:
        raise ValueError(f"target dimension must be in [1, {d}], got {dim}")
    fit = view[fit_indices]
    mean = fit.mean(axis=0)
    cov = np.atleast_2d(np.cov(fit, rowvar=False))
    eigenvalues, vectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    tol = max(eigenvalues[0], 0.0) * 1e-10
    rank = int(np.sum(eigenvalues > tol))
    if dim > rank:
        raise ValueError(
            f"requested {dim} components but the fit covariance has rank {rank}"
        )
    for col in range(vectors.shape[1]):
        lead = int(np.argmax(np.abs(vectors[:, col])))
        if vectors[lead, col] < 0.0:
            vectors[:, col] = -vectors[:, col]
    record = PcaTransform(
        mean=mean, components=vectors[:, :dim], eigenvalues=eigenvalues
    )
    return record.transform(view), record


@dataclass
class ScaleRecord:
    """Per-dimension min/max fitted on one row subset; maps them onto [0, pi]."""

    lo: np.ndarray
    hi: np.ndarray

    def transform(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        span = self.hi - self.lo
        constant = span <= 0.0
        safe_span = np.where(constant, 1.0, span)
        out = (rows - self.lo) * (np.pi / safe_span)
        out = np.where(constant, np.pi / 2.0, out)
        return np.clip(out, 0.0, np.pi)


def scale_features(
    view: np.ndarray, fit_indices: np.ndarray
) -> tuple[np.ndarray, ScaleRecord]:
    """Min-max scale every row into [0, pi] using fit-row statistics.

    Dimensions constant on the fit rows map to pi/2; rows outside the fit
    range are clipped at the interval ends.
    """
    view = np.asarray(view, dtype=np.float64)
    if view.ndim != 2:
        raise ValueError(f"expected a 2-D view matrix, got shape {view.shape}")
    fit_indices = np.asarray(fit_indices, dtype=np.int64).reshape(-1)
    if fit_indices.shape[0] < 1:
        raise ValueError("need at least 1 fit row")
    if np.any(fit_indices < 0) or np.any(fit_indices >= view.shape[0]):
        raise ValueError("fit index out of range")
    fit = view[fit_indices]
    record = ScaleRecord(lo=fit.min(axis=0), hi=fit.max(axis=0))
    return record.transform(view), record


def binarize_labels(digits: np.ndarray) -> np.ndarray:
    """Digits 0-4 to -1, digits 5-9 to +1."""
    digits = np.asarray(digits).reshape(-1)
    if not np.all(np.equal(np.mod(digits, 1), 0)):
        raise ValueError("digit labels must be integers")
    digits = digits.astype(np.int64)
    if np.any(digits < 0) or np.any(digits > 9):
        raise ValueError("digit labels must be in [0, 9]")
    return np.where(digits <= 4, -1.0, 1.0)


@dataclass(frozen=True)
class SplitSpec:
    """Per-class train/test sizes and the shuffle seed."""

    train_per_class: int
    test_per_class: int
    seed: int

    def __post_init__(self) -> None:
        if self.train_per_class < 1 or self.test_per_class < 1:
            raise ValueError("per-class counts must be at least 1")


def balanced_split(
    labels: np.ndarray, spec: SplitSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint sorted train/test indices with equal counts per binary class."""
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    rng = np.random.default_rng(spec.seed)
    need = spec.train_per_class + spec.test_per_class
    train_parts = []
    test_parts = []
    for cls in (-1.0, 1.0):
        members = np.flatnonzero(labels == cls)
        if members.shape[0] < need:
            raise ValueError(
                f"class {cls:+.0f} has {members.shape[0]} instances, needs {need}"
            )
        perm = rng.permutation(members)
        train_parts.append(perm[: spec.train_per_class])
        test_parts.append(perm[spec.train_per_class : need])
    return (
        np.sort(np.concatenate(train_parts)),
        np.sort(np.concatenate(test_parts)),
    )


def synthesize_dataset(
    num_views: int = 3,
    view_dim: int = 6,
    per_class: int = 100,
    num_classes: int = 2,
    separation: float = 6.0,
    noise: float = 0.1,
    latent_dim: int | None = None,
    seed: int = 0,
) -> MultiViewDataset:
    """Gaussian class blobs in a latent space, observed through random linear views.

    Class centers sit `separation` apart (in units of the unit blob spread);
    each view applies its own seeded linear map plus isotropic noise. Two
    classes get labels -1/+1, more classes get 0..C-1.
    """
    if num_views < 1 or per_class < 1 or num_classes < 2 or view_dim < 1:
        raise ValueError("need at least 1 view, 1 row per class, 2 classes, 1 dim")
    if separation <= 0.0 or noise < 0.0:
        raise ValueError("separation must be positive and noise nonnegative")
    if latent_dim is None:
        latent_dim = max(4, num_classes)
    if latent_dim < num_classes:
        raise ValueError(f"latent_dim must be at least num_classes, got {latent_dim}")
    rng = np.random.default_rng(seed)
    centers = np.zeros((num_classes, latent_dim))
    for c in range(num_classes):
        centers[c, c] = separation / np.sqrt(2.0)
    n = num_classes * per_class
    class_ids = np.repeat(np.arange(num_classes), per_class)
    latent = centers[class_ids] + rng.normal(size=(n, latent_dim))
    views = []
    for _ in range(num_views):
        mixing = rng.normal(size=(latent_dim, view_dim)) / np.sqrt(latent_dim)
        views.append(latent @ mixing + noise * rng.normal(size=(n, view_dim)))
    if num_classes == 2:
        labels = np.where(class_ids == 0, -1.0, 1.0)
    else:
        labels = class_ids.astype(np.float64)
    return MultiViewDataset(
        views=views,
        labels=labels,
        view_names=[f"view{v}" for v in range(num_views)],
        provenance=f"synthetic:seed={seed}",
    )


def dump_dataset(dataset: MultiViewDataset, out_dir) -> None:
    """Write each view as text with an "N d" header line, plus a labels file."""
    os.makedirs(out_dir, exist_ok=True)
    for name, view in zip(dataset.view_names, dataset.views):
        path = os.path.join(out_dir, f"view_{name}.txt")
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"{view.shape[0]} {view.shape[1]}\n")
            for row in view:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
    with open(os.path.join(out_dir, "labels.txt"), "w", encoding="ascii") as fh:
        for value in dataset.labels:
            fh.write(f"{value:g}\n")
