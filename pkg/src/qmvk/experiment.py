"""End-to-end experiment drivers.

A pipeline run repeats over seeded balanced splits: preprocess each view
(PCA then scaling, fitted on training rows), build per-view kernels
(circuit overlaps, trained or not, or the Gaussian baseline), fit fusion
weights, train the SVM on the combined kernel and score the test split.
Repeat r of a run uses seed base+r; derived RNG streams are keyed so that
quantum-trained, quantum-untrained and classical runs share splits, and the
two quantum runs share initial circuit angles.

Report files: aggregate and per-repeat tables in csv and/or json-lines with
identical values, alignment traces and resolved configurations as json, and
wall-clock timings in their own file so the report bytes stay deterministic.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .alignment import AlignmentConfig, hybrid_alignment, knn_by_distance
from .data import (
    MultiViewDataset,
    SplitSpec,
    balanced_split,
    binarize_labels,
    load_mfeat,
    pca_reduce,
    scale_features,
    synthesize_dataset,
)
from .kernels import (
    combine_kernels,
    cross_kernel_matrix,
    gaussian_cross_kernel_matrix,
    gaussian_kernel_matrix,
    mean_pairwise_distance,
    quantum_kernel_matrix,
)
from .qsim.ansatz import AnsatzParams
from .svm import accuracy, svm_fit, svm_predict
from .trainer import TrainConfig, train_base_kernel, train_weights

MODES = ("quantum", "classical")
SWEEP_AXES = ("lambda", "k", "depth")

DATASET_DIR_ENV = "QMVK_DATASET_DIR"


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of a generated dataset; `seed` fixes the data, not the splits."""

    num_views: int = 3
    view_dim: int = 6
    per_class: int = 100
    num_classes: int = 2
    separation: float = 6.0
    noise: float = 0.1
    latent_dim: int | None = None
    seed: int = 1234


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully resolved pipeline configuration."""

    dataset_dir: str | None = None
    synthetic: SyntheticSpec | None = None
    mode: str = "quantum"
    trained: bool = True
    view: str | None = None
    depth: int = 6
    pca_dim: int = 6
    train_per_class: int = 40
    test_per_class: int = 40
    svm_c: float = 1.0
    repeats: int = 20
    seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self) -> None:
        if (self.dataset_dir is None) == (self.synthetic is None):
            raise ValueError("exactly one of dataset_dir and synthetic is required")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "classical" and not self.trained:
            raise ValueError("the classical baseline has no untrained variant")
        if self.depth < 1:
            raise ValueError(f"depth must be at least 1, got {self.depth}")
        if self.pca_dim < 1:
            raise ValueError(f"pca_dim must be at least 1, got {self.pca_dim}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be at least 1, got {self.repeats}")
        if self.svm_c <= 0.0:
            raise ValueError(f"svm_c must be positive, got {self.svm_c}")
        if self.train_per_class < 1 or self.test_per_class < 1:
            raise ValueError("per-class counts must be at least 1")

    @property
    def mode_label(self) -> str:
        if self.mode == "classical":
            return "classical"
        return "quantum-trained" if self.trained else "quantum-untrained"


@dataclass
class RepeatRecord:
    """Everything measured on one seeded split."""

    repeat: int
    seed: int
    accuracy: float
    eta: np.ndarray
    view_hta_initial: np.ndarray
    view_hta_final: np.ndarray
    combined_hta_initial: float
    combined_hta_final: float
    stage1_traces: list[list[float]]
    stage2_trace: list[float]
    elapsed_seconds: float


@dataclass
class RunReport:
    """A pipeline's records plus identifying labels; aggregates are derived."""

    label: str
    mode: str
    view: str
    axis: str
    axis_value: float | None
    config: dict
    view_names: list[str]
    records: list[RepeatRecord]

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([r.accuracy for r in self.records])

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std_accuracy(self) -> float:
        if len(self.records) < 2:
            return 0.0
        return float(np.std(self.accuracies, ddof=1))

    @property
    def mean_combined_hta_initial(self) -> float:
        return float(np.mean([r.combined_hta_initial for r in self.records]))

    @property
    def mean_combined_hta_final(self) -> float:
        return float(np.mean([r.combined_hta_final for r in self.records]))

    @property
    def mean_view_hta_initial(self) -> np.ndarray:
        return np.mean([r.view_hta_initial for r in self.records], axis=0)

    @property
    def mean_view_hta_final(self) -> np.ndarray:
        return np.mean([r.view_hta_final for r in self.records], axis=0)

    @property
    def mean_eta(self) -> np.ndarray:
        return np.mean([r.eta for r in self.records], axis=0)


def resolve_dataset_dir(explicit: str | None) -> str | None:
    """Explicit path if given, else the QMVK_DATASET_DIR environment variable."""
    if explicit:
        return explicit
    return os.environ.get(DATASET_DIR_ENV) or None


def load_dataset(config: ExperimentConfig) -> MultiViewDataset:
    if config.dataset_dir is not None:
        return load_mfeat(config.dataset_dir)
    spec = config.synthetic
    return synthesize_dataset(
        num_views=spec.num_views,
        view_dim=spec.view_dim,
        per_class=spec.per_class,
        num_classes=spec.num_classes,
        separation=spec.separation,
        noise=spec.noise,
        latent_dim=spec.latent_dim,
        seed=spec.seed,
    )


def _binary_labels(dataset: MultiViewDataset) -> np.ndarray:
    labels = np.asarray(dataset.labels, dtype=np.float64).reshape(-1)
    if np.all(np.isin(labels, (-1.0, 1.0))):
        return labels
    return binarize_labels(labels)


def _select_views(
    dataset: MultiViewDataset, config: ExperimentConfig
) -> tuple[list[str], list[int]]:
    if config.view is None:
        return list(dataset.view_names), list(range(dataset.num_views))
    if config.view not in dataset.view_names:
        raise ValueError(
            f"unknown view {config.view!r}; dataset has {dataset.view_names}"
        )
    idx = dataset.view_names.index(config.view)
    return [config.view], [idx]


def _preprocess_view(
    view: np.ndarray, dim: int, train_idx: np.ndarray, test_idx: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    reduced, _ = pca_reduce(view, dim, train_idx)
    scaled, _ = scale_features(reduced, train_idx)
    return scaled[train_idx], scaled[test_idx]


def _run_single(
    dataset: MultiViewDataset,
    labels: np.ndarray,
    config: ExperimentConfig,
    repeat: int,
) -> RepeatRecord:
    started = time.perf_counter()
    seed = config.seed + repeat
    names, view_indices = _select_views(dataset, config)
    train_idx, test_idx = balanced_split(
        labels,
        SplitSpec(config.train_per_class, config.test_per_class, seed=seed),
    )
    y_train = labels[train_idx]
    y_test = labels[test_idx]
    train_cfg = replace(config.train, seed=seed)
    acfg = AlignmentConfig(lam=train_cfg.lam, k=train_cfg.k1)

    matrices = []
    cross_matrices = []
    view_hta_initial = []
    view_hta_final = []
    stage1_traces: list[list[float]] = []
    for name, gidx in zip(names, view_indices):
        if dataset.views[gidx].shape[1] < config.pca_dim:
            raise ValueError(
                f"view {name!r} has {dataset.views[gidx].shape[1]} dimensions, "
                f"fewer than pca_dim={config.pca_dim}"
            )
        X_train, X_test = _preprocess_view(
            dataset.views[gidx], config.pca_dim, train_idx, test_idx
        )
        if config.mode == "classical":
            sigma = mean_pairwise_distance(X_train)
            K = gaussian_kernel_matrix(X_train, sigma)
            nbrs = knn_by_distance(X_train, train_cfg.k1, train_cfg.include_self)
            hta = hybrid_alignment(K, y_train, nbrs, acfg)
            matrices.append(K)
            cross_matrices.append(
                gaussian_cross_kernel_matrix(X_test, X_train, sigma)
            )
            view_hta_initial.append(hta)
            view_hta_final.append(hta)
            continue
        # the untrained run must see the exact angles the trained run starts
        # from, so the draw is keyed by (seed, view position), not run shape
        theta_rng = np.random.default_rng([seed, 1, gidx])
        initial = AnsatzParams.random(config.depth, theta_rng)
        if config.trained:
            result = train_base_kernel(
                X_train,
                y_train,
                initial,
                train_cfg,
                rng=np.random.default_rng([seed, 2, gidx]),
                view_name=name,
            )
            matrices.append(result.kernel)
            cross_matrices.append(cross_kernel_matrix(X_test, X_train, result.params))
            view_hta_initial.append(result.initial_hta)
            view_hta_final.append(result.final_hta)
            stage1_traces.append(result.hta_trace)
        else:
            K = quantum_kernel_matrix(X_train, initial)
            nbrs = knn_by_distance(X_train, train_cfg.k1, train_cfg.include_self)
            hta = hybrid_alignment(K, y_train, nbrs, acfg)
            matrices.append(K)
            cross_matrices.append(cross_kernel_matrix(X_test, X_train, initial))
            view_hta_initial.append(hta)
            view_hta_final.append(hta)

    stage2 = train_weights(matrices, y_train, train_cfg)
    combined_train = stage2.combined_kernel
    combined_cross = combine_kernels(cross_matrices, stage2.eta)
    model = svm_fit(combined_train, y_train, C=config.svm_c)
    predictions = svm_predict(model, combined_cross)
    acc = accuracy(predictions, y_test)
    return RepeatRecord(
        repeat=repeat,
        seed=seed,
        accuracy=acc,
        eta=stage2.eta,
        view_hta_initial=np.array(view_hta_initial),
        view_hta_final=np.array(view_hta_final),
        combined_hta_initial=stage2.initial_hta,
        combined_hta_final=stage2.final_hta,
        stage1_traces=stage1_traces,
        stage2_trace=stage2.hta_trace,
        elapsed_seconds=time.perf_counter() - started,
    )


def config_echo(config: ExperimentConfig) -> dict:
    """The resolved configuration as plain json-able data."""
    return dataclasses.asdict(config)


def run_pipeline(
    config: ExperimentConfig,
    dataset: MultiViewDataset | None = None,
    axis: str = "",
    axis_value: float | None = None,
) -> RunReport:
    """All repeats of one configuration; pass `dataset` to reuse a loaded one."""
    if dataset is None:
        dataset = load_dataset(config)
    labels = _binary_labels(dataset)
    names, _ = _select_views(dataset, config)
    view_label = names[0] if config.view is not None else "multi"
    records = [
        _run_single(dataset, labels, config, repeat)
        for repeat in range(config.repeats)
    ]
    label = f"{config.mode_label}/{view_label}"
    if axis:
        label = f"{label}/{axis}={axis_value:g}"
    return RunReport(
        label=label,
        mode=config.mode_label,
        view=view_label,
        axis=axis,
        axis_value=axis_value,
        config=config_echo(config),
        view_names=names,
        records=records,
    )


def compare_modes(
    config: ExperimentConfig,
    include_single_views: bool = True,
    dataset: MultiViewDataset | None = None,
) -> list[RunReport]:
    """Quantum trained/untrained and classical runs over shared seeded splits."""
    if dataset is None:
        dataset = load_dataset(config)
    variants = [
        replace(config, mode="quantum", trained=True, view=None),
        replace(config, mode="quantum", trained=False, view=None),
        replace(config, mode="classical", trained=True, view=None),
    ]
    if include_single_views:
        for name in dataset.view_names:
            variants.append(replace(config, mode="quantum", trained=True, view=name))
            variants.append(replace(config, mode="quantum", trained=False, view=name))
            variants.append(replace(config, mode="classical", trained=True, view=name))
    return [run_pipeline(variant, dataset=dataset) for variant in variants]


def sweep_axis(
    config: ExperimentConfig,
    axis: str,
    values,
    dataset: MultiViewDataset | None = None,
) -> list[RunReport]:
    """One report per axis value; seeds are shared across values."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    if len(values) == 0:
        raise ValueError("need at least one axis value")
    if dataset is None:
        dataset = load_dataset(config)
    reports = []
    for value in values:
        if axis == "lambda":
            variant = replace(config, train=replace(config.train, lam=float(value)))
        elif axis == "k":
            variant = replace(
                config, train=replace(config.train, k1=int(value), k2=int(value))
            )
        else:
            variant = replace(config, depth=int(value))
        reports.append(
            run_pipeline(variant, dataset=dataset, axis=axis, axis_value=float(value))
        )
    return reports


def _atomic_write_text(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _fmt(value: float) -> str:
    return repr(float(value))


def _join(values) -> str:
    return " ".join(_fmt(v) for v in values)


def _aggregate_row(report: RunReport) -> dict:
    return {
        "label": report.label,
        "mode": report.mode,
        "view": report.view,
        "axis": report.axis,
        "axis_value": "" if report.axis_value is None else _fmt(report.axis_value),
        "repeats": len(report.records),
        "mean_accuracy": 100.0 * report.mean_accuracy,
        "std_accuracy": 100.0 * report.std_accuracy,
        "mean_combined_hta_initial": 100.0 * report.mean_combined_hta_initial,
        "mean_combined_hta_final": 100.0 * report.mean_combined_hta_final,
        "mean_view_hta_initial": _join(100.0 * report.mean_view_hta_initial),
        "mean_view_hta_final": _join(100.0 * report.mean_view_hta_final),
        "mean_eta": _join(report.mean_eta),
        "views": " ".join(report.view_names),
    }


def _detail_rows(report: RunReport) -> list[dict]:
    rows = []
    for record in report.records:
        rows.append(
            {
                "label": report.label,
                "mode": report.mode,
                "view": report.view,
                "axis": report.axis,
                "axis_value": (
                    "" if report.axis_value is None else _fmt(report.axis_value)
                ),
                "repeat": record.repeat,
                "seed": record.seed,
                "accuracy": 100.0 * record.accuracy,
                "combined_hta_initial": 100.0 * record.combined_hta_initial,
                "combined_hta_final": 100.0 * record.combined_hta_final,
                "view_hta_initial": _join(100.0 * record.view_hta_initial),
                "view_hta_final": _join(100.0 * record.view_hta_final),
                "eta": _join(record.eta),
            }
        )
    return rows


def _write_table(rows: list[dict], out_dir: str, stem: str, fmt: str) -> None:
    if not rows:
        return
    keys = list(rows[0].keys())
    if fmt in ("csv", "both"):
        lines = [",".join(keys)]
        for row in rows:
            cells = []
            for key in keys:
                value = row[key]
                cells.append(_fmt(value) if isinstance(value, float) else str(value))
            lines.append(",".join(cells))
        _atomic_write_text(
            os.path.join(out_dir, f"{stem}.csv"), "\n".join(lines) + "\n"
        )
    if fmt in ("jsonl", "both"):
        lines = [json.dumps(row) for row in rows]
        _atomic_write_text(
            os.path.join(out_dir, f"{stem}.jsonl"), "\n".join(lines) + "\n"
        )


def emit_report(reports: list[RunReport], out_dir, fmt: str = "both") -> None:
    """Write aggregate/detail tables plus traces, configs and timings files."""
    if fmt not in ("csv", "jsonl", "both"):
        raise ValueError(f"format must be csv, jsonl or both, got {fmt!r}")
    out_dir = str(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    _write_table([_aggregate_row(r) for r in reports], out_dir, "aggregate", fmt)
    detail_rows: list[dict] = []
    for report in reports:
        detail_rows.extend(_detail_rows(report))
    _write_table(detail_rows, out_dir, "details", fmt)

    traces = {}
    configs = {}
    timings = {}
    for report in reports:
        traces[report.label] = {
            str(record.repeat): {
                "stage1": {
                    name: trace
                    for name, trace in zip(report.view_names, record.stage1_traces)
                },
                "stage2": record.stage2_trace,
            }
            for record in report.records
        }
        configs[report.label] = report.config
        timings[report.label] = [record.elapsed_seconds for record in report.records]
    _atomic_write_text(
        os.path.join(out_dir, "traces.json"), json.dumps(traces, indent=1) + "\n"
    )
    _atomic_write_text(
        os.path.join(out_dir, "configs.json"), json.dumps(configs, indent=1) + "\n"
    )
    _atomic_write_text(
        os.path.join(out_dir, "timings.json"), json.dumps(timings, indent=1) + "\n"
    )


def preprocess_dump(config: ExperimentConfig, out_dir) -> None:
    """Write the preprocessed train/test view matrices for config.seed's split."""
    dataset = load_dataset(config)
    labels = _binary_labels(dataset)
    names, view_indices = _select_views(dataset, config)
    train_idx, test_idx = balanced_split(
        labels,
        SplitSpec(config.train_per_class, config.test_per_class, seed=config.seed),
    )
    out_dir = str(out_dir)
    os.makedirs(out_dir, exist_ok=True)

    def write_matrix(path: str, matrix: np.ndarray) -> None:
        lines = [f"{matrix.shape[0]} {matrix.shape[1]}"]
        for row in matrix:
            lines.append(" ".join(f"{v:.17g}" for v in row))
        _atomic_write_text(path, "\n".join(lines) + "\n")

    for name, gidx in zip(names, view_indices):
        X_train, X_test = _preprocess_view(
            dataset.views[gidx], config.pca_dim, train_idx, test_idx
        )
        write_matrix(os.path.join(out_dir, f"{name}_train.txt"), X_train)
        write_matrix(os.path.join(out_dir, f"{name}_test.txt"), X_test)
    for stem, idx in (("train", train_idx), ("test", test_idx)):
        lines = [f"{labels[i]:g}" for i in idx]
        _atomic_write_text(
            os.path.join(out_dir, f"labels_{stem}.txt"), "\n".join(lines) + "\n"
        )
