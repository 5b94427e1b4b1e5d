"""Command-line interface.

Subcommands: run (one configuration), sweep (one hyperparameter axis),
compare (quantum trained/untrained vs classical, optionally per view), and
preprocess (dump the preprocessed view matrices for one split). A config
file of key=value lines can seed any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import (
    ExperimentConfig,
    SyntheticSpec,
    SWEEP_AXES,
    compare_modes,
    emit_report,
    preprocess_dump,
    resolve_dataset_dir,
    run_pipeline,
    sweep_axis,
)
from .trainer import TrainConfig

_STORE_TRUE_FLAGS = {"synthetic", "untrained", "multi_view", "no_single_views"}


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    data = parser.add_argument_group("data")
    data.add_argument(
        "--dataset-dir",
        help="directory holding the six mfeat-* view files "
        "(default: the QMVK_DATASET_DIR environment variable)",
    )
    data.add_argument(
        "--synthetic",
        action="store_true",
        help="generate a synthetic multi-view dataset instead of loading one",
    )
    data.add_argument("--synth-views", type=int, default=3, metavar="M")
    data.add_argument("--synth-dim", type=int, default=6, metavar="D")
    data.add_argument("--synth-per-class", type=int, default=100, metavar="N")
    data.add_argument("--synth-classes", type=int, default=2, metavar="C")
    data.add_argument("--synth-separation", type=float, default=6.0)
    data.add_argument("--synth-noise", type=float, default=0.1)
    data.add_argument("--synth-latent-dim", type=int, default=None)
    data.add_argument("--synth-seed", type=int, default=1234)
    data.add_argument("--train-per-class", type=int, default=40, metavar="N")
    data.add_argument("--test-per-class", type=int, default=40, metavar="N")
    data.add_argument("--pca-dim", type=int, default=6, metavar="D")

    model = parser.add_argument_group("model")
    model.add_argument("--mode", choices=("quantum", "classical"), default="quantum")
    model.add_argument(
        "--untrained",
        action="store_true",
        help="skip circuit-angle training and keep the random initial angles",
    )
    model.add_argument("--view", help="run on a single named view")
    model.add_argument(
        "--multi-view",
        action="store_true",
        help="fuse all views (the default; overrides an earlier --view)",
    )
    model.add_argument("--depth", type=int, default=6, metavar="P")
    model.add_argument("--svm-c", type=float, default=1.0, metavar="C")

    training = parser.add_argument_group("training")
    training.add_argument("--lambda", dest="lam", type=float, default=0.125)
    training.add_argument("--k1", type=int, default=8)
    training.add_argument("--k2", type=int, default=8)
    training.add_argument("--lr", type=float, default=0.05)
    training.add_argument("--t1", type=int, default=50, metavar="T1")
    training.add_argument("--t2", type=int, default=20, metavar="T2")
    training.add_argument("--eps1", type=float, default=1e-4)
    training.add_argument("--eps2", type=float, default=1e-4)
    training.add_argument(
        "--batch", type=int, default=16, help="gradient batch size, 0 for full batch"
    )
    training.add_argument("--repeats", type=int, default=20, metavar="R")
    training.add_argument("--seed", type=int, default=0)

    output = parser.add_argument_group("output")
    output.add_argument("--out", default="reports", help="report directory")
    output.add_argument("--format", choices=("csv", "jsonl", "both"), default="both")
    parser.add_argument(
        "--config",
        help="file of key=value lines matching flag names; explicit flags win",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmvk",
        description="Trainable multi-view kernels: run, sweep, compare, preprocess.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one configuration, all repeats")
    _add_common_arguments(run)

    sweep = sub.add_parser("sweep", help="repeat a run along one hyperparameter axis")
    _add_common_arguments(sweep)
    sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sweep.add_argument(
        "--values",
        required=True,
        help="comma-separated axis values, e.g. 0,0.125,0.5,1",
    )

    compare = sub.add_parser(
        "compare", help="quantum trained/untrained and classical over shared splits"
    )
    _add_common_arguments(compare)
    compare.add_argument(
        "--no-single-views",
        action="store_true",
        help="skip the per-view runs and only compare fused kernels",
    )

    preprocess = sub.add_parser(
        "preprocess", help="dump preprocessed per-view train/test matrices"
    )
    _add_common_arguments(preprocess)
    return parser


def _config_file_tokens(path: str) -> list[str]:
    """Translate key=value lines into flag tokens, prepended before real flags."""
    tokens: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed config line {raw.strip()!r}")
            key = key.strip()
            value = value.strip()
            flag = "--" + key.replace("_", "-")
            if key in _STORE_TRUE_FLAGS:
                if value.lower() in ("1", "true", "yes"):
                    tokens.append(flag)
                elif value.lower() not in ("0", "false", "no"):
                    raise ValueError(f"boolean config key {key!r} got {value!r}")
            else:
                tokens.extend([flag, value])
    return tokens


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    dataset_dir = resolve_dataset_dir(args.dataset_dir)
    synthetic = None
    if args.synthetic:
        dataset_dir = None
        synthetic = SyntheticSpec(
            num_views=args.synth_views,
            view_dim=args.synth_dim,
            per_class=args.synth_per_class,
            num_classes=args.synth_classes,
            separation=args.synth_separation,
            noise=args.synth_noise,
            latent_dim=args.synth_latent_dim,
            seed=args.synth_seed,
        )
    elif dataset_dir is None:
        raise ValueError(
            "no dataset: pass --dataset-dir, set QMVK_DATASET_DIR, or use --synthetic"
        )
    train = TrainConfig(
        lam=args.lam,
        k1=args.k1,
        k2=args.k2,
        learning_rate=args.lr,
        max_iters_stage1=args.t1,
        max_iters_stage2=args.t2,
        eps1=args.eps1,
        eps2=args.eps2,
        batch_size=args.batch,
        seed=args.seed,
    )
    view = None if args.multi_view else args.view
    return ExperimentConfig(
        dataset_dir=dataset_dir,
        synthetic=synthetic,
        mode=args.mode,
        trained=not args.untrained,
        view=view,
        depth=args.depth,
        pca_dim=args.pca_dim,
        train_per_class=args.train_per_class,
        test_per_class=args.test_per_class,
        svm_c=args.svm_c,
        repeats=args.repeats,
        seed=args.seed,
        train=train,
    )


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    # peel off --config first so its values act as overridable defaults
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        try:
            file_tokens = _config_file_tokens(known.config)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if argv and argv[0] and not argv[0].startswith("-"):
            argv = [argv[0]] + file_tokens + argv[1:]
        else:
            argv = file_tokens + list(argv)
    args = parser.parse_args(argv)
    try:
        if args.command == "preprocess":
            config = _experiment_config(args)
            preprocess_dump(config, args.out)
            print(f"wrote preprocessed matrices to {args.out}")
            return 0
        if args.command == "run":
            config = _experiment_config(args)
            reports = [run_pipeline(config)]
        elif args.command == "sweep":
            config = _experiment_config(args)
            values = [float(v) for v in args.values.split(",") if v.strip()]
            reports = sweep_axis(config, args.axis, values)
        else:
            config = _experiment_config(args)
            reports = compare_modes(
                config, include_single_views=not args.no_single_views
            )
        emit_report(reports, args.out, fmt=args.format)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for report in reports:
        print(
            f"{report.label}: accuracy {100.0 * report.mean_accuracy:.2f} "
            f"+/- {100.0 * report.std_accuracy:.2f}, "
            f"combined alignment {100.0 * report.mean_combined_hta_initial:.2f} "
            f"-> {100.0 * report.mean_combined_hta_final:.2f}"
        )
    print(f"reports written to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
