"""Command-line entry points.

Subcommands: synth, train, evaluate, predict, gradcheck,
print-default-config. Every command is deterministic given its config;
all seeds live in the config document (or the --seed override).

Exit codes: 0 success, 1 usage or config error, 2 data error,
3 self-check failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import os
import sys

import numpy as np

from .config import (
    PipelineConfig,
    default_config,
    dumps_config,
    load_config,
    with_seed,
)
from .errors import ConfigError, DataError
from .flow_data import (
    FlowDataset,
    ScalerParams,
    apply_scaler,
    clean,
    fit_scaler,
    load_feature_matrix,
    load_flow_csv,
    train_test_split,
)
from .metrics import build_report, format_report_kv, format_report_table
from .nn import (
    ArchitectureConfig,
    LossSpec,
    gradient_check,
    init_model,
    load_model,
    save_model,
)
from .smote import oversample
from .synth import SyntheticSpec, write_synthetic_csv
from .trainer import (
    classify,
    predict_proba,
    run_dual_phase,
    write_train_report_csv,
)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors (default would be 2)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


@contextlib.contextmanager
def _stage(name: str):
    """Prefix errors with the pipeline stage that raised them."""
    try:
        yield
    except (DataError, OSError, ValueError) as exc:
        raise type(exc)(f"{name}: {exc}") from exc


def _load_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if getattr(args, "seed", None) is not None:
        cfg = with_seed(cfg, args.seed)
    threshold = getattr(args, "threshold", None)
    if threshold is not None:
        try:
            cfg = dataclasses.replace(
                cfg, train=dataclasses.replace(cfg.train, threshold=threshold)
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return cfg


def _embedded_scaler(extra: dict) -> tuple[ScalerParams, tuple[str, ...], float]:
    """Pull scaler, feature names, and threshold out of a model manifest."""
    try:
        names = tuple(extra["feature_names"])
        scaler = ScalerParams(
            means=np.asarray(extra["scaler_means"], dtype=np.float64),
            stds=np.asarray(extra["scaler_stds"], dtype=np.float64),
            fitted_on=int(extra["scaler_fitted_on"]),
        )
        threshold = float(extra["threshold"])
    except KeyError as exc:
        raise DataError(f"model file lacks manifest entry {exc}") from exc
    return scaler, names, threshold


def _align_features(ds: FlowDataset, names: tuple[str, ...]) -> FlowDataset:
    """Reorder dataset columns to the model's feature order; strict set match."""
    present = set(ds.feature_names)
    required = set(names)
    missing = sorted(required - present)
    unexpected = sorted(present - required)
    if missing or unexpected:
        raise DataError(
            "feature columns do not match the model: "
            f"missing {missing or 'none'}, unexpected {unexpected or 'none'}"
        )
    idx = [ds.feature_names.index(n) for n in names]
    return FlowDataset(
        feature_names=names,
        features=np.ascontiguousarray(ds.features[:, idx]),
        labels=ds.labels.copy(),
    )


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        n_majority=args.n_majority,
        n_minority=args.n_minority,
        n_features=args.n_features,
        separation=args.separation,
        noise_scale=args.noise_scale,
        seed=args.seed if args.seed is not None else 0,
    )
    ds = write_synthetic_csv(spec, args.out)
    print(
        f"wrote {ds.n_rows} rows ({spec.n_minority} attack) "
        f"x {spec.n_features} features to {args.out}"
    )
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    os.makedirs(args.out, exist_ok=True)
    model_path = args.model or os.path.join(args.out, "model.txt")

    with _stage("load"):
        raw, dropped = load_flow_csv(
            args.data,
            label_column=cfg.data.label_column,
            benign_token=cfg.data.benign_token,
            attack_token=cfg.data.attack_token,
        )
    if dropped:
        print(f"dropped {len(dropped)} non-numeric columns: {', '.join(dropped)}")
    with _stage("clean"):
        ds = clean(raw)
    with _stage("split"):
        train_ds, test_ds = train_test_split(ds, cfg.split)
    with _stage("scale"):
        scaler = fit_scaler(train_ds)
        train_s = apply_scaler(train_ds, scaler)
        test_s = apply_scaler(test_ds, scaler)
    with _stage("smote"):
        balanced, synth_rows = oversample(train_s, cfg.smote)
    print(
        f"train {train_s.n_rows} rows -> {balanced.n_rows} after oversampling "
        f"({len(synth_rows)} synthetic); test {test_s.n_rows} rows"
    )

    with _stage("train"):
        model = init_model(train_s.n_features, cfg.architecture)
        model, report, _ = run_dual_phase(model, train_s, balanced, cfg.train)
    print(f"trained {len(report.records)} epochs in {report.wall_time_s:.1f}s")

    with _stage("save"):
        save_model(
            model,
            model_path,
            extra={
                "feature_names": list(train_s.feature_names),
                "scaler_means": [float(v) for v in scaler.means],
                "scaler_stds": [float(v) for v in scaler.stds],
                "scaler_fitted_on": scaler.fitted_on,
                "threshold": cfg.train.threshold,
                "label_column": cfg.data.label_column,
                "benign_token": cfg.data.benign_token,
                "attack_token": cfg.data.attack_token,
            },
        )
        write_train_report_csv(report, os.path.join(args.out, "train_report.csv"))

    with _stage("evaluate"):
        proba = predict_proba(model, test_s.features)
        pred = classify(proba, cfg.train.threshold)
        eval_report = build_report(pred, proba, test_s.labels)
        table = format_report_table(eval_report)
        with open(os.path.join(args.out, "eval_report.txt"), "w") as fh:
            fh.write(table + "\n")
        with open(os.path.join(args.out, "eval_report.kv"), "w") as fh:
            fh.write(format_report_kv(eval_report))

    print(table)
    print(f"model: {model_path}")
    print(f"reports: {args.out}/train_report.csv eval_report.txt eval_report.kv")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    with _stage("load-model"):
        model, extra = load_model(args.model)
        scaler, names, threshold = _embedded_scaler(extra)
    if args.threshold is not None:
        if not 0.0 < args.threshold < 1.0:
            raise ConfigError("threshold must lie in (0, 1)")
        threshold = args.threshold

    with _stage("load"):
        raw, _ = load_flow_csv(
            args.data,
            label_column=extra.get("label_column", "Label"),
            benign_token=extra.get("benign_token", "BENIGN"),
            attack_token=extra.get("attack_token", "DDoS"),
        )
    with _stage("clean"):
        ds = clean(raw)
    with _stage("align"):
        ds = _align_features(ds, names)
        scaled = apply_scaler(ds, scaler)
    with _stage("evaluate"):
        proba = predict_proba(model, scaled.features)
        pred = classify(proba, threshold)
        report = build_report(pred, proba, scaled.labels)

    print(format_report_table(report))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(format_report_kv(report))
        print(f"report: {args.out}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    with _stage("load-model"):
        model, extra = load_model(args.model)
        scaler, names, threshold = _embedded_scaler(extra)
    if args.threshold is not None:
        if not 0.0 < args.threshold < 1.0:
            raise ConfigError("threshold must lie in (0, 1)")
        threshold = args.threshold
    benign = extra.get("benign_token", "BENIGN")
    attack = extra.get("attack_token", "DDoS")

    with _stage("load"):
        X, row_numbers = load_feature_matrix(args.data, names)

    # rows with unparseable cells are dropped; infinities take the
    # training-set column mean, matching the training-side cleaning
    keep = ~np.isnan(X).any(axis=1)
    n_dropped = int((~keep).sum())
    X = X[keep]
    kept_rows = [r for r, k in zip(row_numbers, keep) if k]
    if X.shape[0] == 0:
        raise DataError(f"{args.data}: no scorable rows")
    inf_mask = np.isinf(X)
    if inf_mask.any():
        X = np.where(inf_mask, np.broadcast_to(scaler.means, X.shape), X)

    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(scaler.stds > 0, (X - scaler.means) / scaler.stds, 0.0)
    proba = predict_proba(model, scaled)
    pred = classify(proba, threshold)

    with _stage("write"):
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "probability", "label"])
            for r, p, c in zip(kept_rows, proba, pred):
                writer.writerow([r, repr(float(p)), attack if c else benign])
    flagged = int(pred.sum())
    note = f", dropped {n_dropped} rows with unparseable cells" if n_dropped else ""
    print(f"scored {X.shape[0]} rows, {flagged} flagged as {attack}{note}")
    print(f"predictions: {args.out}")
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    cfg = _load_pipeline_config(args)
    gc = cfg.gradcheck
    tol = args.tolerance if args.tolerance is not None else gc.tolerance
    if tol <= 0:
        raise ConfigError("tolerance must be positive")

    arch = ArchitectureConfig(
        input_width=gc.input_width,
        block_widths=gc.block_widths,
        attention_after_each=False,
        init_seed=gc.seed,
    )
    model = init_model(gc.n_features, arch)
    rng = np.random.Generator(np.random.PCG64(gc.seed + 1))
    X = rng.standard_normal((gc.batch_rows, gc.n_features))
    y = rng.integers(0, 2, gc.batch_rows).astype(np.int64)
    if y.min() == y.max():  # force both classes so every loss is exercised
        y[0] = 1 - y[0]
    anchors = rng.uniform(0.05, 0.95, gc.batch_rows)

    checks = [
        (LossSpec(kind="bce"), None),
        (LossSpec(kind="dice"), None),
        (LossSpec(kind="anchored", base="dice", lambda_anchor=1.0), anchors),
    ]
    ok = True
    for spec, anchor_vec in checks:
        report = gradient_check(
            model, X, y, spec, anchors=anchor_vec, h=gc.h, tol=tol
        )
        print(report.format())
        print()
        ok = ok and report.passed
    if not ok:
        print("gradient check FAILED", file=sys.stderr)
        return 3
    print("gradient check passed")
    return 0


def cmd_print_default_config(_args: argparse.Namespace) -> int:
    sys.stdout.write(dumps_config(default_config()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ddosflow",
        description="DDoS flow detection: SMOTE-balanced dual-phase "
        "residual network with feature attention.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled flow CSV")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--n-majority", type=int, default=1000)
    p.add_argument("--n-minority", type=int, default=50)
    p.add_argument("--n-features", type=int, default=8)
    p.add_argument("--separation", type=float, default=6.0)
    p.add_argument("--noise-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="run the full training pipeline")
    p.add_argument("--data", required=True, help="labeled flow CSV")
    p.add_argument("--out", required=True, help="output directory for reports")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--model", help="model file path (default OUT/model.txt)")
    p.add_argument("--seed", type=int, default=None, help="override all seeds")
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a labeled CSV against a model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="labeled flow CSV")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", help="also write key=value report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="per-row probabilities for a flow CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="flow CSV (labels not needed)")
    p.add_argument("--out", required=True, help="output predictions CSV")
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("gradcheck", help="finite-difference gradient self-check")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--seed", type=int, default=None, help="override all seeds")
    p.add_argument("--tolerance", type=float, default=None)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("print-default-config", help="emit the full default config")
    p.set_defaults(func=cmd_print_default_config)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
