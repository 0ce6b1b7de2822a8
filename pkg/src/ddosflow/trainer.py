"""Dual-phase training loop and the detection-side helpers.

Phase 1 trains on the original (imbalanced, scaled) flows with a plain
loss. Its frozen predictions on the oversampled set become anchors, and
phase 2 trains on the oversampled set with an anchor penalty that pulls
predictions back toward the phase-1 values. Both phases share one
shuffle stream so a zero-penalty phase 2 continues phase 1 exactly.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .flow_data import FlowDataset
from .nn import (
    LossSpec,
    ModelParams,
    OptimizerState,
    adagrad_step,
    init_optimizer,
    model_forward,
    model_loss,
    named_parameters,
    sigmoid,
)

__all__ = [
    "TrainConfig",
    "EpochRecord",
    "TrainReport",
    "train_phase1",
    "compute_anchors",
    "train_phase2",
    "run_dual_phase",
    "predict_proba",
    "classify",
    "write_train_report_csv",
]

_LOSS_KINDS = ("bce", "dice")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for both phases.

    The anchor penalty is a raw per-batch sum, so lambda_anchor's
    effective strength grows with batch_size.

    reset_optimizer_phase2 gives phase 2 a fresh Adagrad accumulator
    (the default); switching it off makes a zero-penalty phase 2 an
    exact continuation of phase 1.
    """

    epochs_phase1: int = 50
    epochs_phase2: int = 50
    batch_size: int = 256
    eta: float = 0.01
    lambda_anchor: float = 0.1
    loss_phase1: str = "bce"
    loss_phase2_base: str = "dice"
    threshold: float = 0.5
    seed: int = 0
    eps_dice: float = 1.0
    eps_opt: float = 1e-10
    reset_optimizer_phase2: bool = True

    def __post_init__(self) -> None:
        if self.epochs_phase1 < 0 or self.epochs_phase2 < 0:
            raise ValueError("epoch counts must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.lambda_anchor < 0:
            raise ValueError("lambda_anchor must be >= 0")
        if self.loss_phase1 not in _LOSS_KINDS:
            raise ValueError(f"loss_phase1 must be one of {_LOSS_KINDS}")
        if self.loss_phase2_base not in _LOSS_KINDS:
            raise ValueError(f"loss_phase2_base must be one of {_LOSS_KINDS}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.eps_dice <= 0 or self.eps_opt <= 0:
            raise ValueError("smoothing constants must be positive")


@dataclass(frozen=True)
class EpochRecord:
    phase: int
    epoch: int
    loss: float
    accuracy: float


@dataclass(frozen=True)
class TrainReport:
    """Per-epoch curves plus timing for one or both phases."""

    records: tuple[EpochRecord, ...]
    wall_time_s: float


def predict_proba(
    model: ModelParams, X: np.ndarray, chunk_size: int = 4096
) -> np.ndarray:
    """Attack probability per row, inference mode (running BN stats)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"expected (n, {model.n_features}) features, got {X.shape}"
        )
    out = np.empty(X.shape[0], dtype=np.float64)
    for start in range(0, X.shape[0], chunk_size):
        stop = min(start + chunk_size, X.shape[0])
        logits, _ = model_forward(model, X[start:stop], mode="infer")
        out[start:stop] = sigmoid(logits)
    return out


def classify(proba: np.ndarray, threshold: float) -> np.ndarray:
    """1 where probability strictly exceeds the threshold, else 0."""
    return (np.asarray(proba) > threshold).astype(np.int64)


def _epoch_accuracy(
    model: ModelParams, X: np.ndarray, y: np.ndarray, threshold: float
) -> float:
    pred = classify(predict_proba(model, X), threshold)
    return float((pred == y).mean())


def _run_epochs(
    model: ModelParams,
    X: np.ndarray,
    y: np.ndarray,
    spec: LossSpec,
    cfg: TrainConfig,
    epochs: int,
    phase: int,
    opt: OptimizerState,
    rng: np.random.Generator,
    anchors: np.ndarray | None = None,
) -> list[EpochRecord]:
    n = X.shape[0]
    params = dict(named_parameters(model))
    records: list[EpochRecord] = []
    for epoch in range(1, epochs + 1):
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            batch_anchors = anchors[idx] if anchors is not None else None
            loss, grads = model_loss(
                model, X[idx], y[idx], spec, mode="train", anchors=batch_anchors
            )
            adagrad_step(opt, params, grads)
            loss_sum += loss * idx.size
        records.append(
            EpochRecord(
                phase=phase,
                epoch=epoch,
                loss=loss_sum / n,
                accuracy=_epoch_accuracy(model, X, y, cfg.threshold),
            )
        )
    return records


def train_phase1(
    model: ModelParams,
    dataset: FlowDataset,
    cfg: TrainConfig,
    rng: np.random.Generator | None = None,
    opt: OptimizerState | None = None,
) -> tuple[ModelParams, TrainReport]:
    """Mini-batch Adagrad on the original scaled flows.

    The model is updated in place and also returned. Passing rng/opt
    lets a caller keep one shuffle stream and accumulator across phases.
    """
    if dataset.n_rows == 0:
        raise DataError("cannot train on an empty dataset")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
    if opt is None:
        opt = init_optimizer(model, eta=cfg.eta, eps_opt=cfg.eps_opt)
    spec = LossSpec(kind=cfg.loss_phase1, eps_dice=cfg.eps_dice)
    t0 = time.perf_counter()
    records = _run_epochs(
        model,
        dataset.features,
        dataset.labels,
        spec,
        cfg,
        cfg.epochs_phase1,
        phase=1,
        opt=opt,
        rng=rng,
    )
    return model, TrainReport(tuple(records), time.perf_counter() - t0)


def compute_anchors(model: ModelParams, dataset: FlowDataset) -> np.ndarray:
    """Frozen inference-mode probabilities on every row (synthetic too)."""
    return predict_proba(model, dataset.features)


def train_phase2(
    model: ModelParams,
    balanced: FlowDataset,
    anchors: np.ndarray,
    cfg: TrainConfig,
    rng: np.random.Generator | None = None,
    opt: OptimizerState | None = None,
) -> tuple[ModelParams, TrainReport]:
    """Anchored refinement on the oversampled flows.

    Each batch's penalty uses that batch's slice of the anchor vector.
    """
    anchors = np.asarray(anchors, dtype=np.float64)
    if anchors.shape != (balanced.n_rows,):
        raise ValueError(
            f"anchor length {anchors.shape} does not match "
            f"{balanced.n_rows} dataset rows"
        )
    if balanced.n_rows == 0:
        raise DataError("cannot train on an empty dataset")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
    if opt is None:
        opt = init_optimizer(model, eta=cfg.eta, eps_opt=cfg.eps_opt)
    spec = LossSpec(
        kind="anchored",
        base=cfg.loss_phase2_base,
        lambda_anchor=cfg.lambda_anchor,
        eps_dice=cfg.eps_dice,
    )
    t0 = time.perf_counter()
    records = _run_epochs(
        model,
        balanced.features,
        balanced.labels,
        spec,
        cfg,
        cfg.epochs_phase2,
        phase=2,
        opt=opt,
        rng=rng,
        anchors=anchors,
    )
    return model, TrainReport(tuple(records), time.perf_counter() - t0)


def run_dual_phase(
    model: ModelParams,
    train_set: FlowDataset,
    balanced: FlowDataset,
    cfg: TrainConfig,
) -> tuple[ModelParams, TrainReport, np.ndarray]:
    """Phase 1 on the original flows, then anchored phase 2.

    One shuffle generator is threaded through both phases; the Adagrad
    accumulator restarts at the phase boundary unless configured not to.
    Returns the trained model, the merged report, and the anchor vector.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    opt = init_optimizer(model, eta=cfg.eta, eps_opt=cfg.eps_opt)
    t0 = time.perf_counter()
    model, rep1 = train_phase1(model, train_set, cfg, rng=rng, opt=opt)
    anchors = compute_anchors(model, balanced)
    if cfg.reset_optimizer_phase2:
        opt = init_optimizer(model, eta=cfg.eta, eps_opt=cfg.eps_opt)
    model, rep2 = train_phase2(model, balanced, anchors, cfg, rng=rng, opt=opt)
    report = TrainReport(
        rep1.records + rep2.records, time.perf_counter() - t0
    )
    return model, report, anchors


def write_train_report_csv(report: TrainReport, path: str) -> None:
    """phase,epoch,loss,accuracy rows — the data behind the curves."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phase", "epoch", "loss", "accuracy"])
        for rec in report.records:
            writer.writerow(
                [rec.phase, rec.epoch, repr(rec.loss), repr(rec.accuracy)]
            )
