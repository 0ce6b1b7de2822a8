"""Flow-CSV loading, cleaning, splitting, and standardization.

The functions here take a CICIDS-style flow export (one row per network
flow, header row, a categorical label column) and produce a numeric
dataset ready for training: non-numeric columns dropped, labels encoded
benign=0 / attack=1, NaN rows removed, infinities replaced by column
means, and features standardized with statistics fitted on the training
partition only.

All functions are pure: they return new objects and never mutate their
inputs, so they are safe to call concurrently.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = [
    "FlowDataset",
    "ScalerParams",
    "SplitConfig",
    "load_flow_csv",
    "load_feature_matrix",
    "clean",
    "train_test_split",
    "fit_scaler",
    "apply_scaler",
    "save_flow_csv",
]


@dataclass(frozen=True)
class FlowDataset:
    """A dense feature matrix plus binary labels.

    Attributes:
        feature_names: Column names, one per feature column, unique.
        features: float64 matrix of shape (n_rows, n_features), C-order.
        labels: int64 vector of {0, 1}; 0 = benign, 1 = attack.

    Freshly loaded datasets may still contain NaN/inf in ``features``;
    :func:`clean` establishes the finite invariant.
    """

    feature_names: tuple[str, ...]
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if len(self.feature_names) != self.features.shape[1]:
            raise ValueError("feature_names length must equal feature column count")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels length must equal row count")
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class ScalerParams:
    """Per-column standardization parameters fitted on training rows.

    ``means`` and ``stds`` are the population mean and population standard
    deviation (divisor n) of each feature column; ``fitted_on`` records how
    many rows the fit saw.
    """

    means: np.ndarray
    stds: np.ndarray
    fitted_on: int

    def __post_init__(self) -> None:
        if self.means.shape != self.stds.shape or self.means.ndim != 1:
            raise ValueError("means and stds must be 1-D vectors of equal length")
        if np.any(self.stds < 0):
            raise ValueError("stds must be non-negative")


@dataclass(frozen=True)
class SplitConfig:
    """Train/test split settings: ``test_fraction`` in (0,1) and a shuffle seed."""

    test_fraction: float = 0.2
    seed: int = 0
    stratify: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must be in (0, 1)")


def _parse_cell(cell: str) -> tuple[float, bool]:
    """Parse one CSV cell.

    Returns ``(value, is_numeric_evidence)``. Empty cells become NaN and
    count as no evidence either way; cells that fail to parse as a float
    also become NaN without evidence. Parseable cells (including "inf",
    "Infinity", "NaN") are evidence that the column is numeric.
    """
    s = cell.strip()
    if not s:
        return math.nan, False
    try:
        return float(s), True
    except ValueError:
        return math.nan, False


def load_flow_csv(
    path: str,
    label_column: str = "Label",
    benign_token: str = "BENIGN",
    attack_token: str = "DDoS",
) -> tuple[FlowDataset, list[str]]:
    """Load a flow CSV, encode labels, and drop non-numeric columns.

    Header names are whitespace-stripped (CICIDS exports pad some of
    them). Every non-label column is parsed as float64; cells that do not
    parse become NaN. A column is kept only if at least one of its cells
    parses as a float, so identifier columns (flow IDs, IP addresses,
    timestamps) are dropped wholesale while a numeric column with a few
    corrupt cells survives with NaNs for :func:`clean` to handle.

    Label cells must equal ``benign_token`` or ``attack_token``,
    case-insensitively after trimming; they are encoded 0 and 1.

    Args:
        path: CSV file with a header row (RFC 4180, UTF-8).
        label_column: Header name of the label column.
        benign_token: Label value encoded as 0.
        attack_token: Label value encoded as 1.

    Returns:
        ``(dataset, dropped_columns)`` where ``dropped_columns`` lists the
        names of non-numeric columns that were discarded.

    Raises:
        DataError: missing header or label column, unknown label token
            (named with its row), ragged row, or zero numeric columns.
        OSError: the file cannot be read.
    """
    benign = benign_token.strip().casefold()
    attack = attack_token.strip().casefold()
    if benign == attack:
        raise DataError("benign and attack tokens must differ")

    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        names = [h.strip() for h in header]
        if label_column not in names:
            raise DataError(f"{path}: label column {label_column!r} not found in header")
        label_idx = names.index(label_column)
        col_names = [n for i, n in enumerate(names) if i != label_idx]

        rows: list[list[float]] = []
        labels: list[int] = []
        evidence = [0] * len(col_names)
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue  # skip blank lines
            if len(row) != len(names):
                raise DataError(
                    f"{path}: row {row_no} has {len(row)} fields, expected {len(names)}"
                )
            token = row[label_idx].strip().casefold()
            if token == benign:
                labels.append(0)
            elif token == attack:
                labels.append(1)
            else:
                raise DataError(
                    f"{path}: row {row_no}: unknown label token {row[label_idx].strip()!r}"
                )
            values = []
            j = 0
            for i, cell in enumerate(row):
                if i == label_idx:
                    continue
                value, ok = _parse_cell(cell)
                values.append(value)
                if ok:
                    evidence[j] += 1
                j += 1
            rows.append(values)

    if not rows:
        raise DataError(f"{path}: no data rows")
    keep = [j for j, count in enumerate(evidence) if count > 0]
    dropped = [col_names[j] for j in range(len(col_names)) if j not in set(keep)]
    if not keep:
        raise DataError(f"{path}: no numeric feature columns found")

    matrix = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(col_names))
    matrix = np.ascontiguousarray(matrix[:, keep])
    dataset = FlowDataset(
        feature_names=tuple(col_names[j] for j in keep),
        features=matrix,
        labels=np.asarray(labels, dtype=np.int64),
    )
    return dataset, dropped


def load_feature_matrix(
    path: str, feature_names: tuple[str, ...] | list[str]
) -> tuple[np.ndarray, list[int]]:
    """Read only the named columns from a CSV, in the order given.

    Used for scoring unlabeled flows: any label or extra columns are
    ignored, and cells that fail to parse become NaN for the caller to
    handle. Returns the matrix and the 1-based data-row number of every
    returned row (blank lines are skipped, so numbers may have gaps).

    Raises:
        DataError: missing header, any requested column absent (all
            absentees listed), ragged row, or no data rows.
        OSError: the file cannot be read.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        names = [h.strip() for h in header]
        missing = [n for n in feature_names if n not in names]
        if missing:
            raise DataError(
                f"{path}: missing feature columns: {', '.join(sorted(missing))}"
            )
        take = [names.index(n) for n in feature_names]

        rows: list[list[float]] = []
        row_numbers: list[int] = []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(names):
                raise DataError(
                    f"{path}: row {row_no} has {len(row)} fields, expected {len(names)}"
                )
            rows.append([_parse_cell(row[i])[0] for i in take])
            row_numbers.append(row_no)

    if not rows:
        raise DataError(f"{path}: no data rows")
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(take))
    return matrix, row_numbers


def clean(ds: FlowDataset) -> FlowDataset:
    """Drop rows containing NaN, then replace ±inf with column means.

    The order matters and is fixed: NaN rows are removed first, and the
    replacement mean for an infinite cell is the arithmetic mean of the
    finite values remaining in its column. Idempotent.

    Raises:
        DataError: every row was removed, or a column has no finite value
            to average (the column is named).
    """
    keep = ~np.isnan(ds.features).any(axis=1)
    features = ds.features[keep].copy()
    labels = ds.labels[keep].copy()
    if features.shape[0] == 0:
        raise DataError("empty dataset after cleaning")

    finite = np.isfinite(features)
    for j in np.flatnonzero(~finite.all(axis=0)):
        col_finite = finite[:, j]
        if not col_finite.any():
            raise DataError(f"column {ds.feature_names[j]!r} has no finite values")
        mean = features[col_finite, j].mean()
        features[~col_finite, j] = mean
    return FlowDataset(ds.feature_names, features, labels)


def _round_half_up(x: float) -> int:
    # platform-stable alternative to round(): no banker's rounding
    return int(math.floor(x + 0.5))


def train_test_split(
    ds: FlowDataset, cfg: SplitConfig
) -> tuple[FlowDataset, FlowDataset]:
    """Deterministically shuffle and partition rows into train and test.

    The test partition gets ``round(n_rows * test_fraction)`` rows
    (half-up rounding), clamped to [1, n_rows - 1] so both partitions are
    nonempty. The shuffle uses a PCG64 generator seeded with ``cfg.seed``,
    so the partition is bit-reproducible across runs and platforms. With
    ``stratify=True`` the same rule is applied per class and the per-class
    test counts may make the total differ from the plain rule by one row.

    Raises:
        DataError: fewer than 2 rows.
    """
    n = ds.n_rows
    if n < 2:
        raise DataError("train_test_split requires at least 2 rows")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    if cfg.stratify:
        test_parts = []
        train_parts = []
        for cls in (0, 1):
            cls_idx = np.flatnonzero(ds.labels == cls)
            if cls_idx.size == 0:
                continue
            perm = cls_idx[rng.permutation(cls_idx.size)]
            n_test = min(max(_round_half_up(perm.size * cfg.test_fraction), 1), perm.size - 1) if perm.size > 1 else 0
            test_parts.append(perm[:n_test])
            train_parts.append(perm[n_test:])
        test_idx = np.concatenate(test_parts) if test_parts else np.empty(0, dtype=np.int64)
        train_idx = np.concatenate(train_parts) if train_parts else np.empty(0, dtype=np.int64)
    else:
        perm = rng.permutation(n)
        n_test = min(max(_round_half_up(n * cfg.test_fraction), 1), n - 1)
        test_idx = perm[:n_test]
        train_idx = perm[n_test:]

    def take(idx: np.ndarray) -> FlowDataset:
        return FlowDataset(
            ds.feature_names,
            np.ascontiguousarray(ds.features[idx]),
            ds.labels[idx].copy(),
        )

    return take(train_idx), take(test_idx)


def fit_scaler(train: FlowDataset) -> ScalerParams:
    """Fit per-column population mean and standard deviation (divisor n).

    Fit on training rows only; apply the result to every other partition
    with :func:`apply_scaler`.
    """
    if train.n_rows == 0:
        raise DataError("cannot fit scaler on an empty dataset")
    means = train.features.mean(axis=0)
    stds = train.features.std(axis=0)  # ddof=0: population std
    return ScalerParams(means=means, stds=stds, fitted_on=train.n_rows)


def apply_scaler(ds: FlowDataset, s: ScalerParams) -> FlowDataset:
    """Standardize features: (x - mean) / std, with zero-variance columns set to 0."""
    if s.means.shape[0] != ds.n_features:
        raise ValueError(
            f"scaler has {s.means.shape[0]} columns, dataset has {ds.n_features}"
        )
    centered = ds.features - s.means
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(s.stds > 0, centered / s.stds, 0.0)
    return FlowDataset(ds.feature_names, np.ascontiguousarray(scaled), ds.labels.copy())


def save_flow_csv(
    ds: FlowDataset,
    path: str,
    label_column: str = "Label",
    benign_token: str = "BENIGN",
    attack_token: str = "DDoS",
) -> None:
    """Write the dataset back out as CSV: feature columns plus a label column.

    Floats are written with ``repr``, which round-trips float64 exactly,
    so save → load → save is byte-stable.
    """
    tokens = {0: benign_token, 1: attack_token}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [label_column])
        for i in range(ds.n_rows):
            writer.writerow(
                [repr(float(v)) for v in ds.features[i]] + [tokens[int(ds.labels[i])]]
            )
