"""SMOTE tests, checked against brute-force geometric oracles."""

import numpy as np
import pytest

from ddosflow.errors import DataError
from ddosflow.flow_data import FlowDataset
from ddosflow.smote import (
    SmoteConfig,
    minority_neighbors,
    oversample,
    synthesize,
    write_audit_csv,
)


def _ds(features, labels):
    features = np.asarray(features, dtype=np.float64)
    names = tuple(f"c{i}" for i in range(features.shape[1]))
    return FlowDataset(names, features, np.asarray(labels, dtype=np.int64))


def brute_force_neighbors(X, k):
    """All-pairs oracle: sort by (squared distance, index), self excluded."""
    n = X.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        cand = []
        for j in range(n):
            if j == i:
                continue
            d2 = float(((X[i] - X[j]) ** 2).sum())
            cand.append((d2, j))
        cand.sort()
        out[i] = [j for _, j in cand[:k]]
    return out


def on_segment(x, a, b, tol=1e-9):
    """True if x lies on the closed segment [a, b], per-coordinate residual tol."""
    ts = []
    for xi, ai, bi in zip(x, a, b):
        if bi == ai:
            if abs(xi - ai) > tol:
                return False
        else:
            ts.append((xi - ai) / (bi - ai))
    if not ts:
        return True
    t = ts[0]
    if not -tol <= t <= 1.0 + tol:
        return False
    recon = a + t * (b - a)
    return bool(np.abs(x - recon).max() <= tol)


# ------------------------------------------------------------- neighbors

def test_collinear_points_k1():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]])
    nbrs = minority_neighbors(X, 1)
    assert nbrs[:, 0].tolist() == [1, 0, 1]


def test_duplicate_points_are_mutual_neighbors():
    X = np.array([[3.0, 3.0], [3.0, 3.0]])
    nbrs = minority_neighbors(X, 1)
    assert nbrs[:, 0].tolist() == [1, 0]


def test_k_clamped_with_warning():
    X = np.array([[0.0], [1.0], [2.0]])
    with pytest.warns(RuntimeWarning, match="clamping k to 2"):
        nbrs = minority_neighbors(X, 5)
    assert nbrs.shape == (3, 2)


def test_too_few_minority_rows():
    with pytest.raises(DataError, match=">=2 minority"):
        minority_neighbors(np.array([[1.0, 2.0]]), 1)


def test_neighbors_match_brute_force_oracle():
    rng = np.random.Generator(np.random.PCG64(17))
    for trial in range(30):
        n = int(rng.integers(2, 25))
        d = int(rng.integers(1, 5))
        k = int(rng.integers(1, n))
        X = rng.normal(size=(n, d))
        np.testing.assert_array_equal(
            minority_neighbors(X, k), brute_force_neighbors(X, k)
        )


def test_neighbor_ties_break_to_lower_index():
    # integer grid gives exact distance ties; the oracle's (d2, j) sort
    # encodes the same low-index rule, so equality covers tie-breaking
    rng = np.random.Generator(np.random.PCG64(29))
    for _ in range(20):
        n = int(rng.integers(4, 16))
        X = rng.integers(0, 3, size=(n, 2)).astype(np.float64)
        k = n - 1
        np.testing.assert_array_equal(
            minority_neighbors(X, k), brute_force_neighbors(X, k)
        )


# ------------------------------------------------------------- synthesize

def test_synthesize_lambda_zero_is_parent():
    x = np.array([1.5, -2.0])
    z = np.array([4.0, 4.0])
    np.testing.assert_array_equal(synthesize(x, z, 0.0), x)


def test_synthesize_direct_arithmetic():
    out = synthesize(np.array([0.0, 0.0]), np.array([2.0, 4.0]), 0.25)
    np.testing.assert_array_equal(out, [0.5, 1.0])


def test_synthesize_stays_on_segment():
    rng = np.random.Generator(np.random.PCG64(5))
    for _ in range(200):
        a = rng.normal(size=4) * 10
        b = rng.normal(size=4) * 10
        lam = float(rng.random())
        out = synthesize(a, b, lam)
        lo = np.minimum(a, b) - 1e-12
        hi = np.maximum(a, b) + 1e-12
        assert ((out >= lo) & (out <= hi)).all()


def test_synthesize_errors():
    with pytest.raises(ValueError, match="dimension"):
        synthesize(np.zeros(2), np.zeros(3), 0.5)
    with pytest.raises(ValueError, match="lambda"):
        synthesize(np.zeros(2), np.zeros(2), 1.0)
    with pytest.raises(ValueError, match="lambda"):
        synthesize(np.zeros(2), np.zeros(2), -0.1)


# ------------------------------------------------------------- oversample

def test_oversample_counts_100_10():
    rng = np.random.Generator(np.random.PCG64(1))
    ds = _ds(rng.normal(size=(110, 3)), [0] * 100 + [1] * 10)
    out, records = oversample(ds, SmoteConfig(seed=0))
    counts = np.bincount(out.labels)
    assert counts.tolist() == [100, 100]
    assert len(records) == 90
    assert out.n_rows == 200


def test_oversample_balanced_input_is_noop():
    rng = np.random.Generator(np.random.PCG64(2))
    ds = _ds(rng.normal(size=(20, 2)), [0] * 10 + [1] * 10)
    out, records = oversample(ds, SmoteConfig())
    assert records == []
    np.testing.assert_array_equal(out.features, ds.features)
    np.testing.assert_array_equal(out.labels, ds.labels)


@pytest.mark.filterwarnings("ignore:requested k=:RuntimeWarning")
def test_oversample_preserves_originals_verbatim_first():
    rng = np.random.Generator(np.random.PCG64(3))
    ds = _ds(rng.normal(size=(30, 4)), [0] * 25 + [1] * 5)
    out, _ = oversample(ds, SmoteConfig(seed=4))
    np.testing.assert_array_equal(out.features[:30], ds.features)
    np.testing.assert_array_equal(out.labels[:30], ds.labels)


def test_oversample_deterministic():
    rng = np.random.Generator(np.random.PCG64(4))
    ds = _ds(rng.normal(size=(40, 3)), [0] * 33 + [1] * 7)
    out1, _ = oversample(ds, SmoteConfig(seed=12))
    out2, _ = oversample(ds, SmoteConfig(seed=12))
    np.testing.assert_array_equal(out1.features, out2.features)
    out3, _ = oversample(ds, SmoteConfig(seed=13))
    assert not np.array_equal(out1.features, out3.features)


def test_oversample_requires_both_classes():
    ds = _ds(np.zeros((5, 2)), [0] * 5)
    with pytest.raises(DataError, match="both classes"):
        oversample(ds, SmoteConfig())


def test_oversample_minority_may_be_class_zero():
    rng = np.random.Generator(np.random.PCG64(6))
    ds = _ds(rng.normal(size=(50, 2)), [1] * 44 + [0] * 6)
    out, records = oversample(ds, SmoteConfig(seed=2))
    counts = np.bincount(out.labels)
    assert counts.tolist() == [44, 44]
    assert all(out.labels[50 + i] == 0 for i in range(len(records)))


@pytest.mark.filterwarnings("ignore:requested k=:RuntimeWarning")
def test_oversample_target_ratio():
    rng = np.random.Generator(np.random.PCG64(7))
    ds = _ds(rng.normal(size=(45, 2)), [0] * 41 + [1] * 4)
    out, _ = oversample(ds, SmoteConfig(seed=3, target_ratio=0.5))
    # round-half-up(0.5 * 41) = 21 minority rows afterwards
    assert np.bincount(out.labels).tolist() == [41, 21]


def test_oversample_ratio_already_met_is_noop():
    rng = np.random.Generator(np.random.PCG64(8))
    ds = _ds(rng.normal(size=(30, 2)), [0] * 20 + [1] * 10)
    out, records = oversample(ds, SmoteConfig(target_ratio=0.5))
    assert records == [] and out.n_rows == 30


def test_synthetic_rows_match_recorded_parents_exactly():
    rng = np.random.Generator(np.random.PCG64(9))
    ds = _ds(rng.normal(size=(26, 3)), [0] * 20 + [1] * 6)
    out, records = oversample(ds, SmoteConfig(seed=5))
    for s, rec in enumerate(records):
        row = out.features[26 + s]
        np.testing.assert_array_equal(row, rec.vector)
        expected = synthesize(
            ds.features[rec.parent_index],
            ds.features[rec.neighbor_index],
            rec.lambda_interp,
        )
        np.testing.assert_array_equal(row, expected)
        assert ds.labels[rec.parent_index] == 1
        assert ds.labels[rec.neighbor_index] == 1
        assert 0.0 <= rec.lambda_interp < 1.0


@pytest.mark.filterwarnings("ignore:requested k=:RuntimeWarning")
def test_synthetic_rows_pass_segment_membership_oracle():
    rng = np.random.Generator(np.random.PCG64(10))
    for trial in range(10):
        n_min = int(rng.integers(2, 9))
        n_maj = int(rng.integers(n_min + 1, 30))
        d = int(rng.integers(1, 5))
        features = rng.normal(size=(n_maj + n_min, d))
        ds = _ds(features, [0] * n_maj + [1] * n_min)
        out, records = oversample(ds, SmoteConfig(seed=trial))
        minority = ds.features[ds.labels == 1]
        for rec in records:
            hits = [
                on_segment(rec.vector, minority[i], minority[j])
                for i in range(n_min)
                for j in range(n_min)
                if i != j
            ]
            assert any(hits)


@pytest.mark.filterwarnings("ignore:requested k=:RuntimeWarning")
def test_parent_cycling_covers_all_minority_rows():
    rng = np.random.Generator(np.random.PCG64(11))
    ds = _ds(rng.normal(size=(28, 2)), [0] * 24 + [1] * 4)
    _, records = oversample(ds, SmoteConfig(seed=1))
    # 20 synthetic rows over 4 parents -> each parent used exactly 5 times
    parents = [r.parent_index for r in records]
    assert len(records) == 20
    for p in (24, 25, 26, 27):
        assert parents.count(p) == 5
    assert parents[:4] == [24, 25, 26, 27]  # dataset row order


@pytest.mark.filterwarnings("ignore:requested k=:RuntimeWarning")
def test_audit_csv(tmp_path):
    rng = np.random.Generator(np.random.PCG64(12))
    ds = _ds(rng.normal(size=(12, 2)), [0] * 9 + [1] * 3)
    _, records = oversample(ds, SmoteConfig(seed=0))
    path = tmp_path / "audit.csv"
    write_audit_csv(records, str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "parent_index,neighbor_index,lambda_interp"
    assert len(lines) == len(records) + 1
    first = lines[1].split(",")
    assert int(first[0]) == records[0].parent_index
    assert float(first[2]) == records[0].lambda_interp


def test_config_validation():
    with pytest.raises(ValueError):
        SmoteConfig(k=0)
    with pytest.raises(ValueError):
        SmoteConfig(target_ratio=0.0)
    with pytest.raises(ValueError):
        SmoteConfig(target_ratio=1.5)
