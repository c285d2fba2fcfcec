import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowids.dataframe import (
    ColumnKind,
    ColumnSpec,
    DataFrame,
    LabelVector,
    split_xy,
)
from flowids.preprocess import (
    EncoderModel,
    EncodingError,
    FeatureMatrix,
    UnknownPolicy,
    fit_encoder,
    train_test_split,
    transform,
)


def _frame(protos, durs):
    return DataFrame(
        [ColumnSpec("proto", ColumnKind.CATEGORICAL),
         ColumnSpec("dur", ColumnKind.NUMERIC)],
        [list(protos), np.asarray(durs, dtype=float)],
        len(protos),
    )


def test_fit_encoder_sorted_vocabulary():
    enc = fit_encoder(_frame(["tcp", "udp", "tcp", "arp"], [1, 2, 3, 4]))
    assert enc.vocabularies["proto"] == ["arp", "tcp", "udp"]
    assert enc.output_width == 4
    assert enc.feature_names == ["proto=arp", "proto=tcp", "proto=udp", "dur"]


def test_fit_encoder_width_formula(small_frame):
    X_frame, _ = split_xy(small_frame)
    enc = fit_encoder(X_frame)
    assert enc.output_width == len(enc.vocabularies["proto"]) + 2


def test_fit_encoder_pure_passthrough():
    frame = DataFrame(
        [ColumnSpec("a", ColumnKind.NUMERIC), ColumnSpec("b", ColumnKind.NUMERIC)],
        [np.array([1.0, 2.0]), np.array([3.0, 4.0])],
        2,
    )
    enc = fit_encoder(frame)
    assert enc.output_width == 2
    assert enc.categorical_order == []


def test_fit_encoder_empty_frame():
    with pytest.raises(EncodingError):
        fit_encoder(_frame([], []))


def test_transform_one_hot_block():
    frame = _frame(["tcp", "udp", "arp"], [1.0, 2.0, 3.0])
    enc = fit_encoder(frame)
    M = transform(enc, frame)
    assert M.names == ["proto=arp", "proto=tcp", "proto=udp", "dur"]
    np.testing.assert_array_equal(
        M.values,
        [[0, 1, 0, 1], [0, 0, 1, 2], [1, 0, 0, 3]],
    )


def test_transform_unseen_strict():
    enc = fit_encoder(_frame(["tcp", "udp"], [1, 2]))
    with pytest.raises(EncodingError, match="icmp"):
        transform(enc, _frame(["icmp"], [1]), UnknownPolicy.STRICT)


def test_transform_unseen_all_zeros():
    enc = fit_encoder(_frame(["arp", "tcp", "udp"], [1, 2, 3]))
    M = transform(enc, _frame(["icmp"], [9]), UnknownPolicy.ALL_ZEROS)
    np.testing.assert_array_equal(M.values, [[0, 0, 0, 9]])


def test_transform_missing_column():
    enc = fit_encoder(_frame(["tcp"], [1]))
    frame = DataFrame([ColumnSpec("dur", ColumnKind.NUMERIC)], [np.array([1.0])], 1)
    with pytest.raises(Exception, match="proto"):
        transform(enc, frame)


def test_fit_transform_row_sums_are_one(small_frame):
    X_frame, _ = split_xy(small_frame)
    enc = fit_encoder(X_frame)
    M = transform(enc, X_frame)
    block = M.values[:, : len(enc.vocabularies["proto"])]
    np.testing.assert_array_equal(block.sum(axis=1), np.ones(M.rows))
    assert set(np.unique(block)) <= {0.0, 1.0}


def test_encoder_row_order_insensitive():
    frame = _frame(["tcp", "udp", "arp", "tcp"], [1, 2, 3, 4])
    permuted = _frame(["arp", "tcp", "tcp", "udp"], [3, 4, 1, 2])
    assert fit_encoder(frame) == fit_encoder(permuted)


def test_encoder_json_round_trip():
    enc = fit_encoder(_frame(["tcp", "udp"], [1, 2]))
    assert EncoderModel.from_dict(enc.to_dict()) == enc


def _matrix(n, d=3, seed=0):
    rng = np.random.RandomState(seed)
    return FeatureMatrix(rng.rand(n, d), [f"f{i}" for i in range(d)])


def _labels(n, seed=0):
    return LabelVector(np.random.RandomState(seed).randint(0, 2, n))


def test_split_sizes():
    split = train_test_split(_matrix(1000), _labels(1000), 0.2, seed=42)
    assert split.test_X.rows == 200
    assert split.train_X.rows == 800
    assert len(split.test_y) == 200
    assert len(split.train_y) == 800


def test_split_deterministic():
    a = train_test_split(_matrix(10), _labels(10), 0.5, seed=7)
    b = train_test_split(_matrix(10), _labels(10), 0.5, seed=7)
    np.testing.assert_array_equal(a.test_indices, b.test_indices)
    np.testing.assert_array_equal(a.train_X.values, b.train_X.values)


def test_split_seed_sensitivity_and_partition():
    a = train_test_split(_matrix(10), _labels(10), 0.2, seed=1)
    b = train_test_split(_matrix(10), _labels(10), 0.2, seed=2)
    assert not np.array_equal(a.test_indices, b.test_indices)
    for s in (a, b):
        merged = sorted(list(s.train_indices) + list(s.test_indices))
        assert merged == list(range(10))


def test_split_labels_follow_rows():
    n = 50
    X = FeatureMatrix(np.arange(n, dtype=float).reshape(-1, 1), ["row_id"])
    y = LabelVector(np.arange(n) % 2)
    split = train_test_split(X, y, 0.3, seed=11)
    for fold_X, fold_y in ((split.train_X, split.train_y), (split.test_X, split.test_y)):
        source = fold_X.values[:, 0].astype(int)
        np.testing.assert_array_equal(fold_y.values, source % 2)


def test_split_rejects_bad_fraction():
    with pytest.raises(ValueError):
        train_test_split(_matrix(10), _labels(10), 1.0, seed=0)
    with pytest.raises(ValueError):
        train_test_split(_matrix(10), _labels(10), 0.0, seed=0)


def test_split_rejects_too_few_rows():
    with pytest.raises(ValueError):
        train_test_split(_matrix(1), _labels(1), 0.5, seed=0)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=120),
    fraction=st.floats(min_value=0.05, max_value=0.95),
    seed=st.integers(min_value=0, max_value=2**63 - 1),
)
def test_split_partition_property(n, fraction, seed):
    import math

    n_test = math.ceil(fraction * n)
    if n_test >= n:
        return
    split = train_test_split(_matrix(n), _labels(n), fraction, seed)
    train = set(split.train_indices.tolist())
    test = set(split.test_indices.tolist())
    assert train | test == set(range(n))
    assert train & test == set()
    assert abs(len(test) - round(fraction * n)) <= 1
