"""One-hot encoding with numeric passthrough, and the seeded train/test split.

Feature layout is fixed: one-hot blocks first (categorical columns in
declaration order, vocabularies sorted lexicographically), then numeric
columns in their original order. Splitting shuffles row indices with a
Fisher-Yates pass over the pinned splitmix64 stream, so the same seed
gives the same partition on every platform.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dataframe import ColumnKind, DataFrame, LabelVector, SchemaError
from .rng import Stream


class UnknownPolicy(enum.Enum):
    STRICT = "strict"        # unseen category is an error
    ALL_ZEROS = "all_zeros"  # unseen category encodes as a zero block


class EncodingError(ValueError):
    pass


@dataclass
class EncoderModel:
    """Fitted vocabularies plus passthrough layout."""

    vocabularies: dict[str, list[str]]   # categorical column -> sorted categories
    categorical_order: list[str]         # block order
    numeric_names: list[str]             # passthrough order

    @property
    def output_width(self) -> int:
        return sum(len(v) for v in self.vocabularies.values()) + len(self.numeric_names)

    @property
    def feature_names(self) -> list[str]:
        names = []
        for col in self.categorical_order:
            names.extend(f"{col}={cat}" for cat in self.vocabularies[col])
        names.extend(self.numeric_names)
        return names

    def to_dict(self) -> dict:
        return {
            "vocabularies": self.vocabularies,
            "categorical_order": self.categorical_order,
            "numeric_names": self.numeric_names,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EncoderModel":
        return cls(
            vocabularies={k: list(v) for k, v in d["vocabularies"].items()},
            categorical_order=list(d["categorical_order"]),
            numeric_names=list(d["numeric_names"]),
        )


@dataclass
class FeatureMatrix:
    values: np.ndarray        # dense float64, shape (rows, cols)
    names: list[str]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("feature matrix must be 2-dimensional")
        if self.values.shape[1] != len(self.names):
            raise ValueError(
                f"{len(self.names)} names for {self.values.shape[1]} columns"
            )

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass
class SplitResult:
    train_X: FeatureMatrix
    test_X: FeatureMatrix
    train_y: LabelVector
    test_y: LabelVector
    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int
    test_fraction: float


def fit_encoder(frame: DataFrame) -> EncoderModel:
    """Learn sorted vocabularies for categorical columns; numerics pass through."""
    if frame.row_count < 1:
        raise EncodingError("cannot fit an encoder on an empty frame")
    vocabularies = {}
    categorical_order = []
    numeric_names = []
    for spec, col in zip(frame.specs, frame.values):
        if spec.kind is ColumnKind.CATEGORICAL:
            categorical_order.append(spec.name)
            vocabularies[spec.name] = sorted(set(col))
        elif spec.kind is ColumnKind.NUMERIC:
            numeric_names.append(spec.name)
        else:
            raise EncodingError(
                f"label column {spec.name!r} must be split out before encoding"
            )
    return EncoderModel(vocabularies, categorical_order, numeric_names)


def transform(
    encoder: EncoderModel,
    frame: DataFrame,
    policy: UnknownPolicy = UnknownPolicy.STRICT,
) -> FeatureMatrix:
    """Encode a frame into the encoder's fixed feature layout."""
    n = frame.row_count
    out = np.zeros((n, encoder.output_width), dtype=np.float64)
    offset = 0
    for col_name in encoder.categorical_order:
        if not frame.has_column(col_name):
            raise SchemaError(f"frame is missing encoded column {col_name!r}")
        _, col = frame.column(col_name)
        vocab = encoder.vocabularies[col_name]
        index = {cat: i for i, cat in enumerate(vocab)}
        for row, value in enumerate(col):
            slot = index.get(value)
            if slot is None:
                if policy is UnknownPolicy.STRICT:
                    raise EncodingError(
                        f"row {row}, column {col_name!r}: "
                        f"unseen category {value!r}"
                    )
                continue  # AllZeros: leave the block at zero
            out[row, offset + slot] = 1.0
        offset += len(vocab)
    for col_name in encoder.numeric_names:
        if not frame.has_column(col_name):
            raise SchemaError(f"frame is missing encoded column {col_name!r}")
        _, col = frame.column(col_name)
        out[:, offset] = np.asarray(col, dtype=np.float64)
        offset += 1
    return FeatureMatrix(out, encoder.feature_names)


def train_test_split(
    X: FeatureMatrix, y: LabelVector, test_fraction: float, seed: int
) -> SplitResult:
    """Seeded shuffled split; first ceil(fraction * n) shuffled indices are the test set."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction {test_fraction} not in (0, 1)")
    n = X.rows
    if n != len(y):
        raise ValueError(f"{n} feature rows but {len(y)} labels")
    if n < 2:
        raise ValueError("need at least 2 rows to split")
    n_test = math.ceil(test_fraction * n)
    if n_test >= n:
        raise ValueError(
            f"test_fraction {test_fraction} leaves an empty train partition"
        )
    perm = Stream(seed).permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    return SplitResult(
        train_X=FeatureMatrix(X.values[train_idx], X.names),
        test_X=FeatureMatrix(X.values[test_idx], X.names),
        train_y=LabelVector(y.values[train_idx]),
        test_y=LabelVector(y.values[test_idx]),
        train_indices=train_idx,
        test_indices=test_idx,
        seed=seed,
        test_fraction=test_fraction,
    )
