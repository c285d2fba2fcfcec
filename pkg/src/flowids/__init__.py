"""flowids: network-flow intrusion detection with from-scratch models.

Pipeline: CSV ingestion -> column drops -> one-hot encoding -> seeded
train/test split -> logistic regression or random forest -> metrics ->
deterministic SVG figures. Everything is reproducible bit-for-bit under
a fixed seed.
"""

from .dataframe import (
    ColumnKind,
    ColumnSpec,
    DataFrame,
    LabelVector,
    drop_columns,
    load_csv,
    split_xy,
    write_csv,
)
from .preprocess import (
    EncoderModel,
    FeatureMatrix,
    SplitResult,
    UnknownPolicy,
    fit_encoder,
    train_test_split,
    transform,
)
from .linear import (
    LogisticConfig,
    LogisticModel,
    Penalty,
    fit_logistic,
    predict_label_linear,
    predict_proba_linear,
)
from .forest import (
    ForestConfig,
    ForestModel,
    best_split,
    feature_importances,
    fit_forest,
    fit_tree,
    gini,
    predict_label_forest,
    predict_proba_forest,
    top_k_importances,
)
from .metrics import (
    ClassReport,
    ConfusionMatrix,
    CorrelationMatrix,
    RocCurve,
    class_report,
    confusion,
    dummify_for_correlation,
    pearson,
    roc,
)
from .report import FigureKind, FigureSpec, write_figure

__version__ = "0.1.0"
