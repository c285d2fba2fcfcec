import numpy as np
import pytest

from flowids.dataframe import ColumnKind, ColumnSpec, DataFrame, LabelVector


@pytest.fixture
def small_frame():
    """3 categorical values, 2 numeric columns, a label; 5 rows."""
    specs = [
        ColumnSpec("proto", ColumnKind.CATEGORICAL),
        ColumnSpec("dur", ColumnKind.NUMERIC),
        ColumnSpec("sbytes", ColumnKind.NUMERIC),
        ColumnSpec("label", ColumnKind.LABEL),
    ]
    values = [
        ["tcp", "udp", "tcp", "arp", "udp"],
        np.array([0.5, 1.5, 0.1, 2.0, 0.9]),
        np.array([100.0, 250.0, 80.0, 40.0, 500.0]),
        np.array([0, 1, 0, 1, 1]),
    ]
    return DataFrame(specs, values, 5)


@pytest.fixture
def labels_mixed():
    return LabelVector(np.array([0, 0, 1, 1]))
