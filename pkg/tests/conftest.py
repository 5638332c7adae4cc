import numpy as np
import pytest

from evennet.graph import LabelAssignment, build_graph


def random_gnp(rng, n, p):
    draws = rng.random((n, n))
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    rows, cols = np.nonzero(upper & (draws < p))
    return build_graph(np.column_stack([rows, cols]), n)


def random_labels(rng, n, k=2):
    classes = rng.integers(0, k, size=n)
    classes[:k] = np.arange(k)
    return LabelAssignment.from_classes(classes, num_classes=k)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
