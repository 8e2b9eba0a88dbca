import numpy as np
import pytest

from igt_lab.graph_ops import make_graph, normalize_adjacency
from igt_lab.sbm import SbmSpec, sample_sbm


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_graph(n: int, expected_degree: float, seed: int):
    """Plain G(n, p) via the block sampler with equal probabilities."""
    p = min(expected_degree / n, 1.0)
    return sample_sbm(SbmSpec(n // 2, n - n // 2, p, 1.0, seed))


def random_operator(n: int, expected_degree: float, seed: int):
    return normalize_adjacency(random_graph(n, expected_degree, seed))


def path_graph(n: int):
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])
