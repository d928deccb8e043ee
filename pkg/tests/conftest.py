import numpy as np
import pytest

from equilift.generate import complete_bipartite, complete_graph, cycle_graph, disjoint_union, petersen


@pytest.fixture
def k33():
    return complete_bipartite(3, 3)


@pytest.fixture
def k44():
    return complete_bipartite(4, 4)


@pytest.fixture
def c4():
    return cycle_graph(4)


@pytest.fixture
def petersen_graph():
    return petersen()


@pytest.fixture
def two_k4():
    return disjoint_union(complete_graph(4), complete_graph(4))


def rng_for(*key) -> np.random.Generator:
    return np.random.default_rng(list(key))
