import random

import pytest

from tsgames.core import GameInstance, standard_tolerance
from tsgames.topology import build_graph, standard_graph


def random_tree(rng, node_count):
    return build_graph(node_count, [(rng.randrange(0, v), v) for v in range(1, node_count)])


def random_connected_graph(rng, node_count, extra_edges):
    edges = {
        (min(u, v), max(u, v))
        for u, v in ((rng.randrange(0, v), v) for v in range(1, node_count))
    }
    candidates = [
        (u, v)
        for u in range(node_count)
        for v in range(u + 1, node_count)
        if (u, v) not in edges
    ]
    rng.shuffle(candidates)
    edges.update(candidates[:extra_edges])
    return build_graph(node_count, sorted(edges))


@pytest.fixture
def p5_game():
    return GameInstance(2, 2, standard_graph("path", 5), standard_tolerance("zero", 2))


@pytest.fixture
def rng():
    return random.Random(20240817)
