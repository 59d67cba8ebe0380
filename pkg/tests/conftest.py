"""Shared test helpers: small-graph atlases, converters, cover generators."""

from __future__ import annotations

import random
from functools import lru_cache

import pytest

from fancolour import Graph, build_list_cover


@lru_cache(maxsize=None)
def atlas_graphs(max_n: int = 7) -> tuple[Graph, ...]:
    """Every graph on 1..max_n vertices up to isomorphism (networkx atlas)."""
    import networkx as nx

    out = []
    for ag in nx.graph_atlas_g()[1:]:
        if ag.number_of_nodes() > max_n:
            break
        if ag.number_of_nodes() == 0:
            continue
        out.append(from_networkx(ag))
    return tuple(out)


def from_networkx(ag) -> Graph:
    nodes = sorted(ag.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    return Graph(len(nodes), [(index[u], index[v]) for u, v in ag.edges()])


@lru_cache(maxsize=None)
def connected_atlas_graphs(max_n: int = 7) -> tuple[Graph, ...]:
    from fancolour.graph import is_connected

    return tuple(g for g in atlas_graphs(max_n) if is_connected(g))


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph(
        n,
        [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p],
    )


def random_list_cover(rng: random.Random, g: Graph, max_list: int = 3, pool: int = 4):
    lists = []
    for _ in range(g.n):
        size = rng.randint(1, max_list)
        lists.append(sorted(rng.sample(range(1, pool + 1), size)))
    return build_list_cover(g, lists)


def pkfree_base(rng: random.Random, k: int) -> Graph:
    """A small random graph with no path on k-1 vertices."""
    from fancolour.graph import is_path_free

    while True:
        n = rng.randint(2, 5)
        g = random_graph(rng, n, 0.45)
        if is_path_free(g, k):
            return g


@pytest.fixture
def rng():
    return random.Random(12345)
