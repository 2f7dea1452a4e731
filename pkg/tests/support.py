"""Shared generators for small random LT graphs and brute-force reference values."""
from __future__ import annotations

import itertools

import numpy as np
from hypothesis import strategies as st

from influence_partition.exact import exact_objective
from influence_partition.graph import DirectedGraph, from_edges

WEIGHT_STYLES = ("in_degree", "dirichlet", "sub_stochastic")


def random_lt_graph(rng: np.random.Generator, n: int, p: float = 0.4,
                    style: str | None = None) -> DirectedGraph:
    """Random directed graph whose incoming weights sum to at most 1 per node.

    ``in_degree`` gives 1/indeg, ``dirichlet`` a random split of unit mass and
    ``sub_stochastic`` a random split of a random mass below 1.
    """
    style = style or WEIGHT_STYLES[int(rng.integers(len(WEIGHT_STYLES)))]
    edges = []
    for v in range(n):
        srcs = [u for u in range(n) if u != v and rng.random() < p]
        if not srcs:
            continue
        if style == "in_degree":
            w = np.full(len(srcs), 1.0 / len(srcs))
        else:
            w = rng.dirichlet(np.ones(len(srcs)))
            if style == "sub_stochastic":
                w = w * rng.uniform(0.2, 1.0)
        edges += [(u, v, float(x)) for u, x in zip(srcs, w)]
    return from_edges(n, edges)


def mutual_pairs() -> DirectedGraph:
    """Two disconnected pairs joined both ways with weight 1."""
    return from_edges(4, [(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)])


def all_assignments(n: int, m: int):
    return itertools.product(range(m), repeat=n)


def brute_force_opt(graph: DirectedGraph, m: int) -> tuple[float, tuple[int, ...]]:
    """Best exact objective over every assignment of nodes to ``m`` communities."""
    best = (-1.0, ())
    for assign in all_assignments(graph.n, m):
        value = exact_objective(graph, [(c, j) for j, c in enumerate(assign)])
        if value > best[0]:
            best = (value, assign)
    return best


@st.composite
def lt_graphs(draw, min_nodes: int = 1, max_nodes: int = 6):
    """Hypothesis strategy for small graphs with incoming weight sums at most 1."""
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    raw = {e: draw(st.floats(0.05, 1.0)) for e in chosen}
    edges = []
    for v in range(n):
        inc = [(u, w) for (u, d), w in raw.items() if d == v]
        total = sum(w for _, w in inc)
        scale = draw(st.floats(0.3, 1.0)) / total if inc else 0.0
        edges += [(u, v, w * scale) for u, w in inc]
    return from_edges(n, edges)
