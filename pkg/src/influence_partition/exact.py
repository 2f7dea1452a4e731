"""Exact influence by enumerating every live-edge configuration.

Only for small graphs. Reachability is computed by boolean matrix closure,
independently of the chain-walking kernels used by the Monte Carlo path.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .graph import DirectedGraph
from .influence import split_elements

ENUMERATION_BUDGET = 10**7
_CHUNK = 1 << 15


class OracleBudgetError(RuntimeError):
    """The configuration space is too large to enumerate."""


def _choices(graph: DirectedGraph, members: list[int]):
    """Per member: list of (local parent index or -1, probability), zero-probability options dropped."""
    local = {v: k for k, v in enumerate(members)}
    indptr, sources, weights = graph.in_csr
    out = []
    for v in members:
        opts = []
        total = 0.0
        for k in range(indptr[v], indptr[v + 1]):
            u = int(sources[k])
            if u in local and weights[k] > 0:
                opts.append((local[u], float(weights[k])))
                total += float(weights[k])
        rest = 1.0 - total
        if rest > 1e-12:
            opts.append((-1, rest))
        out.append(opts)
    return out


def configuration_count(graph: DirectedGraph, nodes: Iterable[int]) -> int:
    members = sorted(int(v) for v in nodes)
    return math.prod(len(c) for c in _choices(graph, members))


def exact_sigma(graph: DirectedGraph, nodes: Iterable[int],
                budget: int = ENUMERATION_BUDGET) -> float:
    """Exact sigma(S) on the subgraph induced by ``nodes``."""
    members = sorted(int(v) for v in nodes)
    s = len(members)
    if s < 2:
        return 0.0
    choices = _choices(graph, members)
    radix = np.array([len(c) for c in choices], dtype=np.int64)
    total_configs = math.prod(int(x) for x in radix)
    if total_configs > budget:
        raise OracleBudgetError(
            f"{total_configs} live-edge configurations exceed the budget of {budget}")
    stride = np.ones(s, dtype=np.int64)
    for k in range(1, s):
        stride[k] = stride[k - 1] * radix[k - 1]
    parent_tab = [np.array([p for p, _ in c]) for c in choices]
    prob_tab = [np.array([w for _, w in c]) for c in choices]
    eye = np.eye(s, dtype=bool)
    steps = max(1, math.ceil(math.log2(s)))
    acc = 0.0
    for start in range(0, total_configs, _CHUNK):
        ids = np.arange(start, min(total_configs, start + _CHUNK), dtype=np.int64)
        c = len(ids)
        reach = np.broadcast_to(eye, (c, s, s)).copy()
        prob = np.ones(c)
        for child in range(s):
            digit = (ids // stride[child]) % radix[child]
            par = parent_tab[child][digit]
            prob *= prob_tab[child][digit]
            live = par >= 0
            reach[np.flatnonzero(live), par[live], child] = True
        for _ in range(steps):
            r8 = reach.astype(np.uint8)
            reach = np.matmul(r8, r8) > 0
        pairs = reach.sum(axis=(1, 2)) - s
        acc += float(np.dot(prob, pairs))
    return acc


class ExactObjective:
    """Exact f(A) for subsets A of the ground set, memoized per community node set."""

    def __init__(self, graph: DirectedGraph, budget: int = ENUMERATION_BUDGET):
        self.graph = graph
        self.budget = budget
        self._sigma: dict[frozenset, float] = {}

    def sigma(self, nodes) -> float:
        key = frozenset(int(v) for v in nodes)
        if key not in self._sigma:
            self._sigma[key] = exact_sigma(self.graph, key, self.budget)
        return self._sigma[key]

    def __call__(self, elements) -> float:
        return sum(self.sigma(nodes) for nodes in split_elements(elements).values())


def exact_objective(graph: DirectedGraph, elements, budget: int = ENUMERATION_BUDGET) -> float:
    """Exact f(A) = sum over communities i of sigma({j : (i, j) in A})."""
    if hasattr(elements, "elements"):
        elements = elements.elements()
    return ExactObjective(graph, budget)(elements)
