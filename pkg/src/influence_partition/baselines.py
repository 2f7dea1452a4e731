"""Comparison partitioners: random, label propagation, recursive split, recursive merge.

All objective-driven steps score candidates on one ``LiveEdgeBatch`` so that
comparisons between candidates share random numbers. The split and merge
procedures are heuristics in the spirit of the MKCP split/merge algorithms;
they do not claim to reproduce the originals move for move.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import DirectedGraph
from .greedy import CommunityPartition, ConfigurationError
from .influence import DEFAULT_SAMPLES, LiveEdgeBatch, as_generator, draw_seed

log = logging.getLogger(__name__)

METHODS = ("random", "label_propagation", "samkcp", "mamkcp")


@dataclass(frozen=True)
class BaselineConfig:
    method: str
    m: int
    max_iterations: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown baseline {self.method!r}")
        if self.m < 1:
            raise ConfigurationError("m must be >= 1")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be >= 1")


def random_partition(graph: DirectedGraph, m: int, rng=None) -> CommunityPartition:
    if m < 1:
        raise ConfigurationError("m must be >= 1")
    return CommunityPartition(as_generator(rng).integers(m, size=graph.n), m)


def _undirected_neighbors(graph: DirectedGraph) -> list[np.ndarray]:
    out_ptr, out_dst, _ = graph.out_csr
    in_ptr, in_src, _ = graph.in_csr
    return [np.union1d(out_dst[out_ptr[v]:out_ptr[v + 1]], in_src[in_ptr[v]:in_ptr[v + 1]])
            for v in range(graph.n)]


def _lpa_labels(graph: DirectedGraph, max_iterations: int, gen: np.random.Generator) -> np.ndarray:
    """Asynchronous label propagation; a node keeps its label while it is among the most frequent."""
    nbrs = _undirected_neighbors(graph)
    labels = np.arange(graph.n)
    for it in range(max_iterations):
        changed = False
        for v in gen.permutation(graph.n):
            if len(nbrs[v]) == 0:
                continue
            vals, cnt = np.unique(labels[nbrs[v]], return_counts=True)
            top = vals[cnt == cnt.max()]
            if labels[v] in top:
                continue
            labels[v] = top[gen.integers(len(top))]
            changed = True
        if not changed:
            log.debug("label propagation stable after %d passes", it + 1)
            break
    return labels


def _groups_from_labels(labels: np.ndarray) -> list[set[int]]:
    groups: dict[int, set[int]] = {}
    for v, lab in enumerate(labels):
        groups.setdefault(int(lab), set()).add(v)
    return [groups[k] for k in sorted(groups, key=lambda k: min(groups[k]))]


class _Merger:
    """Greedy pairwise merging of communities by the largest sigma gain.

    Gains are integer sample totals from one batch, so ties are exact; they go
    to the lexicographically smallest id pair. A pair with no live path between
    the two communities has gain 0 and is never stored explicitly.
    """

    def __init__(self, batch: LiveEdgeBatch, groups: list[set[int]]):
        self.batch = batch
        self.members = {cid: set(g) for cid, g in enumerate(groups)}
        self.owner = np.empty(batch.graph.n, dtype=np.int64)
        for cid, g in self.members.items():
            self.owner[list(g)] = cid
        self.gain: dict[tuple[int, int], int] = {}
        self.heap: list[tuple[int, int, int]] = []
        for z in list(self.members):
            self._rescore(z, only_above=True)

    def _rescore(self, z: int, only_above: bool = False) -> None:
        g = _kernels.merge_gains(self.batch.parents, self.owner, z)
        for c in np.flatnonzero(g > 0):
            c = int(c)
            if c == z or c not in self.members or (only_above and c < z):
                continue
            key = (min(z, c), max(z, c))
            self.gain[key] = int(g[c])
            heapq.heappush(self.heap, (-int(g[c]), *key))

    def _best(self) -> tuple[int, int]:
        ids = sorted(self.members)
        while self.heap:
            neg, a, b = self.heap[0]
            if self.gain.get((a, b)) != -neg:
                heapq.heappop(self.heap)
                continue
            return a, b
        return ids[0], ids[1]

    def merge_down(self, m: int) -> None:
        while len(self.members) > m:
            a, b = self._best()
            self.members[a] |= self.members.pop(b)
            self.owner[list(self.members[a])] = a
            self.gain = {k: v for k, v in self.gain.items() if a not in k and b not in k}
            self._rescore(a)

    def groups(self) -> list[set[int]]:
        return [self.members[k] for k in sorted(self.members)]


def _merge_groups(batch, groups, m) -> list[set[int]]:
    merger = _Merger(batch, groups)
    merger.merge_down(m)
    return merger.groups()


def label_propagation(graph: DirectedGraph, m: int, max_iterations: int = 100, rng=None,
                      r: int = DEFAULT_SAMPLES) -> CommunityPartition:
    """Label propagation, then reduced to exactly ``m`` groups.

    Surplus groups are merged greedily by objective gain; if there are too few,
    the largest group is bisected at random until there are ``m``.
    """
    if m < 1:
        raise ConfigurationError("m must be >= 1")
    if graph.n == 0:
        raise ConfigurationError("graph is empty")
    gen = as_generator(rng)
    groups = _groups_from_labels(_lpa_labels(graph, max_iterations, gen))
    if len(groups) > m:
        batch = LiveEdgeBatch(graph, r, draw_seed(gen))
        groups = _merge_groups(batch, groups, m)
    while len(groups) < m:
        largest = max(range(len(groups)), key=lambda k: (len(groups[k]), -k))
        g = sorted(groups[largest])
        if len(g) < 2:
            groups.append(set())
            continue
        perm = gen.permutation(g)
        half = len(g) // 2
        groups[largest] = set(perm[:half].tolist())
        groups.append(set(perm[half:].tolist()))
    return CommunityPartition.from_groups(groups, graph.n, m)


def mamkcp(graph: DirectedGraph, m: int, r: int = DEFAULT_SAMPLES, rng=None) -> CommunityPartition:
    """Start from singletons and merge the best pair until ``m`` communities remain."""
    if m < 1:
        raise ConfigurationError("m must be >= 1")
    if m > graph.n:
        raise ConfigurationError(f"m={m} exceeds the node count {graph.n}")
    batch = LiveEdgeBatch(graph, r, draw_seed(as_generator(rng)))
    groups = _merge_groups(batch, [{v} for v in range(graph.n)], m)
    return CommunityPartition.from_groups(groups, graph.n, m)


def _local_search_split(nodes: list[int], batch: LiveEdgeBatch, gen: np.random.Generator,
                        ) -> tuple[set[int], set[int], int]:
    """Balanced random bisection improved by single-node moves; both sides stay nonempty.

    Each round applies the best strictly improving move (ties to the smallest
    node id). Returns the two sides and their summed sigma total.
    """
    perm = gen.permutation(nodes)
    half = len(perm) // 2
    sides = [set(perm[:half].tolist()), set(perm[half:].tolist())]
    while True:
        best = (0, -1, -1)
        for src in (0, 1):
            if len(sides[src]) < 2:
                continue
            dst = 1 - src
            loss = batch.removal_losses(sides[src])
            gain = batch.addition_gains(sides[dst])
            cand = np.array(sorted(sides[src]))
            delta = gain[cand] - loss[cand]
            k = int(np.argmax(delta))
            if delta[k] > best[0] or (delta[k] == best[0] > 0 and cand[k] < best[1]):
                best = (int(delta[k]), int(cand[k]), src)
        if best[0] <= 0:
            break
        _, v, src = best
        sides[src].remove(v)
        sides[1 - src].add(v)
    total = batch.sigma_total(sides[0]) + batch.sigma_total(sides[1])
    return sides[0], sides[1], total


def samkcp(graph: DirectedGraph, m: int, r: int = DEFAULT_SAMPLES, rng=None) -> CommunityPartition:
    """Start from one community and split the most profitable community ``m - 1`` times."""
    if m < 1:
        raise ConfigurationError("m must be >= 1")
    gen = as_generator(rng)
    batch = LiveEdgeBatch(graph, r, draw_seed(gen))
    groups: list[set[int]] = [set(range(graph.n))]
    for _ in range(m - 1):
        best = None
        for k, g in enumerate(groups):
            if len(g) < 2:
                continue
            a, b, total = _local_search_split(sorted(g), batch, gen)
            score = total - batch.sigma_total(g)
            if best is None or score > best[0]:
                best = (score, k, a, b)
        if best is None:
            groups.append(set())
            continue
        _, k, a, b = best
        groups[k] = a
        groups.append(b)
    return CommunityPartition.from_groups(groups, graph.n, m)


def run_baseline(graph: DirectedGraph, config: BaselineConfig, r: int = DEFAULT_SAMPLES
                 ) -> CommunityPartition:
    rng = np.random.default_rng(config.seed)
    if config.method == "random":
        return random_partition(graph, config.m, rng)
    if config.method == "label_propagation":
        return label_propagation(graph, config.m, config.max_iterations, rng, r)
    if config.method == "samkcp":
        return samkcp(graph, config.m, r, rng)
    return mamkcp(graph, config.m, r, rng)
