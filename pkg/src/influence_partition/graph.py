"""Directed graphs with Linear Threshold edge weights.

Nodes are dense integer ids ``0..n-1``; the external labels read from an edge
list are kept in ``DirectedGraph.labels`` so results can be written back in the
caller's vocabulary.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np

log = logging.getLogger(__name__)

WEIGHT_TOL = 1e-9


class EdgeListError(ValueError):
    """Raised for malformed edge-list input."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class GraphValidationError(ValueError):
    """Raised when a graph violates the LT weight constraints."""


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Immutable directed graph; edge ``k`` is ``src[k] -> dst[k]`` with weight ``weight[k]``.

    ``n`` is the size of the id space. ``nodes`` lists the member ids, which is
    all of ``0..n-1`` except for induced subgraphs, where ids of the parent graph
    are kept.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    nodes: np.ndarray = None
    labels: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "src", np.asarray(self.src, dtype=np.int64))
        object.__setattr__(self, "dst", np.asarray(self.dst, dtype=np.int64))
        object.__setattr__(self, "weight", np.asarray(self.weight, dtype=np.float64))
        if self.nodes is None:
            object.__setattr__(self, "nodes", np.arange(self.n, dtype=np.int64))
        else:
            object.__setattr__(self, "nodes", np.unique(np.asarray(self.nodes, dtype=np.int64)))
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(self.n)))
        for arr in (self.src, self.dst, self.weight, self.nodes):
            arr.setflags(write=False)
        self._check_structure()

    def _check_structure(self) -> None:
        if not (len(self.src) == len(self.dst) == len(self.weight)):
            raise GraphValidationError("edge arrays differ in length")
        if len(self.nodes) and (self.nodes[0] < 0 or self.nodes[-1] >= self.n):
            raise GraphValidationError("node id outside 0..n-1")
        if len(self.src) == 0:
            return
        ends = np.concatenate([self.src, self.dst])
        if ends.min() < 0 or ends.max() >= self.n or not self.member_mask[ends].all():
            raise GraphValidationError("edge endpoint is not a graph node")
        if np.any(self.src == self.dst):
            raise GraphValidationError("self-loops are not allowed")
        keys = self.src * self.n + self.dst
        if len(np.unique(keys)) != len(keys):
            raise GraphValidationError("duplicate (source, target) edge")

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def has_weights(self) -> bool:
        return not np.isnan(self.weight).any()

    @cached_property
    def member_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.nodes] = True
        return mask

    @cached_property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, sources, weights)`` of incoming edges, grouped by target."""
        order = np.lexsort((self.src, self.dst))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, self.dst + 1, 1)
        return np.cumsum(indptr), self.src[order], self.weight[order]

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, targets, weights)`` of outgoing edges, grouped by source."""
        order = np.lexsort((self.dst, self.src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, self.src + 1, 1)
        return np.cumsum(indptr), self.dst[order], self.weight[order]

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_csr[0])

    def in_neighbors(self, i: int) -> np.ndarray:
        indptr, sources, _ = self.in_csr
        return sources[indptr[i]:indptr[i + 1]]

    def out_neighbors(self, i: int) -> np.ndarray:
        indptr, targets, _ = self.out_csr
        return targets[indptr[i]:indptr[i + 1]]

    def incoming_weight_sums(self) -> np.ndarray:
        return np.bincount(self.dst, weights=self.weight, minlength=self.n)

    def check_weights(self) -> None:
        """Raise unless every weight is in [0, 1] and incoming sums are at most 1."""
        if not self.has_weights:
            raise GraphValidationError("graph has unset edge weights")
        if np.any(self.weight < 0) or np.any(self.weight > 1):
            raise GraphValidationError("edge weight outside [0, 1]")
        sums = self.incoming_weight_sums()
        bad = np.flatnonzero(sums > 1 + WEIGHT_TOL)
        if len(bad):
            raise GraphValidationError(
                f"incoming weights of node {int(bad[0])} sum to {sums[bad[0]]:.12g} > 1")

    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(s), int(d), float(w)) for s, d, w in zip(self.src, self.dst, self.weight)]

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(s), int(d)) for s, d in zip(self.src, self.dst)}

    def label_of(self, i: int):
        return self.labels[i]

    def same_as(self, other: "DirectedGraph") -> bool:
        """Structural equality: ids, node set, edges, weights and labels."""
        if self.n != other.n or self.labels != other.labels:
            return False
        if not np.array_equal(self.nodes, other.nodes):
            return False
        a = sorted(self.edges())
        b = sorted(other.edges())
        return len(a) == len(b) and all(
            x[:2] == y[:2] and (x[2] == y[2] or (np.isnan(x[2]) and np.isnan(y[2])))
            for x, y in zip(a, b))


def from_edges(n: int, edges: Iterable[tuple], labels=None) -> DirectedGraph:
    """Build a graph from ``(src, dst)`` or ``(src, dst, weight)`` tuples on ids ``0..n-1``."""
    src, dst, w = [], [], []
    for e in edges:
        src.append(e[0])
        dst.append(e[1])
        w.append(e[2] if len(e) > 2 else np.nan)
    return DirectedGraph(n, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64),
                         np.array(w, dtype=np.float64), labels=labels)


def load_edge_list(stream: TextIO | Iterable[str], directed: bool = True) -> DirectedGraph:
    """Parse a whitespace-separated edge list.

    Each line is ``src dst`` or ``src dst weight``; a line holding a single
    token declares a node (useful for isolated nodes). Blank lines and lines
    starting with ``#`` are skipped. External ids are mapped to dense ids in
    order of first appearance. With ``directed=False`` every line yields both
    directions. Duplicate edges keep the first occurrence; self-loops are
    dropped.
    """
    ids: dict[str, int] = {}

    def intern(token: str) -> int:
        if token not in ids:
            ids[token] = len(ids)
        return ids[token]

    seen: dict[tuple[int, int], float] = {}
    self_loops = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) == 1:
            intern(parts[0])
            continue
        if len(parts) > 3:
            raise EdgeListError(f"expected 'src dst [weight]', got {len(parts)} fields", lineno)
        weight = np.nan
        if len(parts) == 3:
            try:
                weight = float(parts[2])
            except ValueError:
                raise EdgeListError(f"weight {parts[2]!r} is not a number", lineno) from None
            if not 0.0 <= weight <= 1.0:
                raise GraphValidationError(f"line {lineno}: weight {weight} outside [0, 1]")
        u, v = intern(parts[0]), intern(parts[1])
        if u == v:
            self_loops += 1
            continue
        pairs = [(u, v)] if directed else [(u, v), (v, u)]
        for pair in pairs:
            seen.setdefault(pair, weight)
    if self_loops:
        log.warning("dropped %d self-loop(s)", self_loops)

    labels = tuple(ids)
    edges = [(s, d, w) for (s, d), w in seen.items()]
    graph = from_edges(len(labels), edges, labels=labels)
    if graph.has_weights and graph.edge_count:
        graph.check_weights()
    return graph


def read_edge_list(path, directed: bool = True) -> DirectedGraph:
    with open(path) as fh:
        return load_edge_list(fh, directed=directed)


def dump_edge_list(graph: DirectedGraph) -> list[str]:
    """Serialize so that ``load_edge_list(dump_edge_list(g))`` rebuilds ``g``.

    Node declaration lines come first so dense ids survive the round trip.
    """
    lines = [str(graph.labels[i]) for i in range(graph.n)]
    order = np.lexsort((graph.dst, graph.src))
    for k in order:
        s, d, w = graph.labels[graph.src[k]], graph.labels[graph.dst[k]], graph.weight[k]
        lines.append(f"{s} {d}" if np.isnan(w) else f"{s} {d} {float(w)!r}")
    return lines


def write_id_map(graph: DirectedGraph, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["external_id", "internal_id"])
        for i, label in enumerate(graph.labels):
            writer.writerow([label, i])


def derive_lt_weights(graph: DirectedGraph) -> DirectedGraph:
    """Weight every edge ``(j, i)`` by ``1 / in_degree(i)``."""
    indeg = np.bincount(graph.dst, minlength=graph.n)
    weight = 1.0 / indeg[graph.dst] if graph.edge_count else np.zeros(0)
    return DirectedGraph(graph.n, graph.src, graph.dst, weight, nodes=graph.nodes,
                         labels=graph.labels)


def induced_subgraph(graph: DirectedGraph, node_set: Iterable[int]) -> DirectedGraph:
    """Edges with both endpoints in ``node_set``; weights are copied, not renormalized."""
    members = np.unique(np.fromiter((int(v) for v in node_set), dtype=np.int64))
    if len(members) and (members[0] < 0 or members[-1] >= graph.n
                         or not graph.member_mask[members].all()):
        unknown = [int(v) for v in members if v < 0 or v >= graph.n or not graph.member_mask[v]]
        raise KeyError(f"unknown node id(s): {unknown[:5]}")
    mask = np.zeros(graph.n, dtype=bool)
    mask[members] = True
    keep = mask[graph.src] & mask[graph.dst]
    return DirectedGraph(graph.n, graph.src[keep], graph.dst[keep], graph.weight[keep],
                         nodes=members, labels=graph.labels)
