"""Discretized continuous greedy over the community partition matroid, plus rounding.

The ground set is communities x nodes. A set is independent when it holds at
most one community per node, so a maximum-weight independent set under
nonnegative weights is simply the best community for every node.
"""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .graph import DirectedGraph
from .influence import (DEFAULT_SAMPLES, InfluenceEstimate, LiveEdgeBatch, as_generator,
                        draw_seed)
from .lovasz import lovasz_gradient, lovasz_value, sort_assignment

log = logging.getLogger(__name__)

TIE_RTOL = 1e-9
ROW_SUM_TOL = 1e-9


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class PartitionMatroid:
    m: int
    n: int

    def is_independent(self, elements) -> bool:
        used = set()
        for i, j in elements:
            if not (0 <= i < self.m and 0 <= j < self.n) or j in used:
                return False
            used.add(j)
        return True

    def is_base(self, elements) -> bool:
        elements = list(elements)
        return self.is_independent(elements) and len(elements) == self.n


@dataclass(frozen=True)
class CommunityPartition:
    """``assignment[v]`` is the community (0-based) of node v."""

    assignment: np.ndarray
    m: int

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        if len(a) and (a.min() < 0 or a.max() >= self.m):
            raise ValueError("community id outside 0..m-1")
        object.__setattr__(self, "assignment", a)

    @property
    def n(self) -> int:
        return len(self.assignment)

    def communities(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == i) for i in range(self.m)]

    def elements(self) -> list[tuple[int, int]]:
        return [(int(i), j) for j, i in enumerate(self.assignment)]

    def is_valid_for(self, graph: DirectedGraph) -> bool:
        """Covers every node exactly once (disjointness holds by construction)."""
        return self.n == graph.n and bool(np.all((0 <= self.assignment) & (self.assignment < self.m)))

    @classmethod
    def from_groups(cls, groups, n: int, m: int | None = None) -> "CommunityPartition":
        groups = list(groups)
        a = np.full(n, -1, dtype=np.int64)
        for i, g in enumerate(groups):
            for v in g:
                if a[v] != -1:
                    raise ValueError(f"node {v} appears in two groups")
                a[v] = i
        if np.any(a < 0):
            raise ValueError("groups do not cover every node")
        return cls(a, m if m is not None else len(groups))

    def write_csv(self, path, labels=None) -> None:
        """Write ``node,community`` with 1-based community ids."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["node", "community"])
            for v, i in enumerate(self.assignment):
                w.writerow([labels[v] if labels is not None else v, int(i) + 1])


@dataclass
class StepRecord:
    step: int
    t: float
    chosen: np.ndarray  # community chosen for each node at this step
    f_hat: float  # estimate of the extension at x(t)
    seconds: float


@dataclass
class GreedyTrace:
    dt: float
    steps: list[StepRecord] = field(default_factory=list)
    x_history: list[np.ndarray] = field(default_factory=list)  # x(t) after each step
    x_final: np.ndarray | None = None

    def log_lines(self) -> list[str]:
        lines = ["step,t,f_hat_estimate,seconds"]
        for s in self.steps:
            lines.append(f"{s.step},{s.t!r},{s.f_hat!r},{s.seconds:.6f}")
        return lines

    def write_log(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("\n".join(self.log_lines()) + "\n")


def write_assignment_csv(x: np.ndarray, path, labels=None) -> None:
    """Write ``node,community,probability`` rows with 1-based community ids."""
    m, n = x.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "community", "probability"])
        for j in range(n):
            for i in range(m):
                w.writerow([labels[j] if labels is not None else j, i + 1, repr(float(x[i, j]))])


def max_weight_independent_set(weights: np.ndarray) -> np.ndarray:
    """Best community per node for an ``(m, n)`` weight array.

    Weights within a relative ``TIE_RTOL`` of the column maximum tie, and ties
    go to the lowest community id. Returns the chosen community per node.
    """
    w = np.asarray(weights, dtype=np.float64)
    best = w.max(axis=0)
    tol = TIE_RTOL * np.maximum(1.0, np.abs(best))
    return np.argmax(w >= best - tol, axis=0)


def steps_for(dt) -> int:
    """Number of steps K for a unit-fraction time step dt = 1/K (float, Fraction or "1/K")."""
    try:
        if isinstance(dt, (str, Fraction)):
            frac = Fraction(dt)
        else:
            frac = Fraction(float(dt)).limit_denominator(10**6)
            if abs(float(frac) - float(dt)) > 1e-12:
                raise ValueError
    except (ZeroDivisionError, ValueError, TypeError):
        raise ConfigurationError(f"invalid time step {dt!r}") from None
    if frac <= 0 or frac.numerator != 1:
        raise ConfigurationError(f"time step {dt!r} is not of the form 1/K")
    return frac.denominator


def continuous_greedy(graph: DirectedGraph, m: int, dt, r: int = DEFAULT_SAMPLES, rng=None,
                      oracle: Callable | None = None, keep_history: bool = False,
                      ) -> tuple[np.ndarray, GreedyTrace]:
    """Run ``1/dt`` greedy steps from x(0) = 0 and return ``(x(1), trace)``.

    Each step sorts x, takes the Lovász gradient (prefix marginals), picks the
    best community for every node and adds ``dt`` to those entries. Without an
    ``oracle`` every step draws a fresh ``LiveEdgeBatch`` of ``r`` samples,
    shared by all prefixes of that step.

    x is kept as integer step counts over K so every column of x(1) sums to
    exactly 1.
    """
    if m < 1:
        raise ConfigurationError("m must be >= 1")
    k_steps = steps_for(dt)
    gen = as_generator(rng)
    n = graph.n
    counts = np.zeros((m, n), dtype=np.int64)
    trace = GreedyTrace(dt=1.0 / k_steps)

    def step_oracle():
        if oracle is not None:
            return oracle
        return LiveEdgeBatch(graph, r, draw_seed(gen))

    chosen = None
    tic = time.perf_counter()
    for k in range(k_steps + 1):
        x = counts / k_steps
        f = step_oracle()
        sp = sort_assignment(x)
        if k < k_steps:
            grad = lovasz_gradient(x, f, sp)
            # the extension is linear in x along a fixed order: value = grad . x
            value = float(np.sum(grad * x))
        else:
            value = lovasz_value(x, f, sp)
        now = time.perf_counter()
        if k > 0:
            trace.steps.append(StepRecord(k, k / k_steps, chosen, value, now - tic))
        tic = now
        if k == k_steps:
            break
        chosen = max_weight_independent_set(grad)
        counts[chosen, np.arange(n)] += 1
        if keep_history:
            trace.x_history.append(counts / k_steps)
        log.debug("step %d/%d value %.4f", k + 1, k_steps, value)
    x1 = counts / k_steps
    trace.x_final = x1
    return x1, trace


def randomized_round(x: np.ndarray, rng=None) -> CommunityPartition:
    """Assign node j to community i with probability x[i, j], independently per node."""
    x = np.asarray(x, dtype=np.float64)
    sums = x.sum(axis=0)
    if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
        bad = int(np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0])
        raise ValueError(f"assignment probabilities of node {bad} sum to {sums[bad]!r}, not 1")
    gen = as_generator(rng)
    u = gen.random(x.shape[1])
    cum = np.cumsum(x, axis=0)
    choice = (u[None, :] >= cum).sum(axis=0)
    # u may exceed a cumulative sum that rounds to just below 1
    return CommunityPartition(np.minimum(choice, x.shape[0] - 1), x.shape[0])


def best_of_k_roundings(x: np.ndarray, k: int, graph: DirectedGraph, r: int = DEFAULT_SAMPLES,
                        rng=None) -> CommunityPartition:
    """Round ``k`` times and keep the partition with the highest estimated objective.

    The roundings are drawn first, so ``k=1`` gives exactly ``randomized_round``
    on the same generator; all candidates are scored on one common sample batch.
    """
    if k < 1:
        raise ConfigurationError("k must be >= 1")
    gen = as_generator(rng)
    candidates = [randomized_round(x, gen) for _ in range(k)]
    if k == 1:
        return candidates[0]
    batch = LiveEdgeBatch(graph, r, draw_seed(gen))
    scores = [batch.objective(p).value for p in candidates]
    return candidates[int(np.argmax(scores))]


def evaluate(graph: DirectedGraph, partition: CommunityPartition, r: int, seed: int
             ) -> InfluenceEstimate:
    return LiveEdgeBatch(graph, r, seed).objective(partition)
