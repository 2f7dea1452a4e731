"""Lovász extension of a set function on the ground set communities x nodes.

An assignment ``x`` is an ``(m, n)`` array; element ``(i, j)`` sits at flat
index ``i * n + j``. An objective oracle is any callable taking an iterable of
``(community, node)`` pairs. Oracles that also expose ``prefix_values(order, m)``
or ``prefix_marginals(order, m)`` (see ``LiveEdgeBatch``) evaluate all prefixes
of a sorted order in one pass; others are called once per prefix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Oracle = Callable[..., float]


@dataclass(frozen=True)
class SortedPrefix:
    """Ground-set elements sorted by descending ``x``, ties by ascending (community, node)."""

    order: np.ndarray  # flat indices
    values: np.ndarray  # x at those indices, non-increasing
    shape: tuple[int, int]

    def element(self, k: int) -> tuple[int, int]:
        return divmod(int(self.order[k]), self.shape[1])

    def prefix(self, k: int) -> list[tuple[int, int]]:
        """The first ``k`` elements."""
        return [self.element(t) for t in range(k)]

    def rank(self) -> np.ndarray:
        """``rank[flat index]`` = position in the order."""
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[self.order] = np.arange(len(self.order))
        return pos


def sort_assignment(x: np.ndarray) -> SortedPrefix:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("assignment must be an (m, n) array")
    flat = x.ravel()
    order = np.argsort(-flat, kind="stable")
    return SortedPrefix(order, flat[order], x.shape)


def in_polytope(x: np.ndarray, tol: float = 1e-12) -> bool:
    """Membership in {x in [0,1]^(m x n) : sum over communities <= 1 per node}."""
    x = np.asarray(x)
    return bool(np.all(x >= -tol) and np.all(x <= 1 + tol)
                and np.all(x.sum(axis=0) <= 1 + tol))


def prefix_values(sp: SortedPrefix, oracle: Oracle) -> np.ndarray:
    """f of every nonempty prefix, ``out[k] = f(first k+1 elements)``."""
    m = sp.shape[0]
    if hasattr(oracle, "prefix_values"):
        return np.asarray(oracle.prefix_values(sp.order, m), dtype=np.float64)
    return np.array([oracle(sp.prefix(k + 1)) for k in range(len(sp.order))])


def _prefix_marginals(sp: SortedPrefix, oracle: Oracle) -> np.ndarray:
    if hasattr(oracle, "prefix_marginals"):
        return np.asarray(oracle.prefix_marginals(sp.order, sp.shape[0]), dtype=np.float64)
    return np.diff(prefix_values(sp, oracle), prepend=0.0)


def lovasz_value(x: np.ndarray, oracle: Oracle, sp: SortedPrefix | None = None) -> float:
    """sum_k (x_k - x_{k+1}) f(S_k) + x_N f(S_N) over the sorted ground set."""
    sp = sp or sort_assignment(x)
    vals = prefix_values(sp, oracle)
    coef = sp.values - np.append(sp.values[1:], 0.0)
    return float(np.dot(coef, vals))


def lovasz_gradient(x: np.ndarray, oracle: Oracle, sp: SortedPrefix | None = None,
                    clamp: bool = True) -> np.ndarray:
    """Per-element marginal gain over its predecessor prefix, as an ``(m, n)`` array.

    Negative marginals (possible only under a noisy oracle) are clipped to 0
    unless ``clamp`` is False.
    """
    sp = sp or sort_assignment(x)
    marg = _prefix_marginals(sp, oracle)
    if clamp:
        marg = np.maximum(marg, 0.0)
    grad = np.empty(len(marg))
    grad[sp.order] = marg
    return grad.reshape(sp.shape)


def level_set_integral(x: np.ndarray, oracle: Oracle) -> float:
    """Integral over lambda in [0, 1] of f({e : x_e > lambda}), exact over the breakpoints of x."""
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    n = x.shape[1]
    cuts = np.unique(np.concatenate([[0.0, 1.0], np.clip(flat, 0.0, 1.0)]))
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        level = [divmod(int(k), n) for k in np.flatnonzero(flat > lo)]
        total += (hi - lo) * oracle(level)
    return total
