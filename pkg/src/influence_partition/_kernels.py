"""Compiled loops over sampled live-edge configurations.

Every kernel takes ``parents``, an ``(r, n)`` int array where ``parents[s, v]``
is the source of the single live in-edge of ``v`` in sample ``s`` (or -1).
Influence flows parent -> child, so the nodes that reach ``v`` are exactly the
distinct nodes on its parent chain. Restricting a sample to a node mask gives
a valid sample of the induced subgraph: a parent outside the mask means no
live in-edge there.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def count_pairs(parents, members, mask):
    """Per-sample number of ordered pairs (a, b), a != b, with a live path a -> b inside ``mask``."""
    r, n = parents.shape
    out = np.zeros(r, dtype=np.int64)
    stamp = np.zeros(n, dtype=np.int64)
    tok = 0
    for s in range(r):
        total = 0
        for b in members:
            tok += 1
            stamp[b] = tok
            cur = b
            while True:
                p = parents[s, cur]
                if p < 0 or not mask[p] or stamp[p] == tok:
                    break
                stamp[p] = tok
                total += 1
                cur = p
        out[s] = total
    return out


@njit(cache=True)
def prefix_marginals(parents, pos):
    """Summed marginal counts of every ground-set element under a sorted prefix order.

    ``pos[i, v]`` is the rank of element (community i, node v). A pair (a, b)
    counts for community i once every node on the path a -> b has joined i,
    so its marginal is credited to the rank of the latest-joining node.
    Returns int64 counts indexed by rank.
    """
    r, n = parents.shape
    m = pos.shape[0]
    counts = np.zeros(m * n, dtype=np.int64)
    stamp = np.zeros(n, dtype=np.int64)
    chain = np.empty(n, dtype=np.int64)
    tok = 0
    for s in range(r):
        for b in range(n):
            tok += 1
            stamp[b] = tok
            length = 0
            cur = b
            while True:
                p = parents[s, cur]
                if p < 0 or stamp[p] == tok:
                    break
                stamp[p] = tok
                chain[length] = p
                length += 1
                cur = p
            if length == 0:
                continue
            for i in range(m):
                best = pos[i, b]
                for k in range(length):
                    q = pos[i, chain[k]]
                    if q > best:
                        best = q
                    counts[best] += 1
    return counts


@njit(cache=True)
def removal_losses(parents, members, mask):
    """Summed, over samples, pairs inside ``mask`` whose live path uses each node.

    Entry v equals sigma(S) - sigma(S - v) summed over samples, for v in S.
    """
    r, n = parents.shape
    loss = np.zeros(n, dtype=np.int64)
    stamp = np.zeros(n, dtype=np.int64)
    chain = np.empty(n, dtype=np.int64)
    tok = 0
    for s in range(r):
        for b in members:
            tok += 1
            stamp[b] = tok
            depth = 0
            cur = b
            while True:
                p = parents[s, cur]
                if p < 0 or not mask[p] or stamp[p] == tok:
                    break
                stamp[p] = tok
                chain[depth] = p
                depth += 1
                cur = p
            loss[b] += depth
            for t in range(depth):
                loss[chain[t]] += depth - t
    return loss


@njit(cache=True)
def addition_gains(parents, members, mask):
    """Summed, over samples, sigma(S + v) - sigma(S) for every node v outside ``mask``.

    Adding v creates the pairs (a, v) for its ancestors A inside S, and for each
    node d whose chain inside S ends at a root whose parent is v, the new
    ancestors v plus the nodes of A that d did not already reach. When v closes
    a cycle (its own ancestors lead back to v) those sets can overlap, and a d
    whose chain meets A is credited with the index along A of the first A-node
    it hits.
    """
    r, n = parents.shape
    gain = np.zeros(n, dtype=np.int64)
    stamp = np.zeros(n, dtype=np.int64)
    length = np.zeros(n, dtype=np.int64)
    exit_to = np.full(n, -1, dtype=np.int64)
    alpha = np.zeros(n, dtype=np.int64)
    cyclic = np.zeros(n, dtype=np.bool_)
    a_stamp = np.zeros(n, dtype=np.int64)
    a_index = np.zeros(n, dtype=np.int64)
    a_tok = np.zeros(n, dtype=np.int64)
    tok = 0
    for s in range(r):
        for u in members:
            tok += 1
            stamp[u] = tok
            cnt = 1
            cur = u
            ex = -1
            while True:
                p = parents[s, cur]
                if p < 0 or stamp[p] == tok:
                    break
                if not mask[p]:
                    ex = p
                    break
                stamp[p] = tok
                cnt += 1
                cur = p
            length[u] = cnt
            exit_to[u] = ex
        for v in range(n):
            if mask[v]:
                continue
            p = parents[s, v]
            alpha[v] = 0
            cyclic[v] = False
            if p >= 0 and mask[p]:
                alpha[v] = length[p]
                if exit_to[p] == v:
                    cyclic[v] = True
                    tok += 1
                    a_tok[v] = tok
                    cur = p
                    for k in range(1, length[p] + 1):
                        a_stamp[cur] = tok
                        a_index[cur] = k
                        cur = parents[s, cur]
            gain[v] += alpha[v]
        for d in members:
            v = exit_to[d]
            if v < 0:
                continue
            if not cyclic[v]:
                gain[v] += alpha[v] + 1
            else:
                # v may have several children in S; only the chain through p's root meets A
                t = alpha[v] + 1
                cur = d
                while True:
                    if a_stamp[cur] == a_tok[v]:
                        t = a_index[cur]
                        break
                    p = parents[s, cur]
                    if p == v:
                        break
                    cur = p
                gain[v] += t
    return gain


@njit(cache=True)
def choose_parents(indptr, sources, cumw, u):
    """Pick each node's live in-edge: the first edge whose cumulative weight exceeds ``u``."""
    r, n = u.shape
    out = np.full((r, n), -1, dtype=np.int32)
    for s in range(r):
        for v in range(n):
            lo = indptr[v]
            hi = indptr[v + 1]
            if lo == hi:
                continue
            x = u[s, v]
            if x >= cumw[hi - 1]:
                continue
            while lo < hi:
                mid = (lo + hi) // 2
                if cumw[mid] > x:
                    hi = mid
                else:
                    lo = mid + 1
            out[s, v] = sources[lo]
    return out


@njit(cache=True)
def merge_gains(parents, owner, z):
    """Summed, over samples, sigma(Z + W) - sigma(Z) - sigma(W) for community Z = ``z`` and every W.

    ``owner[v]`` is the community id of node v (ids below n). The result is
    indexed by community id. Only pairs whose path mixes Z and W count.
    """
    r, n = parents.shape
    gain = np.zeros(n, dtype=np.int64)
    stamp = np.zeros(n, dtype=np.int64)
    tok = 0
    for s in range(r):
        for b in range(n):
            cb = owner[b]
            tok += 1
            stamp[b] = tok
            cur = b
            count = 0
            if cb == z:
                w = -1
                while True:
                    p = parents[s, cur]
                    if p < 0 or stamp[p] == tok:
                        break
                    op = owner[p]
                    if op != z:
                        if w == -1:
                            w = op
                        elif op != w:
                            break
                        count += 1
                    elif w != -1:
                        count += 1
                    stamp[p] = tok
                    cur = p
                if w >= 0:
                    gain[w] += count
            else:
                seen_z = False
                while True:
                    p = parents[s, cur]
                    if p < 0 or stamp[p] == tok:
                        break
                    op = owner[p]
                    if op == z:
                        seen_z = True
                        count += 1
                    elif op == cb:
                        if seen_z:
                            count += 1
                    else:
                        break
                    stamp[p] = tok
                    cur = p
                gain[cb] += count
    return gain
