"""Permutation-aligned losses and topic quality metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import DimensionMismatch, WordNeverOccurs
from .model import CountData


@dataclass(frozen=True)
class AlignedLoss:
    l1: float
    l1_inf: float
    permutation: dict  # estimated column -> true column
    matched: int


def column_distances(a_hat, a_true) -> np.ndarray:
    """``c[u, v] = ||a_hat[:, u] - a_true[:, v]||_1``."""
    return np.abs(a_hat[:, :, None] - a_true[:, None, :]).sum(axis=0)


def _bottleneck(cost, size):
    """Smallest ``t`` such that a matching of ``size`` pairs uses only costs <= t."""
    values = np.unique(cost)
    lo, hi = 0, values.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        graph = csr_matrix((cost <= values[mid]).astype(np.int8))
        match = maximum_bipartite_matching(graph, perm_type="column")
        if np.count_nonzero(match >= 0) >= size:
            hi = mid
        else:
            lo = mid + 1
    return float(values[lo])


def aligned_losses(a_hat, a_true) -> AlignedLoss:
    """L1 and L1,inf losses minimised over column matchings.

    ``l1`` uses the min-cost assignment; ``l1_inf`` is the bottleneck
    (minimax) assignment, so each loss is minimised on its own. When the
    column counts differ, every unmatched column is charged its full l1
    mass.
    """
    a_hat = np.asarray(a_hat, dtype=np.float64)
    a_true = np.asarray(a_true, dtype=np.float64)
    if a_hat.shape[0] != a_true.shape[0]:
        raise DimensionMismatch(f"a_hat has {a_hat.shape[0]} rows, a_true has {a_true.shape[0]}")
    cost = column_distances(a_hat, a_true)
    rows, cols = linear_sum_assignment(cost)
    size = len(rows)
    matched_cost = sum(float(cost[u, v]) for u, v in zip(rows, cols))
    un_hat = [u for u in range(a_hat.shape[1]) if u not in set(rows)]
    un_true = [v for v in range(a_true.shape[1]) if v not in set(cols)]
    charges = [float(np.abs(a_hat[:, u]).sum()) for u in un_hat]
    charges += [float(np.abs(a_true[:, v]).sum()) for v in un_true]
    l1 = matched_cost + sum(charges)
    l1_inf = max([_bottleneck(cost, size) if size else 0.0] + charges)
    return AlignedLoss(
        l1=l1,
        l1_inf=l1_inf,
        permutation={int(u): int(v) for u, v in zip(rows, cols)},
        matched=size,
    )


def top_words(column, t: int) -> np.ndarray:
    """Indices of the ``t`` largest entries, ties broken by smaller index."""
    column = np.asarray(column)
    return np.lexsort((np.arange(column.size), -column))[:t]


def coherence(counts: CountData, top: list, epsilon: float = 0.01) -> float:
    """Sum over ordered pairs ``w1 != w2`` of ``log((D(w1, w2) + eps) / D(w2))``.

    ``D`` counts documents containing the word(s); ``top`` indexes rows of
    ``counts``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    top = [int(w) for w in top]
    if not top:
        raise ValueError("top word list must be nonempty")
    present = (counts.counts[top, :] > 0).astype(np.int64)
    co = np.asarray((present @ present.T).todense())
    doc_freq = np.diag(co)
    total = 0.0
    for a in range(len(top)):
        for b in range(len(top)):
            if a == b:
                continue
            if doc_freq[b] == 0:
                raise WordNeverOccurs(top[b])
            total += np.log((co[a, b] + epsilon) / doc_freq[b])
    return float(total)


def unique_words(a_hat, t: int) -> np.ndarray:
    """Per topic, how many of its top-``t`` words are in no other topic's top-``t``."""
    a_hat = np.asarray(a_hat)
    p, K = a_hat.shape
    if not 1 <= t <= p:
        raise ValueError("t must lie in [1, p]")
    tops = [set(top_words(a_hat[:, k], t).tolist()) for k in range(K)]
    out = np.zeros(K, dtype=np.int64)
    for k in range(K):
        others = set().union(*(tops[j] for j in range(K) if j != k))
        out[k] = len(tops[k] - others)
    return out
