"""Anchor-word detection from the scaled second-moment matrix R."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoAnchorsFound
from .model import AnchorPartition, TopicModel


@dataclass(frozen=True)
class MarginOracle:
    """Comparison margins ``q[j, l]`` (``C1 * delta_hat``, or zero for exact R)."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("margin matrix must be square")
        if np.any(q < 0):
            raise ValueError("margins must be nonnegative")
        object.__setattr__(self, "q", q)

    @classmethod
    def zero(cls, p: int) -> "MarginOracle":
        return cls(np.zeros((p, p)))

    @classmethod
    def scaled(cls, delta: np.ndarray, c1: float) -> "MarginOracle":
        return cls(c1 * np.asarray(delta))


def _merge(candidate: frozenset, groups: list) -> None:
    for idx, g in enumerate(groups):
        if g & candidate:
            groups[idx] = g & candidate
            return
    groups.append(candidate)


def find_anchor_words(r, q, tol: float = 0.0) -> AnchorPartition:
    """Partition anchor words by comparing row maxima of ``r`` within margins ``q``.

    Every row ``i`` proposes the set of columns whose entry is within
    ``q[i, a_i] + q[i, l]`` of its row maximum ``a_i`` (ties go to the
    smallest index). The proposal is kept only if each member ``j`` has its
    own row maximum within ``q[i, j] + q[j, a_j]`` of ``r[i, j]``. Kept
    proposals are merged into the first group they intersect, otherwise
    appended.

    Parameters
    ----------
    r : (p, p) array
    q : MarginOracle or (p, p) array
    tol : float
        Extra slack added to every comparison. Only meant for exact
        population matrices, where equal entries can differ by rounding.
    """
    r = np.asarray(r, dtype=np.float64)
    if not np.all(np.isfinite(r)):
        raise ValueError("r must be finite")
    if not isinstance(q, MarginOracle):
        q = MarginOracle(q)
    q = q.q
    p = r.shape[0]
    if r.shape != (p, p) or q.shape != (p, p):
        raise ValueError("r and q must be square with equal shapes")

    rows = np.arange(p)
    a = np.argmax(r, axis=1)
    top = r[rows, a]
    q_top = q[rows, a]

    groups: list = []
    for i in range(p):
        members = np.flatnonzero(top[i] - r[i] <= q_top[i] + q[i] + tol)
        gap = np.abs(r[i, members] - top[members])
        if np.any(gap > q[i, members] + q_top[members] + tol):
            continue
        _merge(frozenset(int(j) for j in members), groups)

    if not groups:
        raise NoAnchorsFound()
    return AnchorPartition(tuple(tuple(sorted(g)) for g in groups))


def sensitivity_specificity(est: AnchorPartition, truth: TopicModel):
    """``|I_hat & I| / |I|`` and ``|I_hat^c & I^c| / |I^c|`` (1 when ``I^c`` is empty)."""
    p = truth.p
    est_set = est.anchor_set
    true_set = truth.anchor_set
    sens = len(est_set & true_set) / len(true_set)
    n_neg = p - len(true_set)
    if n_neg == 0:
        return sens, 1.0
    true_neg = n_neg - len(est_set - true_set)
    return sens, true_neg / n_neg
