"""Dense two-phase simplex with Bland's rule, and the decoupled omega programs.

Problems are posed as ``min c^T z  s.t.  G z <= h`` with a per-variable
nonnegativity flag; free variables are split internally.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LinearProgram:
    objective: np.ndarray
    G: np.ndarray
    h: np.ndarray
    nonneg: np.ndarray = field(default=None)

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=np.float64).ravel()
        G = np.asarray(self.G, dtype=np.float64)
        h = np.asarray(self.h, dtype=np.float64).ravel()
        if G.ndim == 1:
            G = G.reshape(h.size, c.size)
        if G.shape != (h.size, c.size):
            raise ValueError(f"G has shape {G.shape}, expected {(h.size, c.size)}")
        nonneg = np.ones(c.size, bool) if self.nonneg is None else np.asarray(self.nonneg, bool)
        if nonneg.shape != c.shape:
            raise ValueError("nonneg flags must match the variable count")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(G)) and np.all(np.isfinite(h))):
            raise ValueError("linear program entries must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nonneg", nonneg)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_rows(self) -> int:
        return self.h.size


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    z: np.ndarray
    objective_value: float
    iterations: int


def _pivot(T, row, col):
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])


def _run(T, basis, n_cols, tol, budget):
    """Bland-rule simplex on tableau ``T`` whose last row holds reduced costs.

    Only the first ``n_cols`` columns may enter. Returns (status, pivots).
    """
    m = T.shape[0] - 1
    pivots = 0
    while True:
        reduced = T[m, :n_cols]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            return LpStatus.OPTIMAL, pivots
        if pivots >= budget:
            return LpStatus.ITERATION_LIMIT, pivots
        col = int(entering[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            return LpStatus.UNBOUNDED, pivots
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1


def solve(lp: LinearProgram, tol: float = 1e-9, max_iter: int | None = None) -> LpSolution:
    """Solve ``lp`` with a two-phase dense simplex.

    ``max_iter`` defaults to ``50 * (variables + rows)`` pivots over both
    phases.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    c, G, h = lp.objective, lp.G, lp.h
    m, nv = G.shape
    if max_iter is None:
        max_iter = 50 * (nv + m)

    free = np.flatnonzero(~lp.nonneg)
    A = np.hstack([G, -G[:, free]])
    cost = np.concatenate([c, -c[free]])
    ns = A.shape[1]

    sign = np.where(h < 0, -1.0, 1.0)
    need_art = np.flatnonzero(h < 0)
    na = need_art.size
    n_total = ns + m + na

    T = np.zeros((m + 1, n_total + 1))
    T[:m, :ns] = A * sign[:, None]
    T[:m, ns : ns + m] = np.diag(sign)
    T[:m, -1] = h * sign
    basis = list(range(ns, ns + m))
    for a, r in enumerate(need_art):
        T[r, ns + m + a] = 1.0
        basis[r] = ns + m + a

    scale = 1.0 + float(np.max(np.abs(h))) if m else 1.0
    iterations = 0

    if na:
        T[m, ns + m : n_total] = 1.0
        for r in need_art:
            T[m] -= T[r]
        status, it = _run(T, basis, n_total, tol, max_iter)
        iterations += it
        if status is LpStatus.ITERATION_LIMIT:
            return LpSolution(status, np.full(nv, np.nan), np.nan, iterations)
        if -T[m, -1] > tol * scale:
            return LpSolution(LpStatus.INFEASIBLE, np.full(nv, np.nan), np.nan, iterations)
        # Push zero-level artificials out of the basis; drop rows that are redundant.
        keep = []
        for r in range(m):
            if basis[r] >= ns + m:
                cand = np.flatnonzero(np.abs(T[r, : ns + m]) > PIVOT_TOL)
                if cand.size == 0:
                    continue
                _pivot(T, r, int(cand[0]))
                basis[r] = int(cand[0])
            keep.append(r)
        T = np.hstack([T[keep, : ns + m], T[keep, -1:]])
        T = np.vstack([T, np.zeros((1, T.shape[1]))])
        basis = [basis[r] for r in keep]
        m = len(keep)

    full_cost = np.concatenate([cost, np.zeros(T.shape[1] - 1 - ns)])
    T[m, :-1] = full_cost
    T[m, -1] = 0.0
    for r, b in enumerate(basis):
        if full_cost[b] != 0.0:
            T[m] -= full_cost[b] * T[r]

    status, it = _run(T, basis, T.shape[1] - 1, tol, max_iter - iterations)
    iterations += it
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status, np.full(nv, np.nan), np.nan, iterations)

    x = np.zeros(T.shape[1] - 1)
    for r, b in enumerate(basis):
        x[b] = T[r, -1]
    z = x[:nv].copy()
    z[free] -= x[nv:ns]
    return LpSolution(LpStatus.OPTIMAL, z, float(c @ z), iterations)


def omega_program(theta_ll, k: int, lam: float) -> LinearProgram:
    """LP for ``min ||w||_1  s.t.  ||theta_ll w - e_k||_1 <= lam ||w||_1``.

    Variables are ``[w_plus, w_minus, r]`` (all nonnegative), with ``r``
    bounding the absolute residuals. ``k`` is 0-based.
    """
    theta_ll = np.asarray(theta_ll, dtype=np.float64)
    K = theta_ll.shape[0]
    if theta_ll.shape != (K, K):
        raise ValueError("theta_ll must be square")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    e = np.zeros(K)
    e[k] = 1.0
    eye = np.eye(K)
    G = np.vstack(
        [
            np.hstack([theta_ll, -theta_ll, -eye]),
            np.hstack([-theta_ll, theta_ll, -eye]),
            np.concatenate([-lam * np.ones(2 * K), np.ones(K)])[None, :],
        ]
    )
    h = np.concatenate([e, -e, [0.0]])
    c = np.concatenate([np.ones(2 * K), np.zeros(K)])
    return LinearProgram(c, G, h)


def decode_omega(solution: LpSolution, K: int) -> np.ndarray:
    z = solution.z
    omega = z[:K] - z[K : 2 * K]
    both = np.flatnonzero((z[:K] > 1e-9) & (z[K : 2 * K] > 1e-9))
    if both.size:
        logger.warning("omega split is not complementary at indices %s", both.tolist())
    return omega
