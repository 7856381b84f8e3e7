"""Independent reference implementations used only by the tests."""

import itertools

import numpy as np


def vertex_enumeration(c, G, h, tol=1e-9):
    """Minimum of ``c^T z`` over ``G z <= h, z >= 0`` by checking every basis.

    Slacks make the system ``[G I] x = h, x >= 0``; every basic feasible
    solution is visited. Returns ``(value, z)`` or ``(None, None)`` when no
    vertex is feasible. Assumes the LP is bounded.
    """
    G = np.asarray(G, float)
    m, nv = G.shape
    M = np.hstack([G, np.eye(m)])
    cost = np.concatenate([c, np.zeros(m)])
    best, arg = None, None
    for cols in itertools.combinations(range(nv + m), m):
        B = M[:, cols]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, h)
        if np.any(xb < -tol):
            continue
        x = np.zeros(nv + m)
        x[list(cols)] = xb
        val = float(cost @ x)
        if best is None or val < best - 1e-12:
            best, arg = val, x[:nv]
    return best, arg


def brute_force_l1(a_hat, a_true, return_perm=False):
    """Minimum total l1 over all column permutations (equal column counts)."""
    K = a_true.shape[1]
    best, arg = np.inf, None
    for perm in itertools.permutations(range(K)):
        val = sum(float(np.abs(a_hat[:, u] - a_true[:, v]).sum()) for u, v in enumerate(perm))
        if val < best:
            best, arg = val, perm
    return (best, arg) if return_perm else best


def brute_force_l1_inf(a_hat, a_true):
    """Minimum over permutations of the worst column l1 distance."""
    K = a_true.shape[1]
    best = np.inf
    for perm in itertools.permutations(range(K)):
        best = min(best, max(float(np.abs(a_hat[:, u] - a_true[:, v]).sum()) for u, v in enumerate(perm)))
    return best
