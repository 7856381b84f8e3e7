"""Word-topic matrix estimation: the sample pipeline, its population counterpart,
the Assumption-3 check and cross-validation of the anchor margin scale."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from . import lp
from .anchors import MarginOracle, find_anchor_words
from .errors import AssumptionViolated, LpFailed, NoAnchorsFound, SingularGram, ZeroRow
from .model import AnchorPartition, CountData, FitResult, TopicModel, TuningProfile
from .moments import MomentSet, compute_moments, population_moments, theta_hat

logger = logging.getLogger(__name__)

COND_WARN = 1e12
# Relative slack for comparing exactly-equal population R entries in floating point.
POPULATION_TOL = 1e-9


@dataclass(frozen=True)
class RepresentativeSet:
    """One anchor word per group, in group order."""

    indices: tuple

    @classmethod
    def draw(cls, partition: AnchorPartition, rng) -> "RepresentativeSet":
        picks = []
        for g in partition.groups:
            picks.append(g[0] if len(g) == 1 else int(g[rng.integers(len(g))]))
        return cls(tuple(picks))

    @classmethod
    def first(cls, partition: AnchorPartition) -> "RepresentativeSet":
        return cls(tuple(g[0] for g in partition.groups))

    def validate(self, partition: AnchorPartition) -> None:
        if len(self.indices) != partition.k_hat:
            raise ValueError("one representative per group is required")
        for i, g in zip(self.indices, partition.groups):
            if i not in g:
                raise ValueError(f"representative {i + 1} is not in its group")


def estimate_b_i(row_sums, partition: AnchorPartition, reps: RepresentativeSet) -> np.ndarray:
    """Anchor block of B: ``||X_i.||_1 / ||X_{rep_k}.||_1`` for ``i`` in group ``k``.

    Rows follow the concatenated group order; entries outside the own group are 0.
    ``row_sums`` may also be a :class:`CountData`.
    """
    if isinstance(row_sums, CountData):
        row_sums = row_sums.row_sums()
    row_sums = np.asarray(row_sums, dtype=np.float64)
    anchors = [i for g in partition.groups for i in g]
    b = np.zeros((len(anchors), partition.k_hat))
    pos = 0
    for k, (g, rep) in enumerate(zip(partition.groups, reps.indices)):
        if row_sums[rep] <= 0:
            raise ZeroRow(rep + 1)
        b[pos : pos + len(g), k] = row_sums[list(g)] / row_sums[rep]
        pos += len(g)
    return b


def estimate_b_j(theta, partition: AnchorPartition, reps: RepresentativeSet, omega) -> np.ndarray:
    """Non-anchor block of B: ``(Theta[J, L] @ omega)_+`` over ``J = [p] minus I``."""
    theta = np.asarray(theta)
    anchors = partition.anchor_set
    J = [j for j in range(theta.shape[0]) if j not in anchors]
    return np.maximum(theta[np.ix_(J, list(reps.indices))] @ np.asarray(omega), 0.0)


def normalize_columns(b, reps: RepresentativeSet | None = None):
    """Scale columns of ``b`` to unit l1 norm.

    All-zero columns become the point mass on that topic's representative
    row. Returns ``(a, degenerate_columns)``.
    """
    b = np.array(b, dtype=np.float64)
    norms = np.abs(b).sum(axis=0)
    degenerate = [int(k) for k in np.flatnonzero(norms <= 0)]
    for k in degenerate:
        if reps is None:
            raise ValueError(f"column {k + 1} is zero and no representative was given")
        b[:, k] = 0.0
        b[reps.indices[k], k] = 1.0
        norms[k] = 1.0
    return b / norms, degenerate


def _assemble_b(p, partition, b_i, b_j):
    b = np.zeros((p, partition.k_hat))
    anchors = [i for g in partition.groups for i in g]
    anchor_set = set(anchors)
    J = [j for j in range(p) if j not in anchor_set]
    b[anchors] = b_i
    b[J] = b_j
    return b


def solve_omega(theta_ll, lam, tol=1e-9):
    """Column-wise LP estimate of ``theta_ll^{-1}``; raises LpFailed on any topic."""
    K = theta_ll.shape[0]
    omega = np.zeros((K, K))
    diag = []
    for k in range(K):
        sol = lp.solve(lp.omega_program(theta_ll, k, lam), tol=tol)
        if sol.status is not lp.LpStatus.OPTIMAL:
            raise LpFailed(k + 1, sol.status.value)
        omega[:, k] = lp.decode_omega(sol, K)
        diag.append({"topic": k + 1, "objective": sol.objective_value, "iterations": sol.iterations})
    return omega, diag


def estimate_once(theta, row_sums, eta, partition, reps, c0):
    """One representative draw: LP for omega, B blocks, normalisation.

    Returns ``(a, info)`` where ``info`` holds lambda, LP diagnostics,
    degenerate columns and the unnormalised B.
    """
    L = list(reps.indices)
    lam = float(c0 * np.max(np.asarray(eta)[np.ix_(L, L)].sum(axis=1))) if eta is not None else 0.0
    omega, diag = solve_omega(np.asarray(theta)[np.ix_(L, L)], lam)
    b = _assemble_b(
        len(row_sums),
        partition,
        estimate_b_i(row_sums, partition, reps),
        estimate_b_j(theta, partition, reps, omega),
    )
    a, degenerate = normalize_columns(b, reps)
    return a, {"lambda": lam, "lp": diag, "degenerate": degenerate, "b": b, "omega": omega}


def fit_moments(moments: MomentSet, tuning: TuningProfile, q=None) -> tuple:
    """Run the estimator on precomputed moments (indices local to the moments).

    ``q`` overrides the anchor margins ``c1 * delta_hat``.
    """
    if q is None:
        q = MarginOracle.scaled(moments.delta_hat, tuning.c1)
    partition = find_anchor_words(moments.r_hat, q)
    rng = np.random.default_rng(tuning.seed)
    total = None
    reps_used, diagnostics, degenerate, lambdas = [], [], [], []
    for _ in range(tuning.t_reps):
        reps = RepresentativeSet.draw(partition, rng)
        a, info = estimate_once(
            moments.theta_hat, moments.row_sums, moments.eta_hat, partition, reps, tuning.c0
        )
        total = a if total is None else total + a
        reps_used.append(reps)
        diagnostics.append(info["lp"])
        degenerate.append(info["degenerate"])
        lambdas.append(info["lambda"])
    return total / tuning.t_reps, partition, reps_used, diagnostics, degenerate, lambdas


def fit(data: CountData, tuning: TuningProfile | None = None, moments: MomentSet | None = None) -> FitResult:
    """Estimate K, the anchor partition and A from counts.

    The result is expressed over the original vocabulary of ``data``.
    """
    tuning = tuning or TuningProfile()
    if moments is None:
        moments = compute_moments(data)
    a, partition, reps, diag, degenerate, lambdas = fit_moments(moments, tuning)
    ids = data.word_ids
    return FitResult(
        a_hat=data.expand_rows(a),
        partition=partition.relabel(ids),
        rep_sets=[tuple(int(ids[i]) for i in r.indices) for r in reps],
        lp_diagnostics=diag,
        degenerate_columns=degenerate,
        lambdas=lambdas,
    )


# ---------------------------------------------------------------------------
# population level


def c_tilde(w) -> np.ndarray:
    """``n * W~ W~^T`` with ``W~`` the row-normalised ``W``."""
    w = np.asarray(w, dtype=np.float64)
    norms = w.sum(axis=1)
    zero = np.flatnonzero(norms <= 0)
    if zero.size:
        raise ZeroRow(int(zero[0]) + 1)
    wt = w / norms[:, None]
    return w.shape[1] * wt @ wt.T


def assumption3_nu(w) -> float:
    """``min_{i<j} (C~_ii ^ C~_jj - C~_ij)``; ``inf`` for a single topic."""
    c = c_tilde(w)
    d = np.diag(c)
    K = c.shape[0]
    if K < 2:
        return float("inf")
    iu = np.triu_indices(K, 1)
    return float(np.min(np.minimum(d[iu[0]], d[iu[1]]) - c[iu]))


def check_assumption3(w) -> bool:
    return assumption3_nu(w) > 0


def check_assumptions(model: TopicModel) -> dict:
    """Evaluate Assumptions 1-3 for a model; 1 holds by construction of TopicModel."""
    rank = int(np.linalg.matrix_rank(model.W))
    nu = assumption3_nu(model.W)
    return {"1": True, "2": rank == model.K, "3": nu > 0, "rank": rank, "nu": nu}


@dataclass(frozen=True)
class PopulationRecovery:
    a: np.ndarray
    partition: AnchorPartition
    reps: RepresentativeSet
    b: np.ndarray
    b_i: np.ndarray
    b_j: np.ndarray


def recover_population(model: TopicModel, check: bool = True) -> PopulationRecovery:
    """Exact recovery of the partition and A from ``Pi``, with intermediates."""
    if check:
        status = check_assumptions(model)
        if not status["2"]:
            raise AssumptionViolated(2, f"rank(W) = {status['rank']} < K = {model.K}")
        if not status["3"]:
            raise AssumptionViolated(3, f"nu = {status['nu']:.6g}")
    pop = population_moments(model)
    p = model.p
    scale = float(np.max(np.abs(pop.r)))
    partition = find_anchor_words(pop.r, MarginOracle.zero(p), tol=POPULATION_TOL * scale)
    reps = RepresentativeSet.first(partition)
    L = list(reps.indices)
    theta_ll = pop.theta[np.ix_(L, L)]
    cond = np.linalg.cond(theta_ll)
    if cond > COND_WARN:
        warnings.warn(f"Theta_LL is ill-conditioned (cond = {cond:.3g})", RuntimeWarning)
    anchor_set = partition.anchor_set
    J = [j for j in range(p) if j not in anchor_set]
    # B_J^T = Theta_LL^{-1} Theta_LJ, solved by LU with partial pivoting.
    b_j = np.linalg.solve(theta_ll, pop.theta[np.ix_(L, J)]).T if J else np.zeros((0, len(L)))
    b_i = estimate_b_i(np.asarray(model.Pi).sum(axis=1), partition, reps)
    b = _assemble_b(p, partition, b_i, b_j)
    a, _ = normalize_columns(b, reps)
    return PopulationRecovery(a, partition, reps, b, b_i, b_j)


def population_fit(model: TopicModel) -> np.ndarray:
    """Recover A (columns in discovery order) from the noiseless model."""
    return recover_population(model).a


# ---------------------------------------------------------------------------
# cross-validation of C1


def topic_correlation(a_hat, theta, anchors) -> np.ndarray:
    """Least-squares ``C`` from ``Theta[I, I] ~ A_I C A_I^T``."""
    a_i = np.asarray(a_hat)[anchors]
    gram = a_i.T @ a_i
    if np.linalg.cond(gram) > COND_WARN:
        raise SingularGram("A_I^T A_I is numerically singular")
    g_inv = np.linalg.inv(gram)
    return g_inv @ a_i.T @ np.asarray(theta)[np.ix_(anchors, anchors)] @ a_i @ g_inv


def cv_scores(data: CountData, grid, split_fraction: float = 0.5, tuning: TuningProfile | None = None):
    """Out-of-sample loss ``||Theta2 - A C A^T||_1`` for every grid value.

    Returns a list of ``(c, loss)``; ``loss`` is ``None`` where the fit or the
    Gram inversion failed.
    """
    tuning = tuning or TuningProfile()
    grid = [float(c) for c in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    if not 0 < split_fraction < 1:
        raise ValueError("split_fraction must lie in (0, 1)")
    n = data.n
    if n < 2:
        raise ValueError("cross-validation needs at least two documents")
    rng = np.random.default_rng(tuning.seed)
    order = rng.permutation(n)
    n_train = min(max(int(round(split_fraction * n)), 1), n - 1)
    train = data.subset_documents(np.sort(order[:n_train]), prune=True)
    valid = data.subset_documents(np.sort(order[n_train:]), prune=False)

    theta_train = theta_hat(train)
    theta_valid = data.expand_rows(data.expand_rows(theta_hat(valid)).T).T
    train_moments = compute_moments(train)
    ids = train.word_ids

    scores = []
    for c in grid:
        try:
            a, partition, *_ = fit_moments(
                train_moments, TuningProfile(c0=tuning.c0, c1=c, t_reps=1, seed=tuning.seed)
            )
            anchors = [i for g in partition.groups for i in g]
            C = topic_correlation(a, theta_train, anchors)
        except (NoAnchorsFound, LpFailed, SingularGram) as exc:
            logger.warning("C1 = %g skipped: %s", c, exc)
            scores.append((c, None))
            continue
        full = np.zeros((data.vocab_size, a.shape[1]))
        full[ids] = a
        scores.append((c, float(np.abs(theta_valid - full @ C @ full.T).sum())))
    return scores


def cross_validate_c1(data: CountData, grid, split_fraction: float = 0.5, tuning: TuningProfile | None = None) -> float:
    """Grid value with the smallest validation loss (first one on ties)."""
    scores = cv_scores(data, grid, split_fraction, tuning)
    ok = [(c, loss) for c, loss in scores if loss is not None]
    if not ok:
        raise SingularGram("every grid value failed")
    best = min(loss for _, loss in ok)
    return next(c for c, loss in ok if loss == best)
