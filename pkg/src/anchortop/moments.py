"""Second-moment estimates and their entry-wise noise margins.

``theta_hat`` is the unbiased estimator of ``Theta = Pi Pi^T / n`` under the
multinomial model, ``r_hat`` rescales it by word frequencies, and
``margins`` returns the data-driven bounds ``eta`` (for ``Theta``) and
``delta`` (for ``R``).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionLimit, DocumentTooShort, ZeroRow
from .model import CountData, TopicModel

MAX_WORDS = 20000
CACHE_VERSION = 1


@dataclass(frozen=True)
class MomentSet:
    theta_hat: np.ndarray
    r_hat: np.ndarray
    eta_hat: np.ndarray
    delta_hat: np.ndarray
    row_sums: np.ndarray


@dataclass(frozen=True)
class PopulationMoments:
    theta: np.ndarray
    r: np.ndarray


def _check_size(p, max_words):
    if p > max_words:
        raise DimensionLimit(f"p = {p} exceeds the configured limit of {max_words} words")


def _check_lengths(data):
    short = np.flatnonzero(data.doc_lengths < 2)
    if short.size:
        raise DocumentTooShort(int(short[0]) + 1, int(data.doc_lengths[short[0]]))


def _check_rows(row_sums):
    zero = np.flatnonzero(row_sums <= 0)
    if zero.size:
        raise ZeroRow(int(zero[0]) + 1)


def theta_hat(data: CountData, max_words: int = MAX_WORDS) -> np.ndarray:
    """Unbiased estimate of ``Theta``.

    ``1/n sum_i [N_i/(N_i-1) X_i X_i^T - diag(X_i)/(N_i-1)]`` with
    ``X_i = Y_i / N_i``.
    """
    _check_size(data.p, max_words)
    _check_lengths(data)
    N = data.doc_lengths.astype(np.float64)
    X = data.frequencies()
    weighted = X @ sp.diags(N / (N - 1.0))
    theta = np.asarray((weighted @ X.T).todense())
    diag = np.asarray((X @ (1.0 / (N - 1.0)))).ravel()
    theta[np.diag_indices_from(theta)] -= diag
    theta /= data.n
    # Exact symmetry; the sparse product only guarantees it up to rounding.
    return (theta + theta.T) / 2.0


def r_hat(data: CountData, theta: np.ndarray) -> np.ndarray:
    """``R_hat[j, l] = n^2 Theta[j, l] / (||X_j.||_1 ||X_l.||_1)``."""
    s = data.row_sums()
    _check_rows(s)
    scale = data.n / s
    return theta * scale[:, None] * scale[None, :]


def margins(data: CountData, theta: np.ndarray):
    """Return ``(eta_hat, delta_hat)``, both p x p and entrywise nonnegative.

    ``log M`` is the natural log of ``max(max_i N_i, n, p)``. Row maxima of
    ``X`` are taken over documents.
    """
    _check_lengths(data)
    n = data.n
    N = data.doc_lengths.astype(np.float64)
    X = data.frequencies()
    s = np.asarray(X.sum(axis=1)).ravel()
    _check_rows(s)
    log_m = np.log(max(int(data.doc_lengths.max()), n, data.p))

    xmax = X.max(axis=1).toarray().ravel()
    root_xmax = np.sqrt(xmax)
    cross = np.asarray(((X @ sp.diags(1.0 / N)) @ X.T).todense()) / n
    first = (
        3.0 * np.sqrt(6.0)
        * (root_xmax[:, None] + root_xmax[None, :])
        * np.sqrt(log_m / n)
        * np.sqrt(np.maximum(cross, 0.0))
    )
    second = (2.0 * log_m / n) * (xmax[:, None] + xmax[None, :]) * np.mean(1.0 / N)
    cubic = np.asarray(X @ (1.0 / N**3)).ravel() / n
    third = 31.0 * np.sqrt(log_m**4 / n) * np.sqrt(cubic[:, None] + cubic[None, :])
    eta = first + second + third
    eta = (eta + eta.T) / 2.0

    per_word = (n / s) * np.sqrt(np.asarray(X @ (1.0 / N)).ravel() / n)
    scale = n * n / (s[:, None] * s[None, :])
    delta = scale * (eta + 2.0 * theta * np.sqrt(log_m / n) * (per_word[:, None] + per_word[None, :]))
    return eta, delta


def compute_moments(data: CountData, max_words: int = MAX_WORDS) -> MomentSet:
    theta = theta_hat(data, max_words=max_words)
    r = r_hat(data, theta)
    eta, delta = margins(data, theta)
    return MomentSet(theta, r, eta, delta, data.row_sums())


def population_moments(model: TopicModel) -> PopulationMoments:
    """Exact ``Theta`` and ``R`` from ``Pi``."""
    Pi = np.asarray(model.Pi)
    n = Pi.shape[1]
    d = Pi.sum(axis=1)
    _check_rows(d)
    theta = Pi @ Pi.T / n
    theta = (theta + theta.T) / 2.0
    scale = n / d
    return PopulationMoments(theta, theta * scale[:, None] * scale[None, :])


# ---------------------------------------------------------------------------
# on-disk cache


def content_hash(data: CountData) -> str:
    h = hashlib.sha256()
    h.update(np.int64([data.vocab_size, data.p, data.n]).tobytes())
    for arr in (data.word_ids, data.counts.indptr, data.counts.indices, data.counts.data):
        h.update(np.ascontiguousarray(arr, dtype=np.int64).tobytes())
    return h.hexdigest()


def save_moments(moments: MomentSet, data: CountData, path) -> None:
    """Write a versioned ``.npz`` cache keyed by the content hash of ``data``."""
    with open(path, "wb") as fh:
        np.savez(
            fh,
            version=np.int64(CACHE_VERSION),
            key=np.array(content_hash(data)),
            theta_hat=moments.theta_hat,
            r_hat=moments.r_hat,
            eta_hat=moments.eta_hat,
            delta_hat=moments.delta_hat,
            row_sums=moments.row_sums,
        )


def load_moments(path, data: CountData):
    """Return the cached MomentSet, or ``None`` if the cache is stale or foreign."""
    try:
        with np.load(path, allow_pickle=False) as z:
            if int(z["version"]) != CACHE_VERSION or str(z["key"]) != content_hash(data):
                return None
            return MomentSet(
                z["theta_hat"], z["r_hat"], z["eta_hat"], z["delta_hat"], z["row_sums"]
            )
    except (OSError, KeyError, ValueError):
        return None


def cached_moments(data: CountData, path=None, max_words: int = MAX_WORDS) -> MomentSet:
    if path is not None:
        hit = load_moments(path, data)
        if hit is not None:
            return hit
    moments = compute_moments(data, max_words=max_words)
    if path is not None:
        save_moments(moments, data, path)
    return moments
