"""Synthetic topic models and multinomial corpora."""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleXi, NegativeEntry
from .model import CountData, TopicModel, validate_topic_model


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def generate_w(n: int, k: int, seed=None) -> np.ndarray:
    """Sparse topic weights: each document covers ``s ~ U{1..max(1, k//3)}`` topics.

    The support is drawn without replacement, filled with Uniform(0, 1) and
    normalised to sum to one.
    """
    rng = _rng(seed)
    s_max = max(1, k // 3)
    W = np.zeros((k, n))
    for i in range(n):
        s = int(rng.integers(1, s_max + 1))
        support = rng.permutation(k)[:s]
        vals = rng.uniform(0.0, 1.0, size=s)
        while vals.sum() <= 0:
            vals = rng.uniform(0.0, 1.0, size=s)
        W[support, i] = vals / vals.sum()
    return W


def generate_a(p: int, k: int, anchors_per_topic: int, xi: float, seed=None):
    """Word-topic matrix with a leading block of anchor rows.

    Anchor rows ``[k*m, (k+1)*m)`` belong to topic ``k`` and carry ``K*xi``;
    the remaining rows are Uniform(0, 1) rescaled so each column sums to one.
    Returns ``(A, partition)``.
    """
    m = int(anchors_per_topic)
    if m < 1:
        raise InfeasibleXi("at least one anchor word per topic is required")
    if k * m >= p:
        raise ValueError(f"need more than K * anchors_per_topic = {k * m} words, got p = {p}")
    if not (xi > 0 and k * xi * m < 1):
        raise InfeasibleXi(f"K * xi * anchors_per_topic = {k * xi * m:.4g} must lie in (0, 1)")
    rng = _rng(seed)
    A = np.zeros((p, k))
    partition = []
    for t in range(k):
        rows = range(t * m, (t + 1) * m)
        A[list(rows), t] = k * xi
        partition.append(tuple(rows))
    rest = rng.uniform(0.0, 1.0, size=(p - k * m, k))
    A[k * m :] = rest / rest.sum(axis=0) * (1.0 - k * xi * m)
    return A, tuple(partition)


def generate_model(p, k, anchors_per_topic, xi, n, seed=None, w_generator=None) -> TopicModel:
    """Convenience wrapper: ``generate_a`` + ``generate_w`` (or a custom W sampler)."""
    rng = _rng(seed)
    A, _ = generate_a(p, k, anchors_per_topic, xi, rng)
    W = generate_w(n, k, rng) if w_generator is None else w_generator(n, k, rng)
    return validate_topic_model(A, W)


def sample_corpus(model: TopicModel, doc_lengths, seed=None, prune=True) -> CountData:
    """Draw ``Y_i ~ Multinomial(N_i, Pi_i)`` independently for every document."""
    rng = _rng(seed)
    Pi = np.asarray(model.Pi)
    n = Pi.shape[1]
    lengths = np.broadcast_to(np.asarray(doc_lengths, dtype=np.int64), (n,))
    if np.any(lengths < 2):
        raise ValueError("document lengths must be at least 2")
    probs = np.clip(Pi.T, 0.0, None)
    probs = probs / probs.sum(axis=1, keepdims=True)
    Y = rng.multinomial(lengths, probs).T
    return CountData.from_counts(Y, vocab_size=model.p, prune=prune)


def generate_w_dirichlet(n: int, k: int, alpha, seed=None) -> np.ndarray:
    alpha = np.broadcast_to(np.asarray(alpha, dtype=np.float64), (k,))
    if np.any(alpha <= 0):
        raise ValueError("alpha must be positive")
    if k == 1:
        return np.ones((1, n))
    W = _rng(seed).dirichlet(alpha, size=n).T
    return W / W.sum(axis=0)


def generate_w_lowerbound(n: int, k: int, total_words: int) -> np.ndarray:
    """Balanced block design ``W0`` shrunk towards uniform by ``1/(nN)``.

    Each column gets ``+1/(nN)`` on every topic and ``-K/(nN)`` on its own
    topic, so column sums stay one.
    """
    if n < k:
        raise ValueError("need n >= k")
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    labels = np.repeat(np.arange(k), sizes)
    W0 = np.zeros((k, n))
    W0[labels, np.arange(n)] = 1.0
    eps = 1.0 / (n * total_words)
    W = W0 + eps - k * eps * W0
    if np.any(W < 0):
        raise NegativeEntry("n * total_words is too small for a nonnegative W")
    return W


def generate_w_logistic_normal(n: int, k: int, rho: float, n_blocks: int = 1, seed=None) -> np.ndarray:
    """Softmax of zero-mean Gaussians with block-diagonal covariance.

    Topics are split into ``n_blocks`` contiguous blocks of (near) equal size;
    within a block the covariance is ``rho`` off the diagonal and 1 on it.
    """
    cov = np.eye(k)
    edges = np.linspace(0, k, n_blocks + 1).round().astype(int)
    for lo, hi in zip(edges[:-1], edges[1:]):
        cov[lo:hi, lo:hi] = rho
    np.fill_diagonal(cov, 1.0)
    z = _rng(seed).multivariate_normal(np.zeros(k), cov, size=n, method="cholesky")
    z -= z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return (e / e.sum(axis=1, keepdims=True)).T


def identifiable_model(p: int, k: int, seed=None, n: int | None = None, max_tries: int = 1000) -> TopicModel:
    """Random model satisfying the rank and diagonal-dominance conditions.

    Anchor counts per topic and W are redrawn until ``rank(W) = K`` and the
    gap ``nu`` is positive; Dirichlet(1) weights make this quick.
    """
    from .estimator import check_assumptions

    rng = _rng(seed)
    n = max(2 * k, 10) if n is None else n
    m_max = max(1, (p - 1) // k - 1)
    for _ in range(max_tries):
        m = int(rng.integers(1, min(m_max, 3) + 1))
        xi = float(rng.uniform(0.2, 0.8)) / (k * m)
        A, _ = generate_a(p, k, m, xi, rng)
        W = generate_w_dirichlet(n, k, 1.0, rng)
        model = validate_topic_model(A, W)
        status = check_assumptions(model)
        if status["2"] and status["3"]:
            return model
    raise RuntimeError(f"no identifiable model found in {max_tries} draws")
