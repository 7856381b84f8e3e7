"""Core domain types: count data, topic models, anchor partitions and fit results.

All indices are 0-based internally. Anything written for a human (error
messages, partition files, TSV headers) is 1-based.
"""

from __future__ import annotations

import io
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    ColumnSumViolation,
    DocumentTooShort,
    EmptyCorpus,
    NegativeEntry,
    NoAnchorWord,
    ParseError,
)

logger = logging.getLogger(__name__)

COLUMN_SUM_TOL = 1e-9


def _frozen(arr):
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CountData:
    """Word-document counts ``Y`` (p x n) with document lengths ``N_i``.

    ``word_ids`` maps each retained row back to its index in the original
    vocabulary of size ``vocab_size``; rows with zero total count are pruned
    by :meth:`from_counts` unless ``prune=False``.
    """

    counts: sp.csc_matrix
    doc_lengths: np.ndarray
    word_ids: np.ndarray
    vocab_size: int

    @property
    def p(self) -> int:
        return self.counts.shape[0]

    @property
    def n(self) -> int:
        return self.counts.shape[1]

    @classmethod
    def from_counts(cls, counts, vocab_size=None, word_ids=None, prune=True) -> "CountData":
        if sp.issparse(counts):
            mat = sp.csc_matrix(counts, dtype=np.float64)
        else:
            dense = np.asarray(counts, dtype=np.float64)
            if dense.ndim != 2:
                raise ValueError("counts must be a 2-d matrix")
            mat = sp.csc_matrix(dense)
        mat.sum_duplicates()
        mat.eliminate_zeros()
        p, n = mat.shape
        if p == 0 or n == 0:
            raise EmptyCorpus("corpus has no words or no documents")
        if mat.nnz and (mat.data.min() < 0 or np.any(mat.data != np.round(mat.data))):
            raise ValueError("counts must be nonnegative integers")
        mat = mat.astype(np.int64)
        if word_ids is None:
            word_ids = np.arange(p)
        word_ids = np.asarray(word_ids, dtype=np.int64)
        if vocab_size is None:
            vocab_size = int(word_ids.max()) + 1 if p else 0

        lengths = np.asarray(mat.sum(axis=0)).ravel().astype(np.int64)
        if lengths.sum() == 0:
            raise EmptyCorpus("corpus contains no word occurrences")
        short = np.flatnonzero(lengths < 2)
        if short.size:
            raise DocumentTooShort(int(short[0]) + 1, int(lengths[short[0]]))

        if prune:
            totals = np.asarray(mat.sum(axis=1)).ravel()
            keep = np.flatnonzero(totals > 0)
            if keep.size < p:
                logger.warning("pruned %d words with zero total count", p - keep.size)
                mat = sp.csc_matrix(mat[keep, :])
                word_ids = word_ids[keep]

        mat.sort_indices()
        for a in (mat.data, mat.indices, mat.indptr):
            a.setflags(write=False)
        return cls(mat, _frozen(lengths), _frozen(word_ids), int(vocab_size))

    def frequencies(self) -> sp.csc_matrix:
        """Return ``X = Y diag(N)^{-1}`` as a sparse matrix."""
        return sp.csc_matrix(self.counts @ sp.diags(1.0 / self.doc_lengths))

    def row_sums(self) -> np.ndarray:
        """``||X_j.||_1``, the sum of word j's frequencies over documents."""
        return np.asarray(self.frequencies().sum(axis=1)).ravel()

    def subset_documents(self, docs, prune=True) -> "CountData":
        docs = np.asarray(docs, dtype=np.int64)
        return CountData.from_counts(
            self.counts[:, docs], vocab_size=self.vocab_size, word_ids=self.word_ids, prune=prune
        )

    def expand_rows(self, mat) -> np.ndarray:
        """Embed a (p x m) matrix over retained words into the full vocabulary."""
        mat = np.asarray(mat)
        out = np.zeros((self.vocab_size,) + mat.shape[1:], dtype=mat.dtype)
        out[self.word_ids] = mat
        return out

    def dense_full(self) -> np.ndarray:
        """Counts as a dense (vocab_size x n) array including pruned rows."""
        return self.expand_rows(self.counts.toarray())


@dataclass(frozen=True)
class TopicModel:
    """Ground-truth factorisation ``Pi = A W`` with its anchor partition."""

    A: np.ndarray
    W: np.ndarray
    Pi: np.ndarray
    anchor_partition: tuple

    @property
    def K(self) -> int:
        return self.A.shape[1]

    @property
    def p(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.W.shape[1]

    @property
    def anchor_set(self) -> frozenset:
        return frozenset(i for g in self.anchor_partition for i in g)


def _check_stochastic(mat, name):
    if np.any(mat < 0):
        raise NegativeEntry(f"{name} has negative entries")
    sums = mat.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > COLUMN_SUM_TOL)
    if bad.size:
        raise ColumnSumViolation(name, int(bad[0]) + 1, float(sums[bad[0]]))
    # Sums already at 1 up to summation rounding are left alone, so
    # validating a validated model is the identity.
    exact = np.abs(sums - 1.0) <= 8 * np.finfo(float).eps * mat.shape[0]
    return np.where(exact, mat, mat / sums)


def anchor_groups(A) -> tuple:
    """Rows of ``A`` with exactly one positive entry, grouped by topic."""
    A = np.asarray(A)
    support = A > 0
    single = support.sum(axis=1) == 1
    topic_of = np.argmax(support, axis=1)
    return tuple(
        tuple(int(j) for j in np.flatnonzero(single & (topic_of == k))) for k in range(A.shape[1])
    )


def validate_topic_model(A, W) -> TopicModel:
    """Check column-stochastic A (p x K) and W (K x n) and build a TopicModel.

    Column sums within 1e-9 of one are renormalised; anything further off
    raises :class:`ColumnSumViolation`. Every topic needs an anchor word.
    """
    A = np.array(A, dtype=np.float64)
    W = np.array(W, dtype=np.float64)
    if A.ndim != 2 or W.ndim != 2 or A.shape[1] != W.shape[0]:
        raise ValueError(f"incompatible shapes A{A.shape} and W{W.shape}")
    A = _check_stochastic(A, "A")
    W = _check_stochastic(W, "W")
    groups = anchor_groups(A)
    for k, g in enumerate(groups):
        if not g:
            raise NoAnchorWord(k + 1)
    return TopicModel(_frozen(A), _frozen(W), _frozen(A @ W), groups)


@dataclass(frozen=True)
class AnchorPartition:
    """Estimated anchor groups, in discovery order."""

    groups: tuple

    def __post_init__(self):
        seen = set()
        groups = tuple(tuple(sorted(int(i) for i in g)) for g in self.groups)
        for g in groups:
            if not g:
                raise ValueError("anchor groups must be nonempty")
            if seen.intersection(g):
                raise ValueError("anchor groups must be disjoint")
            seen.update(g)
        object.__setattr__(self, "groups", groups)

    @property
    def k_hat(self) -> int:
        return len(self.groups)

    @property
    def anchor_set(self) -> frozenset:
        return frozenset(i for g in self.groups for i in g)

    def relabel(self, word_ids) -> "AnchorPartition":
        word_ids = np.asarray(word_ids)
        return AnchorPartition(tuple(tuple(int(word_ids[i]) for i in g) for g in self.groups))

    def to_text(self) -> str:
        return "".join(" ".join(str(i + 1) for i in g) + "\n" for g in self.groups)

    @classmethod
    def from_text(cls, text: str) -> "AnchorPartition":
        groups = []
        for ln, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                groups.append(tuple(int(t) - 1 for t in line.split()))
            except ValueError:
                raise ParseError(ln) from None
        return cls(tuple(groups))


@dataclass(frozen=True)
class TuningProfile:
    c0: float = 0.01
    c1: float = 1.1
    t_reps: int = 1
    seed: int = 0

    def __post_init__(self):
        # c1 = 0 is let through deliberately: it reproduces the zero-margin variant.
        if not self.c0 > 0:
            raise ValueError("c0 must be positive")
        if not self.c1 >= 0:
            raise ValueError("c1 must be nonnegative")
        if int(self.t_reps) != self.t_reps or self.t_reps < 1:
            raise ValueError("t_reps must be a positive integer")


@dataclass(frozen=True)
class FitResult:
    """Output of the estimator.

    ``a_hat`` is indexed by the original vocabulary: words pruned at load
    time get all-zero rows. ``partition`` and ``rep_sets`` use the same
    original word indices.
    """

    a_hat: np.ndarray
    partition: AnchorPartition
    rep_sets: list
    lp_diagnostics: list
    degenerate_columns: list
    lambdas: list = field(default_factory=list)

    @property
    def k_hat(self) -> int:
        return self.partition.k_hat


# ---------------------------------------------------------------------------
# count file formats


def _read_text(source) -> str:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            raw = fh.read()
    else:
        raw = source.read()
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise ParseError(1, "input is not valid UTF-8 text") from None
    return raw


def _parse_uci(text):
    lines = text.splitlines()
    header = []
    ln = 0
    while len(header) < 3:
        if ln >= len(lines):
            raise ParseError(ln + 1, "missing UCI header")
        tok = lines[ln].strip()
        ln += 1
        if not tok:
            continue
        try:
            header.append(int(tok))
        except ValueError:
            raise ParseError(ln, "expected an integer header value") from None
    n_docs, n_words, nnz = header
    if n_docs < 0 or n_words < 0 or nnz < 0:
        raise ParseError(ln, "negative header value")
    rows, cols, vals = [], [], []
    while ln < len(lines):
        tok = lines[ln].split()
        ln += 1
        if not tok:
            continue
        if len(tok) != 3:
            raise ParseError(ln, "expected 'docID wordID count'")
        try:
            d, w, c = (int(t) for t in tok)
        except ValueError:
            raise ParseError(ln, "non-integer field") from None
        if not (1 <= d <= n_docs and 1 <= w <= n_words) or c < 0:
            raise ParseError(ln, "index out of range or negative count")
        rows.append(w - 1)
        cols.append(d - 1)
        vals.append(c)
    if len(vals) != nnz:
        raise ParseError(ln, f"header declares {nnz} entries, found {len(vals)}")
    if n_docs == 0 or n_words == 0:
        raise EmptyCorpus("UCI header declares an empty corpus")
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(n_words, n_docs), dtype=np.int64)
    return mat, n_words


def _parse_tsv(text):
    rows = []
    for ln, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            vals = [int(t) for t in line.rstrip("\n").split("\t")]
        except ValueError:
            raise ParseError(ln, "non-integer field") from None
        if any(v < 0 for v in vals):
            raise ParseError(ln, "negative count")
        if rows and len(vals) != len(rows[0]):
            raise ParseError(ln, "ragged row")
        rows.append(vals)
    if not rows:
        raise EmptyCorpus("TSV input has no rows")
    mat = np.array(rows, dtype=np.int64)
    return mat, mat.shape[0]


def load_counts(source, format="uci_bow", prune=True) -> CountData:
    """Read counts from a path or stream in ``uci_bow`` or ``tsv_dense`` format."""
    text = _read_text(source)
    if format == "uci_bow":
        mat, vocab = _parse_uci(text)
    elif format == "tsv_dense":
        mat, vocab = _parse_tsv(text)
    else:
        raise ValueError(f"unknown count format {format!r}")
    return CountData.from_counts(mat, vocab_size=vocab, prune=prune)


def dump_counts(data: CountData, format="uci_bow") -> bytes:
    """Serialise counts over the original vocabulary; inverse of :func:`load_counts`."""
    buf = io.StringIO()
    if format == "uci_bow":
        coo = data.counts.tocoo()
        words = data.word_ids[coo.row]
        order = np.lexsort((words, coo.col))
        buf.write(f"{data.n}\n{data.vocab_size}\n{coo.nnz}\n")
        for d, w, c in zip(coo.col[order], words[order], coo.data[order]):
            buf.write(f"{d + 1} {w + 1} {c}\n")
    elif format == "tsv_dense":
        for row in data.dense_full():
            buf.write("\t".join(str(int(v)) for v in row) + "\n")
    else:
        raise ValueError(f"unknown count format {format!r}")
    return buf.getvalue().encode("utf-8")
