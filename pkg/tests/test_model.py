import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anchortop.errors import (
    ColumnSumViolation,
    DocumentTooShort,
    EmptyCorpus,
    NegativeEntry,
    NoAnchorWord,
    ParseError,
)
from anchortop.fixtures import EXAMPLE1_A, EXAMPLE1_W
from anchortop.model import (
    AnchorPartition,
    CountData,
    TuningProfile,
    dump_counts,
    load_counts,
    validate_topic_model,
)

# Pi = A W printed alongside the first worked example.
PRINTED_PI = np.array(
    [
        [0.18, 0.06, 0.06],
        [0.12, 0.04, 0.04],
        [0.15, 0.35, 0.00],
        [0.04, 0.04, 0.32],
        [0.30, 0.42, 0.28],
        [0.21, 0.09, 0.30],
    ]
)


def test_example1_partition_and_pi():
    model = validate_topic_model(EXAMPLE1_A, EXAMPLE1_W)
    assert model.anchor_partition == ((0, 1), (2,), (3,))
    np.testing.assert_allclose(model.Pi, PRINTED_PI, atol=1e-12)
    assert model.K == 3 and model.p == 6 and model.n == 3


def test_all_anchor_model():
    W = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    model = validate_topic_model(np.eye(2), W)
    assert model.anchor_partition == ((0,), (1,))
    np.testing.assert_array_equal(model.Pi, W)


def test_dense_third_column_has_no_anchor():
    A = np.array([[0.5, 0, 0], [0, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0.5]])
    W = np.full((3, 2), 1 / 3)
    with pytest.raises(NoAnchorWord) as info:
        validate_topic_model(A, W)
    assert info.value.topic == 3


def test_column_sum_and_sign_errors():
    W = np.eye(2)
    with pytest.raises(ColumnSumViolation):
        validate_topic_model(np.array([[0.9, 0], [0, 1.0]]), W)
    with pytest.raises(NegativeEntry):
        validate_topic_model(np.array([[1.1, 0], [-0.1, 1.0], [0, 0]]), W)


def test_small_rounding_is_renormalised():
    A = np.eye(2) * (1 + 5e-10)
    model = validate_topic_model(A, np.eye(2))
    np.testing.assert_allclose(model.A.sum(axis=0), 1.0, atol=1e-15)


def test_validate_is_idempotent():
    m1 = validate_topic_model(EXAMPLE1_A, EXAMPLE1_W)
    m2 = validate_topic_model(m1.A, m1.W)
    np.testing.assert_array_equal(m1.A, m2.A)
    np.testing.assert_array_equal(m1.Pi, m2.Pi)
    assert m1.anchor_partition == m2.anchor_partition


def test_model_is_read_only():
    model = validate_topic_model(EXAMPLE1_A, EXAMPLE1_W)
    with pytest.raises(ValueError):
        model.A[0, 0] = 1.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 6), st.integers(2, 8))
def test_pi_columns_sum_to_one(seed, K, n):
    rng = np.random.default_rng(seed)
    A = np.vstack([np.eye(K), rng.uniform(size=(4, K))])
    A /= A.sum(axis=0)
    W = rng.dirichlet(np.ones(K), size=n).T
    model = validate_topic_model(A, W)
    np.testing.assert_allclose(model.Pi.sum(axis=0), 1.0, atol=1e-10)


# ---------------------------------------------------------------------------
# count files


def test_uci_empty_document_is_rejected():
    stream = io.BytesIO(b"3\n2\n3\n1 1 2\n1 2 1\n2 1 5\n")
    with pytest.raises(DocumentTooShort) as info:
        load_counts(stream)
    assert info.value.doc == 3


def test_uci_doc_lengths():
    data = load_counts(io.BytesIO(b"2\n3\n4\n1 1 2\n1 3 1\n2 2 4\n2 3 1\n"))
    assert data.n == 2 and data.p == 3
    np.testing.assert_array_equal(data.doc_lengths, [3, 5])


@pytest.mark.parametrize(
    "text, line",
    [
        (b"", 1),
        (b"2\nx\n1\n", 2),
        (b"1\n2\n1\n1 1\n", 4),
        (b"1\n2\n1\n1 3 4\n", 4),
        (b"1\n2\n2\n1 1 4\n", 4),
    ],
)
def test_uci_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        load_counts(io.BytesIO(text))
    assert info.value.line == line


def test_tsv_from_example1():
    counts = np.rint(100 * PRINTED_PI).astype(int)
    text = "\n".join("\t".join(map(str, row)) for row in counts) + "\n"
    data = load_counts(io.StringIO(text), format="tsv_dense")
    assert (data.p, data.n) == (6, 3)
    np.testing.assert_array_equal(np.asarray(data.counts.sum(axis=0)).ravel(), [100, 100, 100])
    np.testing.assert_array_equal(data.doc_lengths, [100, 100, 100])


def test_tsv_errors():
    with pytest.raises(EmptyCorpus):
        load_counts(io.StringIO("# nothing\n"), format="tsv_dense")
    with pytest.raises(ParseError):
        load_counts(io.StringIO("1\t2\n3\n"), format="tsv_dense")
    with pytest.raises(ParseError):
        load_counts(io.StringIO("1\t-2\n3\t4\n"), format="tsv_dense")


def test_pruning_keeps_original_ids(caplog):
    Y = np.array([[2, 1], [0, 0], [1, 3]])
    data = CountData.from_counts(Y)
    assert data.p == 2 and data.vocab_size == 3
    np.testing.assert_array_equal(data.word_ids, [0, 2])
    np.testing.assert_array_equal(data.dense_full(), Y)
    assert "pruned 1" in caplog.text


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["uci_bow", "tsv_dense"]))
def test_round_trip(seed, fmt):
    rng = np.random.default_rng(seed)
    Y = rng.poisson(1.5, size=(int(rng.integers(1, 8)), int(rng.integers(1, 6))))
    Y[0] += 2
    data = CountData.from_counts(Y)
    blob = dump_counts(data, fmt)
    back = load_counts(io.BytesIO(blob), format=fmt)
    np.testing.assert_array_equal(back.dense_full(), data.dense_full())
    assert dump_counts(back, fmt) == blob


# ---------------------------------------------------------------------------
# partitions and tuning


def test_partition_text_round_trip():
    part = AnchorPartition(((0, 1), (4,), (2,)))
    assert part.to_text() == "1 2\n5\n3\n"
    assert AnchorPartition.from_text(part.to_text()) == part
    assert part.k_hat == 3 and part.anchor_set == {0, 1, 2, 4}


def test_partition_validation():
    with pytest.raises(ValueError):
        AnchorPartition(((0, 1), (1,)))
    with pytest.raises(ValueError):
        AnchorPartition(((),))


def test_tuning_defaults_and_validation():
    t = TuningProfile()
    assert (t.c0, t.c1, t.t_reps) == (0.01, 1.1, 1)
    for bad in (dict(c0=0), dict(c1=-1), dict(t_reps=0), dict(t_reps=1.5)):
        with pytest.raises(ValueError):
            TuningProfile(**bad)
