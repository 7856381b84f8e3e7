"""Exception hierarchy.

Indices carried by exceptions are 1-based, matching user-facing reports.
"""


class AnchorTopError(Exception):
    """Base class for all package errors."""


class ParseError(AnchorTopError):
    def __init__(self, line, message="malformed input"):
        self.line = line
        super().__init__(f"line {line}: {message}")


class EmptyCorpus(AnchorTopError):
    pass


class DocumentTooShort(AnchorTopError):
    def __init__(self, doc, length):
        self.doc = doc
        self.length = length
        super().__init__(f"document {doc} has {length} words; at least 2 required")


class ColumnSumViolation(AnchorTopError):
    def __init__(self, matrix, column, total):
        self.matrix = matrix
        self.column = column
        self.total = total
        super().__init__(f"column {column} of {matrix} sums to {total!r}, expected 1")


class NegativeEntry(AnchorTopError):
    pass


class NoAnchorWord(AnchorTopError):
    def __init__(self, topic):
        self.topic = topic
        super().__init__(f"topic {topic} has no anchor word")


class ZeroRow(AnchorTopError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"word {row} has zero total mass")


class DimensionLimit(AnchorTopError):
    pass


class DimensionMismatch(AnchorTopError):
    pass


class NoAnchorsFound(AnchorTopError):
    def __init__(self, message="every row was rejected as an anchor candidate"):
        super().__init__(message)


class LpFailed(AnchorTopError):
    def __init__(self, topic, status):
        self.topic = topic
        self.status = status
        super().__init__(f"linear program for topic {topic} ended with status {status!r}")


class AssumptionViolated(AnchorTopError):
    def __init__(self, which, detail=""):
        self.which = which
        msg = f"Assumption {which} violated"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class SingularGram(AnchorTopError):
    pass


class InfeasibleXi(AnchorTopError):
    pass


class WordNeverOccurs(AnchorTopError):
    def __init__(self, word):
        self.word = word
        super().__init__(f"word {word + 1} occurs in no document")
