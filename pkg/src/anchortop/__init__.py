"""Topic-model estimation with anchor words and an unknown number of topics."""

from .anchors import MarginOracle, find_anchor_words, sensitivity_specificity
from .errors import (
    AnchorTopError,
    AssumptionViolated,
    LpFailed,
    NoAnchorsFound,
    NoAnchorWord,
)
from .estimator import (
    check_assumption3,
    cross_validate_c1,
    fit,
    population_fit,
    recover_population,
)
from .evaluation import aligned_losses, coherence, unique_words
from .model import (
    AnchorPartition,
    CountData,
    FitResult,
    TopicModel,
    TuningProfile,
    dump_counts,
    load_counts,
    validate_topic_model,
)
from .moments import compute_moments, population_moments

__version__ = "0.1.0"
