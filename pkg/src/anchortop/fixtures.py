"""Small hand-checkable models used by the oracle command and the tests."""

import numpy as np

EXAMPLE1_A = np.array(
    [
        [0.3, 0.0, 0.0],
        [0.2, 0.0, 0.0],
        [0.0, 0.5, 0.0],
        [0.0, 0.0, 0.4],
        [0.2, 0.5, 0.3],
        [0.3, 0.0, 0.3],
    ]
)

EXAMPLE1_W = np.array(
    [
        [0.6, 0.2, 0.2],
        [0.3, 0.7, 0.0],
        [0.1, 0.1, 0.8],
    ]
)

EXAMPLE1_PARTITION = ((0, 1), (2,), (3,))

EXAMPLE1_B_J = np.array([[2 / 3, 1.0, 3 / 4], [1.0, 0.0, 3 / 4]])

# Topic weights with a rare fourth topic; the first two satisfy the
# diagonal-dominance condition on C~, the third does not.
RARE_TOPIC_W = {
    "supp1": np.array(
        [
            [0.5, 0.4, 0.0, 0.0, 0.4],
            [0.2, 0.6, 0.5, 0.5, 0.0],
            [0.3, 0.0, 0.5, 0.5, 0.1],
            [0.0, 0.0, 0.0, 0.0, 0.5],
        ]
    ),
    "supp2": np.array(
        [
            [0.5, 0.4, 0.0, 0.0, 0.3],
            [0.2, 0.6, 0.5, 0.5, 0.2],
            [0.3, 0.0, 0.5, 0.5, 0.4],
            [0.0, 0.0, 0.0, 0.0, 0.1],
        ]
    ),
    "supp3": np.array(
        [
            [0.5, 0.4, 0.0, 0.0, 0.9],
            [0.2, 0.6, 0.5, 0.5, 0.0],
            [0.3, 0.0, 0.5, 0.5, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.1],
        ]
    ),
}
