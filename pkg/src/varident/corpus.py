"""Reference graphs and matrices used by the example suite and the tests.

Graphs drawn only as pictures were rebuilt from the properties stated about
them (maximal classes, dimensions, criteria); each one reproduces all of them.
"""

from __future__ import annotations

import numpy as np

from .graph import DirectedGraph

_g = DirectedGraph.from_edges

# Two interaction matrices (2-decimal values) that give nearly the same covariance.
LAMBDA_1 = np.array([[0.50, 0.70, 0.00], [0.00, 0.90, 0.00], [0.00, 0.80, 0.40]])
LAMBDA_2 = np.array([[0.50, 0.67, -0.01], [0.00, 0.94, 0.02], [0.00, 0.00, 0.38]])
SHARED_SIGMA = np.array([[1.33, 0.85, 0.00], [0.85, 22.85, 0.60], [0.00, 0.60, 1.19]])

# Two source SCCs {1,2,3} and {5}.
FIG2 = _g(6, [(1, 2), (2, 3), (3, 1), (3, 4), (5, 4), (5, 6), (4, 6)])
FIG2_CLASSES = [[1, 2, 3, 4, 6], [4, 5, 6]]

# Small graph whose projected building block has rows l11, l13, l21, l22, l33, w.
PSI_EXAMPLE = _g(3, [(1, 3), (2, 1)])

# Support pattern with a single zero pair (1, 3).
SUPPORT_EXAMPLE_ZEROS = [(1, 3)]
SUPPORT_EXAMPLE_CLASSES = [[1, 2], [2, 3]]
SUPPORT_EXAMPLE_GRAPH = _g(3, [(1, 2), (3, 2)])

# Dimension example: classes {1,2,3,4},{3,5}; n_r = 10, n_c' = 12.
DIM10 = _g(5, [(1, 2), (2, 3), (2, 4), (5, 3)])

# A single-source tree on five nodes.
TREE5 = _g(5, [(1, 2), (2, 3), (2, 4), (3, 5)])

# Cross-condition pair; the first graph has a multi-edge 1<->2.
CROSS_G1 = _g(4, [(1, 2), (2, 1), (2, 3), (4, 3)])
CROSS_G2 = _g(4, [(1, 2), (3, 2), (3, 4), (4, 3)])

# Family of four graphs on four nodes, dimensions 7, 8, 8 and unknown.
FAMILY = [
    _g(4, [(2, 1), (3, 1), (4, 1)]),
    _g(4, [(1, 3), (2, 3), (2, 4)]),
    _g(4, [(1, 2), (3, 2), (3, 4)]),
    CROSS_G1,
]
FAMILY_DIMS = [7, 8, 8, None]

# Pairs with their expected criterion.
TABLE_ROWS = [
    (_g(3, [(1, 2), (3, 2)]), _g(3, [(2, 1), (3, 1)]), "same_dim_different_maxclasses"),
    (_g(3, [(1, 2), (2, 3)]), _g(3, [(1, 2), (3, 2)]), "different_dimension"),
    (CROSS_G1, CROSS_G2, "cross_maxclass_condition"),
    (_g(3, [(1, 2), (2, 3)]), _g(3, [(1, 2), (1, 3)]), "none"),
    (_g(3, [(1, 2), (2, 1)]), _g(3, [(1, 2)]), "none"),
]

# Resource/consumer network (resources 1-5, consumers 6-10).
BIPARTITE = _g(
    10,
    [(1, 6), (1, 7), (2, 6), (2, 7), (2, 8), (2, 9)]
    + [(3, 6), (3, 7), (3, 8), (3, 9), (3, 10), (4, 6), (5, 6)],
)
BIPARTITE_CLASSES = [[1, 6, 7], [2, 6, 7, 8, 9], [3, 6, 7, 8, 9, 10], [4, 6], [5, 6]]

# Two food webs: disjoint classes versus overlapping ones.
WEB_A = _g(6, [(1, 2), (1, 3), (4, 5), (4, 6)])
WEB_A_CLASSES = [[1, 2, 3], [4, 5, 6]]
WEB_B = _g(6, [(1, 2), (1, 3), (3, 6), (4, 5), (4, 3)])
WEB_B_CLASSES = [[1, 2, 3, 6], [3, 4, 5, 6]]

# Path with one admissible extra pair for the square certificate matrix.
PATH3 = _g(3, [(1, 2), (2, 3)])
