"""Pairwise and family identifiability verdicts for VAR(1) graph models.

The criteria are sufficient conditions only. A pair that passes none of them
is reported as ``criteria_not_satisfied``, never as non-identifiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import InputError, PreconditionError
from .graph import (
    DirectedGraph,
    MaximalClassSet,
    comember_pairs,
    has_multi_edge,
    maximal_classes,
)
from .jacobian import (
    DEFAULT_RANK_TOL,
    Dimension,
    formula_dimension,
    generic_rank,
    matroid_independent,
    reduced_columns,
)

IDENTIFIABLE = "identifiable"
NOT_SATISFIED = "criteria_not_satisfied"
DIFFERENT_DIMENSION = "different_dimension"
SAME_DIM_DIFFERENT_MAXCLASSES = "same_dim_different_maxclasses"
CROSS_MAXCLASS = "cross_maxclass_condition"
NO_CRITERION = "none"


@dataclass(frozen=True)
class IdentifiabilityVerdict:
    """Verdict for graphs ``pair[0]`` and ``pair[1]`` (0-based family indices).

    ``witnesses`` is set only for the cross condition: a pair comember in the
    first graph but not the second, then a pair comember in the second only.
    ``dims`` entries are ``None`` when a numeric rank was not computed.
    """

    pair: tuple[int, int]
    verdict: str
    criterion: str
    witnesses: tuple[tuple[int, int], tuple[int, int]] | None = None
    dims: tuple[Dimension | None, Dimension | None] = (None, None)

    def __post_init__(self) -> None:
        if self.verdict == IDENTIFIABLE and self.criterion == NO_CRITERION:
            raise ValueError("identifiable verdict needs a criterion")
        if self.criterion == CROSS_MAXCLASS and self.witnesses is None:
            raise ValueError("cross condition needs witnesses")

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "verdict": self.verdict,
            "criterion": self.criterion,
            "witnesses": [list(w) for w in self.witnesses] if self.witnesses else None,
            "dims": [d.to_dict() if d else None for d in self.dims],
        }


def model_dimension(
    g: DirectedGraph,
    seed: int | None,
    trials: int = 5,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> Dimension | None:
    """Formula dimension, or the numeric generic rank if a seed is available."""
    if not has_multi_edge(g):
        return Dimension(formula_dimension(g), "formula")
    if seed is None:
        return None
    return Dimension(generic_rank(g, trials, seed, rank_tol).rank, "numeric")


def _offdiag_comembers(mc: MaximalClassSet) -> set[tuple[int, int]]:
    return {(a, b) for a, b in comember_pairs(mc) if a != b}


def identify_pair(
    g1: DirectedGraph,
    g2: DirectedGraph,
    trust_numeric_dims: bool = False,
    seed: int | None = None,
    trials: int = 5,
    rank_tol: float = DEFAULT_RANK_TOL,
    pair: tuple[int, int] = (0, 1),
) -> IdentifiabilityVerdict:
    """Run the criteria in order: dimension, maximal classes, cross condition.

    Numeric dimensions (graphs with a multi-edge) only enter the first two
    criteria when ``trust_numeric_dims`` is set; they are computed when a
    ``seed`` is given (trusting them without a seed uses seed 0).
    """
    if g1.n != g2.n:
        raise InputError(f"graphs have different node counts ({g1.n} and {g2.n})")
    if trust_numeric_dims and seed is None:
        seed = 0
    d1 = model_dimension(g1, seed, trials, rank_tol)
    d2 = model_dimension(g2, seed, trials, rank_tol)
    dims = (d1, d2)

    def usable(d: Dimension | None) -> bool:
        return d is not None and (d.provenance == "formula" or trust_numeric_dims)

    mc1, mc2 = maximal_classes(g1), maximal_classes(g2)
    if usable(d1) and usable(d2):
        if d1.value != d2.value:
            return IdentifiabilityVerdict(pair, IDENTIFIABLE, DIFFERENT_DIMENSION, None, dims)
        if mc1 != mc2:
            return IdentifiabilityVerdict(
                pair, IDENTIFIABLE, SAME_DIM_DIFFERENT_MAXCLASSES, None, dims
            )
    p1, p2 = _offdiag_comembers(mc1), _offdiag_comembers(mc2)
    only1, only2 = sorted(p1 - p2), sorted(p2 - p1)
    if only1 and only2:
        return IdentifiabilityVerdict(
            pair, IDENTIFIABLE, CROSS_MAXCLASS, (only1[0], only2[0]), dims
        )
    return IdentifiabilityVerdict(pair, NOT_SATISFIED, NO_CRITERION, None, dims)


@dataclass(frozen=True)
class FamilyReport:
    """All pairwise verdicts of a graph family.

    ``matrix[i][j]`` is the criterion used for the pair (``None`` on the
    diagonal). ``disjoint_classes`` lists, per graph, pairs of its maximal
    classes that share no node; this is descriptive only.
    """

    verdicts: tuple[IdentifiabilityVerdict, ...]
    matrix: tuple[tuple[str | None, ...], ...]
    identifiable: bool
    disjoint_classes: tuple[tuple[tuple[tuple[int, ...], tuple[int, ...]], ...], ...] = field(
        default=()
    )

    def verdict_for(self, i: int, j: int) -> IdentifiabilityVerdict:
        i, j = min(i, j), max(i, j)
        for v in self.verdicts:
            if v.pair == (i, j):
                return v
        raise KeyError((i, j))

    def to_dict(self) -> dict:
        return {
            "pairs": [v.to_dict() for v in self.verdicts],
            "matrix": [list(r) for r in self.matrix],
            "family_identifiable": self.identifiable,
            "disjoint_classes": [
                [[list(a), list(b)] for a, b in per_graph] for per_graph in self.disjoint_classes
            ],
        }


def disjoint_class_pairs(g: DirectedGraph) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    mc = maximal_classes(g)
    return tuple((a, b) for a, b in combinations(mc.classes, 2) if not set(a) & set(b))


def identify_family(
    gs: list[DirectedGraph],
    trust_numeric_dims: bool = False,
    seed: int | None = None,
    trials: int = 5,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> FamilyReport:
    """Verdict for every unordered pair; the family is identifiable iff all pairs are."""
    if len(gs) < 2:
        raise InputError("a family needs at least two graphs")
    if len({g.n for g in gs}) != 1:
        raise InputError("all graphs in a family must have the same node count")
    k = len(gs)
    verdicts = []
    matrix: list[list[str | None]] = [[None] * k for _ in range(k)]
    for i, j in combinations(range(k), 2):
        v = identify_pair(gs[i], gs[j], trust_numeric_dims, seed, trials, rank_tol, pair=(i, j))
        verdicts.append(v)
        matrix[i][j] = matrix[j][i] = v.criterion
    return FamilyReport(
        tuple(verdicts),
        tuple(tuple(r) for r in matrix),
        all(v.verdict == IDENTIFIABLE for v in verdicts),
        tuple(disjoint_class_pairs(g) for g in gs),
    )


def _separating_set(
    g_nz: DirectedGraph, column: tuple[int, int], seed: int, trials: int, rank_tol: float
) -> tuple[tuple[int, int], tuple[int, int]] | None:
    """``{column, partner}`` independent in ``g_nz``, partner being the first that works."""
    mc = maximal_classes(g_nz)
    members = set(comember_pairs(mc))
    for partner in reduced_columns(g_nz.n):
        if partner == column or partner not in members:
            continue
        if matroid_independent(g_nz, [column, partner], trials, seed, rank_tol):
            return column, partner
    return None


def matroid_witness_check(
    g1: DirectedGraph,
    g2: DirectedGraph,
    verdict: IdentifiabilityVerdict,
    seed: int = 0,
    trials: int = 5,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> bool:
    """Numerically confirm the column set that separates the two Jacobian matroids.

    A column ``sigma[a,b]`` that is nonzero in one model and identically zero in
    the other is paired with an independent partner column of the first model.
    The pair must be independent there and dependent in the other model. The
    cross condition is checked in both directions.
    """
    if verdict.criterion not in (SAME_DIM_DIFFERENT_MAXCLASSES, CROSS_MAXCLASS):
        raise PreconditionError(
            f"matroid witness check does not apply to criterion {verdict.criterion!r}"
        )
    if verdict.criterion == CROSS_MAXCLASS:
        assert verdict.witnesses is not None
        cases = [(g1, g2, verdict.witnesses[0]), (g2, g1, verdict.witnesses[1])]
    else:
        p1 = _offdiag_comembers(maximal_classes(g1))
        p2 = _offdiag_comembers(maximal_classes(g2))
        diff = sorted(p1 ^ p2)
        if not diff:
            return False
        col = diff[0]
        cases = [(g1, g2, col) if col in p1 else (g2, g1, col)]
    for g_nz, g_z, col in cases:
        found = _separating_set(g_nz, col, seed, trials, rank_tol)
        if found is None:
            return False
        if matroid_independent(g_z, list(found), trials, seed, rank_tol):
            return False
    return True
