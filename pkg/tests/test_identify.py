import json

import numpy as np
import pytest

from varident import corpus
from varident.checks import random_digraph
from varident.errors import InputError, PreconditionError
from varident.graph import DirectedGraph, has_multi_edge, maximal_classes
from varident.identify import (
    CROSS_MAXCLASS,
    DIFFERENT_DIMENSION,
    IDENTIFIABLE,
    NO_CRITERION,
    NOT_SATISFIED,
    SAME_DIM_DIFFERENT_MAXCLASSES,
    IdentifiabilityVerdict,
    disjoint_class_pairs,
    identify_family,
    identify_pair,
    matroid_witness_check,
    model_dimension,
)
from varident.jacobian import generic_rank
from varident.stationary import sample_generic_parameters, solve_stationary, support_of

# Same maximal classes as the cross example's first graph, but no multi-edge.
SAME_CLASSES_AS_CROSS_G1 = DirectedGraph.from_edges(4, [(1, 2), (1, 3), (4, 3)])


def support(g, seed=0):
    return support_of(solve_stationary(sample_generic_parameters(g, seed))).nonzero


class TestPair:
    @pytest.mark.parametrize("g1,g2,criterion", corpus.TABLE_ROWS)
    def test_table(self, g1, g2, criterion):
        v = identify_pair(g1, g2)
        assert v.criterion == criterion
        assert v.verdict == (NOT_SATISFIED if criterion == NO_CRITERION else IDENTIFIABLE)

    @pytest.mark.parametrize("g1,g2,criterion", corpus.TABLE_ROWS)
    def test_order_does_not_matter(self, g1, g2, criterion):
        assert identify_pair(g2, g1).criterion == criterion

    def test_cross_witnesses(self):
        v = identify_pair(corpus.CROSS_G1, corpus.CROSS_G2)
        assert v.witnesses == ((1, 3), (2, 4))
        assert v.dims == (None, None)

    def test_identical_graphs(self):
        v = identify_pair(corpus.FIG2, corpus.FIG2)
        assert v.verdict == NOT_SATISFIED and v.criterion == NO_CRITERION

    def test_numeric_dims_need_trust(self):
        g1, g2 = corpus.CROSS_G1, corpus.CROSS_G2
        assert identify_pair(g1, g2, seed=0).criterion == CROSS_MAXCLASS
        v = identify_pair(g1, g2, trust_numeric_dims=True, seed=0)
        assert v.criterion == SAME_DIM_DIFFERENT_MAXCLASSES
        assert [d.to_dict() for d in v.dims] == [{"dim": 8, "provenance": "numeric"}] * 2

    def test_same_classes_same_dimension(self):
        g1, g2 = corpus.CROSS_G1, SAME_CLASSES_AS_CROSS_G1
        assert maximal_classes(g1) == maximal_classes(g2)
        v = identify_pair(g1, g2, trust_numeric_dims=True, seed=0)
        assert v.criterion == NO_CRITERION
        assert [d.value for d in v.dims] == [8, 8]

    def test_trust_without_seed_uses_zero(self):
        a = identify_pair(corpus.CROSS_G1, SAME_CLASSES_AS_CROSS_G1, trust_numeric_dims=True)
        b = identify_pair(corpus.CROSS_G1, SAME_CLASSES_AS_CROSS_G1, trust_numeric_dims=True, seed=0)
        assert a == b

    def test_different_node_counts(self):
        with pytest.raises(InputError):
            identify_pair(DirectedGraph(2), DirectedGraph(3))

    def test_verdict_invariants(self):
        with pytest.raises(ValueError):
            IdentifiabilityVerdict((0, 1), IDENTIFIABLE, NO_CRITERION)
        with pytest.raises(ValueError):
            IdentifiabilityVerdict((0, 1), IDENTIFIABLE, CROSS_MAXCLASS)

    def test_model_dimension(self):
        assert model_dimension(corpus.CROSS_G1, None) is None
        assert model_dimension(corpus.DIM10, None).value == 10


class TestSoundness:
    def test_random_pairs(self):
        """Each positive verdict must agree with facts computed independently."""
        rng = np.random.default_rng(17)
        seen = set()
        for k in range(50):
            n = int(rng.integers(2, 6))
            g1, g2 = random_digraph(rng, n, 0.35), random_digraph(rng, n, 0.35)
            v = identify_pair(g1, g2, seed=k)
            seen.add(v.criterion)
            s1, s2 = support(g1, k), support(g2, k + 1)
            if v.criterion == DIFFERENT_DIMENSION:
                assert generic_rank(g1, seed=k).rank != generic_rank(g2, seed=k).rank
            elif v.criterion == SAME_DIM_DIFFERENT_MAXCLASSES:
                assert not np.array_equal(s1, s2)
            elif v.criterion == CROSS_MAXCLASS:
                assert np.any(s1 & ~s2) and np.any(s2 & ~s1)
                (a, b), (c, d) = v.witnesses
                assert s1[a - 1, b - 1] and not s2[a - 1, b - 1]
                assert s2[c - 1, d - 1] and not s1[c - 1, d - 1]
            else:
                assert v.verdict == NOT_SATISFIED
                # no criterion fired, so one support pattern contains the other
                assert not (np.any(s1 & ~s2) and np.any(s2 & ~s1))
        assert DIFFERENT_DIMENSION in seen and CROSS_MAXCLASS in seen


class TestFamily:
    def test_four_graph_family(self):
        rep = identify_family(corpus.FAMILY)
        assert rep.identifiable
        want = {
            (0, 1): DIFFERENT_DIMENSION,
            (0, 2): DIFFERENT_DIMENSION,
            (1, 2): SAME_DIM_DIFFERENT_MAXCLASSES,
            (0, 3): CROSS_MAXCLASS,
            (1, 3): CROSS_MAXCLASS,
            (2, 3): CROSS_MAXCLASS,
        }
        assert {v.pair: v.criterion for v in rep.verdicts} == want
        for (i, j), c in want.items():
            assert rep.matrix[i][j] == rep.matrix[j][i] == c
            assert rep.verdict_for(j, i).criterion == c
        assert all(rep.matrix[i][i] is None for i in range(4))

    def test_family_dims(self):
        rep = identify_family(corpus.FAMILY)
        v = rep.verdict_for(0, 1)
        assert [d.value for d in v.dims] == corpus.FAMILY_DIMS[:2]
        assert rep.verdict_for(2, 3).dims[1] is None

    def test_not_identifiable_family(self):
        g1, g2, _ = corpus.TABLE_ROWS[3]
        rep = identify_family([g1, g2, DirectedGraph(3)])
        assert not rep.identifiable
        assert rep.verdict_for(0, 1).verdict == NOT_SATISFIED

    def test_json(self):
        d = json.loads(json.dumps(identify_family(corpus.FAMILY).to_dict()))
        assert d["family_identifiable"] is True and len(d["pairs"]) == 6

    def test_disjoint_classes(self):
        assert disjoint_class_pairs(corpus.WEB_A) == (((1, 2, 3), (4, 5, 6)),)
        assert disjoint_class_pairs(corpus.WEB_B) == ()

    @pytest.mark.parametrize("gs", [[corpus.FIG2], [DirectedGraph(2), DirectedGraph(3)]])
    def test_bad_family(self, gs):
        with pytest.raises(InputError):
            identify_family(gs)


class TestWitnessCheck:
    def test_cross(self):
        v = identify_pair(corpus.CROSS_G1, corpus.CROSS_G2)
        assert matroid_witness_check(corpus.CROSS_G1, corpus.CROSS_G2, v, seed=1)

    def test_same_dimension(self):
        g1, g2, _ = corpus.TABLE_ROWS[0]
        assert matroid_witness_check(g1, g2, identify_pair(g1, g2), seed=2)

    def test_family_pairs(self):
        rep = identify_family(corpus.FAMILY)
        for v in rep.verdicts:
            if v.criterion != DIFFERENT_DIMENSION:
                i, j = v.pair
                assert matroid_witness_check(corpus.FAMILY[i], corpus.FAMILY[j], v, seed=3)

    def test_not_applicable(self):
        g1, g2, _ = corpus.TABLE_ROWS[1]
        with pytest.raises(PreconditionError):
            matroid_witness_check(g1, g2, identify_pair(g1, g2))


def test_multi_edge_graphs_in_corpus():
    assert has_multi_edge(corpus.CROSS_G1) and has_multi_edge(corpus.CROSS_G2)
