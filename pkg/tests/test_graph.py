import json
import warnings
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varident import corpus
from varident.checks import all_digraphs
from varident.errors import InputError, PreconditionError
from varident.graph import (
    DirectedGraph,
    MaximalClassSet,
    comember_pairs,
    comembership,
    comembership_matrix,
    comembership_pair_count,
    has_multi_edge,
    is_weakly_connected,
    load_graph,
    maximal_classes,
    parse_graph_text,
    rooted_spanning_tree_check,
    scc_decompose,
    sources,
)


def closure(g):
    """Reflexive transitive closure by Floyd-Warshall (independent oracle)."""
    r = g.support_mask().copy()
    for k in range(g.n):
        r = r | (r[:, [k]] & r[[k], :])
    return r


def oracle_classes(g):
    r = closure(g)
    out = set()
    for v in range(g.n):
        # v is a source node if everything reaching v is also reached by v
        if all(r[v, u] for u in range(g.n) if r[u, v]):
            out.add(frozenset(int(w) + 1 for w in np.flatnonzero(r[v])))
    return out


def small_graphs(max_n=4):
    for n in range(1, max_n + 1):
        yield from all_digraphs(n)


@st.composite
def digraphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return DirectedGraph.from_edges(n, edges)


class TestDirectedGraph:
    def test_self_loops_dropped_with_warning(self):
        with pytest.warns(UserWarning, match="self-loops"):
            g = DirectedGraph.from_edges(3, [(1, 1), (1, 2)])
        assert g.edges == {(1, 2)}

    def test_edge_counts(self):
        g = corpus.DIM10
        assert g.edge_count(include_self_loops=False) == 4
        assert g.edge_count() == 9

    @pytest.mark.parametrize("n,edges", [(0, []), (2, [(1, 3)]), (2, [(0, 1)]), (2, [(1, 2, 3)])])
    def test_invalid(self, n, edges):
        with pytest.raises(InputError):
            DirectedGraph.from_edges(n, edges)

    def test_duplicates_collapse(self):
        assert DirectedGraph.from_edges(2, [(1, 2), (1, 2)]).edges == {(1, 2)}

    def test_support_edges_row_major(self):
        assert corpus.PSI_EXAMPLE.support_edges == ((1, 1), (1, 3), (2, 1), (2, 2), (3, 3))


class TestScc:
    def test_two_source_graph(self):
        d = scc_decompose(corpus.FIG2)
        assert d.components == (frozenset({1, 2, 3}), frozenset({4}), frozenset({5}), frozenset({6}))
        assert [d.components[c] for c in sources(d)] == [{1, 2, 3}, {5}]

    def test_self_loops_only(self):
        d = scc_decompose(DirectedGraph(3))
        assert d.components == (frozenset({1}), frozenset({2}), frozenset({3}))
        assert sources(d) == [0, 1, 2]

    def test_complete(self):
        d = scc_decompose(DirectedGraph.complete(3))
        assert d.components == (frozenset({1, 2, 3}),)

    def test_path_source(self):
        d = scc_decompose(DirectedGraph.from_edges(3, [(1, 2), (2, 3)]))
        assert [d.components[c] for c in sources(d)] == [{1}]

    @pytest.mark.parametrize("g", list(small_graphs(3)) + [corpus.FIG2])
    def test_condensation_invariants(self, g):
        d = scc_decompose(g)
        assert sorted(v for c in d.components for v in c) == list(g.nodes)
        r = closure(g)
        for c in d.components:
            for a, b in product(c, c):
                assert r[a - 1, b - 1]
        cond = d.condensation
        rc = closure(cond)
        assert not any(rc[a, b] and rc[b, a] for a in range(cond.n) for b in range(cond.n) if a != b)
        crossing = {
            (d.component_of[i], d.component_of[j])
            for i, j in g.edges
            if d.component_of[i] != d.component_of[j]
        }
        assert crossing == d.condensation_edges


class TestMaximalClasses:
    def test_two_source_graph(self):
        assert maximal_classes(corpus.FIG2).classes == ((1, 2, 3, 4, 6), (4, 5, 6))

    def test_singletons(self):
        assert maximal_classes(DirectedGraph(4)).classes == ((1,), (2,), (3,), (4,))

    def test_tree(self):
        assert maximal_classes(corpus.TREE5).as_sets() == oracle_classes(corpus.TREE5)
        assert maximal_classes(corpus.TREE5).classes == ((1, 2, 3, 4, 5),)

    def test_dimension_example_classes(self):
        assert maximal_classes(corpus.DIM10).classes == ((1, 2, 3, 4), (3, 5))

    def test_exhaustive_against_closure_oracle(self):
        for g in small_graphs(4):
            assert maximal_classes(g).as_sets() == oracle_classes(g), g

    def test_comembership_reachability_exhaustive(self):
        for g in small_graphs(4):
            r = closure(g)
            m = comembership_matrix(maximal_classes(g))
            common = (r.T.astype(int) @ r.astype(int)) > 0
            assert np.array_equal(m, r | r.T | common), g

    @settings(max_examples=60, deadline=None)
    @given(digraphs(), st.randoms(use_true_random=False))
    def test_relabel_invariance(self, g, rnd):
        perm_list = list(g.nodes)
        rnd.shuffle(perm_list)
        perm = dict(zip(g.nodes, perm_list))
        mapped = {frozenset(perm[v] for v in c) for c in maximal_classes(g).classes}
        assert maximal_classes(g.relabel(perm)).as_sets() == mapped

    @settings(max_examples=60, deadline=None)
    @given(digraphs())
    def test_classes_cover_nodes(self, g):
        mc = maximal_classes(g)
        assert set().union(*map(set, mc.classes)) == set(g.nodes)
        assert len(set(mc.classes)) == len(mc.classes)

    def test_sources_recorded(self):
        mc = maximal_classes(corpus.FIG2)
        assert mc.sources == ((1, 2, 3), (5,))

    def test_equality_ignores_sources(self):
        a = maximal_classes(corpus.FIG2)
        b = MaximalClassSet.from_classes([[4, 6, 5], [6, 4, 3, 2, 1]], n=6)
        assert a == b


class TestComembership:
    def test_examples(self):
        mc = maximal_classes(corpus.FIG2)
        assert not comembership(mc, 1, 5)
        assert comembership(mc, 4, 6)
        assert all(comembership(mc, i, i) for i in range(1, 7))

    def test_out_of_range(self):
        with pytest.raises(InputError):
            comembership(maximal_classes(corpus.FIG2), 0, 1)
        with pytest.raises(InputError):
            comembership(maximal_classes(corpus.FIG2), 1, 7)

    @pytest.mark.parametrize(
        "g,expected",
        [(corpus.DIM10, 12), (DirectedGraph(3), 3), (DirectedGraph.complete(3), 6)],
    )
    def test_pair_count(self, g, expected):
        assert comembership_pair_count(g) == expected

    def test_pairs_ordered(self):
        assert comember_pairs(maximal_classes(DirectedGraph.from_edges(3, [(1, 2), (3, 2)]))) == [
            (1, 1), (1, 2), (2, 2), (2, 3), (3, 3)
        ]


class TestMultiEdge:
    def test_examples(self):
        assert has_multi_edge(DirectedGraph.from_edges(2, [(1, 2), (2, 1)]))
        assert not has_multi_edge(DirectedGraph.from_edges(3, [(1, 2), (2, 3)]))
        assert has_multi_edge(corpus.CROSS_G1)

    def test_exhaustive_scan(self):
        for g in small_graphs(3):
            assert has_multi_edge(g) == any((j, i) in g.edges for i, j in g.edges)


class TestRootedTree:
    def test_examples(self):
        assert rooted_spanning_tree_check(corpus.FIG2, {4, 5, 6}, 5)
        assert rooted_spanning_tree_check(corpus.FIG2, {1, 2, 3, 4, 6}, 1)
        assert rooted_spanning_tree_check(DirectedGraph(1), {1}, 1)

    def test_not_a_class(self):
        with pytest.raises(InputError):
            rooted_spanning_tree_check(corpus.FIG2, {1, 2}, 1)

    def test_not_a_source(self):
        with pytest.raises(PreconditionError):
            rooted_spanning_tree_check(corpus.FIG2, {4, 5, 6}, 4)

    def test_holds_for_every_class_exhaustive(self):
        for g in small_graphs(4):
            mc = maximal_classes(g)
            for c, src in zip(mc.classes, mc.sources):
                assert rooted_spanning_tree_check(g, c, src[0])


class TestIO:
    def test_json_roundtrip(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text(json.dumps(corpus.FIG2.to_dict()))
        assert load_graph(path) == corpus.FIG2

    def test_text_format(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("n 3\n1 2\n# comment\n3 2\n")
        assert load_graph(path) == DirectedGraph.from_edges(3, [(1, 2), (3, 2)])

    def test_text_self_loop_warns(self):
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            g = parse_graph_text("n 2\n1 1\n1 2\n")
        assert g.edges == {(1, 2)} and w

    @pytest.mark.parametrize("text", ["", "3\n1 2", "n x\n", "n 2\n1 2 3\n", "n 2\n1 a\n"])
    def test_bad_text(self, text):
        with pytest.raises(InputError):
            parse_graph_text(text)

    def test_bad_json(self, tmp_path):
        path = tmp_path / "g.json"
        path.write_text("{not json")
        with pytest.raises(InputError):
            load_graph(path)

    def test_classes_roundtrip(self):
        mc = maximal_classes(corpus.FIG2)
        assert MaximalClassSet.from_dict(json.loads(json.dumps(mc.to_dict())), n=6) == mc


def test_weak_connectivity():
    assert is_weakly_connected(corpus.FIG2)
    assert not is_weakly_connected(corpus.WEB_A)
    assert is_weakly_connected(DirectedGraph(1))
