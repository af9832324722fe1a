"""Directed interaction graphs, strongly connected components and maximal classes.

Nodes are labelled ``1..n``. Every node carries an implicit self-loop, which is
never stored in :attr:`DirectedGraph.edges`.
"""

from __future__ import annotations

import json
import warnings
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement
from pathlib import Path

import numpy as np

from .errors import InputError, PreconditionError

Edge = tuple[int, int]
NodeClass = tuple[int, ...]


@dataclass(frozen=True)
class DirectedGraph:
    """Support pattern of an interaction matrix.

    ``edges`` holds the off-diagonal pairs ``(i, j)`` meaning node ``i`` acts
    directly on node ``j``. Self-loops listed on input are dropped with a
    warning because they are always present.
    """

    n: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"node count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        clean = set()
        loops = []
        for e in self.edges:
            if len(e) != 2:
                raise InputError(f"edge must be a pair, got {e!r}")
            i, j = int(e[0]), int(e[1])
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise InputError(f"edge {(i, j)} outside nodes 1..{self.n}")
            if i == j:
                loops.append(i)
                continue
            clean.add((i, j))
        if loops:
            warnings.warn(
                f"self-loops on nodes {sorted(set(loops))} are implicit and were dropped",
                stacklevel=3,
            )
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]] = ()) -> DirectedGraph:
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def complete(cls, n: int) -> DirectedGraph:
        return cls(n, frozenset((i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j))

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def support_edges(self) -> tuple[Edge, ...]:
        """All support pairs including self-loops, in row-major order."""
        return tuple(sorted(self.edges | {(i, i) for i in self.nodes}))

    def edge_count(self, include_self_loops: bool = True) -> int:
        """Number of edges; with self-loops this is ``|E| + n``."""
        return len(self.edges) + (self.n if include_self_loops else 0)

    def has_edge(self, i: int, j: int) -> bool:
        return i == j or (i, j) in self.edges

    @cached_property
    def successors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {v: [] for v in self.nodes}
        for i, j in self.sorted_edges:
            out[i].append(j)
        return {v: tuple(s) for v, s in out.items()}

    @cached_property
    def predecessors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {v: [] for v in self.nodes}
        for i, j in self.sorted_edges:
            out[j].append(i)
        return {v: tuple(s) for v, s in out.items()}

    def support_mask(self) -> np.ndarray:
        """Boolean ``n x n`` mask of allowed interaction entries (diagonal included)."""
        mask = np.eye(self.n, dtype=bool)
        for i, j in self.edges:
            mask[i - 1, j - 1] = True
        return mask

    def relabel(self, perm: dict[int, int]) -> DirectedGraph:
        """Apply the node bijection ``perm`` (old label -> new label)."""
        if sorted(perm) != list(self.nodes) or sorted(perm.values()) != list(self.nodes):
            raise InputError("relabelling must be a permutation of the nodes")
        return DirectedGraph(self.n, frozenset((perm[i], perm[j]) for i, j in self.edges))

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges]}

    @classmethod
    def from_dict(cls, data: dict) -> DirectedGraph:
        try:
            return cls.from_edges(data["n"], data.get("edges", []))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed graph record: {exc}") from exc

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, edges={list(self.sorted_edges)})"


@dataclass(frozen=True)
class SccDecomposition:
    """Strongly connected components ordered by their smallest member.

    Component indices are 0-based positions in :attr:`components`; the
    condensation is stored as pairs of component indices.
    """

    components: tuple[frozenset[int], ...]
    condensation_edges: frozenset[tuple[int, int]]
    component_of: dict[int, int] = field(compare=False)

    @property
    def condensation(self) -> DirectedGraph:
        """The condensation as a graph on nodes ``1..k`` (component ``c`` is node ``c + 1``)."""
        return DirectedGraph(
            len(self.components),
            frozenset((a + 1, b + 1) for a, b in self.condensation_edges),
        )


@dataclass(frozen=True)
class MaximalClassSet:
    """Maximal classes of a graph on ``n`` nodes.

    Classes are sorted tuples, listed in lexicographic order. ``sources`` gives,
    per class, the nodes of its source component when known (classes recovered
    from a covariance support carry no source information). Equality only looks
    at ``n`` and ``classes``.
    """

    n: int
    classes: tuple[NodeClass, ...]
    sources: tuple[NodeClass, ...] | None = field(default=None, compare=False)

    @classmethod
    def from_classes(
        cls,
        classes: Iterable[Iterable[int]],
        n: int | None = None,
        sources: Iterable[Iterable[int]] | None = None,
    ) -> MaximalClassSet:
        classes = [tuple(sorted({int(v) for v in c})) for c in classes]
        if any(not c for c in classes):
            raise InputError("maximal classes must be nonempty")
        members = {v for c in classes for v in c}
        if n is None:
            n = max(members) if members else 0
        if members and (min(members) < 1 or max(members) > n):
            raise InputError(f"class members must lie in 1..{n}")
        if sources is None:
            order = sorted(set(classes))
            return cls(n, tuple(order))
        paired = sorted({c: tuple(sorted(s)) for c, s in zip(classes, sources)}.items())
        return cls(n, tuple(c for c, _ in paired), tuple(s for _, s in paired))

    def __iter__(self):
        return iter(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.classes}

    def to_dict(self) -> dict:
        return {"classes": [list(c) for c in self.classes]}

    @classmethod
    def from_dict(cls, data: dict, n: int | None = None) -> MaximalClassSet:
        try:
            classes = data["classes"]
        except (KeyError, TypeError) as exc:
            raise InputError("maximal-class record needs a 'classes' list") from exc
        return cls.from_classes(classes, n=data.get("n", n))


def scc_decompose(g: DirectedGraph) -> SccDecomposition:
    """Kosaraju's two-pass SCC decomposition (iterative)."""
    succ, pred = g.successors, g.predecessors
    seen: set[int] = set()
    finish: list[int] = []
    for root in g.nodes:
        if root in seen:
            continue
        seen.add(root)
        stack = [(root, iter(succ[root]))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w not in seen:
                    seen.add(w)
                    stack.append((w, iter(succ[w])))
                    break
            else:
                stack.pop()
                finish.append(v)

    assigned: dict[int, int] = {}
    groups: list[list[int]] = []
    for root in reversed(finish):
        if root in assigned:
            continue
        label = len(groups)
        group = [root]
        assigned[root] = label
        stack = [root]
        while stack:
            v = stack.pop()
            for w in pred[v]:
                if w not in assigned:
                    assigned[w] = label
                    group.append(w)
                    stack.append(w)
        groups.append(group)

    order = sorted(range(len(groups)), key=lambda k: min(groups[k]))
    relabel = {old: new for new, old in enumerate(order)}
    components = tuple(frozenset(groups[old]) for old in order)
    component_of = {v: relabel[c] for v, c in assigned.items()}
    cond = frozenset(
        (component_of[i], component_of[j])
        for i, j in g.edges
        if component_of[i] != component_of[j]
    )
    return SccDecomposition(components, cond, component_of)


def sources(d: SccDecomposition) -> list[int]:
    """Indices of components with no incoming condensation edge."""
    has_in = {b for _, b in d.condensation_edges}
    return [c for c in range(len(d.components)) if c not in has_in]


def maximal_classes(g: DirectedGraph) -> MaximalClassSet:
    """One class per source component: everything reachable from it."""
    d = scc_decompose(g)
    down: dict[int, list[int]] = {c: [] for c in range(len(d.components))}
    for a, b in d.condensation_edges:
        down[a].append(b)
    classes, srcs = [], []
    for s in sources(d):
        reached = {s}
        stack = [s]
        while stack:
            c = stack.pop()
            for nxt in down[c]:
                if nxt not in reached:
                    reached.add(nxt)
                    stack.append(nxt)
        classes.append(set().union(*(d.components[c] for c in reached)))
        srcs.append(d.components[s])
    return MaximalClassSet.from_classes(classes, n=g.n, sources=srcs)


def _check_node(mc: MaximalClassSet, v: int) -> None:
    if not 1 <= v <= mc.n:
        raise InputError(f"node {v} outside 1..{mc.n}")


def comembership(mc: MaximalClassSet, i: int, j: int) -> bool:
    """Whether ``i`` and ``j`` share a maximal class."""
    _check_node(mc, i)
    _check_node(mc, j)
    if i == j:
        return True
    return any(i in c and j in c for c in mc.classes)


def comembership_matrix(mc: MaximalClassSet) -> np.ndarray:
    """Symmetric boolean matrix of the comembership relation."""
    m = np.eye(mc.n, dtype=bool)
    for c in mc.classes:
        idx = np.array(c) - 1
        m[np.ix_(idx, idx)] = True
    return m


def comember_pairs(mc: MaximalClassSet) -> list[Edge]:
    """Comember pairs ``(a, b)`` with ``a <= b`` in row-major order."""
    m = comembership_matrix(mc)
    return [
        (a, b)
        for a, b in combinations_with_replacement(range(1, mc.n + 1), 2)
        if m[a - 1, b - 1]
    ]


def comembership_pair_count(g: DirectedGraph) -> int:
    """Unordered comember pairs, diagonal pairs included."""
    return len(comember_pairs(maximal_classes(g)))


def has_multi_edge(g: DirectedGraph) -> bool:
    return any((j, i) in g.edges for i, j in g.edges)


def nonadjacent_comember_pairs(g: DirectedGraph) -> list[Edge]:
    """Pairs ``k < l`` in a common maximal class with no edge either way."""
    return [
        (a, b)
        for a, b in comember_pairs(maximal_classes(g))
        if a != b and (a, b) not in g.edges and (b, a) not in g.edges
    ]


def is_weakly_connected(g: DirectedGraph) -> bool:
    adj: dict[int, set[int]] = {v: set() for v in g.nodes}
    for i, j in g.edges:
        adj[i].add(j)
        adj[j].add(i)
    seen = {1}
    stack = [1]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == g.n


def rooted_spanning_tree_check(g: DirectedGraph, mc_class: Iterable[int], source: int) -> bool:
    """Whether BFS from ``source`` inside the class spans it with a rooted tree."""
    target = tuple(sorted(set(mc_class)))
    mc = maximal_classes(g)
    if target not in mc.classes:
        raise PreconditionError(f"{list(target)} is not a maximal class of the graph")
    k = mc.classes.index(target)
    if mc.sources is not None and source not in mc.sources[k]:
        raise PreconditionError(f"node {source} is not a source node of {list(target)}")
    members = set(target)
    parent = {source: None}
    queue = [source]
    for v in queue:
        for w in g.successors[v]:
            if w in members and w not in parent:
                parent[w] = v
                queue.append(w)
    tree_edges = [(p, c) for c, p in parent.items() if p is not None]
    return set(parent) == members and len(tree_edges) == len(members) - 1


def parse_graph_text(text: str) -> DirectedGraph:
    """Parse ``n <int>`` followed by one ``i j`` pair per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InputError("empty edge list")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n":
        raise InputError("edge list must start with a line 'n <int>'")
    try:
        n = int(head[1])
        edges = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise InputError(f"bad edge list: {exc}") from exc
    if any(len(e) != 2 for e in edges):
        raise InputError("each edge line needs exactly two node labels")
    return DirectedGraph.from_edges(n, edges)


def load_graph(path: str | Path) -> DirectedGraph:
    """Read a graph from JSON or from the plain-text edge-list format."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            return DirectedGraph.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return parse_graph_text(text)
