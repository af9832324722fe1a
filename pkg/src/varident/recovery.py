"""Recover maximal classes from a covariance support and graphs from maximal classes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import DirectedGraph, Edge, MaximalClassSet, maximal_classes
from .stationary import SupportPattern

DEFAULT_BUDGET = 2**20


@dataclass(frozen=True)
class RecoveryReport:
    """Outcome of reading maximal classes off a support pattern.

    ``candidate_set_C`` holds, per node ``i``, the nodes with a nonzero entry in
    row ``i``. ``removed_set_Cprime`` lists the candidates that contain a zero
    pair. ``weakly_connected`` flags inputs whose support graph is connected.
    """

    classes: MaximalClassSet
    candidate_set_C: tuple[tuple[int, ...], ...]
    removed_set_Cprime: tuple[tuple[int, ...], ...]
    weakly_connected: bool
    threshold: float | None = None

    def to_dict(self) -> dict:
        d = {
            "classes": [list(c) for c in self.classes.classes],
            "candidate_set_C": [list(c) for c in self.candidate_set_C],
            "removed_set_Cprime": [list(c) for c in self.removed_set_Cprime],
            "weakly_connected": self.weakly_connected,
            "threshold": self.threshold,
        }
        if not self.weakly_connected:
            d["warning"] = "support graph is not weakly connected"
        return d


def _connected(nonzero: np.ndarray) -> bool:
    n = nonzero.shape[0]
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in np.flatnonzero(nonzero[v]):
            if int(w) not in seen:
                seen.add(int(w))
                stack.append(int(w))
    return len(seen) == n


def maxclasses_from_support(s: SupportPattern) -> RecoveryReport:
    """Maximal classes are the row supports that are cliques of the support pattern."""
    nz = s.nonzero
    if not np.all(np.diag(nz)):
        raise InputError("support pattern must have a nonzero diagonal")
    cand = tuple(tuple(int(j) + 1 for j in np.flatnonzero(nz[i])) for i in range(s.n))
    removed = []
    kept = []
    for c in cand:
        idx = np.array(c) - 1
        if np.all(nz[np.ix_(idx, idx)]):
            kept.append(c)
        else:
            removed.append(c)
    unique = list(dict.fromkeys(kept))
    mc = MaximalClassSet.from_classes(unique, n=s.n)
    return RecoveryReport(mc, cand, tuple(removed), _connected(nz), s.threshold_used)


@dataclass(frozen=True)
class GraphEnumeration:
    """Graphs realizing a maximal-class set.

    ``complete`` is false when the subset budget or ``max_results`` cut the
    search short; the list is then a canonical-order prefix of what was found.
    """

    graphs: tuple[DirectedGraph, ...]
    complete: bool
    explored: int
    allowed_edges: tuple[Edge, ...]
    forbidden_edges: tuple[Edge, ...]

    def __iter__(self):
        return iter(self.graphs)

    def __len__(self) -> int:
        return len(self.graphs)


def sole_members(mc: MaximalClassSet) -> list[set[int]]:
    """For each class, the nodes belonging to no other class (where its sources must lie)."""
    out = []
    for k, c in enumerate(mc.classes):
        others = set().union(*(set(d) for j, d in enumerate(mc.classes) if j != k))
        out.append(set(c) - others)
    return out


def edge_partition(mc: MaximalClassSet) -> tuple[list[Edge], list[Edge]]:
    """Split off-diagonal pairs into (allowed, forbidden).

    ``(u, v)`` is forbidden when it leaves a class (``u`` inside, ``v`` outside)
    or when it enters the sole-member set of a class from outside that set.
    Both are necessary conditions, so no realizing graph is lost.
    """
    classes = [set(c) for c in mc.classes]
    sole = sole_members(mc)
    allowed, forbidden = [], []
    for u in range(1, mc.n + 1):
        for v in range(1, mc.n + 1):
            if u == v:
                continue
            bad = any(u in c and v not in c for c in classes) or any(
                v in s and u not in s for s in sole
            )
            (forbidden if bad else allowed).append((u, v))
    return allowed, forbidden


def _class_masks(n: int, succ: list[int]) -> frozenset[int]:
    """Maximal classes as bitmasks, for a graph given by successor bitmasks."""
    reach = [(1 << v) | succ[v] for v in range(n)]
    changed = True
    while changed:
        changed = False
        for v in range(n):
            r = reach[v]
            acc = r
            m = r
            while m:
                low = m & -m
                acc |= reach[low.bit_length() - 1]
                m ^= low
            if acc != r:
                reach[v] = acc
                changed = True
    out = set()
    for v in range(n):
        bit = 1 << v
        if all(not (reach[u] & bit) or (reach[v] >> u) & 1 for u in range(n)):
            out.add(reach[v])
    return frozenset(out)


def _graph_key(g: DirectedGraph) -> tuple:
    return (len(g.edges), g.sorted_edges)


def graphs_from_maxclasses(
    mc: MaximalClassSet,
    max_results: int = 1024,
    budget: int | None = DEFAULT_BUDGET,
) -> GraphEnumeration:
    """Enumerate subsets of allowed edges and keep those with exactly these classes.

    At most ``budget`` subsets are examined (``None`` for no limit). Each kept
    graph is confirmed with :func:`maximal_classes`.
    """
    n = mc.n
    if not mc.classes:
        raise InputError("need at least one maximal class")
    if {v for c in mc.classes for v in c} != set(range(1, n + 1)):
        raise InputError(f"classes must cover nodes 1..{n}")
    if max_results < 1:
        raise InputError("max_results must be positive")
    allowed, forbidden = edge_partition(mc)
    target = frozenset(sum(1 << (v - 1) for v in c) for c in mc.classes)
    total = 1 << len(allowed)
    limit = total if budget is None else min(total, budget)
    bits = [(u - 1, 1 << (v - 1)) for u, v in allowed]
    found = []
    for mask in range(limit):
        succ = [0] * n
        m = mask
        while m:
            low = m & -m
            u, vbit = bits[low.bit_length() - 1]
            succ[u] |= vbit
            m ^= low
        if _class_masks(n, succ) != target:
            continue
        g = DirectedGraph(n, frozenset(e for k, e in enumerate(allowed) if mask >> k & 1))
        if maximal_classes(g) == mc:
            found.append(g)
    found.sort(key=_graph_key)
    complete = limit == total and len(found) <= max_results
    return GraphEnumeration(
        tuple(found[:max_results]), complete, limit, tuple(allowed), tuple(forbidden)
    )


def roundtrip_check(g: DirectedGraph, budget: int | None = None) -> bool | None:
    """Whether ``g`` is among the graphs reconstructed from its own maximal classes.

    Returns ``None`` when the enumeration budget ran out before a verdict.
    """
    mc = maximal_classes(g)
    res = graphs_from_maxclasses(mc, max_results=1 << 62, budget=budget)
    if not all(maximal_classes(h) == mc for h in res.graphs):
        return False
    if g in res.graphs:
        return True
    return False if res.complete else None
