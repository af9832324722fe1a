"""Executable acceptance checks shared by the test suite and the CLI.

Each check returns a :class:`CheckResult`; none of them raises on failure.
"""

from __future__ import annotations

import time
from collections.abc import Callable, Iterator
from dataclasses import dataclass

import numpy as np

from . import corpus
from .errors import SingularSystemError
from .graph import (
    DirectedGraph,
    MaximalClassSet,
    comembership_matrix,
    has_multi_edge,
    maximal_classes,
)
from .identify import identify_family, identify_pair
from .jacobian import (
    dimension,
    extended_jacobian,
    formula_dimension,
    generic_rank,
    numerical_rank,
    reduced_columns,
)
from .recovery import graphs_from_maxclasses, maxclasses_from_support
from .sim import recover_from_samples, sample_stationary
from .stationary import (
    SupportPattern,
    VarParameters,
    sample_generic_parameters,
    solve_stationary,
    support_of,
)

SHARED_SIGMA_TOL = 0.05
FD_ABS_TOL = 1e-6
FD_REL_TOL = 1e-5
ZERO_COLUMN_RTOL = 1e-9
MC_SAMPLES = 100_000
MC_RUNS = 20
MC_REQUIRED = 18


@dataclass(frozen=True)
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    limit_seconds: float | None = None

    @property
    def within_time(self) -> bool:
        return self.limit_seconds is None or self.seconds < self.limit_seconds

    @property
    def ok(self) -> bool:
        return self.passed and self.within_time

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        limit = f" (limit {self.limit_seconds:g}s)" if self.limit_seconds is not None else ""
        return f"[{status}] {self.key} {self.title}: {self.detail} [{self.seconds:.2f}s{limit}]"


def _timed(key: str, title: str, limit: float | None, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported not raised
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CheckResult(key, title, passed, detail, time.perf_counter() - t0, limit)


def all_digraphs(n: int) -> Iterator[DirectedGraph]:
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    for mask in range(1 << len(pairs)):
        yield DirectedGraph(n, frozenset(e for k, e in enumerate(pairs) if mask >> k & 1))


def random_digraph(
    rng: np.random.Generator, n: int, p: float = 0.4, multi_edge_free: bool = False
) -> DirectedGraph:
    edges = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if multi_edge_free:
                r = rng.random()
                if r < p / 2:
                    edges.append((i, j))
                elif r < p:
                    edges.append((j, i))
            else:
                if rng.random() < p:
                    edges.append((i, j))
                if rng.random() < p:
                    edges.append((j, i))
    return DirectedGraph.from_edges(n, edges)


def _draw(g: DirectedGraph, seed: int, attempts: int = 5):
    """Generic parameters and covariance, redrawing on a singular system."""
    for k in range(attempts):
        p = sample_generic_parameters(g, seed + 7919 * k)
        try:
            return p, solve_stationary(p)
        except SingularSystemError:
            continue
    raise SingularSystemError(f"no regular draw for seed {seed}")


# Criterion 1.
def check_shared_covariance() -> CheckResult:
    def run():
        g1 = DirectedGraph.from_edges(3, [(1, 2), (3, 2)])
        g2 = DirectedGraph.from_edges(3, [(1, 2), (1, 3), (2, 3)])
        s1 = solve_stationary(VarParameters(g1, corpus.LAMBDA_1, 1.0)).sigma
        s2 = solve_stationary(VarParameters(g2, corpus.LAMBDA_2, 1.0)).sigma
        e1 = np.max(np.abs(s1 - corpus.SHARED_SIGMA))
        e2 = np.max(np.abs(s2 - corpus.SHARED_SIGMA))
        e12 = np.max(np.abs(s1 - s2))
        ok = max(e1, e2, e12) <= SHARED_SIGMA_TOL
        return ok, (
            f"max|S1-ref|={e1:.4f}, max|S2-ref|={e2:.4f}, max|S1-S2|={e12:.4f} "
            f"(tol {SHARED_SIGMA_TOL})"
        )

    return _timed("C1", "two interaction matrices share a covariance", 1.0, run)


# Criterion 2.
def check_two_source_classes() -> CheckResult:
    def run():
        got = maximal_classes(corpus.FIG2)
        want = MaximalClassSet.from_classes(corpus.FIG2_CLASSES, n=6)
        return got == want, f"classes {[list(c) for c in got.classes]}"

    return _timed("C2", "maximal classes of the two-source graph", 1.0, run)


# Criterion 3.
def check_support_reconstruction() -> CheckResult:
    def run():
        nz = np.ones((3, 3), dtype=bool)
        for i, j in corpus.SUPPORT_EXAMPLE_ZEROS:
            nz[i - 1, j - 1] = nz[j - 1, i - 1] = False
        rep = maxclasses_from_support(SupportPattern(3, nz, 0.0))
        want = MaximalClassSet.from_classes(corpus.SUPPORT_EXAMPLE_CLASSES, n=3)
        res = graphs_from_maxclasses(rep.classes)
        ok = rep.classes == want and res.complete and list(res.graphs) == [corpus.SUPPORT_EXAMPLE_GRAPH]
        return ok, (
            f"classes {[list(c) for c in rep.classes.classes]}, "
            f"graphs {[list(g.sorted_edges) for g in res.graphs]}"
        )

    return _timed("C3", "classes and unique graph from a support pattern", 5.0, run)


# Criterion 4.
def check_dimension_ten() -> CheckResult:
    def run():
        d = dimension(corpus.DIM10)
        r = generic_rank(corpus.DIM10, trials=5, seed=0)
        ok = d.value == 10 and d.provenance == "formula" and r.rank == 10
        return ok, f"formula dim {d.value} ({d.provenance}), generic rank {r.rank} over {r.trials} trials"

    return _timed("C4", "dimension 10 by formula and by generic rank", 10.0, run)


# Criterion 5.
def check_family() -> CheckResult:
    def run():
        dims = [formula_dimension(g) for g in corpus.FAMILY[:3]]
        rep = identify_family(corpus.FAMILY)
        want = {
            (0, 1): "different_dimension",
            (0, 2): "different_dimension",
            (1, 2): "same_dim_different_maxclasses",
            (0, 3): "cross_maxclass_condition",
            (1, 3): "cross_maxclass_condition",
            (2, 3): "cross_maxclass_condition",
        }
        got = {v.pair: v.criterion for v in rep.verdicts}
        multi = [has_multi_edge(g) for g in corpus.FAMILY]
        ok = dims == [7, 8, 8] and rep.identifiable and got == want and multi == [False] * 3 + [True]
        return ok, f"dims {dims}, family identifiable={rep.identifiable}, criteria {got}"

    return _timed("C5", "four-graph family is identifiable", 30.0, run)


def _finite_difference(p: VarParameters, h_rel: float = 1e-6) -> np.ndarray:
    """Central differences of the reduced covariance in every parameter."""
    g = p.graph
    cols = [(a - 1) * g.n + (b - 1) for a, b in reduced_columns(g.n)]
    rows = []
    for i, j in g.support_edges:
        theta = p.lam[i - 1, j - 1]
        h = h_rel * max(1.0, abs(theta))
        up, dn = p.lam.copy(), p.lam.copy()
        up[i - 1, j - 1] += h
        dn[i - 1, j - 1] -= h
        s_up = solve_stationary(VarParameters(g, up, p.omega)).sigma.ravel()
        s_dn = solve_stationary(VarParameters(g, dn, p.omega)).sigma.ravel()
        rows.append(((s_up - s_dn) / (2 * h))[cols])
    h = h_rel * max(1.0, p.omega)
    s_up = solve_stationary(VarParameters(g, p.lam, p.omega + h)).sigma.ravel()
    s_dn = solve_stationary(VarParameters(g, p.lam, p.omega - h)).sigma.ravel()
    rows.append(((s_up - s_dn) / (2 * h))[cols])
    return np.array(rows)


# Criterion 6.
def check_jacobian_fd(instances: int = 25, seed: int = 6) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        worst, bad_fd, bad_rank = 0.0, 0, 0
        for k in range(instances):
            g = random_digraph(rng, int(rng.integers(1, 6)))
            p, sigma = _draw(g, seed * 1000 + k)
            b = extended_jacobian(p, sigma)
            fd = _finite_difference(p)
            err = np.abs(b.reduced - fd)
            allowed = np.maximum(FD_ABS_TOL, FD_REL_TOL * np.abs(fd))
            worst = max(worst, float(np.max(err / allowed)))
            bad_fd += int(np.any(err > allowed))
            bad_rank += int(numerical_rank(b.reduced) != numerical_rank(b.psi_b))
        ok = bad_fd == 0 and bad_rank == 0
        return ok, (
            f"{instances} instances: {bad_fd} finite-difference violations "
            f"(worst error/allowance {worst:.3f}), {bad_rank} rank mismatches"
        )

    return _timed("C6", "analytic Jacobian vs finite differences", 60.0, run)


# Criterion 7.
def check_support_and_zero_columns(max_n: int = 4) -> CheckResult:
    def run():
        count = bad_support = bad_cols = 0
        first = None
        for n in range(1, max_n + 1):
            for g in all_digraphs(n):
                count += 1
                p, sigma = _draw(g, count)
                cm = comembership_matrix(maximal_classes(g))
                if not np.array_equal(support_of(sigma).nonzero, cm):
                    bad_support += 1
                red = extended_jacobian(p, sigma).reduced
                zero = np.all(np.abs(red) <= ZERO_COLUMN_RTOL * np.max(np.abs(red)), axis=0)
                expect = np.array([not cm[a - 1, b - 1] for a, b in reduced_columns(n)])
                if not np.array_equal(zero, expect):
                    bad_cols += 1
                    if first is None:
                        ratio = np.max(np.abs(red[:, zero != expect])) / np.max(np.abs(red))
                        first = f"; first mismatch {g} (column/max ratio {ratio:.2g})"
        return bad_support == 0 and bad_cols == 0, (
            f"{count} graphs: {bad_support} support mismatches, "
            f"{bad_cols} zero-column mismatches{first or ''}"
        )

    return _timed("C7", "covariance support and zero Jacobian columns", 600.0, run)


# Criterion 8.
def check_rank_formula(max_n: int = 4, random_n5: int = 50, seed: int = 8) -> CheckResult:
    def run():
        graphs = [g for n in range(1, max_n + 1) for g in all_digraphs(n) if not has_multi_edge(g)]
        rng = np.random.default_rng(seed)
        graphs += [random_digraph(rng, 5, 0.5, multi_edge_free=True) for _ in range(random_n5)]
        bad = []
        for k, g in enumerate(graphs):
            r = generic_rank(g, trials=5, seed=seed * 100_000 + 10 * k).rank
            if r != formula_dimension(g):
                bad.append((g, r))
        detail = f"{len(graphs)} graphs, {len(bad)} violations"
        if bad:
            detail += f"; first {bad[0][0]} rank {bad[0][1]} vs formula {formula_dimension(bad[0][0])}"
        return not bad, detail

    return _timed("C8", "generic rank equals min(n_r, n_c')", 600.0, run)


# Criterion 9.
def check_roundtrip(instances: int = 100, seed: int = 9) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        bad_rec = bad_enum = 0
        for k in range(instances):
            g = random_digraph(rng, int(rng.integers(1, 5)))
            _, sigma = _draw(g, seed * 1000 + k)
            mc = maximal_classes(g)
            if maxclasses_from_support(support_of(sigma)).classes != mc:
                bad_rec += 1
            res = graphs_from_maxclasses(mc, max_results=1 << 30, budget=None)
            if g not in res.graphs or any(maximal_classes(h) != mc for h in res.graphs):
                bad_enum += 1
        return bad_rec == 0 and bad_enum == 0, (
            f"{instances} graphs: {bad_rec} support-recovery mismatches, "
            f"{bad_enum} reconstruction misses"
        )

    return _timed("C9", "support recovery and graph reconstruction round trip", 300.0, run)


# Criterion 10.
def check_monte_carlo(runs: int = MC_RUNS, count: int = MC_SAMPLES) -> CheckResult:
    """Run ``r`` draws parameters with seed ``r`` and samples with seed ``10_000 + r``."""

    def run():
        truth = maximal_classes(corpus.FIG2)
        hits = []
        for r in range(runs):
            p = sample_generic_parameters(corpus.FIG2, r)
            rep = recover_from_samples(sample_stationary(p, count, 10_000 + r))
            hits.append(rep.classes == truth)
        n_ok = sum(hits)
        misses = [r for r, h in enumerate(hits) if not h]
        return n_ok >= MC_REQUIRED, f"{n_ok}/{runs} runs recovered the classes (need {MC_REQUIRED}); missed seeds {misses}"

    return _timed("C10", "maximal classes from i.i.d. samples", 120.0, run)


ACCEPTANCE: dict[str, Callable[[], CheckResult]] = {
    "C1": check_shared_covariance,
    "C2": check_two_source_classes,
    "C3": check_support_reconstruction,
    "C4": check_dimension_ten,
    "C5": check_family,
    "C6": check_jacobian_fd,
    "C7": check_support_and_zero_columns,
    "C8": check_rank_formula,
    "C9": check_roundtrip,
    "C10": check_monte_carlo,
}
FAST = ("C1", "C2", "C3", "C4", "C5")


# Further fixture checks run by the example suite.
def check_fixtures() -> list[CheckResult]:
    out = []

    def psi_rows():
        p, sigma = _draw(corpus.PSI_EXAMPLE, 3)
        labels = extended_jacobian(p, sigma).row_labels
        want = ("lambda[1,1]", "lambda[1,3]", "lambda[2,1]", "lambda[2,2]", "lambda[3,3]", "omega")
        return labels == want, f"rows {list(labels)}"

    def table_rows():
        got = [identify_pair(a, b).criterion for a, b, _ in corpus.TABLE_ROWS]
        want = [c for _, _, c in corpus.TABLE_ROWS]
        return got == want, f"criteria {got}"

    def classes(g, want):
        def run():
            got = maximal_classes(g)
            return got == MaximalClassSet.from_classes(want, n=g.n), f"classes {[list(c) for c in got.classes]}"

        return run

    out.append(_timed("F1", "projected rows of the three-node example", None, psi_rows))
    out.append(_timed("F2", "pairwise criteria of the comparison table", None, table_rows))
    out.append(_timed("F3", "resource/consumer network classes", None, classes(corpus.BIPARTITE, corpus.BIPARTITE_CLASSES)))
    out.append(_timed("F4", "food web A classes", None, classes(corpus.WEB_A, corpus.WEB_A_CLASSES)))
    out.append(_timed("F5", "food web B classes", None, classes(corpus.WEB_B, corpus.WEB_B_CLASSES)))
    return out


def run_all(full: bool = False) -> list[CheckResult]:
    keys = list(ACCEPTANCE) if full else list(FAST)
    return [ACCEPTANCE[k]() for k in keys] + check_fixtures()



