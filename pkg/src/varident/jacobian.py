"""Jacobian of the map (interaction weights, noise scale) -> stationary covariance.

Conventions
-----------
``vec`` is row-major: entry ``(a, b)`` sits at index ``(a-1)*n + (b-1)``.
Rows of a Jacobian are parameters (``lambda[i,j]`` for support pairs in
row-major order, diagonal included, then ``omega``); columns are covariance
entries. The reduced Jacobian keeps the columns ``sigma[a,b]`` with ``a <= b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations

import numpy as np
from scipy.linalg import lu_solve

from .errors import InputError, PreconditionError, SingularSystemError
from .graph import (
    DirectedGraph,
    comembership_pair_count,
    has_multi_edge,
    nonadjacent_comember_pairs,
)
from .stationary import (
    StationaryCovariance,
    VarParameters,
    factor_checked,
    kron_system,
    sample_generic_parameters,
    solve_stationary,
)

DEFAULT_RANK_TOL = 1e-8
Pair = tuple[int, int]


def commutation_matrix(n: int) -> np.ndarray:
    """Permutation ``P`` with ``P @ vec(X) == vec(X.T)``."""
    if n < 1:
        raise InputError("n must be positive")
    idx = np.arange(n * n).reshape(n, n)
    p = np.zeros((n * n, n * n))
    p[idx.ravel(), idx.T.ravel()] = 1.0
    return p


def sigma_lambda(p: VarParameters, sigma: StationaryCovariance) -> np.ndarray:
    return sigma.sigma @ p.lam


def build_B(p: VarParameters, sigma: StationaryCovariance) -> np.ndarray:
    """Complete-graph building block: ``[(S L (x) I)(I + P); vec(I_n)^T]``.

    Row ``lambda[a,b]`` holds the covariance-space derivative of the right-hand
    side ``L^T S L`` before the Lyapunov operator is inverted.
    """
    n = p.n
    top = np.kron(sigma_lambda(p, sigma), np.eye(n)) @ (np.eye(n * n) + commutation_matrix(n))
    return np.vstack([top, np.eye(n).ravel()[None, :]])


def project_psi(g: DirectedGraph, B: np.ndarray) -> np.ndarray:
    """Keep the rows of ``B`` for the support of ``g`` and the final ``omega`` row."""
    n = g.n
    if B.shape != (n * n + 1, n * n):
        raise InputError(f"B must be {(n * n + 1, n * n)}, got {B.shape}")
    rows = [(i - 1) * n + (j - 1) for i, j in g.support_edges] + [n * n]
    return B[rows, :]


def reduced_columns(n: int) -> list[Pair]:
    return [(a, b) for a in range(1, n + 1) for b in range(a, n + 1)]


def _reduced_index(n: int) -> np.ndarray:
    return np.array([(a - 1) * n + (b - 1) for a, b in reduced_columns(n)], dtype=int)


@dataclass(frozen=True, eq=False)
class JacobianBundle:
    graph: DirectedGraph
    row_labels: tuple[str, ...]
    col_labels_extended: tuple[str, ...]
    extended: np.ndarray
    reduced: np.ndarray
    psi_b: np.ndarray

    @property
    def col_labels_reduced(self) -> tuple[str, ...]:
        return tuple(f"sigma[{a},{b}]" for a, b in reduced_columns(self.graph.n))

    def column(self, a: int, b: int) -> np.ndarray:
        """Reduced-Jacobian column for the unordered pair ``{a, b}``."""
        a, b = min(a, b), max(a, b)
        return self.reduced[:, reduced_columns(self.graph.n).index((a, b))]


def extended_jacobian(
    p: VarParameters, sigma: StationaryCovariance | None = None
) -> JacobianBundle:
    """``psi_G(B) (I - L (x) L)^{-1}`` computed by an LU solve of the transposed system."""
    g, n = p.graph, p.n
    if sigma is None:
        sigma = solve_stationary(p)
    psi_b = project_psi(g, build_B(p, sigma))
    lu = factor_checked(kron_system(p.lam))  # this is (I - L (x) L)^T
    ext = lu_solve(lu, psi_b.T).T
    rows = tuple(f"lambda[{i},{j}]" for i, j in g.support_edges) + ("omega",)
    cols = tuple(f"sigma[{a},{b}]" for a in range(1, n + 1) for b in range(1, n + 1))
    red = ext[:, _reduced_index(n)]
    return JacobianBundle(g, rows, cols, ext, red, psi_b)


def singular_values(m: np.ndarray) -> np.ndarray:
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def rank_cutoff(m: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL, scale: float | None = None) -> float:
    """Singular values at or below this value count as zero.

    ``scale`` overrides the largest singular value, which lets column
    submatrices be judged against the full matrix they were taken from.
    """
    s = singular_values(m)
    top = scale if scale is not None else (float(s[0]) if s.size else 0.0)
    return rank_tol * top * max(m.shape)


def numerical_rank(
    m: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL, scale: float | None = None
) -> int:
    s = singular_values(m)
    if s.size == 0:
        return 0
    return int(np.sum(s > rank_cutoff(m, rank_tol, scale)))


@dataclass(frozen=True)
class GenericRankReport:
    rank: int
    trials: int
    singular_value_gap: float
    seeds_used: tuple[int, ...]


def _base_seed(seed: int | None) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy % (2**32))
    return int(seed)


def generic_rank(
    g: DirectedGraph,
    trials: int = 5,
    seed: int | None = 0,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> GenericRankReport:
    """Maximum numerical rank of the reduced Jacobian over random parameter draws.

    Trial ``t`` uses seed ``seed + t``. Draws that hit a singular system are
    skipped; if all of them do, :class:`SingularSystemError` propagates.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    base = _base_seed(seed)
    best_rank, best_gap = -1, np.inf
    used = []
    last_error: SingularSystemError | None = None
    for t in range(trials):
        s = base + t
        used.append(s)
        try:
            bundle = extended_jacobian(sample_generic_parameters(g, s))
        except SingularSystemError as exc:
            last_error = exc
            continue
        sv = singular_values(bundle.reduced)
        cut = rank_cutoff(bundle.reduced, rank_tol)
        r = int(np.sum(sv > cut))
        gap = float(sv[r - 1] / sv[r]) if 0 < r < sv.size and sv[r] > 0 else np.inf
        if r > best_rank:
            best_rank, best_gap = r, gap
    if best_rank < 0:
        assert last_error is not None
        raise last_error
    return GenericRankReport(best_rank, trials, best_gap, tuple(used))


@dataclass(frozen=True)
class Dimension:
    value: int
    provenance: str  # "formula" or "numeric"

    def to_dict(self) -> dict:
        return {"dim": self.value, "provenance": self.provenance}


def formula_dimension(g: DirectedGraph) -> int:
    """``min(n_r, n_c')`` with ``n_r = E_G + 1``; exact only without multi-edges."""
    return min(g.edge_count(include_self_loops=True) + 1, comembership_pair_count(g))


def dimension(
    g: DirectedGraph,
    trials: int = 5,
    seed: int | None = 0,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> Dimension:
    if not has_multi_edge(g):
        return Dimension(formula_dimension(g), "formula")
    return Dimension(generic_rank(g, trials, seed, rank_tol).rank, "numeric")


def linear_matroid_independent(
    a: np.ndarray,
    cols,
    rank_tol: float = DEFAULT_RANK_TOL,
    scale: float | None = None,
) -> bool:
    """Whether the columns ``cols`` (0-based) of ``a`` are linearly independent."""
    cols = sorted(set(cols))
    if not cols:
        return True
    a = np.asarray(a, dtype=float)
    if scale is None:
        s = singular_values(a)
        scale = float(s[0]) if s.size else 0.0
    sub = a[:, cols]
    return numerical_rank(sub, rank_tol, scale=scale) == len(cols) if scale > 0 else False


def independent_sets(a: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> list[frozenset[int]]:
    """All independent column sets of ``a`` (0-based), smallest first."""
    a = np.asarray(a, dtype=float)
    m = a.shape[1]
    subsets = chain.from_iterable(combinations(range(m), k) for k in range(m + 1))
    return [frozenset(c) for c in subsets if linear_matroid_independent(a, c, rank_tol)]


def _column_indices(n: int, column_set) -> list[int]:
    order = {pair: k for k, pair in enumerate(reduced_columns(n))}
    out = []
    for pair in column_set:
        a, b = sorted(pair) if len(pair) == 2 else (pair[0], pair[0])
        if not (1 <= a <= n and 1 <= b <= n):
            raise InputError(f"column pair {tuple(pair)} outside 1..{n}")
        out.append(order[(a, b)])
    return out


def matroid_independent(
    g: DirectedGraph,
    column_set,
    trials: int = 5,
    seed: int | None = 0,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> bool:
    """Generic independence of reduced-Jacobian columns ``sigma[a,b]``.

    Columns are unordered pairs. Ranks are judged against the largest singular
    value of the full reduced Jacobian, so a numerically zero column is dependent.
    """
    cols = _column_indices(g.n, column_set)
    if not cols:
        return True
    base = _base_seed(seed)
    last_error: SingularSystemError | None = None
    succeeded = False
    for t in range(trials):
        try:
            red = extended_jacobian(sample_generic_parameters(g, base + t)).reduced
        except SingularSystemError as exc:
            last_error = exc
            continue
        succeeded = True
        if linear_matroid_independent(red, cols, rank_tol, scale=float(singular_values(red)[0])):
            return True
    if not succeeded and last_error is not None:
        raise last_error
    return False


def mc_pairs(g: DirectedGraph) -> list[Pair]:
    """Non-adjacent comember pairs ``k < l``; B_G needs one of them."""
    return nonadjacent_comember_pairs(g)


def _check_params(g: DirectedGraph, p: VarParameters) -> None:
    if p.graph != g:
        raise InputError("parameters are not defined on this graph")
    if has_multi_edge(g):
        raise PreconditionError("graph has a multi-edge")


def _lambda_rows(g: DirectedGraph, sl: np.ndarray, cols: list[Pair]) -> np.ndarray:
    out = np.zeros((len(g.sorted_edges), len(cols)))
    for r, (i, j) in enumerate(g.sorted_edges):
        i0, j0 = i - 1, j - 1
        for c, (a, b) in enumerate(cols):
            a0, b0 = a - 1, b - 1
            v = 0.0
            if j0 == a0:
                v += sl[i0, b0] * sl[j0, j0] - sl[i0, j0] * sl[j0, b0]
            if j0 == b0:
                v += sl[i0, a0] * sl[j0, j0] - sl[i0, j0] * sl[j0, a0]
            out[r, c] = v
    return out


def b_g_columns(g: DirectedGraph, extra_pair: Pair | None = None) -> list[Pair]:
    cols = [(min(i, j), max(i, j)) for i, j in g.sorted_edges]
    if extra_pair is not None:
        cols.append(extra_pair)
    return cols


def build_B_G(
    g: DirectedGraph, p: VarParameters, sigma: StationaryCovariance, extra_pair
) -> np.ndarray:
    """Square matrix of size ``E_G' + 1`` whose full rank certifies rank ``n_r``.

    Rows are ``lambda[i,j]`` for the off-diagonal edges in row-major order, then
    ``omega``. Columns are ``sigma`` at each edge's node pair, then ``extra_pair``.
    """
    _check_params(g, p)
    k, l = sorted(extra_pair)
    if (k, l) not in mc_pairs(g):
        raise InputError(f"{(k, l)} is not a non-adjacent comember pair")
    sl = sigma_lambda(p, sigma)
    cols = b_g_columns(g, (k, l))
    top = _lambda_rows(g, sl, cols)
    bottom = np.array([sl[a - 1, b - 1] / sl[a - 1, a - 1] + sl[b - 1, a - 1] / sl[b - 1, b - 1] for a, b in cols])
    return np.vstack([top, bottom[None, :]])


def build_B_G_prime(g: DirectedGraph, p: VarParameters, sigma: StationaryCovariance) -> np.ndarray:
    """Square matrix of size ``E_G'`` (the lambda rows only) for the ``n_r > n_c'`` case."""
    _check_params(g, p)
    if mc_pairs(g):
        raise InputError("graph has non-adjacent comember pairs; use build_B_G")
    return _lambda_rows(g, sigma_lambda(p, sigma), b_g_columns(g))


def full_rank_B_G(
    g: DirectedGraph,
    p: VarParameters,
    sigma: StationaryCovariance,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> Pair | None:
    """Try every admissible extra pair; return the first giving a full-rank B_G."""
    for pair in mc_pairs(g):
        m = build_B_G(g, p, sigma, pair)
        if numerical_rank(m, rank_tol) == m.shape[0]:
            return pair
    return None


def rank_bounds(g: DirectedGraph) -> tuple[int, int]:
    """``(n, min(n_r, n_c'))``: the generic rank always lies in this range."""
    return g.n, formula_dimension(g)

