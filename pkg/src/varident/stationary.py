"""VAR(1) parameters and the stationary covariance ``S = L^T S L + w I``."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import dgecon

from .errors import InputError, SingularSystemError
from .graph import DirectedGraph

MAX_CONDITION = 1e14
RESIDUAL_RTOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"spectral radius needs a square matrix, got shape {m.shape}")
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


@dataclass(frozen=True, eq=False)
class VarParameters:
    """Interaction matrix ``lam`` supported on ``graph`` and noise variance ``omega``."""

    graph: DirectedGraph
    lam: np.ndarray
    omega: float

    def __post_init__(self) -> None:
        lam = np.array(self.lam, dtype=float)
        n = self.graph.n
        if lam.shape != (n, n):
            raise InputError(f"lambda must be {n}x{n}, got {lam.shape}")
        if not np.all(np.isfinite(lam)):
            raise InputError("lambda has non-finite entries")
        off = lam[~self.graph.support_mask()]
        if np.any(off != 0.0):
            raise InputError("lambda has nonzero entries outside the graph support")
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise InputError(f"omega must be positive, got {self.omega!r}")
        rho = spectral_radius(lam)
        if rho >= 1.0:
            raise InputError(f"spectral radius {rho:.6g} >= 1: no stationary distribution")
        object.__setattr__(self, "lam", _frozen(lam))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def n(self) -> int:
        return self.graph.n

    def to_dict(self) -> dict:
        d = self.graph.to_dict()
        d["lambda"] = self.lam.tolist()
        d["omega"] = self.omega
        return d

    @classmethod
    def from_dict(cls, data: dict) -> VarParameters:
        try:
            g = DirectedGraph.from_dict(data)
            return cls(g, np.array(data["lambda"], dtype=float), float(data["omega"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed parameter record: {exc}") from exc


def sample_generic_parameters(
    g: DirectedGraph, seed: int | np.random.Generator | None, magnitude: float = 1.0
) -> VarParameters:
    """Draw a random stable parameter point on the support of ``g``.

    Support entries (diagonal included) have absolute value uniform on
    ``[0.05 m, m]`` with a random sign. An unstable draw is rescaled to a
    spectral radius uniform on ``(0.475, 0.95)``.
    """
    if not magnitude > 0:
        raise InputError("magnitude must be positive")
    rng = np.random.default_rng(seed)
    support = g.support_edges
    size = rng.uniform(0.05 * magnitude, magnitude, size=len(support))
    sign = rng.choice([-1.0, 1.0], size=len(support))
    lam = np.zeros((g.n, g.n))
    for (i, j), v in zip(support, size * sign):
        lam[i - 1, j - 1] = v
    rho = spectral_radius(lam)
    u = rng.uniform(0.5, 1.0)
    if rho >= 1.0:
        lam *= 0.95 * u / rho
    omega = rng.uniform(0.5, 1.5)
    return VarParameters(g, lam, omega)


@dataclass(frozen=True, eq=False)
class StationaryCovariance:
    sigma: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma", _frozen(self.sigma))

    @property
    def n(self) -> int:
        return self.sigma.shape[0]


def kron_system(lam: np.ndarray) -> np.ndarray:
    """``I - L^T (x) L^T``, the operator acting on row-major ``vec`` of the covariance."""
    n = lam.shape[0]
    return np.eye(n * n) - np.kron(lam.T, lam.T)


def factor_checked(a: np.ndarray):
    """LU factorization of ``a``; raises when its condition estimate exceeds the limit."""
    lu, piv = lu_factor(a, check_finite=True)
    anorm = np.linalg.norm(a, 1)
    rcond, info = dgecon(lu, anorm, norm="1")
    if info != 0 or rcond * MAX_CONDITION < 1.0:
        cond = np.inf if rcond == 0 else 1.0 / rcond
        raise SingularSystemError(
            f"linear system is numerically singular (condition ~{cond:.3g}); redraw parameters"
        )
    return lu, piv


def solve_stationary(p: VarParameters) -> StationaryCovariance:
    """Solve the discrete Lyapunov equation through its ``n^2`` linear system.

    The dense LU costs O(n^6); intended for n up to a few dozen.
    """
    n = p.n
    lu = factor_checked(kron_system(p.lam))
    rhs = (p.omega * np.eye(n)).ravel()
    sigma = lu_solve(lu, rhs).reshape(n, n)
    sigma = 0.5 * (sigma + sigma.T)
    resid = np.max(np.abs(sigma - p.lam.T @ sigma @ p.lam - p.omega * np.eye(n)))
    if resid > RESIDUAL_RTOL * max(1.0, float(np.max(np.abs(sigma)))):
        raise SingularSystemError(f"fixed-point residual {resid:.3g} too large; redraw parameters")
    return StationaryCovariance(sigma)


@dataclass(frozen=True, eq=False)
class SupportPattern:
    n: int
    nonzero: np.ndarray
    threshold_used: float

    def __post_init__(self) -> None:
        nz = np.array(self.nonzero, dtype=bool)
        if nz.shape != (self.n, self.n):
            raise InputError(f"support pattern must be {self.n}x{self.n}")
        if not np.array_equal(nz, nz.T):
            raise InputError("support pattern must be symmetric")
        nz.flags.writeable = False
        object.__setattr__(self, "nonzero", nz)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SupportPattern):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.nonzero, other.nonzero)

    __hash__ = None  # type: ignore[assignment]


def default_threshold(m: np.ndarray) -> float:
    return 1e-9 * float(np.max(np.abs(m)))


def support_of(m, threshold: float | None = None) -> SupportPattern:
    """Entries with ``|m_ij| > threshold``; symmetrized by requiring both triangles."""
    m = np.asarray(m.sigma if isinstance(m, StationaryCovariance) else m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError("support needs a square matrix")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-8 * scale):
        raise InputError("matrix is not symmetric")
    if threshold is None:
        threshold = default_threshold(m)
    if threshold < 0:
        raise InputError("threshold must be nonnegative")
    sym = 0.5 * (m + m.T)
    return SupportPattern(m.shape[0], np.abs(sym) > threshold, float(threshold))


def read_matrix_csv(path: str | Path) -> np.ndarray:
    try:
        m = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise InputError(f"{path}: cannot parse CSV matrix ({exc})") from exc
    return m


def write_matrix_csv(path: str | Path, m: np.ndarray) -> None:
    np.savetxt(path, np.asarray(m), delimiter=",", fmt="%.17g")


def load_parameters(path: str | Path) -> VarParameters:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return VarParameters.from_dict(data)
