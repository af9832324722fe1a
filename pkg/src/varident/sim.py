"""Simulate VAR(1) data and recover maximal classes from samples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .recovery import RecoveryReport, maxclasses_from_support
from .stationary import (
    SupportPattern,
    VarParameters,
    solve_stationary,
    spectral_radius,
    support_of,
)

AUTO_THRESHOLD_C = 4.0


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Rows of ``samples`` are draws; ``source`` is ``trajectory_tail`` or ``iid_stationary``."""

    n: int
    samples: np.ndarray
    source: str
    seed: int | None

    def __post_init__(self) -> None:
        s = np.array(self.samples, dtype=float, ndmin=2)
        if s.ndim != 2 or s.shape[1] != self.n or s.shape[0] < 1:
            raise InputError(f"samples must be a nonempty (count, {self.n}) array")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def count(self) -> int:
        return self.samples.shape[0]


def burn_in_steps(p: VarParameters) -> int:
    """Steps for the transient to decay by a factor 1e-6 ten times over."""
    rho = spectral_radius(p.lam)
    if rho < 1e-12:
        return 1
    return max(1, math.ceil(10 * math.log(1e-6) / math.log(rho)))


def simulate_trajectory(
    p: VarParameters, steps: int, seed: int | None, burn_in: int = 0
) -> SampleBatch:
    """Run ``x_0 = e_0``, ``x_t = L^T x_{t-1} + e_t`` and keep ``x_burn_in .. x_{steps-1}``."""
    if steps < 1:
        raise InputError("steps must be at least 1")
    if not 0 <= burn_in < steps:
        raise InputError("burn_in must be in [0, steps)")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((steps, p.n)) * math.sqrt(p.omega)
    lt = p.lam.T
    x = np.empty_like(eps)
    x[0] = eps[0]
    if p.n == 1:
        a = float(lt[0, 0])
        prev = x[0, 0]
        col = eps[:, 0]
        out = x[:, 0]
        for t in range(1, steps):
            prev = a * prev + col[t]
            out[t] = prev
    else:
        for t in range(1, steps):
            x[t] = lt @ x[t - 1] + eps[t]
    return SampleBatch(p.n, x[burn_in:], "trajectory_tail", seed)


def sample_stationary(p: VarParameters, count: int, seed: int | None) -> SampleBatch:
    """I.i.d. draws from ``N(0, S)`` using a symmetric square root of ``S``."""
    if count < 1:
        raise InputError("count must be at least 1")
    sigma = solve_stationary(p).sigma
    w, v = np.linalg.eigh(sigma)
    if w.min() < -1e-10 * max(1.0, abs(w.max())):
        raise InputError("stationary covariance is not positive semidefinite")
    root = v * np.sqrt(np.clip(w, 0.0, None))
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, p.n))
    return SampleBatch(p.n, z @ root.T, "iid_stationary", seed)


def empirical_covariance(b: SampleBatch) -> np.ndarray:
    """Mean-centred sample covariance with ``count - 1`` normalization."""
    if b.count < 2:
        raise InputError("need at least two samples")
    c = np.atleast_2d(np.cov(b.samples, rowvar=False, ddof=1))
    return 0.5 * (c + c.T)


def auto_threshold(cov: np.ndarray, count: int, c: float = AUTO_THRESHOLD_C) -> float:
    """``c * max|S_hat| * sqrt(log(n) / count)``."""
    n = cov.shape[0]
    return c * float(np.max(np.abs(cov))) * math.sqrt(math.log(n) / count)


def recover_from_samples(
    b: SampleBatch, threshold: float | str = "auto", c: float = AUTO_THRESHOLD_C
) -> RecoveryReport:
    """Threshold the sample covariance and read off maximal classes.

    Variances are positive by construction, so the diagonal is always kept even
    when a variance falls below the threshold.
    """
    cov = empirical_covariance(b)
    if threshold == "auto":
        t = auto_threshold(cov, b.count, c)
    else:
        t = float(threshold)
    nz = np.array(support_of(cov, t).nonzero)
    np.fill_diagonal(nz, True)
    return maxclasses_from_support(SupportPattern(b.n, nz, t))


def read_samples_csv(path, seed: int | None = None) -> SampleBatch:
    try:
        s = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise InputError(f"{path}: cannot parse samples CSV ({exc})") from exc
    return SampleBatch(s.shape[1], s, "iid_stationary", seed)


def write_samples_csv(path, b: SampleBatch) -> None:
    np.savetxt(path, b.samples, delimiter=",", fmt="%.17g")
