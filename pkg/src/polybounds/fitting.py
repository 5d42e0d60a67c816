"""Trajectories and power-law rate fitting by log-log least squares."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError


@dataclass
class Trajectory:
    """Time- or iteration-indexed points with per-step annotations."""

    times: np.ndarray              # (K,)
    points: np.ndarray             # (K, n)
    annotations: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.times.shape[0] != self.points.shape[0]:
            raise ArgumentError("times and points must have matching lengths")

    def __len__(self):
        return len(self.times)


def loglog_fit(x: np.ndarray, y: np.ndarray):
    """Least-squares fit of log y = intercept + slope * log x.

    Returns (coeff, intercept) where y ~ exp(intercept) * x**coeff.  Inputs
    must be positive; callers filter zeros first.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ArgumentError("need at least two (x, y) pairs for a fit")
    if (x <= 0).any() or (y <= 0).any():
        raise ArgumentError("log-log fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    a = np.column_stack([lx, np.ones_like(lx)])
    sol, *_ = np.linalg.lstsq(a, ly, rcond=None)
    return float(sol[0]), float(sol[1])


@dataclass
class RateFit:
    """Fitted power law distance ~ M * k**(-rho) over a trajectory tail."""

    M: float
    rho: float
    n_points: int
    degenerate: bool = False
    flags: tuple = ()

    def __iter__(self):  # allows (M, rho) unpacking
        return iter((self.M, self.rho))


def fit_rate(traj: Trajectory, x_inf, tail_fraction: float = 0.5) -> RateFit:
    """Fit ||x_k - x_inf|| ~ M / k^rho on the trajectory tail.

    Iterates are indexed 1..K.  Zero distances are dropped (they cannot
    enter a log fit); fewer than 3 nonzero tail distances flags the fit as
    degenerate.  A tail whose decay visibly accelerates gets the
    "faster-than-power-law" flag: its late-half exponent keeps growing,
    which no single power law does.
    """
    if not 0 < tail_fraction <= 1:
        raise ArgumentError("tail_fraction must lie in (0, 1]")
    if len(traj) < 10:
        raise ArgumentError("rate fitting needs at least 10 recorded iterates")
    x_inf = np.asarray(x_inf, dtype=float).ravel()
    dists = np.linalg.norm(traj.points - x_inf[None, :], axis=1)
    ks = np.arange(1, len(dists) + 1, dtype=float)
    start = len(dists) - int(np.ceil(tail_fraction * len(dists)))
    ks, dists = ks[start:], dists[start:]
    keep = dists > 0
    n_zero = int((~keep).sum())
    ks, dists = ks[keep], dists[keep]
    flags = []
    if n_zero:
        flags.append("zero-distance iterates dropped")
    if len(dists) < 3:
        return RateFit(M=0.0, rho=0.0, n_points=len(dists),
                       degenerate=True, flags=tuple(flags + ["degenerate"]))
    rho_all, log_m = loglog_fit(ks, dists)
    rho_all = -rho_all
    half = len(ks) // 2
    if half >= 3:
        rho_late = -loglog_fit(ks[half:], dists[half:])[0]
        if rho_late > 1.25 * max(rho_all, 0.0) + 0.1:
            flags.append("faster-than-power-law")
    return RateFit(M=float(np.exp(log_m)), rho=float(rho_all),
                   n_points=len(dists), flags=tuple(flags))
