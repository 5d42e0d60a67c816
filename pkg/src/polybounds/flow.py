"""Steepest-descent dynamics driven by the marginal function's hull model.

Explicit Euler steps follow the negative minimum-norm element of the
subdifferential hull; a monotone line search halves the step whenever the
marginal value would increase.  Only asymptotic exponents are extracted
from the runs, so no implicit scheme (and no inner proximal solver) is
needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArgumentError, SolverError
from .fitting import Trajectory, loglog_fit
from .marginal import min_norm_point, subdifferential_hull, sup_value
from .semialg import ParametricSystem

SLOPE_STOP = 1e-9
DISSIPATION_TOL = 1e-12
MAX_HALVINGS = 10


@dataclass
class FlowRun:
    """Recorded descent trajectory with value/slope curves and limit estimate."""

    trajectory: Trajectory          # annotations: "phi", "slope"
    x_bar: np.ndarray
    phi_bar: float
    converged: bool                 # slope-based termination
    termination: str                # "slope" | "horizon"
    max_dissipation_violation: float

    @property
    def phi_curve(self) -> np.ndarray:
        return self.trajectory.annotations["phi"]

    @property
    def slope_curve(self) -> np.ndarray:
        return self.trajectory.annotations["slope"]


def integrate_flow(sys: ParametricSystem, x0, step: float, horizon: float,
                   budget: int = 100, seed: int = 0,
                   burn_down_factor: int = 5) -> FlowRun:
    """Integrate the descent dynamics from x0 up to `horizon`.

    Each step moves against the minimum-norm hull element; if the marginal
    value would rise by more than 1e-12 the step is halved, at most 10
    times, after which the run aborts (a hard error, not a silent
    acceptance).  Terminates early when the slope falls to 1e-9.  The limit
    x_bar is the endpoint of an unrecorded burn-down continuation.
    """
    if step <= 0 or horizon <= 0:
        raise ArgumentError("step and horizon must be positive")
    x = np.asarray(x0, dtype=float).ravel()
    times, points, phis, slopes = [], [], [], []

    def descent_direction(x):
        hull = subdifferential_hull(sys, x, budget=budget, seed=seed)
        return min_norm_point(hull.generators, tol=1e-12)

    t = 0.0
    phi = sup_value(sys, x, budget=budget, seed=seed).value
    v = descent_direction(x)
    times.append(t); points.append(x.copy()); phis.append(phi)
    slopes.append(float(np.linalg.norm(v)))
    converged = slopes[-1] <= SLOPE_STOP
    max_violation = 0.0

    while not converged and t < horizon:
        h = step
        accepted = False
        for _halving in range(MAX_HALVINGS + 1):
            x_new = x - h * v
            try:
                phi_new = sup_value(sys, x_new, budget=budget, seed=seed).value
            except SolverError as exc:
                raise SolverError(f"t = {t:.6f}: {exc}") from exc
            if phi_new <= phi + DISSIPATION_TOL:
                accepted = True
                break
            h *= 0.5
        if not accepted:
            raise SolverError(
                f"t = {t:.6f}: marginal value rose after {MAX_HALVINGS} step halvings"
            )
        max_violation = max(max_violation, phi_new - phi)
        x, phi, t = x_new, phi_new, t + h
        v = descent_direction(x)
        times.append(t); points.append(x.copy()); phis.append(phi)
        slopes.append(float(np.linalg.norm(v)))
        converged = slopes[-1] <= SLOPE_STOP

    # burn-down continuation for the limit estimate
    x_bar, phi_bar, v_bar = x.copy(), phi, v
    t_extra = 0.0
    while np.linalg.norm(v_bar) > SLOPE_STOP and t_extra < burn_down_factor * horizon:
        h = step
        for _halving in range(MAX_HALVINGS + 1):
            x_new = x_bar - h * v_bar
            phi_new = sup_value(sys, x_new, budget=budget, seed=seed).value
            if phi_new <= phi_bar + DISSIPATION_TOL:
                break
            h *= 0.5
        else:
            break
        x_bar, phi_bar, t_extra = x_new, phi_new, t_extra + h
        v_bar = descent_direction(x_bar)
    phi_bar = sup_value(sys, x_bar, budget=budget, seed=seed).value

    traj = Trajectory(
        times=np.array(times), points=np.array(points),
        annotations={"phi": np.array(phis), "slope": np.array(slopes)},
    )
    return FlowRun(
        trajectory=traj, x_bar=x_bar, phi_bar=float(phi_bar),
        converged=converged,
        termination="slope" if converged else "horizon",
        max_dissipation_violation=float(max_violation),
    )


@dataclass
class FlowRateReport:
    """Fitted vs. guaranteed asymptotic exponents for one descent run."""

    theta: Fraction
    distance_exponent_theory: Fraction
    value_exponent_theory: Fraction
    distance_exponent_fit: float | None
    value_exponent_fit: float | None
    distance_pass: bool
    value_pass: bool
    min_slope_ratio: float | None   # min of slope / |phi - phi_bar|^theta
    flags: tuple

    @property
    def passed(self) -> bool:
        return self.distance_pass and self.value_pass


def verify_flow_rates(run: FlowRun, theta, slack: float = 0.05) -> FlowRateReport:
    """Check the run's decay against the guaranteed exponents for `theta`.

    The distance curve must decay at least like (t+1)^(-(1-theta)/(2theta-1))
    and the value curve like t^(-1/(2theta-1)); faster-than-power-law decay
    and exact finite-time arrival both pass, with flags.  Also reports the
    minimum observed ratio slope / |phi - phi_bar|^theta, the empirical side
    of the slope inequality.
    """
    theta = Fraction(theta)
    if not Fraction(1, 2) < theta < 1:
        raise ArgumentError("theta must lie in (1/2, 1) for the rate formulas")
    if not (run.converged or _values_decreasing(run)):
        raise ArgumentError("run neither converged nor shows decreasing values")
    e_dist = (1 - theta) / (2 * theta - 1)
    e_val = Fraction(1) / (2 * theta - 1)
    times = run.trajectory.times
    dists = np.linalg.norm(run.trajectory.points - run.x_bar[None, :], axis=1)
    vals = np.abs(run.phi_curve - run.phi_bar)

    flags = []
    dist_fit, dist_pass = _tail_exponent(times + 1.0, dists, float(e_dist), slack, flags, "distance")
    val_fit, val_pass = _tail_exponent(
        np.maximum(times, 1e-12), vals, float(e_val), slack, flags, "value"
    )

    ratio = None
    mask = vals > 1e-14
    if mask.any():
        ratio = float(np.min(run.slope_curve[mask] / vals[mask] ** float(theta)))
    return FlowRateReport(
        theta=theta,
        distance_exponent_theory=e_dist,
        value_exponent_theory=e_val,
        distance_exponent_fit=dist_fit,
        value_exponent_fit=val_fit,
        distance_pass=dist_pass,
        value_pass=val_pass,
        min_slope_ratio=ratio,
        flags=tuple(flags),
    )


def _values_decreasing(run: FlowRun) -> bool:
    phis = run.phi_curve
    return bool(len(phis) >= 2 and phis[-1] <= phis[0] + 1e-12)


def _tail_exponent(ts, ys, theory: float, slack: float, flags: list, label: str):
    """Fit the tail decay exponent of ys against ts; degenerate tails pass."""
    half = len(ts) // 2
    ts, ys = ts[half:], ys[half:]
    keep = ys > 0
    if keep.sum() < 3:
        flags.append(f"{label}: finite-time arrival, power-law fit degenerate (pass)")
        return None, True
    ts, ys = ts[keep], ys[keep]
    slope_fit, _ = loglog_fit(ts, ys)
    fit = -slope_fit
    q = len(ts) // 2
    if q >= 3:
        late = -loglog_fit(ts[q:], ys[q:])[0]
        if late > 1.25 * max(fit, 0.0) + 0.1:
            flags.append(f"{label}: super-polynomial decay (pass)")
            return float(fit), True
    return float(fit), bool(fit >= theory - slack)
