"""End-to-end empirical verification experiments.

Each experiment samples a system at desk scale, fits an empirical exponent
and compares it with the guaranteed theoretical one recomputed from the
system's dimension audit.  Verdicts state that the theoretical exponent is
a valid lower estimate of the observed behavior on the sampled region;
constants and the theoretical neighborhoods are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import flat_bump_tangent_curve
from .errors import ArgumentError
from .exponents import ExponentQuery, exponent_for
from .fitting import loglog_fit
from .marginal import slope as slope_of
from .marginal import sup_value
from .poly_core import Polynomial
from .semialg import (
    FEASIBILITY_TOL,
    ParametricSystem,
    distance_to_solution_set,
    solution_set_feasible_grid,
)

DEFAULT_SLACK = 0.05
RESIDUAL_FLOOR = 1e-12


def _halton_ball(n: int, count: int, radius: float, center, seed: int) -> np.ndarray:
    """Low-discrepancy points in the ball of `radius` around `center`.

    Van der Corput / Halton sequence in the first n prime bases, started at
    a seed-dependent offset so distinct seeds give distinct (still
    deterministic) sample sets; cube points outside the unit ball are
    skipped.
    """
    primes = (2, 3, 5)[:n]
    center = np.asarray(center, dtype=float).ravel()
    out = np.zeros((count, n))
    got = 0
    index = 1 + (int(seed) % 100_000) * 7919
    while got < count:
        u = np.array([_van_der_corput(index, b) for b in primes])
        v = 2.0 * u - 1.0
        index += 1
        if float(v @ v) <= 1.0:
            out[got] = center + radius * v
            got += 1
    return out


def _van_der_corput(k: int, base: int) -> float:
    value, denom = 0.0, 1.0
    while k:
        k, digit = divmod(k, base)
        denom *= base
        value += digit / denom
    return value


def _audit_query(sys: ParametricSystem, default_setting: str) -> ExponentQuery:
    """Theoretical-exponent query from the system's own dimension audit.

    Systems produced by a reduction carry their audit query; raw systems
    fall back to the stated general formula for their dimensions.
    """
    query = getattr(sys, "audit_query", None)
    if query is not None:
        return query
    dims = {"n": sys.n, "m": sys.m, "d": sys.d}
    if default_setting in ("EB_4_2", "GSIP_5_1", "GSIP_SHARP_5_2R"):
        dims.update(r=sys.r, s=sys.s, L=sys.L)
    elif default_setting == "LOJA_3_5":
        dims.update(r=sys.r, s=sys.s)
    return ExponentQuery(default_setting, **dims)


@dataclass
class ErrorBoundReport:
    """Sampled residual-vs-distance behavior around one anchor point."""

    anchor: np.ndarray
    samples: np.ndarray
    residuals: np.ndarray
    distances: np.ndarray
    n_zero_residual: int
    n_unusable: int
    c_fit: float | None
    tau_emp: float | None
    tau_theory: Fraction
    exponent_report: object
    slack: float
    verdict: bool
    no_information: bool
    seed: int

    def to_dict(self) -> dict:
        return {
            "anchor": self.anchor.tolist(),
            "n_samples": int(len(self.samples)),
            "n_zero_residual": self.n_zero_residual,
            "n_unusable": self.n_unusable,
            "c_fit": self.c_fit,
            "tau_emp": self.tau_emp,
            "tau_theory": str(self.tau_theory),
            "setting": self.exponent_report.setting,
            "slack": self.slack,
            "verdict": self.verdict,
            "no_information": self.no_information,
            "seed": self.seed,
        }


def verify_error_bound(sys: ParametricSystem, x_bar, n_samples: int = 200,
                       radius: float = 0.5, seed: int = 0,
                       grid_per_axis: int = 101, sup_budget: int = 64,
                       slack: float = DEFAULT_SLACK) -> ErrorBoundReport:
    """Fit dist(x, S) ~ c * residual(x)^tau on a sampled ball around x_bar.

    Residuals come from the supremum solver, distances from the brute-force
    grid oracle (hence n <= 3).  Samples with residual at most 1e-12 carry
    no log-log information and are only counted.  The verdict asserts
    tau_theory <= tau_emp + slack with tau_theory recomputed from the
    system's dimension audit.
    """
    if radius <= 0:
        raise ArgumentError("radius must be positive")
    if sys.n > 3:
        raise ArgumentError("the distance oracle is limited to n <= 3")
    x_bar = np.asarray(x_bar, dtype=float).ravel()
    samples = _halton_ball(sys.n, n_samples, radius, x_bar, seed)
    residuals = np.empty(n_samples)
    distances = np.empty(n_samples)
    for k, x in enumerate(samples):
        residuals[k] = sup_value(sys, x, budget=sup_budget, seed=seed).residual
        distances[k] = distance_to_solution_set(
            sys, x, grid_per_axis=grid_per_axis, sup_budget=sup_budget, seed=seed
        )
    report = exponent_for(_audit_query(sys, "EB_4_2"))
    tau_theory = report.exponent

    zero_mask = residuals <= RESIDUAL_FLOOR
    usable = (~zero_mask) & (distances > 0) & np.isfinite(distances)
    n_unusable = int(((~zero_mask) & ~usable).sum())
    if usable.sum() < 3:
        return ErrorBoundReport(
            anchor=x_bar, samples=samples, residuals=residuals,
            distances=distances, n_zero_residual=int(zero_mask.sum()),
            n_unusable=n_unusable, c_fit=None, tau_emp=None,
            tau_theory=tau_theory, exponent_report=report, slack=slack,
            verdict=True, no_information=True, seed=seed,
        )
    tau_emp, log_c = loglog_fit(residuals[usable], distances[usable])
    verdict = float(tau_theory) <= tau_emp + slack
    return ErrorBoundReport(
        anchor=x_bar, samples=samples, residuals=residuals,
        distances=distances, n_zero_residual=int(zero_mask.sum()),
        n_unusable=n_unusable, c_fit=float(np.exp(log_c)),
        tau_emp=float(tau_emp), tau_theory=tau_theory,
        exponent_report=report, slack=slack, verdict=verdict,
        no_information=False, seed=seed,
    )


@dataclass
class SlopeInequalityReport:
    """Sampled slope-vs-value-gap behavior around one anchor point."""

    anchor: np.ndarray
    phi_anchor: float
    samples: np.ndarray
    slopes: np.ndarray
    value_gaps: np.ndarray
    tau_theory: Fraction
    min_ratio_theory: float | None   # min slope / gap^(1 - tau_theory)
    ratio_threshold: float
    theory_pass: bool
    fitted_exponent: float | None    # regression slope of log slope on log gap
    tau_emp: float | None            # 1 - fitted exponent
    extra_min_ratios: dict           # user exponent -> min slope / gap^exponent
    no_information: bool
    seed: int


def verify_loja(sys: ParametricSystem, x_bar, n_samples: int = 200,
                radius: float = 0.5, seed: int = 0, sup_budget: int = 64,
                extra_exponents=(), ratio_threshold: float = 1e-8,
                ) -> SlopeInequalityReport:
    """Check the slope inequality slope >= c * |phi - phi(x_bar)|^(1-tau).

    Requires a single objective (collapse first).  Reports the minimum
    observed ratio at the theoretical tau (it must stay above the
    threshold) and the empirically optimal exponent from a log-log
    regression; additional exponents can be supplied for closed-form
    comparisons.
    """
    if sys.L != 1:
        raise ArgumentError("slope verification requires L = 1; collapse first")
    if radius <= 0:
        raise ArgumentError("radius must be positive")
    x_bar = np.asarray(x_bar, dtype=float).ravel()
    phi_bar = sup_value(sys, x_bar, budget=sup_budget, seed=seed).value
    samples = _halton_ball(sys.n, n_samples, radius, x_bar, seed)
    slopes = np.empty(n_samples)
    gaps = np.empty(n_samples)
    for k, x in enumerate(samples):
        slopes[k] = slope_of(sys, x, budget=sup_budget, seed=seed)
        gaps[k] = abs(sup_value(sys, x, budget=sup_budget, seed=seed).value - phi_bar)
    report = exponent_for(_audit_query(sys, "LOJA_3_5"))
    tau_theory = report.exponent

    mask = gaps > RESIDUAL_FLOOR
    extra = {}
    for e in extra_exponents:
        vals = slopes[mask] / gaps[mask] ** float(e) if mask.any() else np.zeros(0)
        extra[float(e)] = float(vals.min()) if vals.size else None
    if not mask.any():
        return SlopeInequalityReport(
            anchor=x_bar, phi_anchor=float(phi_bar), samples=samples,
            slopes=slopes, value_gaps=gaps, tau_theory=tau_theory,
            min_ratio_theory=None, ratio_threshold=ratio_threshold,
            theory_pass=True, fitted_exponent=None, tau_emp=None,
            extra_min_ratios=extra, no_information=True, seed=seed,
        )
    ratios = slopes[mask] / gaps[mask] ** float(1 - tau_theory)
    min_ratio = float(ratios.min())
    fit_mask = mask & (slopes > 0)
    fitted = tau_emp = None
    if fit_mask.sum() >= 3:
        fitted, _ = loglog_fit(gaps[fit_mask], slopes[fit_mask])
        tau_emp = 1.0 - fitted
    return SlopeInequalityReport(
        anchor=x_bar, phi_anchor=float(phi_bar), samples=samples,
        slopes=slopes, value_gaps=gaps, tau_theory=tau_theory,
        min_ratio_theory=min_ratio, ratio_threshold=ratio_threshold,
        theory_pass=min_ratio >= ratio_threshold,
        fitted_exponent=fitted, tau_emp=tau_emp,
        extra_min_ratios=extra, no_information=False, seed=seed,
    )


# -- the failure-of-error-bounds table ----------------------------------------


def flat_bump_system(grid_points: int = 10_000) -> ParametricSystem:
    """One-inequality system over the flat-bump tangent curve.

    The objective x*y1 + y2 maximized over the curve equals exp(-1/x^2), a
    function vanishing to infinite order at 0, so the solution set is {0}
    while the residual decays faster than any power of the distance: no
    Holder error bound can hold at 0.  This is the canonical witness that
    a semialgebraic index set is essential.
    """
    f = Polynomial(3, {(1, 1, 0): 1, (0, 0, 1): 1})  # vars (x, y1, y2)
    curve = flat_bump_tangent_curve(grid_points=grid_points)
    return ParametricSystem(
        1, 2, 1, 2, [f], curve, [(-curve.t_hi, curve.t_hi)]
    )


def closed_form_ratio(k: int, tau: float) -> float:
    """dist/residual^(1/tau) for the flat-bump sequence x_k, in closed form."""
    return (k + 1) ** (1.0 / tau) / math.sqrt(math.log(k + 1.0))


@dataclass
class CounterexampleReport:
    """Tabulated divergence of dist/residual^(1/tau) along x_k -> 0."""

    ks: np.ndarray
    xs: np.ndarray
    dists: np.ndarray
    residuals: np.ndarray          # numeric, from the curve supremum
    residuals_closed: np.ndarray   # 1/(k+1)
    max_rel_residual_error: float
    taus: tuple
    ratios: dict                   # tau -> column of dist/residual^(1/tau)
    monotone: dict                 # tau -> bool, increasing across the table
    growth_factor: dict            # tau -> ratio(last decade)/ratio(k=10), or None
    growth_pass: dict              # tau -> growth_factor >= 1e3 (when defined)


def counterexample_table(k_max: int, taus=(1.0, 0.5, 0.25),
                         grid_points: int = 10_000) -> CounterexampleReport:
    """Tabulate the flat-bump failure sequence x_k = 1/sqrt(log(k+1)).

    Residuals are computed numerically from the curve supremum and
    cross-checked against the closed form 1/(k+1); distances are to the
    analytic solution set {0}.  Every ratio column dist/residual^(1/tau)
    must increase along the table and grow by at least 1e3 from k = 10 to
    k = 1e6 (checked when k_max reaches that far).
    """
    if k_max < 10:
        raise ArgumentError("k_max must be at least 10")
    sys = flat_bump_system(grid_points=grid_points)
    ks = _table_indices(k_max)
    xs = 1.0 / np.sqrt(np.log(ks + 1.0))
    residuals = np.empty(len(ks))
    for i, x in enumerate(xs):
        residuals[i] = sup_value(sys, [x]).residual
    closed = 1.0 / (ks + 1.0)
    rel_err = float(np.max(np.abs(residuals - closed) / closed))
    dists = xs.copy()  # the solution set is exactly {0}

    ratios, monotone, growth, growth_pass = {}, {}, {}, {}
    idx10 = int(np.where(ks == 10)[0][0])
    idx1e6 = np.where(ks == 10**6)[0]
    for tau in taus:
        col = dists / residuals ** (1.0 / tau)
        ratios[tau] = col
        monotone[tau] = bool(np.all(np.diff(col) > 0))
        if idx1e6.size:
            factor = float(col[int(idx1e6[0])] / col[idx10])
            growth[tau] = factor
            growth_pass[tau] = factor >= 1e3
        else:
            growth[tau] = None
            growth_pass[tau] = None
    return CounterexampleReport(
        ks=ks, xs=xs, dists=dists, residuals=residuals,
        residuals_closed=closed, max_rel_residual_error=rel_err,
        taus=tuple(taus), ratios=ratios, monotone=monotone,
        growth_factor=growth, growth_pass=growth_pass,
    )


def _table_indices(k_max: int) -> np.ndarray:
    """Deterministic k grid: dense start, geometric tail, decade checkpoints."""
    ks = set(range(10, min(30, k_max) + 1))
    k = 30
    while k < k_max:
        k = max(int(k * 1.25), k + 1)
        ks.add(min(k, k_max))
    decade = 10
    while decade <= k_max:
        if decade >= 10:
            ks.add(decade)
        decade *= 10
    ks.add(k_max)
    return np.array(sorted(ks), dtype=np.int64)


# -- tilt-stability probe ------------------------------------------------------


@dataclass
class StabilityReport:
    """Excess of perturbed solution clouds over the nominal one, per magnitude."""

    magnitudes: np.ndarray
    excesses: np.ndarray
    n_solutions: tuple
    exponent_fit: float | None
    c_fit: float | None
    tau_theory: Fraction
    exponent_report: object
    slack: float
    verdict: bool
    degenerate: bool
    seed: int

    def to_dict(self) -> dict:
        return {
            "magnitudes": self.magnitudes.tolist(),
            "excesses": self.excesses.tolist(),
            "n_solutions": list(self.n_solutions),
            "exponent_fit": self.exponent_fit,
            "c_fit": self.c_fit,
            "tau_theory": str(self.tau_theory),
            "setting": self.exponent_report.setting,
            "slack": self.slack,
            "verdict": self.verdict,
            "degenerate": self.degenerate,
            "seed": self.seed,
        }


def _solve_tilted(sys: ParametricSystem, p0: Polynomial, u: np.ndarray,
                  grid_per_axis: int, sup_budget: int, seed: int):
    """Near-optimal solutions of min p0(x) - <u, x> over the feasible grid.

    Grid + local refinement: the best grid points are polished by a damped
    Newton/gradient descent on the tilted objective, rejecting steps that
    leave the box or the feasible region (residual above 1e-8).  Returns
    the solution cloud within 1e-6 of the best value found.
    """
    feasible = solution_set_feasible_grid(sys, grid_per_axis, sup_budget, seed)
    if feasible.shape[0] == 0:
        raise ArgumentError("no feasible grid point: cannot probe stability")
    vals = p0.eval_many(feasible) - feasible @ u
    order = np.argsort(vals)
    candidates = [feasible[k].copy() for k in order[:5]]
    grad_polys = p0.gradient()
    hess_polys = [g.gradient() for g in grad_polys]
    lows = np.array([lo for lo, _ in sys.x_box])
    highs = np.array([hi for _, hi in sys.x_box])

    def objective(x):
        return p0.eval(x) - float(u @ x)

    def is_feasible(x):
        if ((x < lows) | (x > highs)).any():
            return False
        return sup_value(sys, x, budget=sup_budget, seed=seed).residual <= FEASIBILITY_TOL

    refined = []
    for x in candidates:
        x = x.copy()
        fx = objective(x)
        for _ in range(100):
            g = np.array([gp.eval(x) for gp in grad_polys]) - u
            if np.linalg.norm(g) <= 1e-12 * (1.0 + abs(fx)):
                break
            hess = np.array([[hp.eval(x) for hp in row] for row in hess_polys])
            step = None
            try:
                newton = np.linalg.solve(hess, -g)
                if float(newton @ g) < 0:  # accept only descent directions
                    step = newton
            except np.linalg.LinAlgError:
                pass
            if step is None:
                step = -g
            t, moved = 1.0, False
            for _bt in range(30):
                x_new = np.clip(x + t * step, lows, highs)
                f_new = objective(x_new)
                if f_new < fx - 1e-16 and is_feasible(x_new):
                    x, fx, moved = x_new, f_new, True
                    break
                t *= 0.5
            if not moved:
                break
        refined.append((fx, x))
    pool = refined + [(float(vals[k]), feasible[k].copy()) for k in order[:50]]
    best = min(v for v, _ in pool)
    cloud = []
    for v, x in pool:
        if v <= best + 1e-6 and not any(
            np.linalg.norm(x - y) <= 1e-9 for y in cloud
        ):
            cloud.append(x)
    return np.array(cloud), best


def gsip_stability_probe(sys: ParametricSystem, p0: Polynomial, u_bar,
                         magnitudes, seed: int = 0, grid_per_axis: int = 201,
                         sup_budget: int = 64, directions: int = 2,
                         slack: float = DEFAULT_SLACK) -> StabilityReport:
    """Measure solution-set drift under tilt perturbations p0(x) - <u, x>.

    For each magnitude, tilts of that size in seeded directions are solved
    and the empirical excess (the farthest certified solution's distance to
    the nominal cloud) is recorded; a log-log fit gives the stability
    exponent, compared against the guaranteed one (equality-only sharpening
    applied when the parameter set has no inequalities).
    """
    if sys.n > 3:
        raise ArgumentError("the stability probe is limited to n <= 3")
    if not isinstance(p0, Polynomial) or p0.num_vars != sys.n:
        raise ArgumentError("p0 must be a polynomial in the system's x variables")
    u_bar = np.asarray(u_bar, dtype=float).ravel()
    magnitudes = np.asarray(sorted(float(m) for m in magnitudes))
    if (magnitudes <= 0).any():
        raise ArgumentError("magnitudes must be positive")
    nominal_cloud, _ = _solve_tilted(sys, p0, u_bar, grid_per_axis, sup_budget, seed)

    dirs = _tilt_directions(sys.n, directions, seed)
    excesses = np.empty(len(magnitudes))
    n_solutions = []
    for i, mag in enumerate(magnitudes):
        worst = 0.0
        count = 0
        for direction in dirs:
            u = u_bar + mag * direction
            cloud, _ = _solve_tilted(sys, p0, u, grid_per_axis, sup_budget, seed)
            count += len(cloud)
            for x in cloud:
                dist = float(np.min(np.linalg.norm(nominal_cloud - x[None, :], axis=1)))
                worst = max(worst, dist)
        excesses[i] = worst
        n_solutions.append(count)

    setting = "GSIP_SHARP_5_2R" if (sys.r == 0 and sys.s > 0) else "GSIP_5_1"
    d_eff = max(sys.d, p0.degree(), 1)
    report = exponent_for(ExponentQuery(
        setting, n=sys.n, m=sys.m, r=sys.r, s=sys.s, d=d_eff, L=sys.L
    ))
    tau_theory = report.exponent

    mask = excesses > 0
    if mask.sum() < 3:
        return StabilityReport(
            magnitudes=magnitudes, excesses=excesses,
            n_solutions=tuple(n_solutions), exponent_fit=None, c_fit=None,
            tau_theory=tau_theory, exponent_report=report, slack=slack,
            verdict=True, degenerate=True, seed=seed,
        )
    exp_fit, log_c = loglog_fit(magnitudes[mask], excesses[mask])
    verdict = float(tau_theory) <= exp_fit + slack
    return StabilityReport(
        magnitudes=magnitudes, excesses=excesses,
        n_solutions=tuple(n_solutions), exponent_fit=float(exp_fit),
        c_fit=float(np.exp(log_c)), tau_theory=tau_theory,
        exponent_report=report, slack=slack, verdict=verdict,
        degenerate=False, seed=seed,
    )


def _tilt_directions(n: int, count: int, seed: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])[: max(count, 1)]
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, 0x7117))))
    dirs = gen.standard_normal((count, n))
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
