"""Supremum marginal function: value, maximizers, multipliers, hull, slope.

phi(x) = sup over y in Y(x) (and over objectives) of f_l(x, y).  The
residual [phi(x)]_+ measures infeasibility of x; the argmax set and its
Fritz-John multipliers generate a finite outer model of the generalized
gradient of phi, whose minimum-norm element gives the slope.

The hull built here is an approximation: it combines single maximizers
(multipliers rescaled to unit objective weight) with convex weightings
over maximizer pairs on a coarse grid.  Every report derived from it
carries that caveat.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .curves import ParametricCurveSet
from .errors import ArgumentError, EmptyParameterSetError, SolverError
from .semialg import (
    ACTIVE_SET_CAP,
    MEMBERSHIP_TOL,
    ParameterSetDescription,
    ParametricSystem,
    _gauss_newton_restore,
    _stack,
    membership,
    sample_parameter_set,
)
from .wolfe import min_norm_point  # re-exported: the slope is its norm

__all__ = [
    "SupEvaluation", "FJPoint", "SubdifferentialHull",
    "sup_value", "fj_multipliers", "subdifferential_hull",
    "min_norm_point", "slope",
]

ASCENT_MAX_ITER = 200
ASCENT_TOP_STARTS = 10


@dataclass(frozen=True)
class MultistartStats:
    starts: int
    converged: int


@dataclass(frozen=True)
class SupEvaluation:
    """Supremum value at one x with the maximizers that attain it."""

    value: float
    residual: float
    maximizers: tuple  # ((y, objective_index), ...)
    multistart_stats: MultistartStats

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "residual": self.residual,
            "maximizers": [
                {"y": list(map(float, y)), "objective": int(l)}
                for y, l in self.maximizers
            ],
            "starts": self.multistart_stats.starts,
            "converged": self.multistart_stats.converged,
        }


@dataclass(frozen=True)
class FJPoint:
    """One Fritz-John multiplier tuple (gamma, lambda, kappa), 1-norm normalized.

    Construction re-checks the defining conditions: unit normalization,
    complementarity with the active inequalities, and stationarity of the
    parameter-space Lagrangian gradient.
    """

    gamma: float
    lam: tuple
    kappa: tuple
    normalization: float
    stationarity_norm: float
    complementarity_max: float

    def __post_init__(self):
        if self.gamma < -1e-12 or any(v < -1e-12 for v in self.lam):
            raise ArgumentError("Fritz-John multipliers require gamma, lambda >= 0")
        if abs(self.normalization - 1.0) > 1e-10:
            raise ArgumentError(
                f"multiplier normalization {self.normalization} is off unit by > 1e-10"
            )
        if self.stationarity_norm > 1e-8:
            raise ArgumentError(
                f"Lagrangian stationarity violated: |grad| = {self.stationarity_norm}"
            )
        if self.complementarity_max > 1e-8:
            raise ArgumentError(
                f"complementarity violated: max |lambda_i g_i| = {self.complementarity_max}"
            )


@dataclass(frozen=True)
class SubdifferentialHull:
    """Finite generator set whose convex hull outer-models the gradient set.

    Each generator is a unit-objective-weight combination over at most two
    maximizers; `capped_out` counts multiplier tuples discarded for
    exceeding `alpha_cap` after rescaling (the cap's validity is reported,
    never assumed).
    """

    generators: np.ndarray  # (k, n)
    provenance: tuple = ()
    alpha_cap: float = float("inf")
    capped_out: int = 0
    note: str = (
        "hull generated from single maximizers plus pairwise convex weights; "
        "an approximation of the full generalized gradient"
    )


def _objective_grads(sys: ParametricSystem, l: int):
    key = ("objective_grads", l)
    if key not in sys._caches:
        f = sys.objectives[l]
        sys._caches[key] = (
            tuple(f.diff(k) for k in range(sys.n)),
            tuple(f.diff(k) for k in range(sys.n, sys.n + sys.m)),
        )
    return sys._caches[key]


def _curve_sup(sys: ParametricSystem, x) -> SupEvaluation:
    curve: ParametricCurveSet = sys.Y
    best = (-np.inf, None, None)
    for l, f in enumerate(sys.objectives):
        def objective(ys, _f=f):
            pts = np.hstack([np.repeat(x[None, :], len(ys), axis=0), ys])
            return _f.eval_many(pts)

        v, y_star, _t = curve.supremum(objective)
        if v > best[0]:
            best = (v, y_star, l)
    value, y_star, l = best
    return SupEvaluation(
        value=float(value),
        residual=max(float(value), 0.0),
        maximizers=((np.asarray(y_star), l),),
        multistart_stats=MultistartStats(starts=sys.L, converged=sys.L),
    )


def _projected_ascent(sys: ParametricSystem, x, y0, l: int):
    """Maximize f_l(x, .) over Y(x) from y0 by projected gradient steps.

    Equalities are handled by projecting the gradient onto their tangent
    space and restoring with Gauss-Newton after each step; box faces clip.
    Returns (y, value, converged).
    """
    Y: ParameterSetDescription = sys.Y
    f = sys.objectives[l]
    _, fy = _objective_grads(sys, l)
    _, h_grads = Y.y_gradients()
    lows = np.array([lo for lo, _ in Y.box])
    highs = np.array([hi for _, hi in Y.box])
    y = np.asarray(y0, dtype=float).copy()
    fval = f.eval(_stack(x, y))
    converged = False
    for _ in range(ASCENT_MAX_ITER):
        z = _stack(x, y)
        g = np.array([df.eval(z) for df in fy])
        if Y.s:
            jac = np.array([[dh.eval(z) for dh in row] for row in h_grads])
            w, *_ = np.linalg.lstsq(jac @ jac.T, jac @ g, rcond=None)
            g = g - jac.T @ w
        at_hi = (y >= highs - 1e-12) & (g > 0)
        at_lo = (y <= lows + 1e-12) & (g < 0)
        g[at_hi | at_lo] = 0.0
        gn = float(np.linalg.norm(g))
        if gn <= 1e-10 * (1.0 + abs(fval)):
            converged = True
            break
        t = 1.0 / (1.0 + gn)
        improved = False
        for _bt in range(25):
            cand = np.clip(y + t * g, lows, highs)
            cand, ok = _gauss_newton_restore(Y, x, cand)
            if ok and membership(Y, x, cand, MEMBERSHIP_TOL):
                cv = f.eval(_stack(x, cand))
                if cv > fval + 1e-14 * (1.0 + abs(fval)):
                    y, fval = cand, cv
                    improved = True
                    break
            t *= 0.5
        if not improved:
            converged = gn <= 1e-8 * (1.0 + abs(fval))
            break
    return y, fval, converged


def sup_value(sys: ParametricSystem, x, budget: int = 200, seed: int = 0) -> SupEvaluation:
    """Evaluate phi(x) by sampling Y(x) and polishing the best candidates.

    The returned value is never below the best raw sample.  Maximizers are
    the polished points within a value-relative cluster tolerance of the
    supremum, merged at one thousandth of the box diameter.
    """
    if budget < 1:
        raise ArgumentError("budget must be >= 1")
    x = np.asarray(x, dtype=float).ravel()
    if len(x) != sys.n:
        raise ArgumentError(f"x has {len(x)} coordinates, expected {sys.n}")
    if isinstance(sys.Y, ParametricCurveSet):
        return _curve_sup(sys, x)

    samples = sample_parameter_set(sys.Y, x, budget, seed)
    if samples.shape[0] == 0:
        raise EmptyParameterSetError(
            f"no parameter point of Y(x) found at x = {x.tolist()}"
        )
    stacked = np.hstack([np.repeat(x[None, :], samples.shape[0], axis=0), samples])
    candidates = []  # (value, y, objective index)
    starts = converged_count = 0
    for l, f in enumerate(sys.objectives):
        vals = f.eval_many(stacked)
        for k in np.argsort(-vals)[:ASCENT_TOP_STARTS]:
            starts += 1
            y_star, v_star, conv = _projected_ascent(sys, x, samples[k], l)
            converged_count += int(conv)
            candidates.append((v_star, y_star, l))
        best_raw = int(np.argmax(vals))
        candidates.append((float(vals[best_raw]), samples[best_raw].copy(), l))

    value = max(c[0] for c in candidates)
    cluster_tol = 1e-6 * (1.0 + abs(value))
    merge_radius = 1e-3 * sys.Y.box_diameter()
    near = [c for c in candidates if c[0] >= value - cluster_tol]
    near.sort(key=lambda c: (-c[0], c[2], tuple(np.round(c[1], 12))))
    maximizers = []
    for v, y, l in near:
        if any(
            l == l2 and np.linalg.norm(y - y2) <= merge_radius
            for y2, l2 in maximizers
        ):
            continue
        maximizers.append((y, l))
    return SupEvaluation(
        value=float(value),
        residual=max(float(value), 0.0),
        maximizers=tuple(maximizers),
        multistart_stats=MultistartStats(starts=starts, converged=converged_count),
    )


def _subsets_desc(items):
    items = list(items)
    for k in range(len(items), -1, -1):
        yield from itertools.combinations(items, k)


def fj_multipliers(sys: ParametricSystem, x, y, l: int, tol: float = 1e-8):
    """All numerically distinct Fritz-John multiplier tuples at a maximizer.

    Active sets and equality-multiplier signs are enumerated; each
    combination yields a linear system (parameter-space stationarity plus
    the unit 1-norm normalization) solved by least squares, with a
    nonnegative-least-squares fallback.  The Fritz-John rule guarantees the
    set is nonempty, so finding none is reported as a numerical failure.
    """
    if not isinstance(sys.Y, ParameterSetDescription):
        raise ArgumentError("multipliers need a semialgebraic parameter set")
    Y = sys.Y
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if not membership(Y, x, y, max(tol, MEMBERSHIP_TOL)):
        raise ArgumentError("y must be feasible for Y(x) at the given tolerance")
    z = _stack(x, y)
    _, fy = _objective_grads(sys, l)
    fg = np.array([df.eval(z) for df in fy])
    g_grads, h_grads = Y.y_gradients()
    g_vals = np.array([g.eval(z) for g in Y.inequalities]) if Y.r else np.zeros(0)
    active = [i for i in range(Y.r) if abs(g_vals[i]) <= tol]
    if len(active) > ACTIVE_SET_CAP:
        raise ArgumentError(f"active-set enumeration is capped at {ACTIVE_SET_CAP}")
    g_rows = {i: np.array([dg.eval(z) for dg in g_grads[i]]) for i in active}
    h_rows = [np.array([dh.eval(z) for dh in row]) for row in h_grads]
    s = Y.s

    def make_point(gamma, lam_full, kappa):
        tiny = (lam_full > -1e-12) & (lam_full < 0)
        lam_full = lam_full.copy()
        lam_full[tiny] = 0.0
        gamma = 0.0 if -1e-12 < gamma < 0 else gamma
        total = gamma + lam_full.sum() + np.abs(kappa).sum()
        if total <= 0:
            return None
        gamma, lam_full, kappa = gamma / total, lam_full / total, kappa / total
        grad = -gamma * fg
        for i in range(Y.r):
            if lam_full[i]:
                grad = grad + lam_full[i] * g_rows.get(
                    i, np.array([dg.eval(z) for dg in g_grads[i]])
                )
        for j in range(s):
            if kappa[j]:
                grad = grad + kappa[j] * h_rows[j]
        comp = float(np.max(np.abs(lam_full * g_vals))) if Y.r else 0.0
        try:
            return FJPoint(
                gamma=float(gamma),
                lam=tuple(float(v) for v in lam_full),
                kappa=tuple(float(v) for v in kappa),
                normalization=float(gamma + lam_full.sum() + np.abs(kappa).sum()),
                stationarity_norm=float(np.linalg.norm(grad)),
                complementarity_max=comp,
            )
        except ArgumentError:
            return None

    found = []
    seen = set()

    def record(point):
        if point is None:
            return
        key = (round(point.gamma, 9), tuple(np.round(point.lam, 9)),
               tuple(np.round(point.kappa, 9)))
        if key not in seen:
            seen.add(key)
            found.append(point)

    for support in _subsets_desc(active):
        for signs in itertools.product((1.0, -1.0), repeat=s):
            cols = [np.append(-fg, 1.0)]
            for i in support:
                cols.append(np.append(g_rows[i], 1.0))
            for j in range(s):
                cols.append(np.append(signs[j] * h_rows[j], 1.0))
            mat = np.column_stack(cols)
            rhs = np.zeros(sys.m + 1)
            rhs[-1] = 1.0
            sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
            if np.linalg.norm(mat @ sol - rhs) > 1e-9 or (sol < -1e-9).any():
                continue
            sol = np.clip(sol, 0.0, None)
            lam_full = np.zeros(Y.r)
            for pos, i in enumerate(support):
                lam_full[i] = sol[1 + pos]
            kappa = np.array(
                [signs[j] * sol[1 + len(support) + j] for j in range(s)]
            )
            record(make_point(float(sol[0]), lam_full, kappa))

    if not found:
        # nonnegative least squares over the full active set, per sign pattern
        for signs in itertools.product((1.0, -1.0), repeat=s):
            cols = [np.append(-fg, 1.0)]
            for i in active:
                cols.append(np.append(g_rows[i], 1.0))
            for j in range(s):
                cols.append(np.append(signs[j] * h_rows[j], 1.0))
            mat = np.column_stack(cols)
            rhs = np.zeros(sys.m + 1)
            rhs[-1] = 1.0
            sol, res = nnls(mat, rhs)
            if res > 1e-8:
                continue
            lam_full = np.zeros(Y.r)
            for pos, i in enumerate(active):
                lam_full[i] = sol[1 + pos]
            kappa = np.array(
                [signs[j] * sol[1 + len(active) + j] for j in range(s)]
            )
            record(make_point(float(sol[0]), lam_full, kappa))

    if not found:
        raise SolverError(
            "numerical FJ failure: no multiplier tuple satisfied stationarity, "
            "complementarity and normalization at the requested tolerances"
        )
    return found


def _generator_from(sys: ParametricSystem, z, l: int, fj: FJPoint):
    """Unit-objective-weight gradient combination for one multiplier tuple.

    Orientation matches the smooth envelope rule: with x-independent
    constraints the generator reduces to the x-gradient of the active
    objective.
    """
    Y: ParameterSetDescription = sys.Y
    fx, _ = _objective_grads(sys, l)
    g_x, h_x = Y.x_gradients()
    scale = 1.0 / fj.gamma
    v = np.array([df.eval(z) for df in fx])
    for i in range(Y.r):
        li = fj.lam[i]
        if li:
            v = v - (li * scale) * np.array([dg.eval(z) for dg in g_x[i]])
    for j in range(Y.s):
        kj = fj.kappa[j]
        if kj:
            v = v - (kj * scale) * np.array([dh.eval(z) for dh in h_x[j]])
    return v


def subdifferential_hull(sys: ParametricSystem, x, alpha_cap: float = 1e3,
                         budget: int = 200, seed: int = 0) -> SubdifferentialHull:
    """Finite outer model of the generalized gradient of phi at x.

    Single maximizers contribute their multiplier combinations rescaled to
    unit objective weight (discarded if the rescaled 1-norm exceeds
    `alpha_cap`); maximizer pairs contribute convex weightings on a 5-point
    grid.  Total objective weight of every generator is exactly 1.
    """
    if alpha_cap <= 0:
        raise ArgumentError("alpha_cap must be positive")
    if isinstance(sys.Y, ParametricCurveSet):
        raise ArgumentError(
            "parametric-curve index sets support supremum evaluation only"
        )
    x = np.asarray(x, dtype=float).ravel()
    ev = sup_value(sys, x, budget=budget, seed=seed)
    per_max = []
    provenance = []
    capped = 0
    for y, l in ev.maximizers:
        z = _stack(x, y)
        vecs = []
        for fj in fj_multipliers(sys, x, y, l):
            if fj.gamma <= 1e-9:
                continue  # degenerate tuple: no unit-objective rescaling exists
            rescaled_norm = (
                1.0 + (sum(fj.lam) + sum(abs(k) for k in fj.kappa)) / fj.gamma
            )
            if rescaled_norm > alpha_cap:
                capped += 1
                continue
            vecs.append(_generator_from(sys, z, l, fj))
            provenance.append({
                "y": tuple(float(v) for v in y),
                "objective": l,
                "gamma": fj.gamma,
                "weights": (1.0,),
                "rescaled_norm": rescaled_norm,
            })
        per_max.append(vecs)

    gens = [v for vecs in per_max for v in vecs]
    for a, b in itertools.combinations(range(len(per_max)), 2):
        for va in per_max[a]:
            for vb in per_max[b]:
                for t in (0.25, 0.5, 0.75):
                    gens.append(t * va + (1.0 - t) * vb)
                    provenance.append({
                        "pair": (a, b), "weights": (t, 1.0 - t),
                    })
    if not gens:
        raise SolverError(
            "no hull generators: every multiplier tuple was degenerate or capped"
        )
    arr = np.array(gens)
    _, unique_idx = np.unique(np.round(arr, 12), axis=0, return_index=True)
    keep = sorted(unique_idx)
    return SubdifferentialHull(
        generators=arr[keep],
        provenance=tuple(provenance[i] for i in keep),
        alpha_cap=alpha_cap,
        capped_out=capped,
    )


def slope(sys: ParametricSystem, x, budget: int = 200, seed: int = 0) -> float:
    """Norm of the minimum-norm element of the hull model at x."""
    hull = subdifferential_hull(sys, x, budget=budget, seed=seed)
    return float(np.linalg.norm(min_norm_point(hull.generators, tol=1e-12)))
