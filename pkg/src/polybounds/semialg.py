"""Parameter sets, parametric systems, sampling, and constraint qualifications.

A parameter set Y(x) is cut out by polynomial inequalities g_i(x, y) <= 0
and equalities h_j(x, y) = 0 inside a compact box.  A parametric system
bundles objectives f_l(x, y) with such a set (or with a parametric curve)
and a compact box for x; its solution set S consists of the x whose
supremum residual is nonpositive.

Everything here is desk-scale by design: the distance oracle enumerates a
grid (n <= 3), and the constraint-qualification certificates are numerical
statements about sampled points, not proofs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .curves import ParametricCurveSet, curve_from_name
from .errors import ArgumentError, SchemaError
from .poly_core import Polynomial
from .wolfe import min_norm_point

MEMBERSHIP_TOL = 1e-8
FEASIBILITY_TOL = 1e-8
ACTIVE_SET_CAP = 12


class ParameterSetDescription:
    """Semialgebraic description of Y(x) inside a box.

    All constraint polynomials live in the stacked variable space
    (x_1..x_{n_x}, y_1..y_m); x-independent sets simply use n_x = 0.
    Instances are immutable by convention; internal caches are the only
    mutable state and are keyed deterministically.
    """

    def __init__(self, n_x: int, m: int, inequalities=(), equalities=(), box=()):
        if m < 1:
            raise ArgumentError("parameter dimension m must be >= 1")
        if n_x < 0:
            raise ArgumentError("n_x must be nonnegative")
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        if len(box) != m:
            raise ArgumentError(f"box must give bounds for all {m} parameters")
        for k, (lo, hi) in enumerate(box):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ArgumentError(f"box[{k}] must be finite with lower < upper")
        for p in tuple(inequalities) + tuple(equalities):
            if not isinstance(p, Polynomial) or p.num_vars != n_x + m:
                raise ArgumentError(
                    "constraints must be polynomials in the stacked (x, y) space"
                )
        self.n_x = n_x
        self.m = m
        self.inequalities = tuple(inequalities)
        self.equalities = tuple(equalities)
        self.box = box
        self._caches = {}

    @property
    def r(self) -> int:
        return len(self.inequalities)

    @property
    def s(self) -> int:
        return len(self.equalities)

    def degree(self) -> int:
        polys = self.inequalities + self.equalities
        return max((p.degree() for p in polys), default=0)

    @property
    def depends_on_x(self) -> bool:
        if self.n_x == 0:
            return False
        key = "depends_on_x"
        if key not in self._caches:
            self._caches[key] = any(
                p.depends_on(i)
                for p in self.inequalities + self.equalities
                for i in range(self.n_x)
            )
        return self._caches[key]

    def box_diameter(self) -> float:
        return float(np.linalg.norm([hi - lo for lo, hi in self.box]))

    def y_gradients(self):
        """Per-constraint tuples of d/dy_k polynomials, cached."""
        key = "y_gradients"
        if key not in self._caches:
            rng = range(self.n_x, self.n_x + self.m)
            self._caches[key] = (
                tuple(tuple(g.diff(k) for k in rng) for g in self.inequalities),
                tuple(tuple(h.diff(k) for k in rng) for h in self.equalities),
            )
        return self._caches[key]

    def x_gradients(self):
        """Per-constraint tuples of d/dx_k polynomials, cached."""
        key = "x_gradients"
        if key not in self._caches:
            rng = range(self.n_x)
            self._caches[key] = (
                tuple(tuple(g.diff(k) for k in rng) for g in self.inequalities),
                tuple(tuple(h.diff(k) for k in rng) for h in self.equalities),
            )
        return self._caches[key]

    def __eq__(self, other):
        return (
            isinstance(other, ParameterSetDescription)
            and (self.n_x, self.m, self.box) == (other.n_x, other.m, other.box)
            and self.inequalities == other.inequalities
            and self.equalities == other.equalities
        )

    def to_dict(self) -> dict:
        names = [f"x{i + 1}" for i in range(self.n_x)] + [
            f"y{j + 1}" for j in range(self.m)
        ]
        return {
            "ineq": [g.to_dict(names) for g in self.inequalities],
            "eq": [h.to_dict(names) for h in self.equalities],
            "box": [[lo, hi] for lo, hi in self.box],
        }


class ParametricSystem:
    """Objectives f_1..f_L over a parameter set Y(x), plus a box for x.

    The declared degree cap `d` must dominate every objective and
    constraint degree; reductions and exponent bookkeeping consume it.
    """

    def __init__(self, n: int, m: int, L: int, d: int, objectives, Y, x_box):
        if n < 1 or m < 1:
            raise ArgumentError("need n >= 1 and m >= 1")
        if L < 1:
            raise ArgumentError("need at least one objective (L >= 1)")
        if d < 1:
            raise ArgumentError("declared degree cap d must be >= 1")
        objectives = tuple(objectives)
        if len(objectives) != L:
            raise ArgumentError(f"L = {L} but {len(objectives)} objectives supplied")
        for l, f in enumerate(objectives):
            if not isinstance(f, Polynomial) or f.num_vars != n + m:
                raise ArgumentError(f"objective {l} must live in the (x, y) space")
            if f.degree() > d:
                raise ArgumentError(
                    f"objective {l} has degree {f.degree()} exceeding the declared cap {d}"
                )
        if isinstance(Y, ParameterSetDescription):
            if Y.m != m:
                raise ArgumentError("Y parameter dimension disagrees with m")
            if Y.n_x != n:
                raise ArgumentError("Y constraints must be stacked over the system's x")
            if Y.degree() > d:
                raise ArgumentError(
                    f"a constraint has degree {Y.degree()} exceeding the declared cap {d}"
                )
        elif isinstance(Y, ParametricCurveSet):
            if Y.m != m:
                raise ArgumentError("curve dimension disagrees with m")
        else:
            raise ArgumentError("Y must be a ParameterSetDescription or ParametricCurveSet")
        x_box = tuple((float(lo), float(hi)) for lo, hi in x_box)
        if len(x_box) != n:
            raise ArgumentError(f"x_box must give bounds for all {n} coordinates")
        for k, (lo, hi) in enumerate(x_box):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ArgumentError(f"x_box[{k}] must be finite with lower < upper")
        self.n = n
        self.m = m
        self.L = L
        self.d = d
        self.objectives = objectives
        self.Y = Y
        self.x_box = x_box
        self._caches = {}

    @property
    def r(self) -> int:
        return self.Y.r if isinstance(self.Y, ParameterSetDescription) else 0

    @property
    def s(self) -> int:
        return self.Y.s if isinstance(self.Y, ParameterSetDescription) else 0

    def __eq__(self, other):
        if not isinstance(other, ParametricSystem):
            return False
        same_head = (self.n, self.m, self.L, self.d, self.x_box) == (
            other.n, other.m, other.L, other.d, other.x_box,
        ) and self.objectives == other.objectives
        if not same_head:
            return False
        if isinstance(self.Y, ParametricCurveSet) and isinstance(other.Y, ParametricCurveSet):
            return (
                self.Y.name == other.Y.name
                and (self.Y.t_lo, self.Y.t_hi, self.Y.grid_points)
                == (other.Y.t_lo, other.Y.t_hi, other.Y.grid_points)
            )
        return self.Y == other.Y

    def to_dict(self) -> dict:
        names = [f"x{i + 1}" for i in range(self.n)] + [
            f"y{j + 1}" for j in range(self.m)
        ]
        if isinstance(self.Y, ParametricCurveSet):
            y_part = {
                "curve": self.Y.name,
                "params": {
                    "t_half_width": self.Y.t_hi,
                    "grid_points": self.Y.grid_points,
                },
            }
        else:
            y_part = self.Y.to_dict()
        return {
            "n": self.n,
            "m": self.m,
            "L": self.L,
            "d": self.d,
            "objectives": [f.to_dict(names) for f in self.objectives],
            "Y": y_part,
            "x_box": [[lo, hi] for lo, hi in self.x_box],
        }


@dataclass
class CQCertificate:
    """Numerical constraint-qualification verdict at sampled points.

    `holds` is a statement at the recorded tolerance, certified on the
    samples actually inspected -- not a proof over the continuum.
    """

    holds: bool
    witness: object  # direction xi for the marginal CQ, min-norm value otherwise
    margin: float
    samples_used: int
    tol: float

    def __post_init__(self):
        if self.holds and not (self.margin > self.tol):
            raise ArgumentError("a holding certificate requires margin > tol")


def _stack(x, y) -> np.ndarray:
    return np.concatenate([np.asarray(x, dtype=float).ravel(),
                           np.asarray(y, dtype=float).ravel()])


def membership(Y: ParameterSetDescription, x, y, tol: float = MEMBERSHIP_TOL) -> bool:
    """True iff y satisfies every constraint of Y(x) within tol and sits in the box."""
    if tol < 0:
        raise ArgumentError("tol must be nonnegative")
    y = np.asarray(y, dtype=float).ravel()
    if len(y) != Y.m:
        raise ArgumentError(f"y has {len(y)} coordinates, expected {Y.m}")
    x = np.asarray(x, dtype=float).ravel()
    if len(x) != Y.n_x:
        raise ArgumentError(f"x has {len(x)} coordinates, expected {Y.n_x}")
    for (lo, hi), yj in zip(Y.box, y):
        if not lo <= yj <= hi:
            return False
    z = _stack(x, y)
    for g in Y.inequalities:
        if g.eval(z) > tol:
            return False
    for h in Y.equalities:
        if abs(h.eval(z)) > tol:
            return False
    return True


def _gauss_newton_restore(Y: ParameterSetDescription, x, y0,
                          max_iter: int = 30, target: float = 1e-10):
    """Pull y0 onto the equality variety of Y(x) by Gauss-Newton on sum h_j^2.

    Returns (y, ok).  Inequalities are not steered here; callers filter by
    membership afterwards.
    """
    if Y.s == 0:
        return np.asarray(y0, dtype=float).copy(), True
    _, h_grads = Y.y_gradients()
    y = np.asarray(y0, dtype=float).copy()
    x = np.asarray(x, dtype=float).ravel()
    for _ in range(max_iter):
        z = _stack(x, y)
        res = np.array([h.eval(z) for h in Y.equalities])
        nrm = float(np.linalg.norm(res))
        if nrm <= target:
            return y, True
        jac = np.array([[dh.eval(z) for dh in row] for row in h_grads])
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        t = 1.0
        for _bt in range(20):
            cand = y + t * step
            res_c = np.array([h.eval(_stack(x, cand)) for h in Y.equalities])
            if np.linalg.norm(res_c) < nrm:
                y = cand
                break
            t *= 0.5
        else:
            return y, nrm <= target
    z = _stack(x, y)
    res = np.array([h.eval(z) for h in Y.equalities])
    return y, float(np.linalg.norm(res)) <= target


def sample_parameter_set(Y: ParameterSetDescription, x, budget: int, seed: int):
    """Deterministic sample of Y(x): box grid plus seeded fills, equality-refined.

    Grid points (and, if the grid does not exhaust the budget, per-index
    seeded uniform fills) are pulled onto the equality variety by
    Gauss-Newton and filtered through membership at 1e-8.  The result is
    reproducible for fixed (budget, seed) and may be empty.
    """
    if budget < 1:
        raise ArgumentError("budget must be >= 1")
    x = np.asarray(x, dtype=float).ravel()
    cache_key = (
        "samples",
        None if not Y.depends_on_x else x.tobytes(),
        int(budget),
        int(seed),
    )
    if cache_key in Y._caches:
        return Y._caches[cache_key]

    m = Y.m
    lows = np.array([lo for lo, _ in Y.box])
    highs = np.array([hi for _, hi in Y.box])
    if m == 1:
        per_axis = budget
    else:
        per_axis = max(2, int(math.floor(budget ** (1.0 / m))))
        while per_axis**m > budget and per_axis > 2:
            per_axis -= 1
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in Y.box]
    raw = [np.array(pt) for pt in itertools.product(*axes)]
    n_fill = budget - len(raw)
    for idx in range(max(n_fill, 0)):
        gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence((int(seed), idx))))
        raw.append(lows + gen.random(m) * (highs - lows))

    accepted = []
    seen = set()
    for y0 in raw:
        y, ok = _gauss_newton_restore(Y, x, y0)
        if not ok:
            continue
        if not membership(Y, x, y, MEMBERSHIP_TOL):
            continue
        key = tuple(np.round(y, 9))
        if key in seen:
            continue
        seen.add(key)
        accepted.append(y)
    out = np.array(accepted) if accepted else np.zeros((0, m))
    Y._caches[cache_key] = out
    return out


def solution_set_feasible_grid(sys: ParametricSystem, grid_per_axis: int = 41,
                               sup_budget: int = 64, seed: int = 0) -> np.ndarray:
    """Grid points of x_box whose supremum residual is at most 1e-8 (cached).

    This is the shared backbone of the brute-force distance oracle and of
    the stability prober.  Grid points where the parameter set is empty are
    skipped.
    """
    if sys.n > 3:
        raise ArgumentError("the brute-force oracle is limited to n <= 3")
    if grid_per_axis < 3:
        raise ArgumentError("grid_per_axis must be >= 3")
    key = ("feasible_grid", int(grid_per_axis), int(sup_budget), int(seed))
    if key in sys._caches:
        return sys._caches[key]
    from . import marginal  # deferred: marginal builds on this module

    axes = [np.linspace(lo, hi, grid_per_axis) for lo, hi in sys.x_box]
    feasible = []
    from .errors import EmptyParameterSetError

    for pt in itertools.product(*axes):
        xv = np.array(pt)
        try:
            ev = marginal.sup_value(sys, xv, budget=sup_budget, seed=seed)
        except EmptyParameterSetError:
            continue
        if ev.residual <= FEASIBILITY_TOL:
            feasible.append(xv)
    out = np.array(feasible) if feasible else np.zeros((0, sys.n))
    sys._caches[key] = out
    return out


def grid_spacing(sys: ParametricSystem, grid_per_axis: int) -> float:
    """Largest per-axis spacing of the oracle grid (its resolution limit)."""
    return max((hi - lo) / (grid_per_axis - 1) for lo, hi in sys.x_box)


def distance_to_solution_set(sys: ParametricSystem, x, grid_per_axis: int = 41,
                             sup_budget: int = 64, seed: int = 0) -> float:
    """Brute-force distance from x to the solution set, to grid resolution.

    Rejection oracle: points of the x_box grid passing the feasibility
    residual at 1e-8 are candidate solutions; the minimum distance to them
    is returned, infinity if the grid holds no feasible point.  A point
    that itself passes the residual test has distance 0 exactly.
    """
    from . import marginal

    x = np.asarray(x, dtype=float).ravel()
    if len(x) != sys.n:
        raise ArgumentError("dimension mismatch in distance query")
    ev = marginal.sup_value(sys, x, budget=sup_budget, seed=seed)
    if ev.residual <= FEASIBILITY_TOL:
        return 0.0
    feasible = solution_set_feasible_grid(sys, grid_per_axis, sup_budget, seed)
    if feasible.shape[0] == 0:
        return float("inf")
    return float(np.min(np.linalg.norm(feasible - x[None, :], axis=1)))


def one_sided_jacobi_svals(a: np.ndarray, tol: float = 1e-13,
                           max_sweeps: int = 60) -> np.ndarray:
    """Singular values of a via one-sided Jacobi column orthogonalization."""
    u = np.array(a, dtype=np.float64)
    if u.ndim != 2:
        raise ArgumentError("expected a matrix")
    ncols = u.shape[1]
    for _ in range(max_sweeps):
        rotated = False
        for p in range(ncols - 1):
            for q in range(p + 1, ncols):
                apq = float(u[:, p] @ u[:, q])
                app = float(u[:, p] @ u[:, p])
                aqq = float(u[:, q] @ u[:, q])
                if abs(apq) <= tol * math.sqrt(app * aqq) or apq == 0.0:
                    continue
                rotated = True
                tau = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(tau, 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                up = c * u[:, p] - s * u[:, q]
                uq = s * u[:, p] + c * u[:, q]
                u[:, p], u[:, q] = up, uq
        if not rotated:
            break
    svals = np.linalg.norm(u, axis=0)
    return np.sort(svals)[::-1]


def check_mfcq(Y: ParameterSetDescription, y, tol: float = MEMBERSHIP_TOL) -> CQCertificate:
    """Classical constraint qualification for an x-independent parameter set.

    Split test: the equality gradients must have full row rank (smallest
    singular value above tol), and after projecting out their span, the
    convex hull of the active inequality gradients must stay away from the
    origin.  The naive hull over +-grad h always contains 0, which is why
    equalities are handled by rank and only inequalities by min-norm.
    """
    if Y.depends_on_x:
        raise ArgumentError("check_mfcq requires x-independent constraints")
    x0 = np.zeros(Y.n_x)
    y = np.asarray(y, dtype=float).ravel()
    if not membership(Y, x0, y, tol):
        raise ArgumentError("y does not satisfy the parameter-set constraints at tol")
    if Y.r > ACTIVE_SET_CAP:
        raise ArgumentError(f"active-set enumeration is capped at r <= {ACTIVE_SET_CAP}")
    z = _stack(x0, y)
    g_grads, h_grads = Y.y_gradients()

    margins = []
    if Y.s > 0:
        jac = np.array([[dh.eval(z) for dh in row] for row in h_grads])
        svals = one_sided_jacobi_svals(jac.T)
        sigma_min = float(svals[-1]) if len(svals) else 0.0
        if Y.s > Y.m:
            sigma_min = 0.0  # more equalities than parameters cannot be full rank
        margins.append(sigma_min)

    active = [i for i, g in enumerate(Y.inequalities) if abs(g.eval(z)) <= tol]
    min_norm_value = None
    if active:
        grads = np.array([[dg.eval(z) for dg in g_grads[i]] for i in active])
        if Y.s > 0:
            jac = np.array([[dh.eval(z) for dh in row] for row in h_grads])
            q, _ = np.linalg.qr(jac.T)  # orthonormal basis of span{grad h}
            grads = grads - (grads @ q) @ q.T
        mnp = min_norm_point(grads, tol=1e-14)
        min_norm_value = float(np.linalg.norm(mnp))
        margins.append(min_norm_value)

    margin = min(margins) if margins else float("inf")
    return CQCertificate(
        holds=margin > tol,
        witness=min_norm_value,
        margin=margin,
        samples_used=1,
        tol=tol,
    )


def _degenerate_multiplier_combinations(Y: ParameterSetDescription, z, active):
    """Unit-1-norm (lambda, kappa) with lambda >= 0 annihilating the y-gradients.

    Enumerates lambda supports and kappa sign patterns (capped at
    2^r * 2^s combinations) and keeps null-space basis vectors whose
    components are nonnegative after sign resolution.
    """
    g_grads, h_grads = Y.y_gradients()
    if len(active) > 6 or Y.s > 6:
        raise ArgumentError("degenerate-cone enumeration is capped at r, s <= 6")
    found = []
    seen = set()
    for support in _subsets(active):
        for signs in itertools.product((1.0, -1.0), repeat=Y.s):
            cols = []
            for i in support:
                cols.append([dg.eval(z) for dg in g_grads[i]])
            for j in range(Y.s):
                cols.append([signs[j] * dh.eval(z) for dh in h_grads[j]])
            if not cols:
                continue
            mat = np.array(cols).T  # m x (|support| + s)
            null = _null_space(mat)
            for v in null:
                for cand in (v, -v):
                    if (cand < -1e-9).any():
                        continue
                    cand = np.clip(cand, 0.0, None)
                    total = float(np.abs(cand).sum())
                    if total <= 1e-9:
                        continue
                    cand = cand / total
                    lam = np.zeros(Y.r)
                    for pos, i in enumerate(support):
                        lam[i] = cand[pos]
                    kap = np.array(
                        [signs[j] * cand[len(support) + j] for j in range(Y.s)]
                    )
                    key = tuple(np.round(np.concatenate([lam, kap]), 9))
                    if key in seen:
                        continue
                    seen.add(key)
                    found.append((lam, kap))
    return found


def _subsets(items):
    items = list(items)
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


def _null_space(mat: np.ndarray, rtol: float = 1e-10):
    """Rows spanning the null space of mat (possibly empty)."""
    if mat.size == 0:
        return []
    u, svals, vt = np.linalg.svd(mat)
    cutoff = rtol * (svals[0] if len(svals) else 1.0)
    rank = int(np.sum(svals > max(cutoff, 1e-300)))
    return [vt[k] for k in range(rank, vt.shape[0])]


def check_mmfcq(sys: ParametricSystem, x_bar, argmax_points,
                tol: float = 1e-8) -> CQCertificate:
    """Marginal constraint qualification at x_bar relative to sampled maximizers.

    For each supplied maximizer, the degenerate multiplier cone (gamma = 0)
    is sampled through null-space enumeration; the images
    w = sum lambda_i grad_x g_i + sum kappa_j grad_x h_j must admit one
    direction xi with <w, xi> uniformly positive.  The LP
    max delta s.t. <w_k, xi> >= delta, |xi|_inf <= 1 certifies this on the
    collected w's.  With no degenerate multipliers at all the condition
    holds vacuously (margin +inf).
    """
    if not isinstance(sys.Y, ParameterSetDescription):
        raise ArgumentError("marginal CQ needs a semialgebraic parameter set")
    pts = [np.asarray(p[0] if isinstance(p, tuple) else p, dtype=float).ravel()
           for p in argmax_points]
    if not pts:
        raise ArgumentError("argmax_points must be nonempty")
    x_bar = np.asarray(x_bar, dtype=float).ravel()
    Y = sys.Y
    g_x, h_x = Y.x_gradients()
    ws = []
    for y in pts:
        if not membership(Y, x_bar, y, max(tol, MEMBERSHIP_TOL)):
            raise ArgumentError("an argmax point fails membership at x_bar")
        z = _stack(x_bar, y)
        active = [i for i, g in enumerate(Y.inequalities) if abs(g.eval(z)) <= tol]
        for lam, kap in _degenerate_multiplier_combinations(Y, z, active):
            w = np.zeros(sys.n)
            for i in range(Y.r):
                if lam[i]:
                    w += lam[i] * np.array([dg.eval(z) for dg in g_x[i]])
            for j in range(Y.s):
                if kap[j]:
                    w += kap[j] * np.array([dh.eval(z) for dh in h_x[j]])
            key = tuple(np.round(w, 10))
            if key not in {tuple(np.round(v, 10)) for v in ws}:
                ws.append(w)
    if not ws:
        return CQCertificate(
            holds=True, witness=None, margin=float("inf"),
            samples_used=len(pts), tol=tol,
        )
    from scipy.optimize import linprog

    n = sys.n
    # variables (xi, delta): maximize delta s.t. delta - <w_k, xi> <= 0
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-np.array(ws), np.ones((len(ws), 1))])
    b_ub = np.zeros(len(ws))
    bounds = [(-1.0, 1.0)] * n + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise ArgumentError(f"marginal-CQ linear program failed: {res.message}")
    delta = float(res.x[-1])
    xi = np.array(res.x[:n])
    return CQCertificate(
        holds=delta > tol,
        witness=xi,
        margin=delta,
        samples_used=len(pts),
        tol=tol,
    )


# -- system (de)serialization ------------------------------------------------


def system_from_dict(data: dict, path: str = "system") -> ParametricSystem:
    """Parse the system JSON schema, reporting the offending field on error."""
    if not isinstance(data, dict):
        raise SchemaError("expected a JSON object", path)
    for field in ("n", "m", "L", "d", "objectives", "Y", "x_box"):
        if field not in data:
            raise SchemaError(f"missing field '{field}'", f"{path}.{field}")
    try:
        n, m, L, d = (int(data[k]) for k in ("n", "m", "L", "d"))
    except (TypeError, ValueError):
        raise SchemaError("'n', 'm', 'L', 'd' must be integers", path) from None
    objectives = [
        Polynomial.from_dict(obj, f"{path}.objectives[{k}]")
        for k, obj in enumerate(data["objectives"])
    ]
    y_data = data["Y"]
    if not isinstance(y_data, dict):
        raise SchemaError("'Y' must be an object", f"{path}.Y")
    if "curve" in y_data:
        params = y_data.get("params", {})
        try:
            Y = curve_from_name(y_data["curve"], **params)
        except (ArgumentError, TypeError) as exc:
            raise SchemaError(str(exc), f"{path}.Y.curve") from None
    else:
        for field in ("ineq", "eq", "box"):
            if field not in y_data:
                raise SchemaError(f"missing field '{field}'", f"{path}.Y.{field}")
        ineq = [
            Polynomial.from_dict(g, f"{path}.Y.ineq[{k}]")
            for k, g in enumerate(y_data["ineq"])
        ]
        eq = [
            Polynomial.from_dict(h, f"{path}.Y.eq[{k}]")
            for k, h in enumerate(y_data["eq"])
        ]
        try:
            Y = ParameterSetDescription(n, m, ineq, eq, y_data["box"])
        except (ArgumentError, TypeError) as exc:
            raise SchemaError(str(exc), f"{path}.Y") from None
    try:
        return ParametricSystem(n, m, L, d, objectives, Y, data["x_box"])
    except (ArgumentError, TypeError) as exc:
        raise SchemaError(str(exc), path) from None


def system_to_dict(sys: ParametricSystem) -> dict:
    return sys.to_dict()
