"""Cyclic projections onto convex sets with polynomial descriptions.

Supported set variants: halfspaces and balls (closed-form projections),
sublevel sets of declared-convex polynomials, and matrix-inequality sets
scalarized through the largest eigenvalue.  The latter two project by a
damped Newton iteration on the projection optimality system; convexity of
user-declared sets is spot-checked by midpoint sampling, never proven, and
runs carry that badge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ArgumentError, SolverError
from .exponents import ExponentQuery, exponent_for
from .fitting import RateFit, Trajectory, fit_rate, loglog_fit
from .poly_core import MatrixPolynomial, Polynomial, jacobi_eigh

NEWTON_MAX_ITER = 500
EIGEN_TIE_TOL = 1e-10


class ConvexSet:
    """Base for projectable convex set descriptions."""

    needs_convexity_check = False

    def project(self, x0, tol: float = 1e-12) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x0, tol: float = 1e-12) -> float:
        x0 = np.asarray(x0, dtype=float).ravel()
        return float(np.linalg.norm(x0 - self.project(x0, tol)))

    # (block size, entry degree) of a matrix-inequality representation,
    # used for theoretical-rate bookkeeping
    def pmi_dims(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Halfspace(ConvexSet):
    """{x : <a, x> <= b}"""

    a: tuple
    b: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or not a.any():
            raise ArgumentError("halfspace normal must be a nonzero vector")
        object.__setattr__(self, "a", tuple(float(v) for v in a))
        object.__setattr__(self, "b", float(self.b))

    def project(self, x0, tol: float = 1e-12) -> np.ndarray:
        a = np.asarray(self.a)
        x0 = np.asarray(x0, dtype=float).ravel()
        excess = float(a @ x0 - self.b)
        if excess <= 0:
            return x0.copy()
        return x0 - (excess / float(a @ a)) * a

    def pmi_dims(self):
        return 1, 1

    def to_dict(self):
        return {"kind": "halfspace", "a": list(self.a), "b": self.b}


@dataclass(frozen=True)
class Ball(ConvexSet):
    """{x : ||x - center|| <= radius}"""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ArgumentError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def project(self, x0, tol: float = 1e-12) -> np.ndarray:
        c = np.asarray(self.center)
        x0 = np.asarray(x0, dtype=float).ravel()
        gap = x0 - c
        dist = float(np.linalg.norm(gap))
        if dist <= self.radius:
            return x0.copy()
        return c + (self.radius / dist) * gap

    def pmi_dims(self):
        return 1, 2

    def to_dict(self):
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}


class SublevelSet(ConvexSet):
    """{x : g(x) <= 0} for a polynomial g the caller declares convex."""

    needs_convexity_check = True

    def __init__(self, g: Polynomial):
        if not isinstance(g, Polynomial):
            raise ArgumentError("sublevel set needs a Polynomial")
        self.g = g
        self._grad = g.gradient()
        self._hess = [gi.gradient() for gi in self._grad]

    def scalarization(self, x):
        z = np.asarray(x, dtype=float).ravel()
        val = self.g.eval(z)
        grad = np.array([gi.eval(z) for gi in self._grad])
        hess = np.array([[gij.eval(z) for gij in row] for row in self._hess])
        return val, grad, hess

    def project(self, x0, tol: float = 1e-12) -> np.ndarray:
        return _kkt_projection(self.scalarization, x0, tol)

    def pmi_dims(self):
        return 1, max(self.g.degree(), 1)

    def __eq__(self, other):
        return isinstance(other, SublevelSet) and self.g == other.g

    def to_dict(self):
        return {"kind": "sublevel", "g": self.g.to_dict()}


class PMISet(ConvexSet):
    """{x : P(x) <= 0 in the matrix order}, scalarized by the top eigenvalue.

    The set must actually be convex; since the scalarization can be
    nonconvex even then, construction requires the caller's explicit
    convexity flag, which is recorded (and spot-checked) rather than
    trusted silently.
    """

    needs_convexity_check = True

    def __init__(self, P: MatrixPolynomial, convex: bool = False):
        if not isinstance(P, MatrixPolynomial):
            raise ArgumentError("PMI set needs a MatrixPolynomial")
        if not convex:
            raise ArgumentError(
                "PMI sets are accepted only with the user convexity flag set"
            )
        self.P = P
        self._entry_grads = {}
        self._entry_hess = {}
        for i in range(P.size):
            for j in range(i, P.size):
                entry = P.entry(i, j)
                grad = entry.gradient()
                self._entry_grads[(i, j)] = grad
                self._entry_hess[(i, j)] = [gi.gradient() for gi in grad]

    def scalarization(self, x):
        """(lambda_max(P(x)), subgradient, curvature) at x.

        Uses the top eigenvector; eigenvalues tied within 1e-10 have their
        eigenvector contributions averaged for deterministic tie-breaking.
        """
        z = np.asarray(x, dtype=float).ravel()
        vals, vecs = jacobi_eigh(self.P.eval_matrix(z))
        tied = [k for k in range(len(vals)) if vals[0] - vals[k] <= EIGEN_TIE_TOL]
        n = self.P.num_vars
        grad = np.zeros(n)
        hess = np.zeros((n, n))
        for k in tied:
            v = vecs[:, k]
            for (i, j), gpolys in self._entry_grads.items():
                w = v[i] * v[j] * (1.0 if i == j else 2.0)
                if w == 0.0:
                    continue
                grad_entry = np.array([gp.eval(z) for gp in gpolys])
                grad += w * grad_entry
                hrows = self._entry_hess[(i, j)]
                hess += w * np.array([[hp.eval(z) for hp in row] for row in hrows])
        grad /= len(tied)
        hess /= len(tied)
        return float(vals[0]), grad, hess

    def project(self, x0, tol: float = 1e-12) -> np.ndarray:
        return _kkt_projection(self.scalarization, x0, tol)

    def pmi_dims(self):
        return self.P.size, max(self.P.degree(), 1)

    def __eq__(self, other):
        return isinstance(other, PMISet) and self.P == other.P

    def to_dict(self):
        return {"kind": "pmi", "P": self.P.to_dict(), "convex": True}


def _kkt_projection(scalarization, x0, tol: float):
    """Nearest point of {g <= 0} from x0 via damped Newton on the optimality system.

    Unknowns (x, mu) solve x - x0 + mu * grad g(x) = 0, g(x) = 0; feasible
    starting points return immediately.  Non-convergence within 500
    iterations raises SolverError carrying the final residual.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    if tol <= 0:
        raise ArgumentError("tol must be positive")
    val, grad, _ = scalarization(x0)
    if val <= tol:
        return x0.copy()
    gg = float(grad @ grad)
    mu = val / gg if gg > 0 else 1.0
    x = x0 - mu * grad
    n = len(x0)

    def residual(x, mu):
        val, grad, hess = scalarization(x)
        F = np.concatenate([x - x0 + mu * grad, [val]])
        return F, grad, hess

    F, grad, hess = residual(x, mu)
    for _ in range(NEWTON_MAX_ITER):
        nrm = float(np.linalg.norm(F, ord=np.inf))
        if nrm <= tol:
            return x
        jac = np.zeros((n + 1, n + 1))
        jac[:n, :n] = np.eye(n) + mu * hess
        jac[:n, n] = grad
        jac[n, :n] = grad
        try:
            step = np.linalg.solve(jac, -F)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, -F, rcond=None)
        merit = float(F @ F)
        t = 1.0
        for _bt in range(40):
            x_new = x + t * step[:n]
            mu_new = max(mu + t * step[n], 0.0)
            F_new, grad_new, hess_new = residual(x_new, mu_new)
            if float(F_new @ F_new) <= merit * (1.0 - 1e-4 * t) + 1e-300:
                x, mu = x_new, mu_new
                F, grad, hess = F_new, grad_new, hess_new
                break
            t *= 0.5
        else:
            break
    nrm = float(np.linalg.norm(F, ord=np.inf))
    if nrm <= tol:
        return x
    raise SolverError(
        f"projection Newton stalled: residual {nrm:.3e} after {NEWTON_MAX_ITER} iterations"
    )


def project(C: ConvexSet, x0, tol: float = 1e-12) -> np.ndarray:
    """Euclidean projection of x0 onto C (already-feasible points pass through)."""
    if not isinstance(C, ConvexSet):
        raise ArgumentError("expected a convex set description")
    return C.project(x0, tol)


def spot_check_convexity(C: ConvexSet, x0, seed: int = 0, pairs: int = 500) -> bool:
    """Midpoint quasiconvexity sampling of the set's scalarization.

    Draws point pairs around x0 and checks g((u+v)/2) <= max(g(u), g(v)) +
    1e-8.  A sampled statement only; reports carry it as a badge.
    """
    if not C.needs_convexity_check:
        return True
    x0 = np.asarray(x0, dtype=float).ravel()
    radius = max(1.0, 2.0 * (float(np.linalg.norm(x0)) + 1.0))
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, 0x5e7))))
    for _ in range(pairs):
        u = x0 + radius * (2.0 * gen.random(len(x0)) - 1.0)
        v = x0 + radius * (2.0 * gen.random(len(x0)) - 1.0)
        gu = C.scalarization(u)[0]
        gv = C.scalarization(v)[0]
        gm = C.scalarization(0.5 * (u + v))[0]
        if gm > max(gu, gv) + 1e-8:
            return False
    return True


@dataclass
class CyclicRun:
    """Record of one cyclic-projection run with rate instrumentation."""

    trajectory: Trajectory
    x_inf: np.ndarray
    set_distances: np.ndarray          # (sweeps, L) end-of-sweep distances
    fitted: RateFit | None
    rho_theory: Fraction
    rho_report: object
    converged: bool
    convexity_badges: tuple
    fejer_max_increase: float
    sweeps_run: int

    @property
    def rho_emp(self):
        return self.fitted.rho if self.fitted is not None else None


def theoretical_cycle_rate(sets, n: int):
    """Guaranteed power-law rate exponent for this collection of sets."""
    m = max(C.pmi_dims()[0] for C in sets)
    d = max(C.pmi_dims()[1] for C in sets)
    return exponent_for(
        ExponentQuery("CYCLIC_6_3", n=n, m=m, d=d, L=len(sets))
    )


def cyclic_project(sets, x0, sweeps: int, tol: float = 1e-12,
                   record: bool = True, proj_tol: float = 1e-12,
                   burn_down_factor: int = 10, seed: int = 0) -> CyclicRun:
    """Round-robin projections onto `sets` with end-of-sweep instrumentation.

    Stops early once the summed distances to all sets fall to `tol`.  The
    limit estimate x_inf comes from a burn-down continuation (default 10x
    the recorded sweeps) rather than a known true limit; the fitted power
    law is measured against it, next to the guaranteed theoretical rate.
    """
    sets = list(sets)
    if not sets:
        raise ArgumentError("need at least one set")
    if sweeps < 1:
        raise ArgumentError("sweeps must be >= 1")
    x = np.asarray(x0, dtype=float).ravel()
    n = len(x)
    badges = tuple(
        "convexity spot-checked" if C.needs_convexity_check and
        spot_check_convexity(C, x, seed=seed) else
        ("convexity spot-check FAILED" if C.needs_convexity_check else "closed form")
        for C in sets
    )

    points, dists_table = [], []
    converged = False
    sweeps_run = 0
    for sweep in range(1, sweeps + 1):
        for l, C in enumerate(sets):
            try:
                x = C.project(x, proj_tol)
            except SolverError as exc:
                raise SolverError(f"sweep {sweep}, set {l}: {exc}") from exc
        dists = np.array([C.distance(x, proj_tol) for C in sets])
        sweeps_run = sweep
        if record:
            points.append(x.copy())
            dists_table.append(dists)
        if float(dists.sum()) <= tol:
            converged = True
            break

    x_inf = x.copy()
    for _ in range(burn_down_factor * sweeps_run):
        for C in sets:
            x_inf = C.project(x_inf, proj_tol)
        if sum(C.distance(x_inf, proj_tol) for C in sets) <= tol:
            break

    points_arr = np.array(points) if points else np.zeros((0, n))
    dists_arr = np.array(dists_table) if dists_table else np.zeros((0, len(sets)))
    traj = Trajectory(
        times=np.arange(1, len(points_arr) + 1, dtype=float),
        points=points_arr,
        annotations={
            "set_distances": dists_arr,
            "sum_distance": dists_arr.sum(axis=1) if dists_arr.size else np.zeros(0),
        },
    )
    fitted = fit_rate(traj, x_inf) if len(traj) >= 10 else None
    rho_report = theoretical_cycle_rate(sets, n)
    fejer = 0.0
    if len(points_arr) >= 2:
        d_seq = np.linalg.norm(points_arr - x_inf[None, :], axis=1)
        fejer = float(np.max(np.diff(d_seq))) if len(d_seq) > 1 else 0.0
    return CyclicRun(
        trajectory=traj,
        x_inf=x_inf,
        set_distances=dists_arr,
        fitted=fitted,
        rho_theory=rho_report.exponent,
        rho_report=rho_report,
        converged=converged,
        convexity_badges=badges,
        fejer_max_increase=fejer,
        sweeps_run=sweeps_run,
    )


def _dykstra_nearest(sets, x, cycles: int = 400, tol: float = 1e-12):
    """Dykstra's corrected cyclic scheme: converges to the true projection."""
    z = np.asarray(x, dtype=float).ravel()
    increments = [np.zeros_like(z) for _ in sets]
    for _ in range(cycles):
        z_prev = z.copy()
        for l, C in enumerate(sets):
            w = z + increments[l]
            z_new = C.project(w, tol)
            increments[l] = w - z_new
            z = z_new
        if np.linalg.norm(z - z_prev) <= 1e-14:
            break
    return z


@dataclass
class HolderIntersectionReport:
    """Sampled Holder regularity of an intersection of convex sets."""

    table: np.ndarray        # rows (dist_to_intersection, sum_of_set_distances)
    samples: np.ndarray
    c0: float | None
    tau_emp: float | None
    tau_theory: Fraction
    verdict: bool
    degenerate: bool
    per_tau_constants: dict  # candidate exponent -> worst-case constant


def check_intersection_holder(sets, samples, tau_grid=(1.0, 0.5, 0.25),
                              slack: float = 0.05, proj_tol: float = 1e-12,
                              ) -> HolderIntersectionReport:
    """Fit dist(x, C) ~ c0 * (sum_l dist(x, C_l))^tau over sample points.

    Distances to the intersection are estimated by a projection
    composition refined by Dykstra's scheme (a local-search polish toward
    the true nearest point).  The theoretical exponent assembled from the
    sets' descriptions must lower-bound the fitted one up to `slack`.
    """
    sets = list(sets)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    n = samples.shape[1]
    rows = []
    for x in samples:
        sum_d = sum(C.distance(x, proj_tol) for C in sets)
        z_cyc = x.copy()
        for _ in range(800):
            for C in sets:
                z_cyc = C.project(z_cyc, proj_tol)
            if sum(C.distance(z_cyc, proj_tol) for C in sets) <= 1e-11:
                break
        z_dyk = _dykstra_nearest(sets, x)
        for C in sets:  # final feasibility polish of the Dykstra point
            z_dyk = C.project(z_dyk, proj_tol)
        dist_c = min(np.linalg.norm(x - z_cyc), np.linalg.norm(x - z_dyk))
        rows.append((float(dist_c), float(sum_d)))
    table = np.array(rows)

    mask = (table[:, 0] > 1e-12) & (table[:, 1] > 1e-12)
    tau_theory = Fraction(
        1, _cycle_kernel_value(sets, n)
    )
    per_tau = {}
    for tau in tau_grid:
        vals = table[mask, 0] / table[mask, 1] ** tau if mask.any() else np.zeros(0)
        per_tau[float(tau)] = float(vals.max()) if vals.size else None
    if mask.sum() < 3:
        return HolderIntersectionReport(
            table=table, samples=samples, c0=None, tau_emp=None,
            tau_theory=tau_theory, verdict=True, degenerate=True,
            per_tau_constants=per_tau,
        )
    tau_emp, log_c0 = loglog_fit(table[mask, 1], table[mask, 0])
    verdict = float(tau_theory) <= tau_emp + slack
    return HolderIntersectionReport(
        table=table, samples=samples, c0=float(np.exp(log_c0)),
        tau_emp=float(tau_emp), tau_theory=tau_theory, verdict=verdict,
        degenerate=False, per_tau_constants=per_tau,
    )


def _cycle_kernel_value(sets, n: int) -> int:
    from .exponents import calc_R

    m = max(C.pmi_dims()[0] for C in sets)
    d = max(C.pmi_dims()[1] for C in sets)
    return calc_R(2 * n + (m + 3) * (n + 1), d + len(sets))


# re-exported here because rate fitting belongs to this module's public API
__all__ = [
    "ConvexSet", "Halfspace", "Ball", "SublevelSet", "PMISet",
    "project", "cyclic_project", "check_intersection_holder",
    "fit_rate", "Trajectory", "RateFit", "CyclicRun",
    "HolderIntersectionReport", "spot_check_convexity",
    "theoretical_cycle_rate",
]
