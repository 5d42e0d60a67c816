"""Parametric-curve index sets.

These describe a parameter set as the trace of a smooth curve
t -> (y_1(t), ..., y_m(t)) over a compact interval.  They exist for index
sets that are *not* cut out by polynomial equalities/inequalities, and are
deliberately quarantined from the semialgebraic machinery: only supremum
evaluation is supported, no multipliers, hulls or constraint
qualifications.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError


class ParametricCurveSet:
    """Index set traced by a vectorized map t -> R^m on [t_lo, t_hi].

    `curve(ts)` must accept a 1-d array and return an array of shape
    (len(ts), m).  Supremum evaluation samples `grid_points` parameter
    values and refines the best one by golden-section search.
    """

    def __init__(self, m: int, curve, t_lo: float, t_hi: float,
                 grid_points: int = 10_000, name: str = "curve"):
        if m < 1:
            raise ArgumentError("curve dimension m must be >= 1")
        if not t_lo < t_hi:
            raise ArgumentError("need t_lo < t_hi")
        self.m = m
        self.curve = curve
        self.t_lo = float(t_lo)
        self.t_hi = float(t_hi)
        self.grid_points = int(grid_points)
        self.name = name
        self._grid_cache = None

    def grid(self):
        """Cached (ts, ys) dense sampling of the curve."""
        if self._grid_cache is None:
            ts = np.linspace(self.t_lo, self.t_hi, self.grid_points)
            ys = np.asarray(self.curve(ts), dtype=np.float64)
            if ys.shape != (len(ts), self.m):
                raise ArgumentError(
                    f"curve map returned shape {ys.shape}, expected ({len(ts)}, {self.m})"
                )
            self._grid_cache = (ts, ys)
        return self._grid_cache

    def supremum(self, objective, refine_width: float = 1e-12):
        """Maximize `objective(points)` over the curve.

        `objective` maps an (k, m) array of curve points to k values.
        Returns (value, y_at_max, t_at_max) after golden-section refinement
        of the best grid bracket.
        """
        ts, ys = self.grid()
        vals = np.asarray(objective(ys), dtype=np.float64)
        best = int(np.argmax(vals))
        lo = ts[max(best - 1, 0)]
        hi = ts[min(best + 1, len(ts) - 1)]

        def value_at(t: float) -> float:
            return float(objective(np.asarray(self.curve(np.array([t])))))

        t_star, v_star = _golden_max(value_at, lo, hi, refine_width)
        if v_star < vals[best]:  # refinement never loses to the raw grid
            t_star, v_star = float(ts[best]), float(vals[best])
        y_star = np.asarray(self.curve(np.array([t_star])))[0]
        return v_star, y_star, t_star


def _golden_max(f, lo: float, hi: float, width: float):
    """Golden-section maximization of a unimodal-on-bracket function."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > width:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)


def _flat_bump(ts: np.ndarray) -> np.ndarray:
    """exp(-1/t^2) extended by 0 at t = 0; infinitely flat at the origin."""
    out = np.zeros_like(ts)
    mask = np.abs(ts) > 1e-2  # below this the double underflows to 0 anyway
    tm = ts[mask]
    out[mask] = np.exp(-1.0 / (tm * tm))
    return out


def _flat_bump_derivative(ts: np.ndarray) -> np.ndarray:
    out = np.zeros_like(ts)
    mask = np.abs(ts) > 1e-2
    tm = ts[mask]
    out[mask] = 2.0 * np.exp(-1.0 / (tm * tm)) / (tm * tm * tm)
    return out


def flat_bump_tangent_curve(t_half_width: float = 0.75,
                            grid_points: int = 10_000) -> ParametricCurveSet:
    """Tangent-line data of the flat bump: t -> (b'(t), b(t) - t*b'(t)).

    With b(t) = exp(-1/t^2), maximizing x*y1 + y2 over this curve recovers
    b(x) for |x| <= t_half_width: the curve point at parameter t contributes
    the value of the tangent line of b at t, evaluated at x, and b is convex
    on the chosen interval (b'' >= 0 requires |t| <= sqrt(2/3) ~ 0.816).
    This is the canonical smooth-but-not-semialgebraic index set on which
    Holder error bounds fail for every positive exponent.
    """
    if not 0 < t_half_width <= 0.8165:
        raise ArgumentError("t_half_width must lie in (0, 0.8165] for convexity")

    def curve(ts: np.ndarray) -> np.ndarray:
        b = _flat_bump(ts)
        db = _flat_bump_derivative(ts)
        return np.column_stack([db, b - ts * db])

    return ParametricCurveSet(
        2, curve, -t_half_width, t_half_width,
        grid_points=grid_points, name="flat_bump_tangent",
    )


# Registered curve builders, addressable from system files by name.
CURVE_REGISTRY = {
    "flat_bump_tangent": flat_bump_tangent_curve,
}


def curve_from_name(name: str, **kwargs) -> ParametricCurveSet:
    if name not in CURVE_REGISTRY:
        raise ArgumentError(
            f"unknown curve {name!r}; known: {', '.join(sorted(CURVE_REGISTRY))}"
        )
    return CURVE_REGISTRY[name](**kwargs)
