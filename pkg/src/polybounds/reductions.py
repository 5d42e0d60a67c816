"""Constructive system transformations and the certificate polynomial.

Four reductions connect problem classes to the supremum-marginal form:

* `collapse_objectives` folds L objectives into one by interpolating the
  objective index with an extra pinned parameter;
* `pmi_to_scalar` turns a matrix inequality P(x) <= 0 into a scalar
  supremum over the unit sphere (Rayleigh quotient form);
* `socp_to_sup` rewrites norm-cone constraints as suprema over per-block
  spheres;
* `robustify_quadratic` reduces quadratic constraints under ellipsoidal
  coefficient uncertainty to the norm-cone form.

`build_certificate_polynomial` assembles the single polynomial whose
classical gradient inequality yields the slope inequality for the marginal
function: variable blocks are (x, n+1 copies of y, the objective weights,
squared-multiplier blocks, equality-multiplier blocks).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArgumentError, SchemaError
from .exponents import ExponentQuery
from .marginal import FJPoint
from .poly_core import MatrixPolynomial, Polynomial
from .semialg import ParameterSetDescription, ParametricSystem

PHI_DENOMINATOR_CAP = 10**9


# -- input specs for the SOCP and robust-quadratic routes --------------------


@dataclass(frozen=True)
class SOCPSpec:
    """Norm-cone constraints ||(f_1..f_m)(x)|| <= f_{m+1}(x), one block per l."""

    n: int
    m: int
    d: int
    blocks: tuple  # L blocks, each a tuple of m+1 polynomials in x

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.d < 1:
            raise ArgumentError("SOCPSpec needs n, m, d >= 1")
        if not self.blocks:
            raise ArgumentError("SOCPSpec needs at least one block")
        for k, block in enumerate(self.blocks):
            if len(block) != self.m + 1:
                raise ArgumentError(f"block {k} must hold m+1 = {self.m + 1} polynomials")
            for p in block:
                if not isinstance(p, Polynomial) or p.num_vars != self.n:
                    raise ArgumentError(f"block {k} entries must be polynomials in x")
                if p.degree() > self.d:
                    raise ArgumentError(
                        f"block {k} has degree {p.degree()} above the declared cap {self.d}"
                    )

    @property
    def L(self) -> int:
        return len(self.blocks)

    def to_dict(self) -> dict:
        names = [f"x{i + 1}" for i in range(self.n)]
        return {
            "n": self.n, "m": self.m, "d": self.d,
            "blocks": [[p.to_dict(names) for p in block] for block in self.blocks],
        }

    @classmethod
    def from_dict(cls, data: dict, path: str = "socp") -> "SOCPSpec":
        for field_ in ("n", "m", "d", "blocks"):
            if field_ not in data:
                raise SchemaError(f"missing field '{field_}'", f"{path}.{field_}")
        blocks = tuple(
            tuple(
                Polynomial.from_dict(p, f"{path}.blocks[{k}][{j}]")
                for j, p in enumerate(block)
            )
            for k, block in enumerate(data["blocks"])
        )
        try:
            return cls(int(data["n"]), int(data["m"]), int(data["d"]), blocks)
        except (ArgumentError, TypeError, ValueError) as exc:
            raise SchemaError(str(exc), path) from None


@dataclass(frozen=True)
class QuadForm:
    """x^T B x + b^T x + beta with exact rational data, B symmetric."""

    B: tuple    # tuple of tuples of Fraction
    b: tuple    # tuple of Fraction
    beta: Fraction

    def __post_init__(self):
        n = len(self.b)
        if len(self.B) != n or any(len(row) != n for row in self.B):
            raise ArgumentError("B must be square and match the length of b")
        for i in range(n):
            for j in range(n):
                if self.B[i][j] != self.B[j][i]:
                    raise ArgumentError("B must be symmetric")

    @property
    def n(self) -> int:
        return len(self.b)

    def polynomial(self) -> Polynomial:
        n = self.n
        terms = {}
        for i in range(n):
            for j in range(i, n):
                coeff = self.B[i][j] if i == j else self.B[i][j] + self.B[j][i]
                if coeff:
                    exp = [0] * n
                    exp[i] += 1
                    exp[j] += 1
                    terms[tuple(exp)] = terms.get(tuple(exp), Fraction(0)) + coeff
        for i in range(n):
            if self.b[i]:
                exp = [0] * n
                exp[i] = 1
                terms[tuple(exp)] = terms.get(tuple(exp), Fraction(0)) + self.b[i]
        if self.beta:
            terms[(0,) * n] = terms.get((0,) * n, Fraction(0)) + self.beta
        return Polynomial(n, terms)

    @classmethod
    def from_dict(cls, data: dict, path: str) -> "QuadForm":
        try:
            B = tuple(tuple(Fraction(str(v)) for v in row) for row in data["B"])
            b = tuple(Fraction(str(v)) for v in data["b"])
            beta = Fraction(str(data["beta"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad quadratic data ({exc})", path) from None
        return cls(B, b, beta)

    def to_dict(self) -> dict:
        return {
            "B": [[str(v) for v in row] for row in self.B],
            "b": [str(v) for v in self.b],
            "beta": str(self.beta),
        }


@dataclass(frozen=True)
class RobustQuadSpec:
    """Quadratic constraints with ellipsoidal coefficient uncertainty.

    Constraint l is nominal_l(x) + sum_j v_j * pert_{l,j}(x) <= 0 for every
    coefficient vector v in the unit ball; all constraints share the same
    number of perturbation directions s.
    """

    n: int
    nominals: tuple        # L quadratic forms
    perturbations: tuple   # L tuples of s quadratic forms

    def __post_init__(self):
        if not self.nominals:
            raise ArgumentError("need at least one constraint")
        if len(self.perturbations) != len(self.nominals):
            raise ArgumentError("one perturbation tuple per constraint is required")
        s = len(self.perturbations[0])
        if s < 1:
            raise ArgumentError("need at least one perturbation direction")
        for l, (nom, perts) in enumerate(zip(self.nominals, self.perturbations)):
            if nom.n != self.n:
                raise ArgumentError(f"constraint {l} nominal dimension mismatch")
            if len(perts) != s:
                raise ArgumentError("all constraints must share the same s")
            for p in perts:
                if p.n != self.n:
                    raise ArgumentError(f"constraint {l} perturbation dimension mismatch")

    @property
    def s(self) -> int:
        return len(self.perturbations[0])

    @property
    def L(self) -> int:
        return len(self.nominals)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "constraints": [
                {
                    "nominal": nom.to_dict(),
                    "perturbations": [p.to_dict() for p in perts],
                }
                for nom, perts in zip(self.nominals, self.perturbations)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, path: str = "robust") -> "RobustQuadSpec":
        if "n" not in data or "constraints" not in data:
            raise SchemaError("missing 'n' or 'constraints'", path)
        noms, perts = [], []
        for k, item in enumerate(data["constraints"]):
            where = f"{path}.constraints[{k}]"
            noms.append(QuadForm.from_dict(item.get("nominal", {}), f"{where}.nominal"))
            perts.append(tuple(
                QuadForm.from_dict(p, f"{where}.perturbations[{j}]")
                for j, p in enumerate(item.get("perturbations", []))
            ))
        try:
            return cls(int(data["n"]), tuple(noms), tuple(perts))
        except (ArgumentError, TypeError, ValueError) as exc:
            raise SchemaError(str(exc), path) from None


# -- reductions ---------------------------------------------------------------


def _lagrange_basis(l: int, L: int) -> Polynomial:
    """Degree L-1 polynomial in one variable taking 1 at l and 0 at other indices."""
    t = Polynomial.variable(0, 1)
    p = Polynomial.constant(1, 1)
    denom = Fraction(1)
    for j in range(1, L + 1):
        if j == l:
            continue
        p = p * (t - j)
        denom *= l - j
    return p * (Fraction(1) / denom)


def collapse_objectives(sys: ParametricSystem) -> ParametricSystem:
    """Fold L >= 2 objectives into one via interpolation over a pinned index.

    The parameter space gains one coordinate t, constrained by the degree-L
    equality prod(t - l) = 0 so feasible t values are exactly the objective
    indices; the single objective interpolates f_l at t = l.  Degree grows
    to at most d + L - 1.
    """
    if not isinstance(sys.Y, ParameterSetDescription):
        raise ArgumentError("collapse requires a semialgebraic parameter set")
    if sys.L < 2:
        raise ArgumentError("collapse_objectives needs L >= 2")
    n, m, L = sys.n, sys.m, sys.L
    nv_new = n + m + 1
    ident = list(range(n + m))
    t_index = n + m
    f_tilde = Polynomial.zero(nv_new)
    for l, f in enumerate(sys.objectives, start=1):
        basis = _lagrange_basis(l, L).embed(nv_new, [t_index])
        f_tilde = f_tilde + f.embed(nv_new, ident) * basis
    assert f_tilde.degree() <= sys.d + L - 1
    pin = Polynomial.constant(1, 1)
    t_var = Polynomial.variable(0, 1)
    for l in range(1, L + 1):
        pin = pin * (t_var - l)
    pin = pin.embed(nv_new, [t_index])
    new_Y = ParameterSetDescription(
        n, m + 1,
        [g.embed(nv_new, ident) for g in sys.Y.inequalities],
        [h.embed(nv_new, ident) for h in sys.Y.equalities] + [pin],
        list(sys.Y.box) + [(0.5, L + 0.5)],
    )
    return ParametricSystem(n, m + 1, 1, sys.d + L - 1, [f_tilde], new_Y, sys.x_box)


def pmi_to_scalar(P: MatrixPolynomial, x_box=None) -> ParametricSystem:
    """Scalarize the matrix inequality P(x) <= 0 as a sphere supremum.

    The objective is the quadratic form y^T P(x) y over the unit sphere
    ||y||^2 = 1, whose supremum is the largest eigenvalue of P(x); the
    resulting system has one objective, no inequalities, one equality, and
    degree deg(P) + 2.
    """
    n, msize = P.num_vars, P.size
    nv = n + msize
    ident = list(range(n))
    f = Polynomial.zero(nv)
    for i in range(msize):
        for j in range(i, msize):
            entry = P.entry(i, j)
            if entry.is_zero():
                continue
            exp = [0] * nv
            exp[n + i] += 1
            exp[n + j] += 1
            mono = Polynomial(nv, {tuple(exp): Fraction(1 if i == j else 2)})
            f = f + entry.embed(nv, ident) * mono
    degree = P.degree() + 2
    assert f.is_zero() or f.degree() == degree
    sphere = Polynomial(
        nv, {tuple(0 if k != n + i else 2 for k in range(nv)): Fraction(1)
             for i in range(msize)},
    ) - 1
    Y = ParameterSetDescription(n, msize, [], [sphere], [(-1.1, 1.1)] * msize)
    if x_box is None:
        x_box = [(-2.0, 2.0)] * n
    out = ParametricSystem(n, msize, 1, degree, [f], Y, x_box)
    out.audit_query = ExponentQuery("PMI_4_6", n=n, m=msize, d=max(P.degree(), 1))
    return out


def socp_to_sup(spec: SOCPSpec, x_box=None) -> ParametricSystem:
    """Rewrite norm-cone constraints as suprema over per-block unit spheres.

    Block l becomes the objective sum_j y_j^(l) f_j^(l)(x) - f_{m+1}^(l)(x)
    over the sphere ||y^(l)||^2 = 1; the parameter space has dimension m*L
    with L sphere equalities and degree at most d + 1.
    """
    n, m, L = spec.n, spec.m, spec.L
    nv = n + m * L
    ident = list(range(n))
    objectives = []
    equalities = []
    for l, block in enumerate(spec.blocks):
        f_l = -block[m].embed(nv, ident)
        for j in range(m):
            y_idx = n + l * m + j
            f_l = f_l + block[j].embed(nv, ident) * Polynomial.variable(y_idx, nv)
        assert f_l.degree() <= spec.d + 1
        objectives.append(f_l)
        sphere_terms = {}
        for j in range(m):
            exp = [0] * nv
            exp[n + l * m + j] = 2
            sphere_terms[tuple(exp)] = Fraction(1)
        equalities.append(Polynomial(nv, sphere_terms) - 1)
    Y = ParameterSetDescription(n, m * L, [], equalities, [(-1.1, 1.1)] * (m * L))
    if x_box is None:
        x_box = [(-2.0, 2.0)] * n
    out = ParametricSystem(n, m * L, L, spec.d + 1, objectives, Y, x_box)
    out.audit_query = ExponentQuery("SOCP_5_3", n=n, m=m, d=spec.d, L=L)
    return out


def robustify_quadratic(spec: RobustQuadSpec) -> SOCPSpec:
    """Reduce ellipsoidal-uncertainty quadratic constraints to norm-cone form.

    The worst case over the coefficient ball is the nominal value plus the
    Euclidean norm of the perturbation quadratics, so robust feasibility of
    constraint l is ||(pert_1(x), .., pert_s(x))|| <= -nominal(x).
    """
    blocks = []
    for nom, perts in zip(spec.nominals, spec.perturbations):
        entries = [p.polynomial() for p in perts]
        entries.append(-nom.polynomial())
        blocks.append(tuple(entries))
    degree = max(max(p.degree() for p in block) for block in blocks)
    return SOCPSpec(n=spec.n, m=spec.s, d=max(degree, 1), blocks=tuple(blocks))


# -- certificate polynomial ---------------------------------------------------


@dataclass(frozen=True)
class CertificateLayout:
    """Variable slices of the certificate polynomial's space."""

    n: int
    m: int
    r: int
    s: int

    @property
    def num_vars(self) -> int:
        n, m, r, s = self.n, self.m, self.r, self.s
        return 2 * n + (m + r + s) * (n + 1)

    def y_block(self, q: int) -> range:
        start = self.n + q * self.m
        return range(start, start + self.m)

    def gamma_index(self, q: int) -> int:
        if not 0 <= q < self.n:
            raise ArgumentError("only the first n objective weights are variables")
        return self.n + (self.n + 1) * self.m + q

    def mu_block(self, q: int) -> range:
        start = self.n + (self.n + 1) * self.m + self.n + q * self.r
        return range(start, start + self.r)

    def kappa_block(self, q: int) -> range:
        start = (
            self.n + (self.n + 1) * self.m + self.n
            + (self.n + 1) * self.r + q * self.s
        )
        return range(start, start + self.s)


@dataclass(frozen=True)
class CertificatePolynomial:
    """The assembled certificate with its layout and value-shift metadata."""

    poly: Polynomial
    layout: CertificateLayout
    phi_shift: Fraction      # rational stand-in for the supremum value at the anchor
    phi_shift_error: float   # |float phi - rational stand-in|

    @property
    def num_vars(self) -> int:
        return self.layout.num_vars


def build_certificate_polynomial(sys: ParametricSystem, x_bar, phi_bar: float,
                                 ) -> CertificatePolynomial:
    """Assemble the gradient-inequality certificate for a single-objective system.

    Variable order is (x, y-blocks, objective weights, squared-multiplier
    blocks, equality-multiplier blocks); the last of the n+1 blocks carries
    objective weight 1 - sum of the others.  The supremum value at the
    anchor enters as a rational approximation (denominator capped at 1e9)
    so the result stays a rational-coefficient polynomial; the approximation
    error is reported alongside.
    """
    if not isinstance(sys.Y, ParameterSetDescription):
        raise ArgumentError("the certificate needs a semialgebraic parameter set")
    if sys.L != 1:
        raise ArgumentError("certificate construction requires L = 1; collapse first")
    n, m, r, s = sys.n, sys.m, sys.r, sys.s
    layout = CertificateLayout(n=n, m=m, r=r, s=s)
    nv = layout.num_vars
    f = sys.objectives[0]
    gs, hs = sys.Y.inequalities, sys.Y.equalities

    gamma_vars = [Polynomial.variable(layout.gamma_index(q), nv) for q in range(n)]
    last_gamma = Polynomial.constant(1, nv)
    for gv in gamma_vars:
        last_gamma = last_gamma - gv

    total = Polynomial.zero(nv)
    for q in range(n + 1):
        var_map = list(range(n)) + list(layout.y_block(q))
        f_q = f.embed(nv, var_map)
        gamma_q = gamma_vars[q] if q < n else last_gamma
        block = -(gamma_q * f_q)
        for i, g in enumerate(gs):
            mu = Polynomial.variable(layout.mu_block(q)[i], nv)
            block = block + mu * mu * g.embed(nv, var_map)
        for j, h in enumerate(hs):
            kappa = Polynomial.variable(layout.kappa_block(q)[j], nv)
            block = block + kappa * h.embed(nv, var_map)
        total = total + block

    phi_frac = Fraction(float(phi_bar)).limit_denominator(PHI_DENOMINATOR_CAP)
    total = total + Polynomial.constant(phi_frac, nv)
    cap = sys.d + 2 if r > 0 else sys.d + 1
    assert total.degree() <= cap
    return CertificatePolynomial(
        poly=total,
        layout=layout,
        phi_shift=phi_frac,
        phi_shift_error=abs(float(phi_bar) - float(phi_frac)),
    )


def certificate_anchor_point(cert: CertificatePolynomial, x_bar, y_star,
                             fj: FJPoint) -> np.ndarray:
    """A canonical point where the certificate vanishes and is stationary.

    All n+1 parameter blocks take the same maximizer; the multiplier tuple
    is split evenly so each block carries objective weight 1/(n+1).
    Requires a multiplier tuple with positive objective weight.
    """
    lay = cert.layout
    if fj.gamma <= 0:
        raise ArgumentError("anchor construction needs gamma > 0")
    x_bar = np.asarray(x_bar, dtype=float).ravel()
    y_star = np.asarray(y_star, dtype=float).ravel()
    if len(x_bar) != lay.n or len(y_star) != lay.m:
        raise ArgumentError("anchor dimensions disagree with the layout")
    scale = 1.0 / ((lay.n + 1) * fj.gamma)
    point = np.zeros(lay.num_vars)
    point[: lay.n] = x_bar
    for q in range(lay.n + 1):
        point[list(lay.y_block(q))] = y_star
        for i in range(lay.r):
            point[lay.mu_block(q)[i]] = np.sqrt(max(fj.lam[i] * scale, 0.0))
        for j in range(lay.s):
            point[lay.kappa_block(q)[j]] = fj.kappa[j] * scale
    for q in range(lay.n):
        point[lay.gamma_index(q)] = 1.0 / (lay.n + 1)
    return point


# -- exponent bookkeeping audits ----------------------------------------------


def collapse_audit(n: int, m: int, r: int, s: int, d: int, L: int):
    """Queries before/after objective collapse; both must give equal exponents."""
    return (
        ExponentQuery("EB_4_2", n=n, m=m, r=r, s=s, d=d, L=L),
        ExponentQuery("EB_4_2", n=n, m=m + 1, r=r, s=s + 1, d=d + L - 1, L=1),
    )


def pmi_scalar_audit(n: int, msize: int, d: int):
    """Matrix-inequality bound vs. the scalarized system's equality-only bound."""
    return (
        ExponentQuery("PMI_4_6", n=n, m=msize, d=d),
        ExponentQuery("EB_EQ_4_3", n=n, m=msize, r=0, s=1, d=d + 2, L=1),
    )


def pmi_stability_audit(n: int, msize: int, d: int):
    """Matrix-inequality stability bound vs. the scalarized tilt-stability bound."""
    return (
        ExponentQuery("PMI_STAB_5_2", n=n, m=msize, d=d),
        ExponentQuery("GSIP_SHARP_5_2R", n=n, m=msize, r=0, s=1, d=d + 2, L=1),
    )


def socp_audit(n: int, m: int, d: int, L: int):
    """Norm-cone stability bound vs. the sphere-system equality-only bound."""
    return (
        ExponentQuery("SOCP_5_3", n=n, m=m, d=d, L=L),
        ExponentQuery("GSIP_SHARP_5_2R", n=n, m=m * L, r=0, s=L, d=d, L=L),
    )
