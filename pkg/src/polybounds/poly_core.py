"""Exact sparse multivariate polynomials and symmetric matrix kernels.

Polynomials are stored as a map from exponent tuples to rational
coefficients (``fractions.Fraction``), so construction, arithmetic,
differentiation and serialization are exact.  Point evaluation is done in
double precision.  Symmetric matrices of evaluated matrix polynomials are
diagonalized with a cyclic Jacobi sweep, which is deterministic and
dependency-free and entirely adequate for the matrix sizes this package
targets (m <= 50).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import ArgumentError, SchemaError, SolverError

Exponent = tuple  # tuple[int, ...], one entry per variable


def _as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, floats and 'p/q' strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # exact binary expansion of the double
    raise ArgumentError(f"cannot interpret {value!r} as a rational coefficient")


class Polynomial:
    """Sparse multivariate polynomial with exact rational coefficients.

    Terms with zero coefficient are never stored.  Instances are immutable;
    every operation returns a new polynomial, so sharing between threads is
    safe.
    """

    __slots__ = ("num_vars", "_terms", "_float_view", "_hash")

    def __init__(self, num_vars: int, terms=None):
        if num_vars < 0:
            raise ArgumentError("num_vars must be nonnegative")
        clean = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars or any(e < 0 for e in exp):
                raise ArgumentError(f"bad exponent tuple {exp} for {num_vars} variables")
            c = _as_fraction(coeff)
            if c != 0:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "_terms", {e: c for e, c in clean.items() if c != 0})
        object.__setattr__(self, "_float_view", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars, {})

    @classmethod
    def constant(cls, value, num_vars: int) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: _as_fraction(value)})

    @classmethod
    def variable(cls, index: int, num_vars: int) -> "Polynomial":
        if not 0 <= index < num_vars:
            raise ArgumentError(f"variable index {index} out of range for {num_vars} vars")
        exp = [0] * num_vars
        exp[index] = 1
        return cls(num_vars, {tuple(exp): Fraction(1)})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self):
        """Mapping exponent-tuple -> Fraction (do not mutate)."""
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0 by convention."""
        if not self._terms:
            return 0
        return max(sum(exp) for exp in self._terms)

    def degree_in(self, indices) -> int:
        """Max combined degree over the given variable indices."""
        if not self._terms:
            return 0
        idx = tuple(indices)
        return max(sum(exp[i] for i in idx) for exp in self._terms)

    def depends_on(self, index: int) -> bool:
        return any(exp[index] > 0 for exp in self._terms)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise ArgumentError("polynomials live in different variable spaces")
            return other
        return Polynomial.constant(other, self.num_vars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for exp, c in other._terms.items():
            out[exp] = out.get(exp, Fraction(0)) + c
        return Polynomial(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                out[exp] = out.get(exp, Fraction(0)) + c1 * c2
        return Polynomial(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ArgumentError("negative polynomial powers are not defined")
        result = Polynomial.constant(1, self.num_vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.num_vars == other.num_vars
            and self._terms == other._terms
        )

    def __hash__(self):
        if self._hash is None:
            h = hash((self.num_vars, frozenset(self._terms.items())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "Poly(0)"
        parts = []
        for exp in sorted(self._terms, key=lambda e: (-sum(e), e)):
            c = self._terms[exp]
            mono = "*".join(
                f"x{i}" if p == 1 else f"x{i}^{p}" for i, p in enumerate(exp) if p
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "Poly(" + " + ".join(parts) + ")"

    # -- calculus -----------------------------------------------------------

    def diff(self, index: int) -> "Polynomial":
        """Partial derivative with respect to variable `index`."""
        if not 0 <= index < self.num_vars:
            raise ArgumentError(f"variable index {index} out of range")
        out = {}
        for exp, c in self._terms.items():
            p = exp[index]
            if p == 0:
                continue
            new = list(exp)
            new[index] = p - 1
            out[tuple(new)] = c * p
        return Polynomial(self.num_vars, out)

    def gradient(self):
        """Tuple of partial derivatives, one per variable."""
        return tuple(self.diff(i) for i in range(self.num_vars))

    # -- evaluation ---------------------------------------------------------

    def eval(self, x) -> float:
        """Evaluate at a numeric point in double precision.

        Direct term-by-term sum; integer powers go through repeated squaring
        so no logs/exps enter the result.
        """
        if len(x) != self.num_vars:
            raise ArgumentError(
                f"point has {len(x)} coordinates, polynomial has {self.num_vars} variables"
            )
        total = 0.0
        for exp, c in self._terms.items():
            term = float(c)
            for xi, p in zip(x, exp):
                if p:
                    term *= _ipow(float(xi), p)
            total += term
        return total

    def eval_exact(self, x) -> Fraction:
        """Evaluate at a rational point in exact arithmetic."""
        if len(x) != self.num_vars:
            raise ArgumentError("dimension mismatch in eval_exact")
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for xi, p in zip(x, exp):
                if p:
                    term *= _as_fraction(xi) ** p
            total += term
        return total

    def _floats(self):
        view = self._float_view
        if view is None:
            if self._terms:
                exps = np.array(sorted(self._terms), dtype=np.int64)
                coeffs = np.array(
                    [float(self._terms[tuple(e)]) for e in exps], dtype=np.float64
                )
            else:
                exps = np.zeros((0, self.num_vars), dtype=np.int64)
                coeffs = np.zeros(0, dtype=np.float64)
            view = (exps, coeffs)
            object.__setattr__(self, "_float_view", view)
        return view

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at rows of `points` (shape (k, num_vars))."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.num_vars:
            raise ArgumentError("points must be a (k, num_vars) array")
        exps, coeffs = self._floats()
        if coeffs.size == 0:
            return np.zeros(pts.shape[0])
        # monomials: prod over variables of x_i^{e_ti}
        mono = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
        return mono @ coeffs

    # -- structural maps ----------------------------------------------------

    def embed(self, num_vars: int, var_map) -> "Polynomial":
        """Re-house the polynomial in a larger variable space.

        `var_map[i]` gives the new index of old variable i.
        """
        var_map = tuple(var_map)
        if len(var_map) != self.num_vars:
            raise ArgumentError("var_map length must equal num_vars")
        if any(not 0 <= j < num_vars for j in var_map) or len(set(var_map)) != len(var_map):
            raise ArgumentError("var_map must be injective into the new space")
        out = {}
        for exp, c in self._terms.items():
            new = [0] * num_vars
            for old_i, p in enumerate(exp):
                new[var_map[old_i]] = p
            out[tuple(new)] = c
        return Polynomial(num_vars, out)

    # -- serialization ------------------------------------------------------

    def to_dict(self, var_names=None) -> dict:
        """JSON form: {"vars": [...], "terms": [{"c": "p/q", "e": [...]}, ...]}."""
        names = list(var_names) if var_names is not None else [
            f"x{i + 1}" for i in range(self.num_vars)
        ]
        if len(names) != self.num_vars:
            raise ArgumentError("var_names length must equal num_vars")
        terms = [
            {"c": str(self._terms[exp]), "e": list(exp)}
            for exp in sorted(self._terms, key=lambda e: (-sum(e), e))
        ]
        return {"vars": names, "terms": terms}

    @classmethod
    def from_dict(cls, data: dict, path: str = "polynomial") -> "Polynomial":
        if not isinstance(data, dict) or "vars" not in data or "terms" not in data:
            raise SchemaError("expected an object with 'vars' and 'terms'", path)
        names = data["vars"]
        if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
            raise SchemaError("'vars' must be a list of strings", f"{path}.vars")
        n = len(names)
        terms = {}
        for k, item in enumerate(data["terms"]):
            where = f"{path}.terms[{k}]"
            if not isinstance(item, dict) or "c" not in item or "e" not in item:
                raise SchemaError("expected an object with 'c' and 'e'", where)
            exp = item["e"]
            if not isinstance(exp, list) or len(exp) != n:
                raise SchemaError(f"'e' must list {n} exponents", f"{where}.e")
            try:
                coeff = _as_fraction(item["c"])
            except (ArgumentError, ValueError, ZeroDivisionError):
                raise SchemaError(f"bad coefficient {item['c']!r}", f"{where}.c") from None
            try:
                exp_t = tuple(int(e) for e in exp)
            except (TypeError, ValueError):
                raise SchemaError("exponents must be integers", f"{where}.e") from None
            if any(e < 0 for e in exp_t):
                raise SchemaError("exponents must be nonnegative", f"{where}.e")
            terms[exp_t] = terms.get(exp_t, Fraction(0)) + coeff
        return cls(n, terms)


def _ipow(base: float, k: int) -> float:
    """base**k for integer k >= 0 by repeated squaring."""
    result = 1.0
    while k:
        if k & 1:
            result *= base
        base *= base
        k >>= 1
    return result


class MatrixPolynomial:
    """Symmetric matrix with polynomial entries; only the upper triangle is stored."""

    __slots__ = ("size", "num_vars", "_upper")

    def __init__(self, size: int, upper: dict, num_vars=None):
        """`upper` maps (i, j) with i <= j to Polynomial; missing entries are zero."""
        if size < 1:
            raise ArgumentError("matrix size must be >= 1")
        nv = num_vars
        entries = {}
        for (i, j), p in upper.items():
            if not (0 <= i <= j < size):
                raise ArgumentError(f"entry index ({i},{j}) outside upper triangle of size {size}")
            if not isinstance(p, Polynomial):
                raise ArgumentError("entries must be Polynomial")
            if nv is None:
                nv = p.num_vars
            elif p.num_vars != nv:
                raise ArgumentError("all entries must share the same variable space")
            if not p.is_zero():
                entries[(i, j)] = p
        if nv is None:
            raise ArgumentError("num_vars is required for an all-zero matrix polynomial")
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "num_vars", nv)
        object.__setattr__(self, "_upper", entries)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixPolynomial is immutable")

    @classmethod
    def from_rows(cls, rows) -> "MatrixPolynomial":
        """Build from a full square array of polynomials, checking symmetry exactly."""
        size = len(rows)
        upper = {}
        for i in range(size):
            if len(rows[i]) != size:
                raise ArgumentError("rows must form a square array")
            for j in range(i, size):
                if rows[i][j] != rows[j][i]:
                    raise ArgumentError(f"entries ({i},{j}) and ({j},{i}) differ")
                upper[(i, j)] = rows[i][j]
        return cls(size, upper, num_vars=rows[0][0].num_vars)

    def entry(self, i: int, j: int) -> Polynomial:
        key = (i, j) if i <= j else (j, i)
        return self._upper.get(key, Polynomial.zero(self.num_vars))

    def degree(self) -> int:
        if not self._upper:
            return 0
        return max(p.degree() for p in self._upper.values())

    def __eq__(self, other):
        return (
            isinstance(other, MatrixPolynomial)
            and self.size == other.size
            and self.num_vars == other.num_vars
            and self._upper == other._upper
        )

    def eval_matrix(self, x) -> "SymmetricMatrix":
        """Entrywise evaluation at x; the result is exactly symmetric."""
        if len(x) != self.num_vars:
            raise ArgumentError("dimension mismatch in eval_matrix")
        a = np.zeros((self.size, self.size))
        for (i, j), p in self._upper.items():
            v = p.eval(x)
            a[i, j] = v
            a[j, i] = v
        return SymmetricMatrix(a)

    def to_dict(self, var_names=None) -> dict:
        names = list(var_names) if var_names is not None else [
            f"x{i + 1}" for i in range(self.num_vars)
        ]
        return {
            "size": self.size,
            "vars": names,
            "entries": [
                {"i": i, "j": j, "poly": p.to_dict(names)}
                for (i, j), p in sorted(self._upper.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, path: str = "matrix") -> "MatrixPolynomial":
        for field in ("size", "vars", "entries"):
            if field not in data:
                raise SchemaError(f"missing field '{field}'", path)
        names = data["vars"]
        upper = {}
        for k, item in enumerate(data["entries"]):
            where = f"{path}.entries[{k}]"
            try:
                i, j = int(item["i"]), int(item["j"])
            except (KeyError, TypeError, ValueError):
                raise SchemaError("entry needs integer 'i' and 'j'", where) from None
            p = Polynomial.from_dict(item.get("poly", {}), f"{where}.poly")
            if p.num_vars != len(names):
                raise SchemaError("entry variable count disagrees with 'vars'", where)
            upper[(i, j)] = p
        try:
            return cls(int(data["size"]), upper, num_vars=len(names))
        except ArgumentError as exc:
            raise SchemaError(str(exc), path) from None


class SymmetricMatrix:
    """Dense symmetric matrix in double precision.

    Symmetry is required to hold to exact bit equality; use `from_upper` to
    symmetrize raw data explicitly.
    """

    __slots__ = ("array",)

    def __init__(self, array):
        a = np.array(array, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ArgumentError("expected a square matrix")
        if not (a == a.T).all():
            raise ArgumentError("matrix is not bit-exactly symmetric; use from_upper")
        object.__setattr__(self, "array", a)
        a.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("SymmetricMatrix is immutable")

    @classmethod
    def from_upper(cls, array) -> "SymmetricMatrix":
        """Mirror the upper triangle onto the lower one."""
        a = np.array(array, dtype=np.float64)
        out = np.triu(a) + np.triu(a, 1).T
        return cls(out)

    @property
    def size(self) -> int:
        return self.array.shape[0]


def jacobi_eigh(matrix, tol: float = 1e-12, max_sweeps: int = 100):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, V) with columns of V the eigenvectors, sorted by
    descending eigenvalue.  Sweeps run until every off-diagonal magnitude is
    at most `tol`; exceeding `max_sweeps` raises SolverError rather than
    returning a half-converged answer.
    """
    if isinstance(matrix, SymmetricMatrix):
        a = matrix.array.copy()
    else:
        a = np.array(matrix, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ArgumentError("expected a square matrix")
    if tol <= 0:
        raise ArgumentError("tol must be positive")
    if not np.isfinite(a).all():
        raise ArgumentError("matrix has non-finite entries")
    m = a.shape[0]
    v = np.eye(m)
    if m == 1:
        return a.diagonal().copy(), v
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(a.diagonal()))
        if off.max() <= tol:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if abs(apq) <= tol:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    else:
        raise SolverError(
            f"Jacobi diagonalization did not reach off-diagonal {tol} in {max_sweeps} sweeps"
        )
    order = np.argsort(-a.diagonal(), kind="stable")
    return a.diagonal()[order].copy(), v[:, order]


def lambda_max(matrix, tol: float = 1e-12):
    """Largest eigenvalue of a symmetric matrix with a unit eigenvector.

    The eigenvector comes from the accumulated Jacobi rotations and is
    renormalized so its Euclidean norm is 1 within 1e-12.
    """
    vals, vecs = jacobi_eigh(matrix, tol=tol)
    w = vecs[:, 0]
    return float(vals[0]), w / np.linalg.norm(w)
