"""Exact computation of every explicit rate exponent this package works with.

All arithmetic here is arbitrary-precision integer/rational: the exponent
kernel R(n, d) = d*(3d-3)^(n-1) overflows 64-bit range already at modest
arguments, and downstream verdicts compare exponents exactly.  No floating
point is used anywhere in this module.

Each supported "setting" names one rate statement (a slope inequality,
an error bound, a stability estimate, or an algorithmic convergence rate)
and maps problem dimensions onto one call of R.  The setting tokens double
as the CLI wire format.
"""

from __future__ import annotations

import decimal
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArgumentError

# Setting tokens: which dimension fields each one consumes, in CLI order.
SETTINGS = {
    "LOJA_3_5": ("n", "m", "r", "s", "d"),
    "LOJA_EQ_3_6": ("n", "m", "s", "d"),
    "EB_4_2": ("n", "m", "r", "s", "d", "L"),
    "EB_EQ_4_3": ("n", "m", "r", "s", "d", "L"),
    "EB_CONST_4_4": ("n", "m", "r", "s", "d", "L"),
    "PMI_4_6": ("n", "m", "d"),
    "GSIP_5_1": ("n", "m", "r", "s", "d", "L"),
    "GSIP_SHARP_5_2R": ("n", "m", "r", "s", "d", "L"),
    "PMI_STAB_5_2": ("n", "m", "d"),
    "SOCP_5_3": ("n", "m", "d", "L"),
    "CYCLIC_6_3": ("n", "m", "d", "L"),
    "FLOW_6_5": ("n", "m", "r", "s", "d"),
}

# What the computed exponent means in each setting.
_KIND = {
    "LOJA_3_5": "tau",
    "LOJA_EQ_3_6": "tau",
    "EB_4_2": "tau",
    "EB_EQ_4_3": "tau",
    "EB_CONST_4_4": "tau",
    "PMI_4_6": "tau",
    "GSIP_5_1": "tau",
    "GSIP_SHARP_5_2R": "tau",
    "PMI_STAB_5_2": "tau",
    "SOCP_5_3": "tau",
    "CYCLIC_6_3": "rho",
    "FLOW_6_5": "theta",
}


def calc_R(n: int, d: int) -> int:
    """Exponent kernel: 1 if d == 1, else d*(3d-3)^(n-1), exactly."""
    if not isinstance(n, int) or not isinstance(d, int):
        raise ArgumentError("calc_R takes integer arguments")
    if n < 1 or d < 1:
        raise ArgumentError(f"calc_R requires n >= 1 and d >= 1, got n={n}, d={d}")
    if d == 1:
        return 1
    return d * (3 * d - 3) ** (n - 1)


@dataclass(frozen=True)
class ExponentQuery:
    """A setting name plus exactly the dimension fields that setting consumes.

    Fields irrelevant to the setting must be left as None; passing an extra
    one is rejected so a query cannot silently mean something else.
    """

    setting: str
    n: int | None = None
    m: int | None = None
    r: int | None = None
    s: int | None = None
    d: int | None = None
    L: int | None = None

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise ArgumentError(
                f"unsupported setting {self.setting!r}; known: {', '.join(sorted(SETTINGS))}"
            )
        needed = SETTINGS[self.setting]
        for field in ("n", "m", "r", "s", "d", "L"):
            value = getattr(self, field)
            if field in needed:
                if value is None:
                    raise ArgumentError(f"setting {self.setting} requires field '{field}'")
                if not isinstance(value, int):
                    raise ArgumentError(f"field '{field}' must be an integer")
            elif value is not None:
                raise ArgumentError(
                    f"setting {self.setting} does not consume field '{field}'"
                )
        lows = {"n": 1, "m": 1, "r": 0, "s": 0, "d": 1, "L": 1}
        for field in needed:
            if getattr(self, field) < lows[field]:
                raise ArgumentError(f"field '{field}' must be >= {lows[field]}")

    def dims(self) -> dict:
        return {f: getattr(self, f) for f in SETTINGS[self.setting]}


@dataclass(frozen=True)
class ExponentReport:
    """Result of one exponent computation.

    `R_value` is the exact kernel value at the echoed arguments and
    `exponent` the setting's rate as an exact rational in lowest terms.
    """

    setting: str
    dims: dict
    R_arg_n: int
    R_arg_d: int
    R_value: int
    exponent: Fraction
    kind: str  # tau | rho | theta
    degenerate: bool = False
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "setting": self.setting,
            "dims": dict(self.dims),
            "R_arg_n": self.R_arg_n,
            "R_arg_d": self.R_arg_d,
            "R_value": str(self.R_value),
            "R_value_sci": _sci(self.R_value),
            "exponent": str(self.exponent),
            "exponent_float": float(self.exponent),
            "kind": self.kind,
            "degenerate": self.degenerate,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ExponentReport":
        """Reparse a serialized report; R_value is recomputed, not trusted."""
        r_n, r_d = int(data["R_arg_n"]), int(data["R_arg_d"])
        r_value = calc_R(r_n, r_d)
        if str(r_value) != data["R_value"]:
            raise ArgumentError(
                f"stored R_value {data['R_value']} disagrees with R({r_n},{r_d}) = {r_value}"
            )
        return cls(
            setting=data["setting"],
            dims={k: int(v) for k, v in data["dims"].items()},
            R_arg_n=r_n,
            R_arg_d=r_d,
            R_value=r_value,
            exponent=Fraction(data["exponent"]),
            kind=data["kind"],
            degenerate=bool(data.get("degenerate", False)),
            notes=tuple(data.get("notes", ())),
        )


def _sci(value: int) -> str:
    """Scientific-notation rendering of an arbitrarily large integer."""
    return f"{decimal.Decimal(value):.6E}"


def _r_args(q: ExponentQuery):
    """Map a query's dimensions to the (N, D) arguments of the kernel."""
    n, m, r, s, d, L = q.n, q.m, q.r, q.s, q.d, q.L
    w = n + 1
    if q.setting == "LOJA_3_5":
        return 2 * n + (m + r + s) * w, d + 2
    if q.setting == "LOJA_EQ_3_6":
        return 2 * n + (m + s) * w, d + 1
    if q.setting == "EB_4_2":
        if L == 1:
            return 2 * n + (m + r + s) * w, d + 2
        return 2 * n + (m + r + s + 2) * w, d + L + 1
    if q.setting == "EB_EQ_4_3":
        return 2 * n + (m + r + s + 2 * min(L - 1, 1)) * w, d + L
    if q.setting == "EB_CONST_4_4":
        return 2 * n + (m + r + s + 2 * min(L - 1, 1)) * w, d + L + 1
    if q.setting == "PMI_4_6":
        return 2 * n + (m + 1) * w, d + 3
    if q.setting == "GSIP_5_1":
        return 2 * n + (m + r + s + 2) * w, d + L + 2
    if q.setting == "GSIP_SHARP_5_2R":
        return 2 * n + (m + r + s + 2) * w, d + L + 1
    if q.setting == "PMI_STAB_5_2":
        return 2 * n + (m + 3) * w, d + 4
    if q.setting == "SOCP_5_3":
        return 2 * n + (m * L + L + 2) * w, d + L + 1
    if q.setting == "CYCLIC_6_3":
        return 2 * n + (m + 3) * w, d + L
    if q.setting == "FLOW_6_5":
        return 2 * n + (m + r + s) * w, d + 2
    raise ArgumentError(f"unsupported setting {q.setting!r}")


def exponent_for(query: ExponentQuery) -> ExponentReport:
    """Exact rate exponent for the given setting and dimensions."""
    big_n, big_d = _r_args(query)
    r_value = calc_R(big_n, big_d)
    kind = _KIND[query.setting]
    degenerate = False
    notes = []
    if kind == "tau":
        exponent = Fraction(1, r_value)
    elif kind == "theta":
        exponent = 1 - Fraction(1, r_value)
    else:  # rho, cyclic projection rate
        if r_value < 2:
            degenerate = True
            exponent = Fraction(0)
            notes.append("kernel value below 2: the projection rate is degenerate")
        else:
            exponent = Fraction(1, 2 * r_value - 2)
    if query.setting == "EB_EQ_4_3" and query.r:
        notes.append(
            "the sharpened equality-only formula retains the r term verbatim; "
            "passing r > 0 here is unusual"
        )
    return ExponentReport(
        setting=query.setting,
        dims=query.dims(),
        R_arg_n=big_n,
        R_arg_d=big_d,
        R_value=r_value,
        exponent=exponent,
        kind=kind,
        degenerate=degenerate,
        notes=tuple(notes),
    )


def sharpness_interval(n: int, d: int):
    """True-exponent bracket for the block-diagonal matrix family that shows
    the general estimate is not tight.

    For the canonical (2n-1) x (2n-1) block construction with even entry
    degree d, the true Holder exponent at the origin lies in
    [2/((4d-1)^n + 1), 1/(d*(2d)^(n-1))], while the general matrix-inequality
    estimate evaluates to 1/R(2n^2 + 4n, d + 3).  Returns
    (lower, upper, general_estimate) as exact rationals; the general estimate
    is checked to sit at or below the bracket's lower end.
    """
    if not isinstance(n, int) or n < 1:
        raise ArgumentError("n must be an integer >= 1")
    if not isinstance(d, int) or d < 2 or d % 2:
        raise ArgumentError("d must be an even integer >= 2")
    lower = Fraction(2, (4 * d - 1) ** n + 1)
    upper = Fraction(1, d * (2 * d) ** (n - 1))
    estimate = Fraction(1, calc_R(2 * n * n + 4 * n, d + 3))
    if estimate > lower:
        raise AssertionError(
            "general estimate exceeds the known lower end of the true-exponent bracket"
        )
    return lower, upper, estimate
