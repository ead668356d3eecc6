"""Exact arithmetic in Q(i) and in the transcendental extension Q(i)(pi).

A QPiC value is a finite Laurent polynomial sum_e c_e * pi^e with
Gaussian-rational coefficients c_e.  Because pi is transcendental over Q,
this representation is unique, so analytic membership questions ("does
this quantity lie in 4*pi*Z^-?") become finite, exact coefficient checks.
No floating point enters any decision in this module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

DEFAULT_EXPONENT_BOUND = 4

RationalLike = Union[int, Fraction]


class ExponentOverflow(ArithmeticError):
    """A product or input exceeded the configured Laurent exponent range."""


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (q omitted when 1) into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational 'p/q': {text!r}") from exc


def format_rational(value: RationalLike) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class GaussRational:
    """Element of Q(i): re + im*i with exact rational parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re: RationalLike = 0, im: RationalLike = 0) -> "GaussRational":
        return GaussRational(Fraction(re), Fraction(im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def __mul__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussRational") -> "GaussRational":
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussRational(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def conj(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def scale(self, factor: RationalLike) -> "GaussRational":
        f = Fraction(factor)
        return GaussRational(self.re * f, self.im * f)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)


GR_ZERO = GaussRational.of(0)
GR_ONE = GaussRational.of(1)
GR_I = GaussRational.of(0, 1)


def _coerce_gauss(value) -> GaussRational:
    if isinstance(value, GaussRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussRational.of(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to GaussRational")


@dataclass(frozen=True)
class QPiC:
    """Laurent polynomial in pi over Q(i), normalized (no zero coefficients).

    `coeffs` maps exponent -> GaussRational, stored as a sorted tuple so
    values are hashable and equality is exact structural equality.  The
    exponent bound travels with the value; binary operations take the max
    of the operand bounds, and any result outside that range raises
    ExponentOverflow.
    """

    coeffs: tuple  # tuple[(int, GaussRational), ...] sorted by exponent
    bound: int = DEFAULT_EXPONENT_BOUND

    @staticmethod
    def make(coeffs: Mapping[int, GaussRational] | Iterable[tuple], bound: int = DEFAULT_EXPONENT_BOUND) -> "QPiC":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        clean = {}
        for exp, c in items:
            c = _coerce_gauss(c)
            if c.is_zero():
                continue
            if abs(exp) > bound:
                raise ExponentOverflow(f"exponent {exp} outside +/-{bound}")
            clean[int(exp)] = clean.get(int(exp), GR_ZERO) + c
        normalized = tuple(sorted((e, c) for e, c in clean.items() if not c.is_zero()))
        return QPiC(normalized, bound)

    @staticmethod
    def zero(bound: int = DEFAULT_EXPONENT_BOUND) -> "QPiC":
        return QPiC((), bound)

    @staticmethod
    def from_rational(value: RationalLike, bound: int = DEFAULT_EXPONENT_BOUND) -> "QPiC":
        return QPiC.make({0: GaussRational.of(value)}, bound)

    @staticmethod
    def from_gauss(value: GaussRational, bound: int = DEFAULT_EXPONENT_BOUND) -> "QPiC":
        return QPiC.make({0: value}, bound)

    @staticmethod
    def monomial(exp: int, coeff, bound: int = DEFAULT_EXPONENT_BOUND) -> "QPiC":
        return QPiC.make({exp: _coerce_gauss(coeff)}, bound)

    @staticmethod
    def pi(exp: int = 1, bound: int = DEFAULT_EXPONENT_BOUND) -> "QPiC":
        return QPiC.monomial(exp, GR_ONE, bound)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def coefficient(self, exp: int) -> GaussRational:
        for e, c in self.coeffs:
            if e == exp:
                return c
        return GR_ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "QPiC") -> "QPiC":
        bound = max(self.bound, other.bound)
        acc = dict(self.coeffs)
        for e, c in other.coeffs:
            acc[e] = acc.get(e, GR_ZERO) + c
        return QPiC.make(acc, bound)

    def __sub__(self, other: "QPiC") -> "QPiC":
        return self + (-other)

    def __neg__(self) -> "QPiC":
        return QPiC(tuple((e, -c) for e, c in self.coeffs), self.bound)

    def __mul__(self, other: "QPiC") -> "QPiC":
        bound = max(self.bound, other.bound)
        acc: dict = {}
        for e1, c1 in self.coeffs:
            for e2, c2 in other.coeffs:
                e = e1 + e2
                acc[e] = acc.get(e, GR_ZERO) + c1 * c2
        return QPiC.make(acc, bound)

    def scale(self, factor) -> "QPiC":
        f = _coerce_gauss(factor)
        return QPiC.make({e: c * f for e, c in self.coeffs}, self.bound)

    def conj(self) -> "QPiC":
        return QPiC(tuple((e, c.conj()) for e, c in self.coeffs), self.bound)

    def divide_by_monomial(self, other: "QPiC") -> "QPiC":
        """Exact division by a single-term QPiC (the only division the Laurent
        ring supports in general)."""
        if len(other.coeffs) != 1:
            raise ArithmeticError("QPiC division requires a monomial divisor")
        (de, dc), = other.coeffs
        return QPiC.make({e - de: c / dc for e, c in self.coeffs}, max(self.bound, other.bound))

    def float_eval(self) -> complex:
        total = 0j
        for e, c in self.coeffs:
            total += c.to_complex() * math.pi**e
        return total


def qpi_arith(x: QPiC, y: QPiC | None, op: str) -> QPiC:
    """Dispatch arithmetic: op in {add, sub, mul, conj} (conj ignores y)."""
    if op == "conj":
        return x.conj()
    if y is None:
        raise ValueError(f"binary op {op!r} needs a second operand")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


@dataclass(frozen=True)
class Classification:
    kind: str  # "rational_constant" | "nonconstant"
    value: GaussRational | None = None

    @property
    def is_rational_constant(self) -> bool:
        return self.kind == "rational_constant"


def qpi_classify(x: QPiC) -> Classification:
    """RationalConstant iff only the pi^0 coefficient is nonzero (or x = 0)."""
    if x.is_zero():
        return Classification("rational_constant", GR_ZERO)
    if len(x.coeffs) == 1 and x.coeffs[0][0] == 0:
        return Classification("rational_constant", x.coeffs[0][1])
    return Classification("nonconstant")


@dataclass(frozen=True)
class Membership:
    member: int | None  # the integer u certifying membership, None if not a member

    @property
    def is_member(self) -> bool:
        return self.member is not None


SET_4PI_ZMINUS = "4piZ-"
SET_ZMINUS = "Z-"
SET_4ZMINUS = "4Z-"

# (required pi exponent, divisor) so that x = divisor * u * pi^exp with u in Z^-
_DISCRETE_SETS = {
    SET_4PI_ZMINUS: (1, 4),
    SET_ZMINUS: (0, 1),
    SET_4ZMINUS: (0, 4),
}


def qpi_in_discrete_set(x: QPiC, set_name: str) -> Membership:
    """Exact membership of x in 4*pi*Z^-, Z^-, or 4*Z^-.

    Yes(u) means x = 4*pi*u (resp. u, 4u) with u a strictly negative
    integer.  Zero is never a member.
    """
    if set_name not in _DISCRETE_SETS:
        raise ValueError(f"unknown discrete set {set_name!r}")
    exp_needed, divisor = _DISCRETE_SETS[set_name]
    if len(x.coeffs) != 1:
        return Membership(None)
    (e, c), = x.coeffs
    if e != exp_needed or c.im != 0:
        return Membership(None)
    u = c.re / divisor
    if u.denominator != 1 or u >= 0:
        return Membership(None)
    return Membership(int(u))


# --- serialization ---------------------------------------------------------


def gauss_to_json(value: GaussRational) -> dict:
    return {"re": format_rational(value.re), "im": format_rational(value.im)}


def qpi_to_json(x: QPiC) -> list:
    return [{"exp": e, "re": format_rational(c.re), "im": format_rational(c.im)} for e, c in x.coeffs]


def qpi_from_json(data, bound: int = DEFAULT_EXPONENT_BOUND) -> QPiC:
    if isinstance(data, str):
        data = json.loads(data)
    coeffs = {
        int(item["exp"]): GaussRational(parse_rational(str(item["re"])), parse_rational(str(item["im"])))
        for item in data
    }
    return QPiC.make(coeffs, bound)
