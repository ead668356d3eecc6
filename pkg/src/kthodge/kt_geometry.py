"""Geometry layer: the twisted 4-manifold, its frames, and sector reduction.

The manifold is the product of a circle with a compact Heisenberg
nilmanifold, realized as the unit 4-cube with one twisted gluing
(x, z) ~ (x+1, z+y).  The almost complex structures J_{a,b} act on the
global frame (dt, dx, dy, dz - x dy); all exact bookkeeping is done in
d = b/(8*pi), so that structure constants live in Q(i)[pi, 1/pi].

Functions split into Fourier sectors: trigonometric ones indexed by
(k, l, m) and line-function ones indexed by (k, m, n) with n != 0,
where a lattice-periodized Gaussian series plays the role of the
exponential character.  This module builds the per-sector linear ODE
pencils, the exact solvability certificates, the zero-sector linear
solves, and analytic residual checks for assembled harmonic forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .exact_arith import (
    Classification,
    GaussRational,
    Membership,
    QPiC,
    format_rational,
    qpi_classify,
    qpi_in_discrete_set,
    qpi_to_json,
)
from .lattice_nt import lattice_points_on_circle
from .ode_core import LinearPencilSystem, SchwartzSolution

TWO_PI = 2.0 * math.pi
DEFAULT_XI_CUT = 6
CONDITION_BOUND = 12  # pi-exponents of the squared rho condition span -2..10
_EPS = 2.220446049250313e-16  # double-precision machine epsilon


# --- parameters and metrics ---------------------------------------------------


@dataclass(frozen=True)
class AcsParams:
    """The structure J_{a,b} recorded through a and d = b/(8*pi)."""

    a: Fraction
    d: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "d", Fraction(self.d))
        if self.d == 0:
            raise ValueError("d must be nonzero")

    @property
    def b_qpi(self) -> QPiC:
        return QPiC.monomial(1, GaussRational.of(8 * self.d))

    @property
    def b_float(self) -> float:
        return 8.0 * math.pi * float(self.d)

    @property
    def c_qpi(self) -> QPiC:
        # c = -(a^2+1)/b lives one pi-power below the rationals
        return QPiC.monomial(-1, GaussRational.of(-(self.a**2 + 1) / (8 * self.d)))


@dataclass(frozen=True)
class MetricSpec:
    variant: str  # "standard" | "rho"
    r: Fraction | None = None  # rho = r * pi

    def __post_init__(self):
        if self.variant not in ("standard", "rho"):
            raise ValueError(f"unknown metric variant {self.variant!r}")
        if self.variant == "rho":
            if self.r is None:
                raise ValueError("rho metric needs r")
            object.__setattr__(self, "r", Fraction(self.r))
            if self.r == 0:
                raise ValueError("rho metric needs r != 0")
        elif self.r is not None:
            raise ValueError("standard metric takes no r")

    @staticmethod
    def standard() -> "MetricSpec":
        return MetricSpec("standard")

    @staticmethod
    def rho(r) -> "MetricSpec":
        return MetricSpec("rho", Fraction(r))

    @property
    def is_standard(self) -> bool:
        return self.variant == "standard"

    @property
    def rho_float(self) -> float:
        return 0.0 if self.is_standard else float(self.r) * math.pi

    def s_float(self) -> float:
        rho = self.rho_float
        return 1.0 + rho * rho

    def s_qpi(self, bound: int = CONDITION_BOUND) -> QPiC:
        if self.is_standard:
            return QPiC.from_rational(1, bound)
        return QPiC.from_rational(1, bound) + QPiC.monomial(2, GaussRational.of(self.r**2), bound)

    def label(self) -> str:
        return "standard" if self.is_standard else f"rho:{format_rational(self.r)}"


# --- sectors -------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class ZeroSector:
    k: int
    l: int
    m: int

    def to_json(self) -> dict:
        return {"k": self.k, "l": self.l, "m": self.m, "n": 0}


@dataclass(frozen=True, order=True)
class HeisenbergSector:
    k: int
    m: int
    n: int

    def __post_init__(self):
        if self.n == 0:
            raise ValueError("Heisenberg sector needs n != 0")
        if not 0 <= self.m < abs(self.n):
            raise ValueError("m must satisfy 0 <= m < |n|")

    def to_json(self) -> dict:
        return {"k": self.k, "m": self.m, "n": self.n}


# --- frame ---------------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    """Global frame data for J_{a,b}.

    Vector fields are stored as coefficient 4-tuples over the invariant
    basis (Dt, Dx, Dy + x Dz, Dz); 1-forms over the dual coframe
    (dt, dx, dy, dz - x dy).  All components are constants, which is what
    makes the frame global despite the twist.
    """

    params: AcsParams
    v1: tuple
    v2: tuple
    phi1: tuple
    phi2: tuple

    @staticmethod
    def build(params: AcsParams) -> "Frame":
        a, b = float(params.a), params.b_float
        return Frame(
            params,
            v1=(0.5, -0.5j, 0.0, 0.0),
            v2=(0.0, 0.0, 0.5, -(a - 1j) / (2 * b)),
            phi1=(1.0, 1j, 0.0, 0.0),
            phi2=(0.0, 0.0, 1.0 - a * 1j, -1j * b),
        )

    @property
    def b4_qpi(self) -> QPiC:
        # the structure scalar b/4 = 2*pi*d multiplying g in the first equation
        return QPiC.monomial(1, GaussRational.of(2 * self.params.d))

    @property
    def b4_float(self) -> float:
        return self.params.b_float / 4.0

    def vector_at(self, coeffs: tuple, x: float) -> tuple:
        a0, a1, a2, a3 = coeffs
        return (a0, a1, a2, a3 + a2 * x)

    def form_at(self, coeffs: tuple, x: float) -> tuple:
        p, q, u, w = coeffs
        return (p, q, u - w * x, w)

    def pairing(self, form: tuple, vector: tuple, x: float) -> complex:
        fc = self.form_at(form, x)
        vc = self.vector_at(vector, x)
        return sum(f * v for f, v in zip(fc, vc))

    def duality_defect(self, points: Sequence[float]) -> float:
        """max |<phi_i, V_j> - delta_ij| over the given x-values."""
        worst = 0.0
        for x in points:
            for form, vec, want in (
                (self.phi1, self.v1, 1.0),
                (self.phi1, self.v2, 0.0),
                (self.phi2, self.v1, 0.0),
                (self.phi2, self.v2, 1.0),
            ):
                worst = max(worst, abs(self.pairing(form, vec, x) - want))
        return worst


def _conj_coeffs(coeffs: tuple) -> tuple:
    # conjugate vector field: the basis fields are real, so conjugate entries
    return tuple(complex(c).conjugate() for c in coeffs)


# --- sector ODE systems ----------------------------------------------------------


def sector_system(p: AcsParams, metric: MetricSpec, s: HeisenbergSector) -> LinearPencilSystem:
    """The pencil y' = (A x + B) y governing the (k, m, n) sector.

    Standard metric: entries are exact in Q(i)[pi, 1/pi].  The rho metric
    divides by 1 + rho^2, which leaves the Laurent ring, so that variant is
    float-valued.
    """
    k, m, n = s.k, s.m, s.n
    d, a = p.d, p.a
    if metric.is_standard:
        zero = QPiC.zero()
        two_n_pi = QPiC.monomial(1, GaussRational.of(2 * n))
        # entries: B12 = 2*pi*m - n(a-i)/(4d),  B21 = 2*pi*m - n(a+i)/(4d)
        na4d = Fraction(n) * a / (4 * d)
        ni4d = Fraction(n) / (4 * d)
        b12 = QPiC.monomial(1, GaussRational.of(2 * m)) + QPiC.from_gauss(GaussRational(-na4d, ni4d))
        b21 = QPiC.monomial(1, GaussRational.of(2 * m)) + QPiC.from_gauss(GaussRational(-na4d, -ni4d))
        b11 = QPiC.monomial(1, GaussRational.of(2 * k))
        b22 = QPiC.monomial(1, GaussRational(Fraction(-2 * k), 4 * d))
        return LinearPencilSystem.from_exact(
            [[zero, two_n_pi], [two_n_pi, zero]], [[b11, b12], [b21, b22]]
        )

    a_f, b_f = float(a), p.b_float
    rho = metric.rho_float
    s_f = metric.s_float()
    A = TWO_PI * np.array([[0.0, n / s_f], [n, 0.0]], dtype=complex)
    B = np.array(
        [
            [
                TWO_PI * (k + 2 * rho * n * 1j / (s_f * b_f)),
                (TWO_PI / s_f) * (m - n * (a_f - 1j) / b_f + 2 * rho * k - rho * b_f * 1j / (2 * TWO_PI)),
            ],
            [
                TWO_PI * (m - n * (a_f + 1j) / b_f),
                TWO_PI * ((b_f / (2 * TWO_PI)) * 1j - k),
            ],
        ],
        dtype=complex,
    )
    return LinearPencilSystem.from_float(A, B)


# --- exact solvability conditions -------------------------------------------------


@dataclass(frozen=True)
class SectorCondition:
    """Exact decay-solvability certificate for one n != 0 sector.

    Standard: `quantity` must lie in 4*pi*Z^-.  Rho: the criterion involves
    sqrt(1 + rho^2), so we carry the square as the pair quantity/denominator;
    membership asks for a negative-integer square with the float sign check
    resolving the branch.
    """

    sector: HeisenbergSector
    metric: MetricSpec
    quantity: QPiC
    denominator: QPiC | None = None
    squared: bool = False
    ratio_float: complex = 0j

    def membership(self) -> Membership:
        if not self.squared:
            return qpi_in_discrete_set(self.quantity, "4piZ-")
        den0 = self.denominator.coefficient(0)
        u2 = self.quantity.coefficient(0) / den0
        if u2.im != 0 or u2.re < 0:
            return Membership(None)
        root = math.isqrt(u2.re.numerator)
        if u2.re.denominator != 1 or root * root != u2.re.numerator:
            return Membership(None)
        if self.quantity != self.denominator.scale(u2.re):
            return Membership(None)
        if root == 0 or self.ratio_float.real >= 0:
            return Membership(None)
        return Membership(-root)

    def classify(self) -> Classification:
        if not self.squared:
            return qpi_classify(self.quantity)
        c = self.quantity.coefficient(0) / self.denominator.coefficient(0)
        if self.quantity == self.denominator.scale(c.re) and c.im == 0:
            return Classification("rational_constant", GaussRational.of(c.re))
        return Classification("nonconstant")

    def imaginary_part(self) -> QPiC:
        return QPiC.make({e: GaussRational.of(c.im) for e, c in self.quantity.coeffs}, self.quantity.bound)


def heisenberg_sector_condition(
    p: AcsParams, metric: MetricSpec, s: HeisenbergSector
) -> SectorCondition:
    """Exact quantity whose discrete-set membership decides sector decay.

    Standard: (pi^2/|n|)(k - (n/b)i - di)(k + (n/b)i - di), to be tested
    against 4*pi*Z^-.  Rho: the square of the criterion ratio as a
    numerator/denominator pair over Q(i)[pi, 1/pi].
    """
    k, m, n = s.k, s.m, s.n
    d = p.d
    absn = abs(n)
    if metric.is_standard:
        sq = GaussRational(Fraction(k * k) - d * d, -2 * k * d).scale(Fraction(1, absn))
        tail = GaussRational.of(Fraction(absn, 1) / (64 * d * d))
        quantity = QPiC.monomial(2, sq) + QPiC.from_gauss(tail)
        sysf = sector_system(p, metric, s)
        ratio = _float_ratio(sysf)
        return SectorCondition(s, metric, quantity, ratio_float=ratio)

    r = metric.r
    bq = CONDITION_BOUND
    g1 = QPiC.make(
        {
            0: GaussRational(Fraction(2 * k), Fraction(r * n, 1) / (4 * d) - 2 * d),
            2: GaussRational(2 * k * r * r, -2 * d * r * r),
        },
        bq,
    )
    g2 = QPiC.make(
        {
            -1: GaussRational(Fraction(0), -Fraction(n, 1) / (4 * d)),
            1: GaussRational(-2 * r * k, 2 * r * d),
        },
        bq,
    )
    s_q = metric.s_qpi(bq)
    diff = g1 * g1 - s_q * g2 * g2
    num = QPiC.pi(2, bq) * diff * diff
    den = (s_q * s_q * s_q).scale(16 * n * n)
    s_f = metric.s_float()
    ratio = math.pi * complex(diff.float_eval()) / (4 * absn * s_f**1.5)
    return SectorCondition(s, metric, num, denominator=den, squared=True, ratio_float=ratio)


def _float_ratio(sysf: LinearPencilSystem) -> complex:
    lam, V = np.linalg.eig(sysf.A)
    order = np.argsort(-lam.real)
    lam = lam[order]
    P = np.linalg.inv(V[:, order])
    Bt = P @ sysf.B @ np.linalg.inv(P)
    return Bt[0, 1] * Bt[1, 0] / (lam[0] - lam[1]).real


@dataclass(frozen=True)
class SectorExclusion:
    """Blanket certificate: no n != 0 sector carries decaying solutions.

    The membership target forces the witness pi-exponent's coefficient to
    vanish, but that coefficient equals unit_coefficient * |n|^power > 0
    for every sector, so exclusion holds uniformly in (k, m, n).
    """

    pi_exponent: int
    unit_coefficient: Fraction
    power_of_n: int
    reason: str


def nonzero_sector_exclusion(p: AcsParams, metric: MetricSpec) -> SectorExclusion:
    d = p.d
    if metric.is_standard:
        return SectorExclusion(
            pi_exponent=0,
            unit_coefficient=Fraction(1, 1) / (64 * d * d),
            power_of_n=1,
            reason="membership in 4*pi*Z^- needs a bare pi-monomial, but the "
            "pi^0 coefficient |n|/(64 d^2) of the criterion never vanishes "
            "for rational d",
        )
    return SectorExclusion(
        pi_exponent=-2,
        unit_coefficient=Fraction(1, 1) / (256 * d**4),
        power_of_n=4,
        reason="an integer-square value would clear the pi^-2 coefficient of "
        "the squared criterion, but it equals n^4/(256 d^4) != 0 for "
        "rational d",
    )


# --- zero sector -------------------------------------------------------------------


@dataclass(frozen=True)
class TrigComponent:
    """One (k, l, m) Fourier mode with exact coefficients.

    coeffs is (f, g) for (0,1)-forms and (f11, f12, f21, f22) for
    (1,1)-forms, each a Q(i)[pi, 1/pi] constant.
    """

    sector: ZeroSector
    coeffs: tuple

    def to_json(self) -> dict:
        return {
            "kind": "trig",
            "sector": self.sector.to_json(),
            "coeffs": [qpi_to_json(c) for c in self.coeffs],
        }


@dataclass(frozen=True)
class WBComponent:
    """One (k, m, n) line-function mode carrying a Gaussian-type solution."""

    sector: HeisenbergSector
    schwartz: SchwartzSolution

    def to_json(self) -> dict:
        return {
            "kind": "wb",
            "sector": self.sector.to_json(),
            "lam2": self.schwartz.lam2,
            "mu": [self.schwartz.mu.real, self.schwartz.mu.imag],
            "polyF": [[c.real, c.imag] for c in map(complex, self.schwartz.polyF)],
            "polyG": [[c.real, c.imag] for c in map(complex, self.schwartz.polyG)],
        }


@dataclass(frozen=True)
class HarmonicForm:
    degree: str  # "01" | "11"
    components: tuple
    certified_residual: float | None = None

    def with_residual(self, value: float) -> "HarmonicForm":
        return replace(self, certified_residual=value)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "components": [c.to_json() for c in self.components],
            "residual": self.certified_residual,
        }


def _qpi_int(value: int) -> QPiC:
    return QPiC.from_rational(value)


def zero_sector_solutions(p: AcsParams, metric: MetricSpec, bound: int = 8) -> list:
    """Basis components of the n = 0 part of the (0,1) harmonic space.

    Standard metric: the constant solution plus (f, g) = (m, i l) e^{2 pi
    i(l x + m y)} for every lattice point (l, m) != (0, 0) on the circle
    (l-d)^2 + m^2 = d^2 (exact enumeration, no bound needed).  Rho metric:
    exact kernel scan of the 2x2 systems over Q(i)[pi, 1/pi] within |k|,
    |l|, |m| <= bound; the pi-degree separation in the second equation
    forces k = m = 0 and l(l - 2d) = 0, so the only candidate outside the
    box is the line l = 2d, which is appended to the scan whenever 2d is
    an integer beyond the bound.
    """
    if metric.is_standard:
        comps = [TrigComponent(ZeroSector(0, 0, 0), (_qpi_int(1), _qpi_int(0)))]
        for l, m in lattice_points_on_circle(p.d).points:
            if (l, m) == (0, 0):
                continue
            comps.append(
                TrigComponent(
                    ZeroSector(0, l, m),
                    (_qpi_int(m), QPiC.from_gauss(GaussRational.of(0, l))),
                )
            )
        return comps

    comps = []
    r = metric.r
    d = p.d
    s_q = metric.s_qpi(4)
    rho_q = QPiC.monomial(1, GaussRational.of(r), 4)
    l_values = list(range(-bound, bound + 1))
    two_d = 2 * d
    if two_d.denominator == 1 and abs(two_d) > bound:
        l_values.append(int(two_d))
    for k in range(-bound, bound + 1):
        for l in l_values:
            for m in range(-bound, bound + 1):
                row1 = (
                    QPiC.from_gauss(GaussRational.of(-m), 4),
                    QPiC.from_gauss(GaussRational(Fraction(k), Fraction(l) - 2 * d), 4),
                )
                kil = GaussRational(Fraction(k), Fraction(-l))
                row2 = (
                    s_q.scale(kil) + rho_q.scale(m),
                    QPiC.from_gauss(GaussRational.of(m), 4) + rho_q.scale(kil),
                )
                det = row1[0] * row2[1] - row1[1] * row2[0]
                if not det.is_zero():
                    continue
                for row in (row1, row2):
                    if not (row[0].is_zero() and row[1].is_zero()):
                        comps.append(TrigComponent(ZeroSector(k, l, m), (row[1], -row[0])))
                        break
                else:
                    # both equations vanish identically: two-dimensional sector
                    comps.append(TrigComponent(ZeroSector(k, l, m), (_qpi_int(1), _qpi_int(0))))
                    comps.append(TrigComponent(ZeroSector(k, l, m), (_qpi_int(0), _qpi_int(1))))
    return comps


# --- Weil-Brezin evaluation ---------------------------------------------------------


class WbEval(NamedTuple):
    value: complex
    tail_bound: float


def weil_brezin_eval(
    f: Callable[[float], complex],
    s: HeisenbergSector,
    point: tuple,
    xi_cut: int = DEFAULT_XI_CUT,
    envelope: Callable[[float], float] | None = None,
) -> WbEval:
    """Truncated series F = sum_xi f(x+xi) e^{2 pi i(k t + (m+n xi) y + n z)}.

    The reported bound budgets both error sources: the dropped |f| terms
    (through `envelope`, a decreasing bound on |f| at radius >= xi_cut,
    else by direct sampling of the next terms) and the rounding noise of
    the evaluated terms, which scales with the phase magnitude.
    """
    if xi_cut < 1:
        raise ValueError("xi_cut must be >= 1")
    t, x, y, z = point
    k, m, n = s.k, s.m, s.n
    total = 0j
    noise = 0.0
    for xi in range(-xi_cut, xi_cut + 1):
        angle = TWO_PI * (k * t + (m + n * xi) * y + n * z)
        fv = complex(f(x + xi))
        total += fv * complex(math.cos(angle), math.sin(angle))
        noise += abs(fv) * _EPS * (8.0 + 4.0 * abs(angle))
    # dropped terms sit at |x + xi| >= xi_cut - 1 for any x in [-1, 2]
    if envelope is not None:
        tail = 2.0 * sum(envelope(max(0, xi_cut - 1) + j) for j in range(60))
    else:
        tail = 4.0 * sum(
            abs(complex(f(x + sign * (xi_cut + j))))
            for j in range(1, 40)
            for sign in (1, -1)
        )
    return WbEval(total, tail + noise)


def gaussian_envelope(rate: float = math.pi) -> Callable[[float], float]:
    return lambda radius: math.exp(-rate * radius * radius)


def schwartz_envelope(sol: SchwartzSolution) -> Callable[[float], float]:
    lam2 = sol.lam2
    drift = abs(complex(sol.mu).real)
    weight = sum(abs(complex(c)) for c in sol.polyF) + sum(abs(complex(c)) for c in sol.polyG)
    scale = np.linalg.norm(sol.frame.P_inv, 2) * max(weight, 1.0)

    def env(radius: float) -> float:
        if radius < 1.0:
            radius = 1.0
        deg = max(len(sol.polyF), len(sol.polyG))
        return scale * radius**deg * math.exp(0.5 * lam2 * radius * radius + drift * radius)

    return env


# --- assembled PDE residuals ----------------------------------------------------------


def default_grid(nside: int = 5) -> list:
    """Half-offset grid avoiding the twisted faces of the unit 4-cube."""
    ticks = [(i + 0.5) / nside for i in range(nside)]
    return [(t, x, y, z) for t in ticks for x in ticks for y in ticks for z in ticks]


def _trig_factor(vec: tuple, sector: ZeroSector) -> complex:
    # waves carry no z-dependence, so only the t, x, (y + x z)-components act
    return TWO_PI * 1j * (vec[0] * sector.k + vec[1] * sector.l + vec[2] * sector.m)


def _wb_term(vec: tuple, sector: HeisenbergSector, val: complex, deriv: complex, X: float) -> complex:
    a0, a1, a2, a3 = vec
    return TWO_PI * 1j * (a0 * sector.k + a2 * (sector.m + sector.n * X) + a3 * sector.n) * val + a1 * deriv


def _trig_eq_values(frame: Frame, metric: MetricSpec, comp: TrigComponent, degree: str) -> list:
    """Per-unit-amplitude equation values for a trig component (x-free)."""
    v1, v2 = frame.v1, frame.v2
    v1b, v2b = _conj_coeffs(v1), _conj_coeffs(v2)
    sec = comp.sector
    b4 = frame.b4_float
    coeffs = [complex(c.float_eval()) for c in comp.coeffs]

    def op(vec):
        return _trig_factor(vec, sec)

    if degree == "01":
        f, g = coeffs
        eq1 = -op(v2b) * f + op(v1b) * g + b4 * g
        if metric.is_standard:
            eq2 = op(v1) * f + op(v2) * g
        else:
            rho = metric.rho_float
            s_f = metric.s_float()
            eq2 = (s_f * op(v1) + rho * op(v2)) * f + (op(v2) + rho * op(v1)) * g
        return [eq1, eq2]

    f11, f12, f21, f22 = coeffs
    return [
        op(v2b) * f11 - op(v1b) * f12 - b4 * (f12 + f21),
        op(v2b) * f21 - op(v1b) * f22,
        op(v2) * f22 + op(v1) * f21 + b4 * (f12 + f21),
        op(v2) * f12 + op(v1) * f11,
    ]


def _wb_eq_values(
    frame: Frame,
    metric: MetricSpec,
    comp: WBComponent,
    point: tuple,
    xi_cut: int,
) -> tuple:
    """(equation values, truncation bound) for a line-function component."""
    v1, v2 = frame.v1, frame.v2
    v1b, v2b = _conj_coeffs(v1), _conj_coeffs(v2)
    sec = comp.sector
    sol = comp.schwartz
    b4 = frame.b4_float
    t, x, y, z = point
    eq1 = 0j
    eq2 = 0j
    for xi in range(-xi_cut, xi_cut + 1):
        X = x + xi
        val = sol.eval(X)
        der = sol.eval_deriv(X)
        f, g = val[0], val[1]
        df, dg = der[0], der[1]
        phase_angle = TWO_PI * (sec.k * t + (sec.m + sec.n * xi) * y + sec.n * z)
        phase = complex(math.cos(phase_angle), math.sin(phase_angle))
        term1 = -_wb_term(v2b, sec, f, df, X) + _wb_term(v1b, sec, g, dg, X) + b4 * g
        if metric.is_standard:
            term2 = _wb_term(v1, sec, f, df, X) + _wb_term(v2, sec, g, dg, X)
        else:
            rho = metric.rho_float
            s_f = metric.s_float()
            term2 = (
                s_f * _wb_term(v1, sec, f, df, X)
                + rho * _wb_term(v2, sec, f, df, X)
                + _wb_term(v2, sec, g, dg, X)
                + rho * _wb_term(v1, sec, g, dg, X)
            )
        eq1 += term1 * phase
        eq2 += term2 * phase
    env = schwartz_envelope(sol)
    # dropped operator terms grow linearly in X; fold that into the bound
    slope = (
        TWO_PI * (abs(sec.n) + abs(sec.m) + abs(sec.k) + 1)
        + abs(b4)
        + abs(sol.lam2)
        + abs(complex(sol.mu))
        + 1
    )
    tail = 2.0 * sum(env(xi_cut + j) * slope * (xi_cut + j + 1) for j in range(40))
    return [eq1, eq2], tail


def pde_residual(
    form: HarmonicForm,
    p: AcsParams,
    metric: MetricSpec,
    grid: Sequence[tuple] | None = None,
    xi_cut: int = DEFAULT_XI_CUT,
) -> float:
    """max over the grid of the summed harmonic-equation magnitudes.

    Trig components are differentiated in closed form; line-function
    components are evaluated through the truncated lattice series, with the
    truncation bound added to the result.
    """
    if grid is None:
        grid = default_grid()
    frame = Frame.build(p)
    worst = 0.0
    tail_total = 0.0
    trig_parts = [c for c in form.components if isinstance(c, TrigComponent)]
    wb_parts = [c for c in form.components if isinstance(c, WBComponent)]
    if form.degree == "11" and wb_parts:
        raise ValueError("line-function components are only carried for (0,1)-forms")
    n_eqs = 2 if form.degree == "01" else 4
    for point in grid:
        totals = [0j] * n_eqs
        for comp in trig_parts:
            sec = comp.sector
            angle = TWO_PI * (sec.k * point[0] + sec.l * point[1] + sec.m * point[2])
            wave = complex(math.cos(angle), math.sin(angle))
            for i, v in enumerate(_trig_eq_values(frame, metric, comp, form.degree)):
                totals[i] += v * wave
        point_tail = 0.0
        for comp in wb_parts:
            vals, tail = _wb_eq_values(frame, metric, comp, point, xi_cut)
            for i, v in enumerate(vals):
                totals[i] += v
            point_tail += tail
        worst = max(worst, sum(abs(v) for v in totals))
        tail_total = max(tail_total, point_tail)
    return worst + tail_total
