"""Hodge numbers of the twisted 4-manifold: diamond assembly and the
metric-dependence demonstration.

Entries come from three sources, tagged per entry: closed forms for the
metric-independent numbers, sector computations for h^{0,1} and h^{1,1},
and the (p,q) <-> (2-p,2-q) duality for the remaining corners.  A separate
quadratic-surd path instantiates the structures whose decay condition has
an irrational d, with float certification instead of exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact_arith import GaussRational, QPiC, format_rational
from .kt_geometry import (
    AcsParams,
    HarmonicForm,
    HeisenbergSector,
    MetricSpec,
    heisenberg_sector_condition,
    nonzero_sector_exclusion,
    pde_residual,
    zero_sector_solutions,
)
from .lattice_nt import lattice_points_on_circle
from .ode_core import (
    ORACLE_DEFECT_TOL,
    LinearPencilSystem,
    _exact_nullspace,
    construct_schwartz_solution,
    default_matching_window,
    eigenframe,
    l2_solvability,
    matching_oracle,
)

TWO_PI = 2.0 * math.pi

# b^- counts anti-self-dual harmonic 2-forms.  The manifold has b2 = 4
# (four invariant 2-form classes) and vanishing signature, so the
# intersection form splits evenly: b+ = b- = 2.  Stored, not computed.
B_MINUS = 2

PROV_COMPUTED = "Computed"
PROV_SERRE = "SerreDual"
PROV_CLOSED = "ClosedForm"

RESIDUAL_CERT_TOL = 1e-8


class UnsupportedMetric(ValueError):
    """The requested computation is only available for the standard metric."""


class OracleDisagreement(RuntimeError):
    """A numerically certified count failed its independent verification."""


# --- metric-independent entries -----------------------------------------------


def compute_h10_h20(p: AcsParams) -> tuple:
    """(h^{1,0}, h^{0,2}-partner) closed forms.

    h^{1,0} = 1 always; h^{2,0} = 1 exactly when b = 8*pi*d is a nonzero
    multiple of 4*pi, i.e. 2d is a (nonzero) integer.  Both are
    metric-independent.
    """
    two_d = 2 * p.d
    return 1, int(two_d.denominator == 1)


def n_bound(d) -> float:
    """Coarse cutoff 8*sqrt(2)*pi*d^2 on line-sector indices |n|.

    Beyond it the Gaussian decay rate outruns every coefficient in the
    sector system, so no further solvable sectors can occur.  Even in d.
    """
    d = Fraction(d)
    if d == 0:
        raise ValueError("d must be nonzero")
    return 8.0 * math.sqrt(2.0) * math.pi * float(d) ** 2


# --- h^{0,1} -------------------------------------------------------------------


def _certify_sector_exclusion(p: AcsParams, metric: MetricSpec, n_limit: int = 3, k_limit: int = 1):
    """Check the blanket n != 0 exclusion against per-sector certificates.

    The general statement is carried by nonzero_sector_exclusion; here a
    box of sectors is recomputed through the full condition machinery and
    each witness coefficient is matched against the closed form.
    """
    excl = nonzero_sector_exclusion(p, metric)
    for n in range(-n_limit, n_limit + 1):
        if n == 0:
            continue
        for k in range(-k_limit, k_limit + 1):
            for m in range(abs(n)):
                cond = heisenberg_sector_condition(p, metric, HeisenbergSector(k=k, m=m, n=n))
                if cond.classify().kind != "nonconstant" or cond.membership().is_member:
                    raise OracleDisagreement(
                        f"sector (k={k}, m={m}, n={n}) escaped the decay exclusion"
                    )
                witness = cond.quantity.coefficient(excl.pi_exponent)
                expected = GaussRational.of(excl.unit_coefficient * abs(n) ** excl.power_of_n)
                if witness != expected:
                    raise OracleDisagreement(
                        f"exclusion witness mismatch at (k={k}, m={m}, n={n})"
                    )
    return excl


def compute_h01(p: AcsParams, metric: MetricSpec, grid: Sequence[tuple] | None = None) -> tuple:
    """(count, basis) of harmonic (0,1)-forms for rational d.

    All n != 0 sectors are excluded by the exact certificate, so the count
    is carried entirely by the n = 0 solve; every basis form ships with a
    grid residual certificate.  Convention: the origin (0,0) of the circle
    count labels the constant solution, so the standard count equals the
    full lattice-point tally including the origin.
    """
    _certify_sector_exclusion(p, metric)
    comps = zero_sector_solutions(p, metric)
    if metric.is_standard:
        expected = lattice_points_on_circle(p.d).count
        if len(comps) != expected:
            raise OracleDisagreement(
                f"zero-sector solve found {len(comps)} solutions, circle count is {expected}"
            )
    basis = []
    for comp in comps:
        form = HarmonicForm("01", (comp,))
        residual = pde_residual(form, p, metric, grid)
        if residual > RESIDUAL_CERT_TOL:
            raise OracleDisagreement(
                f"basis form in sector {comp.sector} failed residual certification ({residual:.2e})"
            )
        basis.append(form.with_residual(residual))
    return len(basis), basis


# --- the quadratic-surd decay condition ------------------------------------------


@dataclass(frozen=True)
class SurdCase:
    """Structure parameters solving the degree-4 decay condition.

    d is the positive root of 64 pi^2 d^4 + 256 pi u |n| d^2 - n^2 = 0, so
    w = 8 pi d^2 = w_int + w_coef*sqrt(disc) lives in Z[sqrt(disc)] with
    disc = 256 u^2 + 1 (never a perfect square, hence d is irrational and
    the circle-counting route does not apply).
    """

    n: int
    u: int
    d_float: float
    disc: int
    w_int: int
    w_coef: int

    @property
    def quartic_residual(self) -> float:
        d2 = self.d_float**2
        value = 64 * math.pi**2 * d2 * d2 + 256 * math.pi * self.u * abs(self.n) * d2 - self.n**2
        scale = 64 * math.pi**2 * d2 * d2 + 256 * math.pi * abs(self.u) * abs(self.n) * d2 + self.n**2
        return abs(value) / scale

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "u": self.u,
            "d": self.d_float,
            "disc": self.disc,
            "w_int": self.w_int,
            "w_coef": self.w_coef,
            "quartic_residual": self.quartic_residual,
        }


def solve_deq(n: int, u: int, rescan: int = 50) -> SurdCase:
    """Positive root of the decay quartic, with a uniqueness rescan.

    In w = 8 pi d^2 the condition reads w^2 + 32 u |n| w - n^2 = 0, whose
    positive root is |n|(-16u + sqrt(256u^2+1)).  The rescan confirms that
    no other sector/count pair (N, U) within |N|, |U| <= rescan satisfies
    the same condition at this w (w is irrational, so cross-solutions
    would force a rational value).
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    if u >= 0:
        raise ValueError("u must be a negative integer")
    absn = abs(n)
    disc = 256 * u * u + 1
    w = absn * (-16 * u + math.sqrt(disc))
    d_float = math.sqrt(w / (8 * math.pi))
    case = SurdCase(n=n, u=u, d_float=d_float, disc=disc, w_int=-16 * u * absn, w_coef=absn)
    if case.quartic_residual > 1e-12:
        raise ArithmeticError(f"quartic root lost precision: {case.quartic_residual:.2e}")
    for other_n in range(1, rescan + 1):
        for other_u in range(-1, -rescan - 1, -1):
            value = w * w + 32 * other_u * other_n * w - other_n * other_n
            if abs(value) < 1e-6 * (w * w + 32 * abs(other_u) * other_n * w + other_n * other_n):
                if (other_n, other_u) != (absn, u):
                    raise OracleDisagreement(
                        f"decay condition for (n={n}, u={u}) also matched (N={other_n}, U={other_u})"
                    )
    return case


def surd_sector_system(case: SurdCase, a=0, k: int = 0, m: int = 0, n: int | None = None) -> LinearPencilSystem:
    """Float sector system at the surd d (exact arithmetic cannot hold it)."""
    if n is None:
        n = case.n
    b = 8.0 * math.pi * case.d_float
    af = float(Fraction(a))
    A = TWO_PI * np.array([[0.0, n], [n, 0.0]], dtype=complex)
    B = np.array(
        [
            [TWO_PI * k, TWO_PI * (m - n * (af - 1j) / b)],
            [TWO_PI * (m - n * (af + 1j) / b), b / 2.0 * 1j - TWO_PI * k],
        ],
        dtype=complex,
    )
    return LinearPencilSystem.from_float(A, B)


def _surd_matching_window(sysx: LinearPencilSystem, kindex: int) -> float:
    # the solution carries a polynomial factor of degree kindex - 2, which
    # delays Gaussian dominance; widen the default window by the radius at
    # which the envelope overtakes that polynomial, plus one unit of margin
    frame = eigenframe(sysx.A)
    frame.Btilde = frame.P @ sysx.B @ frame.P_inv
    base = default_matching_window(frame)
    return base + math.sqrt(2.0 * kindex / (frame.lam1 - frame.lam2)) + 1.0


def compute_h01_surd(case: SurdCase, a=0, tol: float = ORACLE_DEFECT_TOL) -> int:
    """h^{0,1} = 2|n| + 1 at the surd d, numerically certified.

    The 2|n| line sectors (k = 0, 0 <= m < |n|, both signs of n) are each
    constructed as Gaussian-polynomial solutions and pushed through the
    independent matching integrator; k != 0 sectors are ruled out because
    the decay ratio acquires the imaginary part -k*b/(4|n|) != 0, and the
    n = 0 circle carries only the constant since d is irrational.
    """
    absn = abs(case.n)
    expected_kindex = 4 * abs(case.u)
    for n_signed in (absn, -absn):
        for m in range(absn):
            sysx = surd_sector_system(case, a, k=0, m=m, n=n_signed)
            solv = l2_solvability(sysx)
            if not solv.is_solvable or solv.kindex != expected_kindex:
                raise OracleDisagreement(
                    f"sector (m={m}, n={n_signed}) expected decay index {expected_kindex}, "
                    f"got verdict {solv.verdict}"
                )
            construct_schwartz_solution(sysx, solv)
            oracle = matching_oracle(sysx, X=_surd_matching_window(sysx, solv.kindex))
            if not oracle.l2_exists or oracle.defect >= tol:
                raise OracleDisagreement(
                    f"matching oracle rejected sector (m={m}, n={n_signed}): defect {oracle.defect:.2e}"
                )
    return 2 * absn + 1


# --- h^{1,1} ---------------------------------------------------------------------


def h11_exclusion_certificate(p: AcsParams, k: int, l: int, m: int) -> QPiC:
    """4*pi*(k^2+l^2+m^2) + 2*k*b*i as an exact value.

    Nontrivial (1,1) zero-sector solutions require this to vanish, which
    forces k = l = m = 0: the real part pins l, m and the imaginary part
    2kb (pi-coefficient 16kd) pins k.
    """
    return QPiC.monomial(1, GaussRational(Fraction(4 * (k * k + l * l + m * m)), 16 * k * p.d))


def _h11_sector_rows(p: AcsParams, k: int, l: int, m: int) -> list:
    # the four coefficient equations of one (k, l, m) sector, unknowns
    # (f11, f12, f21, f22), common factor pi*i divided out
    d = p.d
    gr = GaussRational
    i2d = gr(Fraction(0), 2 * d)
    return [
        [gr.of(m), gr(Fraction(-k), -(Fraction(l) - 2 * d)), i2d, gr.of(0)],
        [gr.of(0), gr.of(0), gr.of(m), gr(Fraction(-k), Fraction(-l))],
        [gr.of(0), -i2d, gr(Fraction(k), Fraction(-l)) - i2d, gr.of(m)],
        [gr(Fraction(k), Fraction(-l)), gr.of(m), gr.of(0), gr.of(0)],
    ]


def compute_h11_closed_form() -> int:
    return B_MINUS + 1


def compute_h11_direct(p: AcsParams, scan_bound: int = 3, cert_bound: int = 12) -> int:
    """Sum of exact zero-sector nullities for (1,1)-forms.

    Every sector in the scan box is solved exactly over Q(i); sectors in
    the wider certificate box (and, by homogeneity of the certificate, all
    remaining ones) are excluded by h11_exclusion_certificate.
    """
    total = 0
    for k in range(-scan_bound, scan_bound + 1):
        for l in range(-scan_bound, scan_bound + 1):
            for m in range(-scan_bound, scan_bound + 1):
                cert = h11_exclusion_certificate(p, k, l, m)
                at_origin = (k, l, m) == (0, 0, 0)
                if cert.is_zero() != at_origin:
                    raise OracleDisagreement(f"certificate degenerated at ({k},{l},{m})")
                nullity = len(_exact_nullspace(_h11_sector_rows(p, k, l, m)))
                if not at_origin and nullity != 0:
                    raise OracleDisagreement(
                        f"sector ({k},{l},{m}) has nullity {nullity} despite a nonzero certificate"
                    )
                total += nullity
    for k in range(-cert_bound, cert_bound + 1):
        for l in range(-cert_bound, cert_bound + 1):
            for m in range(-cert_bound, cert_bound + 1):
                if h11_exclusion_certificate(p, k, l, m).is_zero() and (k, l, m) != (0, 0, 0):
                    raise OracleDisagreement(f"certificate degenerated at ({k},{l},{m})")
    return total


def compute_h11(p: AcsParams, metric: MetricSpec) -> int:
    """h^{1,1} = 3, cross-checked between the closed form and the direct solve."""
    if not metric.is_standard:
        raise UnsupportedMetric("h^{1,1} is only computed for the standard metric")
    closed = compute_h11_closed_form()
    direct = compute_h11_direct(p)
    if closed != direct:
        raise OracleDisagreement(f"h^{{1,1}} paths disagree: closed form {closed}, direct {direct}")
    return closed


# --- diamond assembly ---------------------------------------------------------------


@dataclass(frozen=True)
class HodgeDiamond:
    """3x3 table h[p][q] with per-entry provenance tags."""

    h: tuple
    provenance: tuple

    def __post_init__(self):
        if self.h[0][0] != 1 or self.h[2][2] != 1:
            raise ValueError("corner entries must be 1")
        for pp in range(3):
            for qq in range(3):
                if self.h[pp][qq] != self.h[2 - pp][2 - qq]:
                    raise ValueError(f"duality violated at ({pp},{qq})")
                if self.h[pp][qq] < 0:
                    raise ValueError("entries must be nonnegative")

    def entry(self, pp: int, qq: int) -> int:
        return self.h[pp][qq]


def hodge_diamond(p: AcsParams, metric: MetricSpec) -> HodgeDiamond:
    """Assemble the full table for rational d.

    Computed entries: h^{0,1} and h^{1,1}.  Closed-form entries: h^{0,0},
    h^{1,0}, h^{2,0}.  The remaining corners mirror across (p,q) ->
    (2-p,2-q).
    """
    h10, h20 = compute_h10_h20(p)
    h01, _ = compute_h01(p, metric)
    h11 = compute_h11(p, metric)
    h = (
        (1, h01, h20),
        (h10, h11, h10),
        (h20, h01, 1),
    )
    provenance = (
        (PROV_CLOSED, PROV_COMPUTED, PROV_SERRE),
        (PROV_CLOSED, PROV_COMPUTED, PROV_SERRE),
        (PROV_CLOSED, PROV_SERRE, PROV_SERRE),
    )
    return HodgeDiamond(h, provenance)


def diamond_report(p: AcsParams, metric: MetricSpec, diamond: HodgeDiamond) -> dict:
    return {
        "params": {"a": format_rational(p.a), "d": format_rational(p.d)},
        "metric": metric.label(),
        "h": [list(row) for row in diamond.h],
        "provenance": [list(row) for row in diamond.provenance],
    }


def diamond_ascii(diamond: HodgeDiamond) -> str:
    width = max(len(str(v)) for row in diamond.h for v in row)
    rows = []
    for s in range(5):
        ps = range(min(2, s), max(0, s - 2) - 1, -1)
        rows.append("  ".join(str(diamond.h[pp][s - pp]).center(width) for pp in ps))
    full = max(len(r) for r in rows)
    return "\n".join(r.center(full).rstrip() for r in rows)


# --- the metric-dependence demonstration ------------------------------------------


def ks_demo(K: int, a=0, r=1) -> dict:
    """h^{0,1} under both metrics at d = 5^{(K-1)/2}/3.

    The circle through the origin of diameter 2d carries exactly K lattice
    points for odd K, so the standard metric sees h^{0,1} = K while the
    deformed metric collapses the count to 1.  Both entries are computed,
    not read off.
    """
    if K < 1 or K % 2 == 0:
        raise ValueError("K must be an odd positive integer")
    d = Fraction(5 ** ((K - 1) // 2), 3)
    p = AcsParams(Fraction(a), d)
    standard_count, _ = compute_h01(p, MetricSpec.standard())
    rho_count, _ = compute_h01(p, MetricSpec.rho(Fraction(r)))
    return {"K": K, "d": d, "standard": standard_count, "rho": rho_count}
