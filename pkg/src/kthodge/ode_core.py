"""L^2 solvability of pencil ODEs y' = (Ax + B)y with 2x2 matrices.

In a frame diagonalizing A (eigenvalues lam1 > 0 > lam2), solutions carry
Gaussian envelopes e^{lam*x^2/2}, and a two-sided-decaying (Schwartz)
solution exists precisely when the frame-invariant ratio
b2*b3/(lam1 - lam2) is a negative integer -k (then the solution is a
Gaussian times a polynomial of degree k+1), or in the degenerate case
b2 = 0 where one envelope line decouples outright.  The quantization
criterion runs exactly over Q(i)(pi) whenever the input matrices are
exact; an adaptive shooting/matching integrator provides the independent
numerical verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .exact_arith import (
    GR_ZERO,
    GaussRational,
    QPiC,
    qpi_in_discrete_set,
    SET_ZMINUS,
)

MATCHING_EFOLD = 40.0
ZMINUS_FLOAT_TOL = 1e-9
ORACLE_DEFECT_TOL = 1e-5


class StepFailure(RuntimeError):
    """The adaptive integrator could not meet its local error targets."""


class DegreeExhausted(RuntimeError):
    """No nonzero polynomial solution up to the slack degree bound."""


class _ExactUnavailable(Exception):
    # internal: exact eigen-data needs a division the Laurent ring lacks
    pass


# --- 2x2 matrix helpers over QPiC -------------------------------------------


def _qmat(entries) -> tuple:
    return tuple(tuple(row) for row in entries)


def _qmat_mul(x, y):
    return _qmat(
        [
            [x[i][0] * y[0][j] + x[i][1] * y[1][j] for j in range(2)]
            for i in range(2)
        ]
    )


def _qmat_float(x) -> np.ndarray:
    return np.array([[x[i][j].float_eval() for j in range(2)] for i in range(2)], dtype=complex)


def _rational_sqrt(value):
    # exact sqrt of a nonnegative Fraction, or None
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _qpic_monomial_sqrt(x: QPiC) -> QPiC:
    """Square root of a single-term QPiC c*pi^(2j) with c a rational square."""
    if len(x.coeffs) != 1:
        raise _ExactUnavailable
    (exp, c), = x.coeffs
    if exp % 2 != 0 or c.im != 0:
        raise _ExactUnavailable
    root = _rational_sqrt(c.re)
    if root is None:
        raise _ExactUnavailable
    return QPiC.monomial(exp // 2, GaussRational.of(root), x.bound)


# --- systems and frames ------------------------------------------------------


@dataclass(eq=False)
class LinearPencilSystem:
    """The pencil y' = (Ax + B)y; float matrices always, exact ones when known."""

    A: np.ndarray
    B: np.ndarray
    A_exact: tuple | None = None  # 2x2 tuples of QPiC
    B_exact: tuple | None = None

    @staticmethod
    def from_float(A, B) -> "LinearPencilSystem":
        return LinearPencilSystem(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))

    @staticmethod
    def from_exact(A_exact, B_exact) -> "LinearPencilSystem":
        A_exact, B_exact = _qmat(A_exact), _qmat(B_exact)
        return LinearPencilSystem(_qmat_float(A_exact), _qmat_float(B_exact), A_exact, B_exact)


@dataclass(eq=False)
class ExactFrameData:
    P: tuple
    P_inv: tuple
    lam1: QPiC
    lam2: QPiC
    Btilde: tuple | None = None


@dataclass(eq=False)
class EigenFrame:
    P: np.ndarray
    P_inv: np.ndarray
    lam1: float
    lam2: float
    Btilde: np.ndarray | None = None
    exact: ExactFrameData | None = None


@dataclass(frozen=True)
class NotApplicable:
    reason: str
    eigenvalues: tuple | None = None


def _normalize_row(row, is_exact: bool):
    if is_exact:
        lead = None
        for entry in row:
            if not entry.is_zero():
                lead = entry
                break
        if lead is None:
            raise _ExactUnavailable
        if len(lead.coeffs) != 1:
            raise _ExactUnavailable
        return tuple(entry.divide_by_monomial(lead) for entry in row)
    row = np.asarray(row, dtype=complex)
    scale = np.abs(row).max()
    lead = row[0] if abs(row[0]) > 1e-12 * scale else row[1]
    return row / lead


def _left_eigvec_float(A: np.ndarray, lam: complex) -> np.ndarray:
    M = A - lam * np.eye(2)
    cand1 = np.array([M[1, 0], -M[0, 0]])
    cand2 = np.array([M[1, 1], -M[0, 1]])
    vec = cand1 if np.abs(cand1).max() >= np.abs(cand2).max() else cand2
    return _normalize_row(vec, is_exact=False)


def eigenframe(A) -> EigenFrame | NotApplicable:
    """Diagonalizing frame of A with lam1 > lam2 real, P rows normalized to
    leading entry 1 (deterministic; the tested quantity b2*b3 is invariant
    under the leftover diagonal freedom)."""
    if isinstance(A, np.ndarray):
        return _eigenframe_float(A)
    A = _qmat(A)
    try:
        return _eigenframe_exact(A)
    except _ExactUnavailable:
        return _eigenframe_float(_qmat_float(A))


def _eigenframe_float(A: np.ndarray) -> EigenFrame | NotApplicable:
    A = np.asarray(A, dtype=complex)
    scale = max(1.0, float(np.abs(A).max()))
    eigs = np.linalg.eigvals(A)
    if max(abs(e.imag) for e in eigs) > 1e-9 * scale:
        return NotApplicable("eigenvalues are not real", tuple(eigs))
    lams = sorted((e.real for e in eigs), reverse=True)
    if lams[0] - lams[1] <= 1e-9 * scale:
        return NotApplicable("eigenvalues are not distinct", tuple(eigs))
    lam1, lam2 = lams
    P = np.vstack([_left_eigvec_float(A, lam1), _left_eigvec_float(A, lam2)])
    return EigenFrame(P, np.linalg.inv(P), lam1, lam2)


def _eigenframe_exact(A: tuple) -> EigenFrame | NotApplicable:
    tr = A[0][0] + A[1][1]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    disc = tr * tr - det.scale(4)
    sqrt_disc = _qpic_monomial_sqrt(disc)  # raises _ExactUnavailable if not a monomial square
    if sqrt_disc.is_zero():
        return NotApplicable("eigenvalues are not distinct")
    lam_a = (tr + sqrt_disc).scale(Fraction(1, 2))
    lam_b = (tr - sqrt_disc).scale(Fraction(1, 2))
    for lam in (lam_a, lam_b):
        if any(c.im != 0 for _, c in lam.coeffs):
            return NotApplicable("eigenvalues are not real", (lam_a.float_eval(), lam_b.float_eval()))
    lam1, lam2 = (lam_a, lam_b) if lam_a.float_eval().real > lam_b.float_eval().real else (lam_b, lam_a)

    rows = []
    for lam in (lam1, lam2):
        M = [
            [A[0][0] - lam, A[0][1]],
            [A[1][0], A[1][1] - lam],
        ]
        cand = (M[1][0], -M[0][0])
        if all(e.is_zero() for e in cand):
            cand = (M[1][1], -M[0][1])
        rows.append(_normalize_row(cand, is_exact=True))
    P = _qmat(rows)
    det_p = P[0][0] * P[1][1] - P[0][1] * P[1][0]
    if det_p.is_zero():
        raise _ExactUnavailable
    if len(det_p.coeffs) != 1:
        raise _ExactUnavailable
    P_inv = _qmat(
        [
            [P[1][1].divide_by_monomial(det_p), (-P[0][1]).divide_by_monomial(det_p)],
            [(-P[1][0]).divide_by_monomial(det_p), P[0][0].divide_by_monomial(det_p)],
        ]
    )
    exact = ExactFrameData(P, P_inv, lam1, lam2)
    return EigenFrame(
        _qmat_float(P), _qmat_float(P_inv), lam1.float_eval().real, lam2.float_eval().real, exact=exact
    )


# --- solvability criterion ----------------------------------------------------


@dataclass(eq=False)
class SolvabilityResult:
    verdict: str  # "solvable" | "not_solvable" | "not_applicable"
    kindex: int | None = None
    ratio: complex | None = None
    ratio_exact: QPiC | None = None
    degenerate: bool = False
    reason: str | None = None
    frame: EigenFrame | None = None

    @property
    def is_solvable(self) -> bool:
        return self.verdict == "solvable"


def l2_solvability(sys: LinearPencilSystem, tol: float = ZMINUS_FLOAT_TOL) -> SolvabilityResult:
    """Decide existence of a two-sided-decaying solution.

    Solvable(k >= 1) when b2*b3/(lam1-lam2) = -k exactly (or within `tol`
    of a negative integer on the float path); Solvable(0) in the degenerate
    case b2 = 0, where y = e^{lam2 x^2/2 + b4 x} times the lam2-eigenline
    already solves the system (no quantization involved); NotSolvable
    otherwise.  Exact inputs are decided exactly.
    """
    frame = eigenframe(sys.A_exact if sys.A_exact is not None else sys.A)
    if isinstance(frame, NotApplicable):
        return SolvabilityResult("not_applicable", reason=frame.reason)
    if not (frame.lam1 > 0 > frame.lam2):
        reason = (
            "all solution pairs blow up in both directions"
            if frame.lam2 > 0
            else "all solution pairs decay in both directions"
        )
        return SolvabilityResult("not_applicable", reason=reason, frame=frame)

    if frame.exact is not None and sys.B_exact is not None:
        Bt = _qmat_mul(_qmat_mul(frame.exact.P, sys.B_exact), frame.exact.P_inv)
        frame.exact.Btilde = Bt
        frame.Btilde = _qmat_float(Bt)
        b2, b3 = Bt[0][1], Bt[1][0]
        if b2.is_zero():
            return SolvabilityResult("solvable", kindex=0, ratio=0j, degenerate=True, frame=frame)
        lam_diff = frame.exact.lam1 - frame.exact.lam2
        try:
            ratio = (b2 * b3).divide_by_monomial(lam_diff)
        except ArithmeticError:
            return _l2_solvability_float(sys, frame, tol)
        membership = qpi_in_discrete_set(ratio, SET_ZMINUS)
        if membership.is_member:
            return SolvabilityResult(
                "solvable", kindex=-membership.member, ratio=ratio.float_eval(), ratio_exact=ratio, frame=frame
            )
        return SolvabilityResult("not_solvable", ratio=ratio.float_eval(), ratio_exact=ratio, frame=frame)

    return _l2_solvability_float(sys, frame, tol)


def _l2_solvability_float(sys, frame: EigenFrame, tol: float) -> SolvabilityResult:
    Bt = frame.P @ sys.B @ frame.P_inv
    frame.Btilde = Bt
    b2, b3 = Bt[0, 1], Bt[1, 0]
    scale = max(1.0, float(np.abs(sys.B).max()))
    if abs(b2) <= 1e-12 * scale:
        return SolvabilityResult("solvable", kindex=0, ratio=0j, degenerate=True, frame=frame)
    ratio = b2 * b3 / (frame.lam1 - frame.lam2)
    k = round(-ratio.real)
    if k >= 1 and abs(ratio + k) <= tol:
        return SolvabilityResult("solvable", kindex=k, ratio=ratio, frame=frame)
    return SolvabilityResult("not_solvable", ratio=ratio, frame=frame)


# --- explicit Schwartz solutions ----------------------------------------------


@dataclass(eq=False)
class SchwartzSolution:
    """y(x) = e^{lam2 x^2/2 + mu x} * P_inv @ (polyF(x), polyG(x)).

    polyF/polyG are coefficient lists (ascending powers) of the vector
    polynomial in the diagonalizing frame; mu = b4.  When the construction
    ran exactly, exact_polyF/exact_polyG carry the Q(i) coefficients.
    """

    lam2: float
    mu: complex
    polyF: tuple
    polyG: tuple
    frame: EigenFrame
    exact_polyF: tuple | None = None
    exact_polyG: tuple | None = None

    def _envelope(self, x):
        return np.exp(0.5 * self.lam2 * x * x + self.mu * x)

    def eval(self, x: float) -> np.ndarray:
        v = np.array(
            [
                sum(c * x**j for j, c in enumerate(self.polyF)),
                sum(c * x**j for j, c in enumerate(self.polyG)),
            ]
        )
        return self._envelope(x) * (self.frame.P_inv @ v)

    def eval_deriv(self, x: float) -> np.ndarray:
        v = np.array(
            [
                sum(c * x**j for j, c in enumerate(self.polyF)),
                sum(c * x**j for j, c in enumerate(self.polyG)),
            ]
        )
        dv = np.array(
            [
                sum(j * c * x ** (j - 1) for j, c in enumerate(self.polyF) if j > 0),
                sum(j * c * x ** (j - 1) for j, c in enumerate(self.polyG) if j > 0),
            ]
        )
        return self._envelope(x) * (self.frame.P_inv @ ((self.lam2 * x + self.mu) * v + dv))


def _exact_nullspace(matrix):
    """Nullspace basis of a matrix over Q(i) (rows x cols, GaussRational)."""
    rows = [list(r) for r in matrix]
    ncols = len(rows[0])
    pivot_cols = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [e / inv for e in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        vec = [GR_ZERO] * ncols
        vec[fc] = GaussRational.of(1)
        for row_idx, pc in enumerate(pivot_cols):
            vec[pc] = -rows[row_idx][fc]
        basis.append(tuple(vec))
    return basis


def _btilde_gauss_entries(exact: ExactFrameData):
    # returns (lam_diff, b1, b2, b3, b4) as GaussRational when everything is
    # a pi-constant, else None (the polynomial solve needs field division)
    values = []
    lam_diff = exact.lam1 - exact.lam2
    for q in (lam_diff, *[exact.Btilde[i][j] for i in range(2) for j in range(2)]):
        if q.is_zero():
            values.append(GR_ZERO)
        elif len(q.coeffs) == 1 and q.coeffs[0][0] == 0:
            values.append(q.coeffs[0][1])
        else:
            return None
    return tuple(values)  # (lam_diff, b1, b2, b3, b4)


def construct_schwartz_solution(
    sys: LinearPencilSystem, solvability: SolvabilityResult | None = None
) -> SchwartzSolution:
    """Build the explicit Gaussian-times-polynomial solution.

    Matching powers of x in y' - (Ax+B)y = 0 under the ansatz
    y = e^{lam2 x^2/2 + b4 x} P_inv (p(x), q(x)) yields a finite homogeneous
    linear system; its one-dimensional nullspace gives the coefficients.
    Degrees kindex+1 .. kindex+3 are tried before DegreeExhausted.
    """
    solv = solvability if solvability is not None else l2_solvability(sys)
    if not solv.is_solvable:
        raise ValueError(f"system is not solvable: {solv.verdict}")
    frame = solv.frame
    k = solv.kindex

    exact_ok = frame.exact is not None and frame.exact.Btilde is not None
    gauss = _btilde_gauss_entries(frame.exact) if exact_ok else None
    if gauss is not None:
        lam_diff, b1, b2, b3, b4 = gauss
        for degree in range(k + 1, k + 4):
            matrix = _exact_coefficient_matrix(lam_diff, b1, b2, b3, b4, degree)
            basis = _exact_nullspace(matrix)
            if basis:
                vec = basis[0]
                pcoef, qcoef = _exact_normalize(vec[: degree + 1], vec[degree + 1 :])
                return SchwartzSolution(
                    frame.lam2,
                    complex(frame.Btilde[1, 1]),
                    tuple(c.to_complex() for c in pcoef),
                    tuple(c.to_complex() for c in qcoef),
                    frame,
                    exact_polyF=pcoef,
                    exact_polyG=qcoef,
                )
        raise DegreeExhausted(f"no exact polynomial solution up to degree {k + 3}")

    Bt = frame.Btilde
    lam_diff = frame.lam1 - frame.lam2
    b1, b2, b3, b4 = Bt[0, 0], Bt[0, 1], Bt[1, 0], Bt[1, 1]
    for degree in range(k + 1, k + 4):
        matrix = np.zeros((2 * (degree + 2), 2 * (degree + 1)), dtype=complex)
        for j in range(degree + 2):
            if j + 1 <= degree:
                matrix[2 * j, j + 1] = j + 1
                matrix[2 * j + 1, degree + 1 + j + 1] = j + 1
            if j - 1 >= 0:
                matrix[2 * j, j - 1] -= lam_diff
            if j <= degree:
                matrix[2 * j, j] -= b1 - b4
                matrix[2 * j, degree + 1 + j] -= b2
                matrix[2 * j + 1, j] -= b3
        _, s, vh = np.linalg.svd(matrix)
        if s[-1] <= 1e-10 * s[0]:
            vec = vh[-1].conj()
            vec = vec / vec[int(np.argmax(np.abs(vec)))]
            return SchwartzSolution(
                frame.lam2, complex(b4), tuple(vec[: degree + 1]), tuple(vec[degree + 1 :]), frame
            )
    raise DegreeExhausted(f"no polynomial solution up to degree {k + 3}")


def _exact_coefficient_matrix(lam_diff, b1, b2, b3, b4, degree):
    ncols = 2 * (degree + 1)
    rows = []
    for j in range(degree + 2):
        row_p = [GR_ZERO] * ncols
        row_q = [GR_ZERO] * ncols
        if j + 1 <= degree:
            row_p[j + 1] = GaussRational.of(j + 1)
            row_q[degree + 1 + j + 1] = GaussRational.of(j + 1)
        if j - 1 >= 0:
            row_p[j - 1] = row_p[j - 1] - lam_diff
        if j <= degree:
            row_p[j] = row_p[j] - (b1 - b4)
            row_p[degree + 1 + j] = row_p[degree + 1 + j] - b2
            row_q[j] = row_q[j] - b3
        rows.append(row_p)
        rows.append(row_q)
    return rows


def _exact_normalize(pcoef, qcoef):
    # scale so the max-magnitude coefficient is exactly 1 (deterministic: first max)
    allc = list(pcoef) + list(qcoef)
    mags = [abs(c.to_complex()) for c in allc]
    lead = allc[mags.index(max(mags))]
    return tuple(c / lead for c in pcoef), tuple(c / lead for c in qcoef)


def coefficient_residual(sol: SchwartzSolution, sys: LinearPencilSystem) -> float:
    """Max coefficient-space residual of the defining recurrence; exactly 0.0
    when the solution was built on the exact path."""
    frame = sol.frame
    if sol.exact_polyF is not None and frame.exact is not None and frame.exact.Btilde is not None:
        gauss = _btilde_gauss_entries(frame.exact)
        if gauss is not None:
            lam_diff, b1, b2, b3, b4 = gauss
            degree = len(sol.exact_polyF) - 1
            worst = 0.0
            matrix = _exact_coefficient_matrix(lam_diff, b1, b2, b3, b4, degree)
            vec = list(sol.exact_polyF) + list(sol.exact_polyG)
            for row in matrix:
                acc = GR_ZERO
                for a, b in zip(row, vec):
                    acc = acc + a * b
                worst = max(worst, abs(acc.to_complex()))
            return worst
    Bt = frame.Btilde
    lam_diff = frame.lam1 - frame.lam2
    b1, b2, b3, b4 = Bt[0, 0], Bt[0, 1], Bt[1, 0], Bt[1, 1]
    degree = len(sol.polyF) - 1

    def at(coeffs, j):
        return coeffs[j] if 0 <= j < len(coeffs) else 0j

    worst = 0.0
    for j in range(degree + 2):
        r1 = (j + 1) * at(sol.polyF, j + 1) - lam_diff * at(sol.polyF, j - 1)
        r1 -= (b1 - b4) * at(sol.polyF, j) + b2 * at(sol.polyG, j)
        r2 = (j + 1) * at(sol.polyG, j + 1) - b3 * at(sol.polyF, j)
        worst = max(worst, abs(r1), abs(r2))
    return worst


def residual(sol: SchwartzSolution, sys: LinearPencilSystem, xs: Sequence[float]) -> float:
    """max over xs of ||y' - (Ax+B)y|| / (1 + ||y||), derivatives analytic."""
    worst = 0.0
    for x in xs:
        y = sol.eval(x)
        dy = sol.eval_deriv(x)
        r = dy - (sys.A * x + sys.B) @ y
        worst = max(worst, float(np.linalg.norm(r) / (1.0 + np.linalg.norm(y))))
    return worst


# --- numerical matching oracle -------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    verdict: str  # "l2_exists" | "no_l2" | "inconclusive"
    defect: float
    X: float
    floor: float = 1.0  # smallest defect the matching point can resolve

    @property
    def l2_exists(self) -> bool:
        return self.verdict == "l2_exists"


def default_matching_window(frame: EigenFrame, efold: float = MATCHING_EFOLD) -> float:
    """Half-width X for the matching integration.

    The Gaussian envelopes are centered at -Re(b1)/lam1 and -Re(b4)/lam2;
    the window extends past the farther center by enough that the unwanted
    solution is washed out by e^{-efold}.
    """
    Bt = frame.Btilde
    drift = 0.0
    if Bt is not None:
        b1 = Bt[0][0] if isinstance(Bt, tuple) else Bt[0, 0]
        b4 = Bt[1][1] if isinstance(Bt, tuple) else Bt[1, 1]
        drift = max(abs(complex(b1).real) / frame.lam1, abs(complex(b4).real) / abs(frame.lam2))
    return drift + math.sqrt(2.0 * efold / (frame.lam1 - frame.lam2))


def _right_eigvec(A: np.ndarray, lam: float) -> np.ndarray:
    M = A - lam * np.eye(2)
    cand1 = np.array([M[0, 1], -M[0, 0]])
    cand2 = np.array([M[1, 1], -M[1, 0]])
    vec = cand1 if np.abs(cand1).max() >= np.abs(cand2).max() else cand2
    return vec / np.linalg.norm(vec)


def _integrate_segmented(sys, x_from: float, x_to: float, y0: np.ndarray, growth: float) -> np.ndarray:
    segments = max(1, int(math.ceil(growth / 200.0)))
    xs = np.linspace(x_from, x_to, segments + 1)
    y = y0.astype(complex)

    def rhs(x, y):
        return (sys.A * x + sys.B) @ y

    for left, right in zip(xs[:-1], xs[1:]):
        res = solve_ivp(rhs, (left, right), y, method="DOP853", rtol=1e-11, atol=1e-14, dense_output=False)
        if not res.success:
            raise StepFailure(f"integrator failed on [{left}, {right}]: {res.message}")
        y = res.y[:, -1]
        norm = np.linalg.norm(y)
        if norm > 0:
            y = y / norm  # defect is scale-invariant; keep magnitudes tame
    return y


def matching_floor(frame: EigenFrame) -> float:
    """Smallest true defect visible at the matching point x = 0.

    The Weber substitution shifts the independent variable by
    (b4~ - b1~)/(lam2 - lam1).  An imaginary shift i*c suppresses the
    dominant branch at the origin by exp(-gamma c^2 / 2) (gamma = lam1 -
    lam2), so a connection coefficient of order one produces a matching
    defect of only that size: a measured defect below this floor says
    nothing.  A real shift r moves the crossover outward and raises the
    floor again.
    """
    if frame.Btilde is None:
        raise ValueError("matching_floor needs Btilde populated")
    gamma = frame.lam1 - frame.lam2
    shift = (frame.Btilde[1, 1] - frame.Btilde[0, 0]) / (frame.lam2 - frame.lam1)
    c, r = abs(complex(shift).imag), abs(complex(shift).real)
    return float(min(1.0, math.exp(-0.5 * gamma * max(c * c - r * r, 0.0))))


def matching_oracle(
    sys: LinearPencilSystem, X: float | None = None, tol: float = ORACLE_DEFECT_TOL
) -> OracleResult:
    """Two-sided decay matching.

    Seeds the decaying direction (the lam2 eigenline of A) at -X and at +X,
    integrates both to 0, and reports the normalized matching defect
    |det[y-, y+]| / (|y-| |y+|).  L2Exists iff defect < tol, provided the
    resolution floor sits well above tol; strongly non-normal systems can
    hide an order-one connection coefficient below machine noise, and for
    those a small defect is reported as inconclusive rather than as a
    certificate.
    """
    frame = eigenframe(sys.A)
    if isinstance(frame, NotApplicable):
        raise ValueError(f"matching oracle needs a real-diagonalizable pencil: {frame.reason}")
    if not (frame.lam1 > 0 > frame.lam2):
        raise ValueError("matching oracle needs lam1 > 0 > lam2")
    frame.Btilde = frame.P @ sys.B @ frame.P_inv
    if X is None:
        X = default_matching_window(frame)
    floor = matching_floor(frame)
    v2 = _right_eigvec(sys.A, frame.lam2)
    growth = 0.5 * abs(frame.lam2) * X * X + float(np.abs(sys.B).max()) * X
    y_minus = _integrate_segmented(sys, -X, 0.0, v2, growth)
    y_plus = _integrate_segmented(sys, X, 0.0, v2, growth)
    defect = abs(y_minus[0] * y_plus[1] - y_minus[1] * y_plus[0])
    defect /= float(np.linalg.norm(y_minus) * np.linalg.norm(y_plus))
    if defect >= tol:
        verdict = "no_l2"
    elif floor >= 10.0 * tol:
        verdict = "l2_exists"
    else:
        verdict = "inconclusive"
    return OracleResult(verdict, float(defect), float(X), floor)


# --- serialization --------------------------------------------------------------


def matrix_to_json(M: np.ndarray) -> list:
    return [[[float(M[i, j].real), float(M[i, j].imag)] for j in range(2)] for i in range(2)]


def matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(e[0], e[1]) for e in row] for row in data], dtype=complex)


def system_to_json(sys: LinearPencilSystem) -> dict:
    return {"A": matrix_to_json(sys.A), "B": matrix_to_json(sys.B)}


def system_from_json(data) -> LinearPencilSystem:
    return LinearPencilSystem.from_float(matrix_from_json(data["A"]), matrix_from_json(data["B"]))
