"""Finite-difference kernel counting and the aggregated independent estimate."""

import warnings
from fractions import Fraction

import numpy as np
import pytest

from conftest import make_random_systems
from kthodge.hodge_engine import compute_h01, solve_deq, surd_sector_system
from kthodge.kt_geometry import AcsParams, HeisenbergSector, MetricSpec, sector_system
from kthodge.ode_core import LinearPencilSystem, l2_solvability
from kthodge.spectral_oracle import (
    FD_FLOOR_CUTOFF,
    IllConditionedWarning,
    TruncationWarning,
    discretize_sector_operator,
    fd_sector_kernel,
    oracle_h01,
    pseudomode_floor,
    verify_random,
    verify_sectors,
)


def params(a, d):
    return AcsParams(Fraction(a), Fraction(d))


@pytest.fixture(scope="module")
def random_pair():
    systems = make_random_systems(7, 6)
    solvable = next(s for s, k in systems if k is not None)
    not_solvable = next(s for s, k in systems if k is None)
    return solvable, not_solvable


# --- discretization ----------------------------------------------------------------


def test_operator_shape_and_structure(random_pair):
    sysx, _ = random_pair
    op = discretize_sector_operator(sysx, X=5.0, N=300)
    assert op.matrix.shape == (2 * 301, 2 * 300)
    dense = op.matrix.toarray()
    assert np.isfinite(dense).all()
    # each residual row couples one interval, i.e. at most two 2-blocks
    for j in range(301):
        row_band = dense[2 * j : 2 * j + 2]
        touched = {c // 2 for c in np.nonzero(row_band)[1]}
        assert touched <= {j - 1, j}


def test_fd_rejects_coarse_grid(random_pair):
    sysx, _ = random_pair
    with pytest.raises(ValueError):
        fd_sector_kernel(sysx, N=100)


# --- kernel counting on engineered pencils -----------------------------------------


def test_engineered_solvable_has_kernel(random_pair):
    solvable, _ = random_pair
    report = fd_sector_kernel(solvable)
    assert report.dim == 1
    assert report.sigma_min < report.threshold


def test_engineered_not_solvable_has_no_kernel(random_pair):
    _, not_solvable = random_pair
    report = fd_sector_kernel(not_solvable)
    assert report.dim == 0
    assert report.sigma_min > 10 * report.threshold


def test_zero_forcing_gaussian_kernel():
    # B = 0 leaves the pure Gaussian solution in each eigendirection with
    # negative rate; one decaying direction here, so dimension one
    A = np.diag([1.5, -0.8]).astype(complex)
    sysx = LinearPencilSystem.from_float(A, np.zeros((2, 2), dtype=complex))
    solv = l2_solvability(sysx)
    assert solv.is_solvable and solv.degenerate
    assert fd_sector_kernel(sysx).dim == 1


def test_refinement_separates_kernel_from_noise(random_pair):
    solvable, not_solvable = random_pair
    fine = fd_sector_kernel(solvable, N=1600)
    coarse = fd_sector_kernel(solvable, N=800)
    assert (coarse.dim, fine.dim) == (1, 1)
    assert coarse.sigma_min / fine.sigma_min > 2.5  # second-order scheme

    fine = fd_sector_kernel(not_solvable, N=1600)
    coarse = fd_sector_kernel(not_solvable, N=800)
    assert (coarse.dim, fine.dim) == (0, 0)
    assert fine.sigma_min > 0.5 * coarse.sigma_min  # stabilizes, does not vanish


def test_ill_conditioned_tolerance_warns(random_pair):
    # a tolerance comparable to the gap above the kernel makes counting ambiguous
    solvable, _ = random_pair
    with pytest.warns(IllConditionedWarning):
        fd_sector_kernel(solvable, N=400, tol=1e-1)


def test_report_to_json(random_pair):
    solvable, _ = random_pair
    payload = fd_sector_kernel(solvable).to_json()
    assert set(payload) == {"dim", "sigma_min", "sigma_gap", "threshold", "N", "X"}


# --- twisted-sector checks ----------------------------------------------------------


@pytest.mark.parametrize("sector", [(0, 0, 1), (1, 0, 1), (0, 0, 2), (-2, 1, 2)])
def test_rational_d_sectors_empty(sector):
    k, m, n = sector
    sysx = sector_system(params(0, Fraction(5, 2)), MetricSpec.standard(), HeisenbergSector(k=k, m=m, n=n))
    assert not l2_solvability(sysx).is_solvable
    assert fd_sector_kernel(sysx).dim == 0


def test_surd_sector_kernel_refined():
    case = solve_deq(1, -1)
    sysx = surd_sector_system(case, n=1, m=0)
    report = fd_sector_kernel(sysx, N=2400)
    assert report.dim == 1


def test_pseudomode_floor_split():
    standard = sector_system(params(0, Fraction(5, 3)), MetricSpec.standard(), HeisenbergSector(k=0, m=0, n=1))
    assert pseudomode_floor(standard) == 1.0
    deformed = sector_system(params(0, Fraction(5, 3)), MetricSpec.rho(Fraction(1)), HeisenbergSector(k=0, m=0, n=1))
    assert pseudomode_floor(deformed) < FD_FLOOR_CUTOFF * 1e-6


# --- aggregated estimate ------------------------------------------------------------


@pytest.mark.parametrize("d, expected", [(Fraction(1), 4), (Fraction(5, 2), 6), (Fraction(5, 3), 3)])
def test_oracle_matches_exact_count(d, expected):
    p = params(0, d)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        assert oracle_h01(p, MetricSpec.standard(), nmax=3) == expected
    assert compute_h01(p, MetricSpec.standard())[0] == expected


def test_oracle_small_d_zero_sector_only():
    # decay bound below 1 leaves no twisted sectors and no skip warning
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        assert oracle_h01(params(0, Fraction(1, 10)), MetricSpec.standard()) == 1


def test_oracle_warns_on_skipped_sectors():
    with pytest.warns(TruncationWarning, match="skipped"):
        oracle_h01(params(0, Fraction(1)), MetricSpec.standard(), nmax=1)


def test_oracle_warns_on_uncovered_circle():
    with pytest.warns(TruncationWarning) as record:
        oracle_h01(params(0, Fraction(25, 3)), MetricSpec.standard(), nmax=1, lmbound=10)
    assert any("circle" in str(w.message) for w in record)


@pytest.mark.parametrize(
    "a, d, r, expected",
    [(0, Fraction(5, 3), 1, 1), (0, Fraction(3, 2), 1, 2), (Fraction(1, 2), Fraction(1, 2), Fraction(-2, 5), 2)],
)
def test_oracle_deformed_metric(a, d, r, expected):
    p = params(a, d)
    metric = MetricSpec.rho(Fraction(r))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        assert oracle_h01(p, metric, nmax=2) == expected
    assert compute_h01(p, metric)[0] == expected


# --- verification tables -------------------------------------------------------------


def test_verify_sectors_standard_all_agree():
    rows = verify_sectors(params(0, Fraction(5, 2)), MetricSpec.standard(), nmax=1, k_cutoff=1)
    assert len(rows) == 6
    assert all(row.agree for row in rows)
    assert all(row.method == "fd" for row in rows)
    payload = rows[0].to_json()
    assert set(payload) == {"sector", "criterion", "oracle_dim", "sigma_min", "agree", "method"}


def test_verify_sectors_deformed_routes_to_ratio():
    rows = verify_sectors(params(0, Fraction(5, 3)), MetricSpec.rho(Fraction(1)), nmax=1, k_cutoff=2)
    assert all(row.method == "ratio" for row in rows)
    assert all(row.agree for row in rows)
    assert all(row.oracle_dim == 0 for row in rows)


def test_verify_random_three_way_agreement():
    rows = verify_random(count=10, seed=3)
    assert len(rows) == 10
    assert all(row.agree for row in rows)
