from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kthodge.exact_arith import (
    SET_4PI_ZMINUS,
    SET_4ZMINUS,
    SET_ZMINUS,
    ExponentOverflow,
    GaussRational,
    QPiC,
    format_rational,
    parse_rational,
    qpi_arith,
    qpi_classify,
    qpi_from_json,
    qpi_in_discrete_set,
    qpi_to_json,
)


def gr(re=0, im=0):
    return GaussRational.of(re, im)


def test_rational_string_round_trip():
    assert parse_rational("5/3") == Fraction(5, 3)
    assert parse_rational("-7") == Fraction(-7)
    assert format_rational(Fraction(5, 3)) == "5/3"
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        parse_rational("one half")


def test_pi_times_pi_inverse_is_one():
    x = QPiC.pi(1)
    y = QPiC.pi(-1)
    assert qpi_arith(x, y, "mul") == QPiC.from_rational(1)


def test_addition_cancels_constant_term():
    x = QPiC.make({0: gr(2), 1: gr(3)})
    y = QPiC.from_rational(-2)
    assert qpi_arith(x, y, "add") == QPiC.monomial(1, gr(3))


def test_gaussian_norm_product():
    x = QPiC.from_gauss(gr(1, 1))
    y = QPiC.from_gauss(gr(1, -1))
    assert qpi_arith(x, y, "mul") == QPiC.from_rational(2)


def test_product_exponent_overflow():
    x = QPiC.pi(3)
    with pytest.raises(ExponentOverflow):
        qpi_arith(x, x, "mul")


def test_larger_bound_is_respected():
    x = QPiC.pi(3, bound=12)
    assert (x * x * x).coeffs == ((9, gr(1)),)


def test_classify_zero_and_constants():
    assert qpi_classify(QPiC.zero()).is_rational_constant
    assert qpi_classify(QPiC.zero()).value == gr(0)
    c = qpi_classify(QPiC.from_rational(-5))
    assert c.is_rational_constant and c.value == gr(-5)


def test_classify_mixed_terms_nonconstant():
    # pi^-1 and pi^1 terms together: n/(64 d^2) pi^-1 - (d^2/n) pi with d = n = 1
    x = QPiC.make({-1: gr(Fraction(1, 64)), 1: gr(-1)})
    assert qpi_classify(x).kind == "nonconstant"


def test_discrete_set_membership():
    assert qpi_in_discrete_set(QPiC.monomial(1, gr(-8)), SET_4PI_ZMINUS).member == -2
    assert not qpi_in_discrete_set(QPiC.from_rational(-8), SET_4PI_ZMINUS).is_member
    zero = QPiC.pi() - QPiC.pi()
    assert not qpi_in_discrete_set(zero, SET_ZMINUS).is_member
    assert qpi_in_discrete_set(QPiC.from_rational(-3), SET_ZMINUS).member == -3
    assert qpi_in_discrete_set(QPiC.from_rational(-12), SET_4ZMINUS).member == -3
    assert not qpi_in_discrete_set(QPiC.from_rational(-13), SET_4ZMINUS).is_member
    assert not qpi_in_discrete_set(QPiC.monomial(1, gr(-8, 1)), SET_4PI_ZMINUS).is_member
    assert not qpi_in_discrete_set(QPiC.monomial(1, gr(Fraction(-7, 2))), SET_4PI_ZMINUS).is_member


small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def qpic_values(draw):
    n_terms = draw(st.integers(min_value=0, max_value=3))
    coeffs = {}
    for _ in range(n_terms):
        e = draw(st.integers(min_value=-2, max_value=2))
        coeffs[e] = GaussRational(draw(small_rationals), draw(small_rationals))
    return QPiC.make(coeffs, bound=12)


@settings(max_examples=150, deadline=None)
@given(qpic_values(), qpic_values(), qpic_values())
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@settings(max_examples=100, deadline=None)
@given(qpic_values(), qpic_values())
def test_conjugation_is_multiplicative(x, y):
    assert (x * y).conj() == x.conj() * y.conj()
    assert (x + y).conj() == x.conj() + y.conj()


@settings(max_examples=100, deadline=None)
@given(qpic_values(), qpic_values())
def test_classification_under_arithmetic(x, y):
    cx, cy = qpi_classify(x), qpi_classify(y)
    if cx.is_rational_constant and cy.is_rational_constant:
        assert qpi_classify(x * y).is_rational_constant
    if cx.kind == "nonconstant" and cy.is_rational_constant:
        assert qpi_classify(x + y).kind == "nonconstant"


@settings(max_examples=100, deadline=None)
@given(qpic_values(), qpic_values())
def test_float_eval_tracks_exact_arithmetic(x, y):
    exact = (x * y + x).float_eval()
    approx = x.float_eval() * y.float_eval() + x.float_eval()
    scale = max(1.0, abs(exact), abs(approx))
    assert abs(exact - approx) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(qpic_values())
def test_json_round_trip(x):
    assert qpi_from_json(qpi_to_json(x), bound=12) == x
