import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kthodge.lattice_nt import (
    CountResult,
    ResourceLimit,
    SchinzelResult,
    count_by_formula,
    factorize,
    lattice_points_on_circle,
    r2_of_square,
    schinzel_d_for_target,
)


def brute_force_r2(p):
    # integer pairs on x^2 + y^2 = p^2
    hits = 0
    for x in range(-p, p + 1):
        y2 = p * p - x * x
        y = math.isqrt(y2)
        if y * y == y2:
            hits += 1 if y == 0 else 2
    return hits


def test_factorize_examples():
    assert factorize(1).factors == ()
    assert factorize(25).factors == ((5, 2),)
    assert factorize(360000).factors == ((2, 6), (3, 2), (5, 4))


def test_factorize_multiplies_back():
    for n in (2, 97, 1009 * 1013, 2**5 * 3 * 49):
        f = factorize(n)
        prod = 1
        for p, e in f.factors:
            prod *= p**e
        assert prod == n


def test_factorize_resource_limit():
    with pytest.raises(ResourceLimit):
        factorize(2**97)


def test_r2_of_square_examples():
    assert r2_of_square(1) == 4
    assert r2_of_square(5) == 12
    assert r2_of_square(3) == 4


def test_r2_of_square_matches_brute_force():
    for p in range(1, 61):
        assert r2_of_square(p) == brute_force_r2(p)


def test_circle_paper_count_five_halves():
    assert lattice_points_on_circle(Fraction(5, 2)).count == 6


def test_circle_unit_d_points():
    got = lattice_points_on_circle(Fraction(1))
    assert set(got.points) == {(0, 0), (2, 0), (1, 1), (1, -1)}


def test_circle_one_third_only_origin():
    assert lattice_points_on_circle(Fraction(1, 3)).points == ((0, 0),)


def test_circle_origin_always_present():
    for d in (Fraction(7, 5), Fraction(-3), Fraction(25, 3)):
        assert (0, 0) in lattice_points_on_circle(d).points


def test_circle_rejects_zero():
    with pytest.raises(ValueError):
        lattice_points_on_circle(Fraction(0))


def test_count_by_formula_examples():
    assert count_by_formula(Fraction(5, 3)) == CountResult("count", 3)
    assert count_by_formula(Fraction(1, 2)) == CountResult("count", 2)
    assert count_by_formula(Fraction(1, 6)).status == "unsupported_denominator"


def test_half_integer_brute_force():
    assert set(lattice_points_on_circle(Fraction(1, 2)).points) == {(0, 0), (1, 0)}


def test_formula_matches_enumeration_up_to_60():
    for q in range(1, 6):
        for p in range(1, 61):
            if math.gcd(p, q) != 1:
                continue
            d = Fraction(p, q)
            assert count_by_formula(d).count == lattice_points_on_circle(d).count, d


def test_negative_d_reflection_symmetry():
    for p, q in ((5, 2), (7, 1), (13, 5), (4, 3)):
        d = Fraction(p, q)
        assert lattice_points_on_circle(d).count == lattice_points_on_circle(-d).count


def test_schinzel_examples():
    assert schinzel_d_for_target(3) == SchinzelResult("reachable", Fraction(5, 3))
    assert schinzel_d_for_target(4) == SchinzelResult("reachable", Fraction(1))
    assert schinzel_d_for_target(8).status == "unreachable"


def test_schinzel_reachable_counts_verify():
    for n in (1, 2, 3, 4, 5, 6, 7, 9, 10, 12, 14, 20):
        result = schinzel_d_for_target(n)
        assert result.status == "reachable"
        assert lattice_points_on_circle(result.d).count == n


def test_schinzel_multiples_of_eight_unreachable():
    for n in (8, 16, 24, 40):
        assert schinzel_d_for_target(n).status == "unreachable"


def test_json_shape_sorted():
    blob = lattice_points_on_circle(Fraction(5, 2)).to_json()
    assert blob["d"] == "5/2"
    assert blob["count"] == 6
    assert blob["points"] == sorted(blob["points"])


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=40), st.integers(min_value=1, max_value=5))
def test_formula_matches_enumeration_random(p, q):
    if math.gcd(p, q) != 1:
        return
    d = Fraction(p, q)
    assert count_by_formula(d).count == lattice_points_on_circle(d).count
