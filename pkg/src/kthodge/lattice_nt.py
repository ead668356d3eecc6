"""Lattice points on circles through the origin, by formula and by enumeration.

The circle (l-d)^2 + m^2 = d^2 (center (d,0), passing through the origin)
controls the zero-sector harmonic count.  For d = p/q in lowest terms the
number of integer points follows from the factorization of p^2 into primes
congruent to 1 mod 4, with a denominator-dependent prefactor for q <= 5;
enumeration over the finite range l in [0, 2d] provides the independent
cross-check and the explicit point list.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .exact_arith import format_rational

FACTORIZATION_LIMIT_BITS = 96

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class ResourceLimit(Exception):
    """Input exceeds the configured factorization size limit."""


def is_probable_prime(n: int) -> bool:
    # Miller-Rabin; the fixed base set is deterministic past 3.3e24, which
    # covers everything below the 2^96 factorization limit with margin only
    # probabilistically -- acceptable for an oracle-checked pipeline.
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    # Brent's cycle variant of Pollard rho; n odd composite, not a prime power shortcut.
    if n % 2 == 0:
        return 2
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple  # ((prime, exponent), ...) primes strictly increasing


def factorize(n: int, limit_bits: int = FACTORIZATION_LIMIT_BITS) -> Factorization:
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    if n.bit_length() > limit_bits:
        raise ResourceLimit(f"{n} exceeds the 2^{limit_bits} factorization limit")
    remaining = n
    counts: dict = {}
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        while remaining % p == 0:
            counts[p] = counts.get(p, 0) + 1
            remaining //= p
    rng = random.Random(0xF0F0)
    stack = [remaining] if remaining > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            stack += [root, root]
            continue
        g = _pollard_brent(m, rng)
        stack += [g, m // g]
    return Factorization(n, tuple(sorted(counts.items())))


def r2_of_square(p: int) -> int:
    """Number of integer pairs (x, y) with x^2 + y^2 = p^2.

    Equals 4 * prod(beta_j + 1) over primes q_j = 1 mod 4 in p^2 (so
    beta_j is twice the exponent in p); primes = 3 mod 4 enter p^2 with
    even exponent and contribute factor 1.
    """
    if p < 1:
        raise ValueError("p must be positive")
    result = 4
    for prime, exp in factorize(p).factors:
        if prime % 4 == 1:
            result *= 2 * exp + 1
    return result


@dataclass(frozen=True)
class CircleLatticeSet:
    d: Fraction
    points: tuple  # ((l, m), ...) lexicographically sorted

    @property
    def count(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {
            "d": format_rational(self.d),
            "points": [[l, m] for l, m in self.points],
            "count": self.count,
        }


def _integer_sqrt_of_rational(value: Fraction):
    # Returns the nonnegative integer m with m^2 == value, or None.
    if value < 0 or value.denominator != 1:
        return None
    root = math.isqrt(value.numerator)
    return root if root * root == value.numerator else None


def lattice_points_on_circle(d: Fraction) -> CircleLatticeSet:
    """All integer (l, m) with (l-d)^2 + m^2 = d^2, by exact enumeration.

    l runs over the finite integer range between 0 and 2d; for each l the
    residual d^2 - (l-d)^2 = l(2d - l) must be an integer square.
    """
    d = Fraction(d)
    if d == 0:
        raise ValueError("d must be nonzero")
    lo, hi = (0, 2 * d) if d > 0 else (2 * d, 0)
    points = set()
    for l in range(math.ceil(lo), math.floor(hi) + 1):
        m = _integer_sqrt_of_rational(l * (2 * d - l))
        if m is None:
            continue
        points.add((l, m))
        points.add((l, -m))
    return CircleLatticeSet(d, tuple(sorted(points)))


@dataclass(frozen=True)
class CountResult:
    status: str  # "count" | "unsupported_denominator"
    count: int | None = None


def count_by_formula(d: Fraction) -> CountResult:
    """Closed-form lattice count for denominators q <= 5.

    q = 1 -> 4 * prod(beta_j + 1); q = 2 -> 2 * prod; q in {3,4,5} -> prod,
    where beta_j are the exponents of primes = 1 mod 4 in p^2.  The closed
    form stops at q >= 6 (distinct representations like 4^2+3^2 = 5^2+0^2
    start colliding), reported as UnsupportedDenominator.
    """
    d = Fraction(d)
    if d == 0:
        raise ValueError("d must be nonzero")
    p, q = abs(d.numerator), d.denominator
    if q >= 6:
        return CountResult("unsupported_denominator")
    odd_part = 1
    for prime, exp in factorize(p).factors:
        if prime % 4 == 1:
            odd_part *= 2 * exp + 1
    prefactor = {1: 4, 2: 2, 3: 1, 4: 1, 5: 1}[q]
    return CountResult("count", prefactor * odd_part)


@dataclass(frozen=True)
class SchinzelResult:
    status: str  # "reachable" | "unreachable"
    d: Fraction | None = None


def schinzel_d_for_target(n: int) -> SchinzelResult:
    """A rational d whose circle carries exactly n lattice points.

    Writing n = 2^alpha * K with K odd: alpha >= 3 is unreachable, and
    otherwise d = 5^{(K-1)/2} / q with q = 1, 2, 3 for n = 4K, 2K, K.
    """
    if n < 1:
        raise ValueError("target count must be positive")
    alpha = 0
    k = n
    while k % 2 == 0:
        k //= 2
        alpha += 1
    if alpha >= 3:
        return SchinzelResult("unreachable")
    q = {2: 1, 1: 2, 0: 3}[alpha]
    return SchinzelResult("reachable", Fraction(5 ** ((k - 1) // 2), q))
