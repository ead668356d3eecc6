"""Shared builders for randomized pencil-system sweeps."""

import numpy as np

from kthodge.ode_core import LinearPencilSystem


def _random_conjugator(rng):
    while True:
        Q = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(Q)) >= 0.5 and np.linalg.cond(Q) <= 8.0:
            return Q


def make_random_systems(seed: int, count: int):
    """Half constructed Solvable(k), half NotSolvable with the quantization
    ratio kept at distance >= 0.1 from the negative integers.  Returns
    (system, expected_kindex_or_None) pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for idx in range(count):
        lam1 = rng.uniform(0.6, 3.0)
        lam2 = -rng.uniform(0.6, 3.0)
        b1 = rng.normal() + 1j * rng.normal()
        b4 = rng.normal() + 1j * rng.normal()
        make_solvable = idx % 2 == 0
        if make_solvable:
            k = int(rng.integers(1, 5))
            b2 = (rng.normal() + 1j * rng.normal()) or 1.0
            while abs(b2) < 0.3:
                b2 = rng.normal() + 1j * rng.normal()
            b3 = -k * (lam1 - lam2) / b2
            expected = k
        else:
            while True:
                b2 = rng.normal() + 1j * rng.normal()
                b3 = rng.normal() + 1j * rng.normal()
                ratio = b2 * b3 / (lam1 - lam2)
                far_from_criterion = min(abs(ratio + k) for k in range(1, 40)) >= 0.1
                if far_from_criterion and abs(ratio) >= 0.1 and abs(b2) >= 0.3:
                    break
            expected = None
        Lam = np.diag([lam1, lam2]).astype(complex)
        Bt = np.array([[b1, b2], [b3, b4]])
        Q = _random_conjugator(rng)
        Qinv = np.linalg.inv(Q)
        out.append((LinearPencilSystem.from_float(Q @ Lam @ Qinv, Q @ Bt @ Qinv), expected))
    return out
