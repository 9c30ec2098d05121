"""Seeded random exact data.  Everything draws from a numpy ``Generator`` so a
seed fixes the whole stream."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .poly import HomoPoly

BOUND = 16


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def rand_rational(rng, bound: int = BOUND, nonzero: bool = False) -> Fraction:
    while True:
        q = Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))
        if q or not nonzero:
            return q


def rand_vector(rng, n: int, bound: int = BOUND) -> list[Fraction]:
    return [rand_rational(rng, bound) for _ in range(n)]


def rand_nonzero_vector(rng, n: int, bound: int = BOUND) -> list[Fraction]:
    while True:
        v = rand_vector(rng, n, bound)
        if any(v):
            return v


def exponents(n: int, d: int):
    """All exponent tuples of total degree d in n variables, lexicographic."""
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        yield tuple(e)


def rand_homopoly(rng, n: int, d: int, density: float = 1.0, bound: int = BOUND) -> HomoPoly:
    """Random homogeneous polynomial with rational coefficients; never zero."""
    exps = list(exponents(n, d))
    while True:
        mons = {}
        for e in exps:
            if density >= 1.0 or rng.random() < density:
                mons[e] = rand_rational(rng, bound)
        h = HomoPoly(n, mons, d)
        if h:
            return h


def rand_complex_vector(rng, n: int, bound: int = BOUND):
    from .scalar import ExactComplex

    return [ExactComplex(rand_rational(rng, bound), rand_rational(rng, bound)) for _ in range(n)]
