from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import hessian_at, log_hessian_at, polarization_entry
from specgeo.errors import (DegreeZeroError, DimensionMismatch, InhomogeneousError,
                            PolySyntaxError, ZeroLevelError)
from specgeo.poly import (BlockStructure, HomoPoly, eval_sym, hessian, is_basic, log_hessian,
                          multidegree_split, parse_constant, parse_poly, perfect_power_exponent,
                          polarize, poly_from_json, poly_to_json)
from specgeo.randomness import rand_homopoly, rand_vector, rng_from
from specgeo.scalar import ExactComplex, QSqrt

I = ExactComplex(0, 1)


def e(n, i):
    return [1 if k == i else 0 for k in range(n)]


# -- scalars ------------------------------------------------------------------

def test_sqrt_arithmetic_stays_in_tower():
    r2, r3 = QSqrt.sqrt(2), QSqrt.sqrt(3)
    assert r2 * r2 == 2
    assert (r2 * r3) * (r2 * r3) == 6
    assert (r2 + r3).tower == (2, 3)
    assert (1 / r2) == r2 / 2
    assert parse_constant("3/2*sqrt(8)") == QSqrt.sqrt(2) * 3


def test_sqrt_sign_exact():
    assert (QSqrt.sqrt(2) - Fraction(141, 100)).sign() == 1
    assert (QSqrt.sqrt(2) - Fraction(142, 100)).sign() == -1
    assert (QSqrt.sqrt(3) - QSqrt.sqrt(2) - Fraction(3, 10)).sign() == 1


@given(st.fractions(max_denominator=20), st.fractions(max_denominator=20),
       st.sampled_from([2, 3, 5, 6]))
def test_field_operations_roundtrip(a, b, m):
    x = QSqrt.rational(a) + QSqrt.sqrt(m) * b
    if x:
        assert x * x.inverse() == 1
    assert abs(float(x) - (float(a) + float(b) * m ** 0.5)) < 1e-9


# -- parsing ------------------------------------------------------------------

def test_parse_identity_case():
    h = parse_poly("x1*x2*x3", 3)
    assert h.d == 3 and h.monomials == {(1, 1, 1): 1}


def test_parse_two_monomials():
    h = parse_poly("x1^2*x2 - 1/2*x2*x3^2", 3)
    assert h.d == 3 and len(h.monomials) == 2
    assert h.monomials[(0, 1, 2)] == Fraction(-1, 2)


def test_parse_errors():
    with pytest.raises(InhomogeneousError):
        parse_poly("x1^2 + x1", 1)
    with pytest.raises(DegreeZeroError):
        parse_poly("3", 1)
    with pytest.raises(SyntaxError):
        parse_poly("x1 +* x2", 2)
    with pytest.raises(PolySyntaxError):
        parse_poly("x1 $ x2", 2)


def test_parse_sqrt_and_parentheses():
    h = parse_poly("sqrt(2)*(x1 + x2)^2", 2)
    assert h.monomials[(1, 1)] == QSqrt.sqrt(2) * 2


def test_json_roundtrip():
    h = parse_poly("x1^2*x2 - sqrt(3)/2*x2*x3^2", 3)
    assert poly_from_json(poly_to_json(h)) == h
    assert poly_from_json({"n": 3, "poly": h.to_text()}) == h


@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(1, 4))
def test_text_roundtrip(seed, n, d):
    h = rand_homopoly(rng_from(seed), n, d, density=0.6)
    if h.monomials:
        assert parse_poly(h.to_text(), n) == h


# -- polarization -------------------------------------------------------------

def test_polarization_quadratic():
    assert polarize(parse_poly("x1^2", 1))(e(1, 0), e(1, 0)) == 1


def test_polarization_x1x2x3_matches_expansion_oracle():
    # oracle: sympy expansion of h(t1 v1 + t2 v2 + t3 v3), coefficient of t1 t2 t3 over 3!
    H = polarize(parse_poly("x1*x2*x3", 3))
    assert H(e(3, 0), e(3, 1), e(3, 2)) == Fraction(1, 6)
    assert H(e(3, 0), e(3, 0), e(3, 1)) == 0
    assert polarization_entry("x1*x2*x3", 3, [e(3, 0), e(3, 1), e(3, 2)]) == Fraction(1, 6)


def test_polarization_x1sq_x2():
    H = polarize(parse_poly("x1^2*x2", 2))
    assert H(e(2, 0), e(2, 0), e(2, 1)) == Fraction(1, 3)


def test_polarization_complex_point():
    H = polarize(parse_poly("x1*x2*x3", 3))
    Z = [I, I, I]
    assert H(Z, Z, Z) == ExactComplex(0, -1)


def test_eval_sym_dimension_mismatch():
    H = polarize(parse_poly("x1*x2", 2))
    with pytest.raises(DimensionMismatch):
        eval_sym(H, [[1, 0, 0], [0, 1]])
    with pytest.raises(DimensionMismatch):
        eval_sym(H, [[1, 0]])


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 4))
def test_polarization_diagonal_is_h(seed, n, d):
    rng = rng_from(seed)
    h = rand_homopoly(rng, n, d, density=0.7)
    X = rand_vector(rng, n)
    assert polarize(h)(*([X] * d)) == h.evaluate(X)


@given(st.integers(0, 10_000))
def test_polarization_symmetric_and_multilinear(seed):
    rng = rng_from(seed)
    h = rand_homopoly(rng, 3, 3)
    H = polarize(h)
    u, v, w, x = (rand_vector(rng, 3) for _ in range(4))
    a = Fraction(int(rng.integers(-5, 6)), 3)
    assert H(u, v, w) == H(w, u, v) == H(v, w, u)
    combo = [a * p + q for p, q in zip(u, x)]
    assert H(combo, v, w) == a * H(u, v, w) + H(x, v, w)


def test_polarization_random_against_expansion_oracle():
    rng = rng_from(5)
    h = rand_homopoly(rng, 3, 3)
    vs = [rand_vector(rng, 3) for _ in range(3)]
    assert polarize(h)(*vs) == polarization_entry(h.to_text(), 3, vs)


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 4))
def test_homogeneity(seed, n, d):
    rng = rng_from(seed)
    h = rand_homopoly(rng, n, d)
    X = rand_vector(rng, n)
    lam = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 9)))
    assert h.evaluate([lam * x for x in X]) == lam ** d * h.evaluate(X)


# -- hessians -----------------------------------------------------------------

def test_hessian_x1x2x3():
    g = hessian(parse_poly("x1*x2*x3", 3), [1, 1, 1]).gram
    assert g == [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert g == hessian_at("x1*x2*x3", 3, [1, 1, 1])


def test_one_variable_hessians():
    h = parse_poly("x1^2", 1)
    assert hessian(h, [1]).gram == [[2]]
    assert log_hessian(h, [1]).gram == [[-2]]


def test_log_hessian_zero_level():
    with pytest.raises(ZeroLevelError):
        log_hessian(parse_poly("x1*x2", 2), [1, 0])


def test_log_hessian_random_against_symbolic_oracle():
    rng = rng_from(3)
    h = rand_homopoly(rng, 2, 3, bound=4)
    X = [Fraction(1), Fraction(2, 3)]
    if not h.evaluate(X):
        X = [Fraction(2), Fraction(1, 5)]
    want = log_hessian_at(h.to_text(), 2, X)
    got = log_hessian(h, X).gram
    assert all(got[i][j] == Fraction(str(want[i][j])) for i in range(2) for j in range(2))


def test_float_and_exact_evaluation_agree():
    h = parse_poly("x1^2*x2 - sqrt(2)*x2^3", 2)
    assert abs(h.evaluate([0.5, 1.5]) - float(h.evaluate([Fraction(1, 2), Fraction(3, 2)]))) < 1e-12


# -- blocks -------------------------------------------------------------------

def test_multidegree_split_recombines():
    h = parse_poly("x1^2*x2 + x1*x3^2 + x3^3", 3)
    B = BlockStructure([("a", [0]), ("b", [1, 2])])
    parts = multidegree_split(h, B)
    assert set(parts) == {(2, 1), (1, 2), (0, 3)}
    total = HomoPoly.zero(3, 3)
    for p in parts.values():
        total = total + p
    assert total == h


def test_block_structure_must_partition():
    with pytest.raises(ValueError):
        multidegree_split(parse_poly("x1*x2", 2), BlockStructure([("a", [0])]))


def test_perfect_power_guard():
    assert perfect_power_exponent(parse_poly("x1^2 + 2*x1*x2 + x2^2", 2)) == 2
    assert is_basic(parse_poly("x1*x2*x3", 3))
