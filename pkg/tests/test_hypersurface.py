from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from specgeo.errors import NonpositiveLevelError, NullBasePointError, PreconditionError
from specgeo.hypersurface import (HypersurfacePoint, automorphism_deviation, canonical_form,
                                  canonical_metric, normalize_level, project_to_level,
                                  pseudo_sphere_quadric, pseudo_sphere_signature, sphere_symmetry,
                                  symmetry_pullback_deviation, tangent_basis)
from specgeo.linalg import signature
from specgeo.poly import gradient, parse_poly, polarize
from specgeo.randomness import rand_homopoly, rand_nonzero_vector, rand_vector, rng_from


def test_project_to_level():
    h = parse_poly("x1*x2", 2)
    assert project_to_level(h, [2, 2]) == [1, 1]
    assert project_to_level(h, [1, 1]) == [1, 1]
    with pytest.raises(NonpositiveLevelError):
        project_to_level(h, [1, -1])


def test_project_irrational_root_falls_back_to_float():
    h = parse_poly("x1*x2*x3", 3)
    X = project_to_level(h, [1, 1, 2])
    assert abs(float(h.evaluate(X)) - 1) < 1e-12


def test_sphere_is_negative_definite():
    g = canonical_metric(parse_poly("x1^2 + x2^2 + x3^2", 3), [1, 0, 0])
    assert g.gram == [[-1, 0], [0, -1]]
    assert g.signature == (0, 2, 0)


def test_hyperboloid_is_positive_definite():
    g = canonical_metric(parse_poly("x1^2 - x2^2 - x3^2", 3), [1, 0, 0])
    assert g.gram == [[1, 0], [0, 1]]
    assert g.signature == (2, 0, 0)


def test_x1x2x3_tangent_value():
    h = parse_poly("x1*x2*x3", 3)
    X = [1, -1, 0]
    assert canonical_form(h, [1, 1, 1], X, X) == Fraction(2, 3)
    assert canonical_metric(h, [1, 1, 1]).signature == (2, 0, 0)


def test_canonical_metric_requires_unit_level():
    with pytest.raises(PreconditionError):
        canonical_metric(parse_poly("x1*x2", 2), [2, 2])


def test_signature_basics():
    assert signature([[1, 0], [0, -1]]) == (1, 1, 0)
    assert signature([[0, 0], [0, 0]]) == (0, 0, 2)
    assert signature(np.diag([1.0, -2.0, 1e-20])) == (1, 1, 1)


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(2, 4))
def test_route_agreement_exact(seed, n, d):
    rng = rng_from(seed)
    h = rand_homopoly(rng, n, d)
    X0 = rand_nonzero_vector(rng, n)
    if not h.evaluate(X0) or not any(gradient(h, X0)):
        return
    if h.evaluate(X0) < 0:
        h = -h
    hn = normalize_level(h, X0)
    g = canonical_metric(hn, X0)  # raises RouteMismatchError on disagreement
    assert g.dim == n - 1 and g.is_symmetric()
    k, l, z = g.signature
    assert k + l + z == n - 1


def test_route_agreement_float():
    h = parse_poly("x1^2*x2 + x2^3 - 1/2*x1*x2*x3 + x3^3", 3)
    X0 = project_to_level(h, [0.7, 1.1, 0.4])
    g = canonical_metric(h, X0)
    assert not g.exact


def test_tangent_vectors_annihilate_gradient():
    h = parse_poly("x1^2*x2 - x2*x3^2 + x3^3", 3)
    X0 = [1, 2, 1]
    grad = gradient(h, X0)
    for v in tangent_basis(h, X0):
        assert sum(a * b for a, b in zip(grad, v)) == 0


def test_hypersurface_point_json():
    P = HypersurfacePoint.from_seed(parse_poly("x1*x2", 2), [2, 2])
    data = P.to_json()
    assert data["routes_agree"] is True
    assert data["signature"] == [1, 0, 0]


def test_automorphism_invariance():
    h = parse_poly("x1*x2*x3", 3)
    A = [[2, 0, 0], [0, Fraction(1, 2), 0], [0, 0, 1]]
    assert automorphism_deviation(h, A, [1, 1, 1]) == 0
    with pytest.raises(PreconditionError):
        automorphism_deviation(h, [[2, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 1, 1])


@pytest.mark.parametrize("k,l", [(k, l) for k in range(1, 7) for l in range(0, 7 - k) if k + l >= 2])
def test_pseudo_sphere_signature_law(k, l):
    assert pseudo_sphere_signature(k, l) == (l, k - 1, 0)


def test_sphere_symmetry_fixed_point_and_orthogonal():
    q = pseudo_sphere_quadric(2, 1)
    X0 = [1, 0, 0]
    assert sphere_symmetry(q, X0, X0) == X0
    assert sphere_symmetry(q, X0, [0, 3, 2]) == [0, -3, -2]


def test_sphere_symmetry_null_base_point():
    q = pseudo_sphere_quadric(1, 1)
    with pytest.raises(NullBasePointError):
        sphere_symmetry(q, [1, 1], [1, 0])


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(0, 3))
def test_sphere_symmetry_involution_and_preserves_q(seed, k, l):
    rng = rng_from(seed)
    q = pseudo_sphere_quadric(k, l)
    X0, X = rand_vector(rng, k + l), rand_vector(rng, k + l)
    if not polarize(q)(X0, X0):
        return
    S = sphere_symmetry(q, X0, X)
    assert sphere_symmetry(q, X0, S) == X
    assert q.evaluate(S) == q.evaluate(X)


def test_sphere_symmetry_pulls_back_metric():
    q = pseudo_sphere_quadric(2, 2)
    assert symmetry_pullback_deviation(q, [1, 0, 0, 0]) <= 1e-10
