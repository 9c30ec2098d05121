from fractions import Fraction

import numpy as np
import pytest

from specgeo.errors import ConeExitError
from specgeo.hypersurface import canonical_metric, project_to_level, tangent_basis
from specgeo.linalg import signature
from specgeo.poly import parse_poly
from specgeo.randomness import rng_from
from specgeo.tube import (AffineMap, Composite, Inversion, Reflection, Scaling, Translation, TubePoint,
                         check_pullback_isometry, cone_product_check, fd_deviation,
                         inversion_cone_deviation, isometry_candidates, potential,
                         sample_cone_points, sample_tube_points, tube_gram, tube_metric,
                         tube_signature)

X1X2 = parse_poly("x1*x2", 2)
X1X2X3 = parse_poly("x1*x2*x3", 3)
CUSP = parse_poly("x1^3 - x1*x2^2", 2)
CUBIC = parse_poly("2*x2^3 + 1/3*x1*x2^2 + 3/2*x1^2*x2 - 3*x1^3", 2)


def _points(h, seed_point, count=10, seed=0):
    return sample_tube_points(h, seed_point, count, rng_from(seed))


def test_x1x2_metric_is_half_identity():
    g = tube_metric(X1X2, TubePoint([0, 0], [1, 1]))
    assert g.gram == [[Fraction(1, 2) if i == j else 0 for j in range(4)] for i in range(4)]


def test_radial_unit_length():
    for h, Y in ((X1X2, [2, Fraction(1, 2)]), (X1X2X3, [1, 1, 1]), (CUSP, project_to_level(CUSP, [2, 1]))):
        Yf = np.array([float(y) for y in Y])
        assert abs(Yf @ tube_gram(h, Y) @ Yf - 1) < 1e-12


def test_restriction_to_level_set_is_canonical_metric():
    Y = [1, 1, 1]
    G = tube_metric(X1X2X3, TubePoint([0, 0, 0], Y)).gram
    basis = tangent_basis(X1X2X3, Y)
    restricted = [[sum(u[a] * G[a][b] * v[b] for a in range(3) for b in range(3)) for v in basis] for u in basis]
    assert restricted == canonical_metric(X1X2X3, Y).gram


def test_cone_exit():
    with pytest.raises(ConeExitError):
        tube_metric(X1X2, TubePoint([0, 0], [1, -1]))


def test_potential_independent_of_X():
    Y = [1.5, 0.5]
    assert potential(X1X2, Y) == pytest.approx(-2 * np.log(0.75))


@pytest.mark.parametrize("h,seed", [(X1X2, [1, 1]), (X1X2X3, [1, 1, 1]), (CUBIC, [1, 1])])
def test_finite_difference_cross_check(h, seed):
    for Z in _points(h, seed, 4):
        assert fd_deviation(h, Z, relative=True) <= 1e-6


def test_signature_law_real_doubling():
    # canonical metric (k, l) -> tube metric (2k + 2, 2l)
    for h, Y in ((X1X2X3, [1, 1, 1]), (parse_poly("x1^2 - x2^2 - x3^2", 3), [1, 0, 0]),
                 (parse_poly("x1^2 + x2^2 - x3^2", 3), [1, 0, 0])):
        k, l, _ = canonical_metric(h, Y).signature
        assert tube_signature(h, Y) == (2 * k + 2, 2 * l, 0)


def test_candidate_maps():
    maps = isometry_candidates(2)
    assert [m.name for m in maps] == ["scaling", "translation", "reflection", "inversion"]
    assert maps[1].X0 == [3.0, -1.0]


def test_inversion_fixes_level_set_and_is_involution():
    inv = Inversion()
    for Z in _points(X1X2X3, [1, 1, 1], 20):
        W = inv.apply(X1X2X3, inv.apply(X1X2X3, Z))
        assert np.allclose(W.Y, [float(y) for y in Z.Y], atol=1e-12)
    P = TubePoint([1, 2, 3], [2, 1, Fraction(1, 2)])
    assert np.allclose(inv.apply(X1X2X3, P).Y, [2, 1, 0.5], atol=1e-15)


def test_translation_leaves_potential():
    Z = TubePoint([0.1, 0.2], [1.0, 2.0])
    W = Translation([3, -1]).apply(X1X2, Z)
    assert W.Y == Z.Y


@pytest.mark.parametrize("h,seed", [(X1X2, [1, 1]), (X1X2X3, [1, 1, 1]), (CUSP, [2, 0]), (CUBIC, [1, 1])])
def test_scaling_translation_reflection_are_isometries(h, seed):
    pts = _points(h, seed)
    for m in (Scaling(2.0), Translation([3] * h.n), Reflection()):
        assert check_pullback_isometry(h, m, pts) <= 1e-9


@pytest.mark.parametrize("h,seed", [(X1X2, [1, 1]), (X1X2X3, [1, 1, 1]), (CUSP, [2, 0]), (CUBIC, [1, 1])])
def test_inversion_is_isometry_of_the_imaginary_cone(h, seed):
    res = inversion_cone_deviation(h, [Z.Y for Z in _points(h, seed)])
    assert res["cone_isometry"] <= 1e-10
    assert res["involution"] <= 1e-10
    assert res["fixes_level_set"] <= 1e-10


def test_inversion_does_not_preserve_the_x_directions():
    # upper half plane: the inversion leaves dx alone while dy/y -> -dy/y,
    # so dx^2/y^2 becomes y^2 dx^2: at y = 2 that is 4 against 1/4
    y = parse_poly("x1", 1)
    Z = TubePoint([0.0], [2.0])
    assert check_pullback_isometry(y, Inversion(), [Z]) == pytest.approx(4 - 1 / 4)


def test_permutation_is_isometry():
    P = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    assert check_pullback_isometry(X1X2X3, AffineMap(P), _points(X1X2X3, [1, 1, 1])) <= 1e-9


def test_rescaling_h_is_still_an_isometry():
    # diag(2, 1) multiplies x1 x2 by 2; log h moves by a constant, the metric not at all
    assert check_pullback_isometry(X1X2, AffineMap([[2, 0], [0, 1]]), _points(X1X2, [1, 1])) <= 1e-12


def test_non_automorphism_is_reported():
    pts = [TubePoint([0, 0], [1, 1]), TubePoint([0, 0], [2, 1])]
    assert check_pullback_isometry(X1X2, AffineMap([[1, 1], [0, 1]]), pts) > 0.1


def test_group_law_composite():
    A = [[2, 0, 0], [0, Fraction(1, 2), 0], [0, 0, 1]]
    comp = Composite([AffineMap(A), Scaling(3.0), Translation([1, -2, 5]), AffineMap([[0, 1, 0], [1, 0, 0], [0, 0, 1]])])
    assert check_pullback_isometry(X1X2X3, comp, _points(X1X2X3, [1, 1, 1])) <= 1e-9


def test_cone_product():
    samples = [(0.0, [1, 1]), (1.0, [1, 1]), (-0.5, [2, Fraction(1, 2)])]
    assert cone_product_check(X1X2, samples) <= 1e-10
    Ys = sample_cone_points(X1X2X3, [1, 1, 1], 10, rng_from(1))
    samples = [(t, project_to_level(X1X2X3, Y)) for t, Y in zip(np.linspace(-1, 1, 10), Ys)]
    assert cone_product_check(X1X2X3, samples) <= 1e-10


def test_samples_stay_in_cone():
    for Y in sample_cone_points(CUBIC, [1, 1], 30, rng_from(2)):
        assert CUBIC.evaluate(Y) > 0


def test_signature_helper_on_tube_metric():
    g = tube_metric(X1X2X3, TubePoint([0, 0, 0], [1, 1, 1]))
    assert signature(g.gram) == (6, 0, 0)
