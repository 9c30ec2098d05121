"""The twelve acceptance criteria, at their stated tolerances.

Tolerances here are fixed and ignore SPECGEO_TOL.  Each test carries a
``criterion`` marker; conftest prints one PASS/FAIL line per criterion.
"""
import json
import os
import subprocess
import sys

import pytest

from specgeo import pv, suites
from specgeo.corpus import shipped_corpus
from specgeo.hypersurface import (canonical_metric, metric_routes, normalize_level, project_to_level,
                                  pseudo_sphere_quadric, pseudo_sphere_signature, tangent_basis)
from specgeo.jalgebra import (IsometricMap, build_u0_rank2, build_u0_rank3, invariance_check,
                              load_isometric_map, orbit_rank, pullback_metric_check, verify_algebra)
from specgeo.corpus import shipped_psi_files
from specgeo.poly import BlockStructure, gradient, parse_poly, polarize
from specgeo.randomness import (rand_complex_vector, rand_homopoly, rand_nonzero_vector, rand_vector,
                                rng_from)
from specgeo.scalar import ExactComplex
from specgeo.special_cone import (check_gc_equals_gs, cone_metric_routes, gamma, gamma_gram, gamma_signature,
                                  is_hermitian, lagrangean_defect, lemma4h_residual, r_map)
from specgeo.tube import (Inversion, Reflection, Scaling, Translation, check_pullback_isometry,
                          cone_product_check, inversion_cone_deviation, sample_cone_points, sample_tube_points)

CORPUS = shipped_corpus()
CUBICS = [e for e in CORPUS if e.is_cubic]
POINTS = 10


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def tube_points(entry, count=POINTS, seed=0):
    return sample_tube_points(entry.h, entry.seed_point, count, rng_from(seed))


# -- 1 ------------------------------------------------------------------------

@criterion(1, "polarization reproduces h on the diagonal (exact)")
def test_c01_polarization_identity():
    rng = rng_from(101)
    for _ in range(100):
        n, d = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        h = rand_homopoly(rng, n, d)
        X = rand_vector(rng, n)
        assert polarize(h)(*([X] * d)) == h.evaluate(X)


# -- 2 ------------------------------------------------------------------------

@criterion(2, "three canonical metric routes agree exactly at 50 points")
def test_c02_metric_routes_agree():
    rng = rng_from(202)
    done = 0
    while done < 50:
        n, d = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        h = rand_homopoly(rng, n, d)
        X0 = rand_nonzero_vector(rng, n)
        val = h.evaluate(X0)
        if not val or not any(gradient(h, X0)):
            continue
        hn = normalize_level(-h if val < 0 else h, X0)
        pol, hes, log, exact = metric_routes(hn, X0, tangent_basis(hn, X0))
        assert exact
        assert pol == hes == log
        done += 1


# -- 3 ------------------------------------------------------------------------

@criterion(3, "signature laws for spheres, hyperboloids and pseudo-spheres")
def test_c03_signature_laws():
    for n in range(2, 7):
        e1 = [1] + [0] * (n - 1)
        sphere = pseudo_sphere_quadric(n, 0)
        assert canonical_metric(sphere, e1).signature == (0, n - 1, 0)
        hyperboloid = pseudo_sphere_quadric(1, n - 1)
        assert canonical_metric(hyperboloid, e1).signature == (n - 1, 0, 0)
    for k in range(1, 7):
        for l in range(0, 7 - k):
            if k + l >= 2:
                assert pseudo_sphere_signature(k, l) == (l, k - 1, 0)


# -- 4 ------------------------------------------------------------------------

@criterion(4, "tube isometries, inversion on the cone, cone product")
def test_c04_scaling_translation_reflection():
    for entry in CORPUS:
        pts = tube_points(entry)
        for m in (Scaling(2.0), Translation([3.0, -1.0, 0.5, 2.0][: entry.h.n]), Reflection()):
            assert check_pullback_isometry(entry.h, m, pts) <= 1e-9, (entry.name, m.name)


@criterion(4, "tube isometries, inversion on the cone, cone product")
def test_c04_inversion_pulls_back_the_tube_metric():
    # Expected to fail: the inversion preserves the metric on the imaginary
    # cone only; the real directions pick up a factor h(Y)^(4/d).
    devs = {e.name: check_pullback_isometry(e.h, Inversion(), tube_points(e)) for e in CORPUS}
    bad = {k: v for k, v in devs.items() if v > 1e-9}
    assert not bad, f"inversion is not an isometry of the full tube: {bad}"


@criterion(4, "tube isometries, inversion on the cone, cone product")
def test_c04_inversion_on_the_cone():
    for entry in CORPUS:
        res = inversion_cone_deviation(entry.h, [Z.Y for Z in tube_points(entry)])
        assert res["cone_isometry"] <= 1e-10, entry.name
        assert res["involution"] <= 1e-10, entry.name
        assert res["fixes_level_set"] <= 1e-10, entry.name


@criterion(4, "tube isometries, inversion on the cone, cone product")
def test_c04_cone_product():
    rng = rng_from(404)
    for entry in CORPUS:
        Ys = sample_cone_points(entry.h, entry.seed_point, POINTS, rng)
        samples = [(float(rng.uniform(-1, 1)), project_to_level(entry.h, Y)) for Y in Ys]
        assert cone_product_check(entry.h, samples) <= 1e-10, entry.name


# -- 5 ------------------------------------------------------------------------

@criterion(5, "gamma is Hermitian with split signature")
def test_c05_gamma_lemma():
    rng = rng_from(505)
    for n in range(0, 6):
        m = n + 1
        assert is_hermitian(gamma_gram(m))
        assert gamma_signature(m) == (m, m, 0)
        u, v = rand_complex_vector(rng, 2 * m), rand_complex_vector(rng, 2 * m)
        assert gamma(u, v).conjugate() == gamma(v, u)


# -- 6 ------------------------------------------------------------------------

@criterion(6, "Im(-H(Z,Z,Z) + 3H(Z,Z,conj Z)) = 4h(Y) exactly")
def test_c06_four_h_lemma():
    rng = rng_from(606)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        h = rand_homopoly(rng, n, 3, density=0.7)
        Z = rand_complex_vector(rng, n)
        assert lemma4h_residual(h, Z) == 0


# -- 7 ------------------------------------------------------------------------

@criterion(7, "metrics of K and K^s agree, K^s - K constant")
@pytest.mark.parametrize("entry", CUBICS, ids=[e.name for e in CUBICS])
def test_c07_gc_equals_gs(entry):
    res = check_gc_equals_gs(entry.h, tube_points(entry, seed=707))
    assert res["metric_deviation"] <= 1e-6
    assert res["potential_deviation"] <= 1e-10


# -- 8 ------------------------------------------------------------------------

@criterion(8, "Lagrangean lift frame and cone metric routes")
@pytest.mark.parametrize("entry", CUBICS, ids=[e.name for e in CUBICS])
def test_c08_lagrangean_cone(entry):
    F = r_map(entry.h)
    for Z in tube_points(entry, 20, seed=808):
        chart = [ExactComplex(1)] + [ExactComplex(x, y) for x, y in zip(Z.X, Z.Y)]
        assert lagrangean_defect(F, chart) <= 1e-10
        assert cone_metric_routes(F, chart) <= 1e-10


@criterion(8, "Lagrangean lift frame and cone metric routes")
def test_c08_lagrangean_random_cubics():
    rng = rng_from(809)
    for _ in range(5):
        n = int(rng.integers(1, 4))
        h = rand_homopoly(rng, n, 3)
        F = r_map(h)
        for _ in range(20):
            Z = rand_complex_vector(rng, n + 1)
            if Z[0]:
                assert lagrangean_defect(F, Z) <= 1e-10


# -- 9 ------------------------------------------------------------------------

def _check_family_member(L, S, h):
    v = verify_algebra(L)
    for key in ("jacobi", "complex_structure", "solvable", "normal_one_form", "parallel_J"):
        assert v[key]["ok"], key
    assert invariance_check(L, S, h) == 0
    assert orbit_rank(L, S) == len(S.Jb) - 1
    assert pullback_metric_check(L, S, h)["deviation"] <= 1e-10


@criterion(9, "J-algebra families and the non-special negative control")
def test_c09_rank2_family():
    for p in range(4):
        for s in range(1, 5):
            _check_family_member(*build_u0_rank2(p, s))


@criterion(9, "J-algebra families and the non-special negative control")
def test_c09_rank3_family():
    for p in range(3):
        for q in range(3):
            _check_family_member(*build_u0_rank3(IsometricMap.zero(p, q, 0)))
    psi = {f.stem: f for f in shipped_psi_files()}
    for name in ("real", "complex", "quaternion"):
        m = load_isometric_map(psi[name])
        assert m.special and m.is_isometric()
        _check_family_member(*build_u0_rank3(m))


@criterion(9, "J-algebra families and the non-special negative control")
def test_c09_non_special_negative_control():
    m = load_isometric_map(next(f for f in shipped_psi_files() if f.stem == "nonspecial"))
    assert m.order == 1 and not m.special
    with pytest.warns(UserWarning):
        L, S, h = build_u0_rank3(m)
    assert invariance_check(L, S, h) != 0


# -- 10 -----------------------------------------------------------------------

@criterion(10, "key algebra table for degree <= 3")
def test_c10_key_table():
    rows = pv.enumerate_key_solutions(3)
    assert [(r["d"], r["rank"], r["mu2"], r["poly"]) for r in rows] == [
        (2, 2, ["1", "1"], "a1*a2"),
        (3, 2, ["1", "2"], "a1^2*a2"),
        (3, 3, ["1", "1", "1"], "a1*a2*a3"),
    ]
    for r in rows:
        mono = pv.invariant_monomial(pv.RootData(r["mu2"]))
        assert mono == parse_poly(r["poly"].replace("a", "x"), r["rank"])


# -- 11 -----------------------------------------------------------------------

PV_ENTRIES = ["det3_V9", "det3_Sym2", "pfaffian_L2R6", "q_1_2", "q_2_1", "q_2_2", "q_3_1", "q_1_3", "pff_AtJA_n2"]


@criterion(11, "prehomogeneous modules, Pfaffian ratio, monomial cases")
@pytest.mark.parametrize("name", PV_ENTRIES)
def test_c11_pv_entry(name):
    e = pv.get_entry(name)
    rng = rng_from(1111)
    pts = [e.reference] + [rand_vector(rng, e.dim) for _ in range(10)]
    assert pv.infinitesimal_invariance(e, pts) <= 1e-12
    assert pv.orbit_dimension(e) == e.dim - 1


@criterion(11, "prehomogeneous modules, Pfaffian ratio, monomial cases")
def test_c11_pfaffian_ratio_and_monomial_cases():
    assert pv.pfaffian_ratio() == 48
    for label, text, blocks, want in suites.MONOMIAL_CASES:
        n = sum(len(b) for _, b in blocks)
        h = pv.get_entry("det3_V9").poly if text is None else parse_poly(text, n)
        assert pv.monomial_structure(h, BlockStructure(blocks)) == want, label


# -- 12 -----------------------------------------------------------------------

@criterion(12, "two runs of `specgeo all --seed 7` give identical JSON")
def test_c12_determinism():
    env = dict(os.environ)
    env.pop("SPECGEO_TOL", None)
    cmd = [sys.executable, "-m", "specgeo", "all", "--seed", "7"]
    procs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, env=env) for _ in range(2)]
    outs = [p.communicate(timeout=300)[0] for p in procs]
    assert all(p.returncode in (0, 1) for p in procs)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["seed"] == 7
