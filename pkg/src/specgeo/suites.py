"""Named verification suites.  Each returns a SuiteReport with records in a fixed order."""
from __future__ import annotations

import time
import warnings
import zlib
from fractions import Fraction

from . import pv
from .corpus import CorpusEntry, shipped_corpus, shipped_psi_files
from .errors import ConeExitError, NotSpecialWarning, PreconditionError
from .hypersurface import automorphism_deviation, canonical_metric, project_to_level, pseudo_sphere_signature
from .jalgebra import (IsometricMap, build_u0_rank2, build_u0_rank3, forbidden_extension_residual,
                       invariance_check, load_isometric_map, orbit_rank, pullback_metric_check,
                       type_one_checks, verify_algebra)
from .linalg import signature
from .poly import BlockStructure, parse_poly, polarize
from .randomness import rand_complex_vector, rand_homopoly, rand_vector, rng_from
from .report import SuiteReport
from .scalar import ExactComplex
from .special_cone import (cone_metric_routes, gamma_gram, gamma_signature, is_hermitian,
                           check_gc_equals_gs, lagrangean_defect, lemma4h_residual, r_map)
from .tube import (AffineMap, check_pullback_isometry, cone_product_check, fd_deviation,
                   inversion_cone_deviation, isometry_candidates, sample_cone_points, sample_tube_points)

TUBE_SUITES = ("isometries", "product", "pullback")
CONE_SUITES = ("lagrangean", "gamma", "gc-gs", "lemma4h")


def sub_rng(seed: int, *labels):
    """Independent stream per (seed, label) so suites do not perturb each other."""
    tags = [zlib.crc32(str(x).encode()) for x in labels]
    return rng_from([int(seed)] + tags)


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.wall_time = time.perf_counter() - t0
        return rep
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# -- tube domain --------------------------------------------------------------

def _translation_vector(rng, n):
    return [Fraction(int(rng.integers(-16, 17)), 4) for _ in range(n)]


@_timed
def tube_suite(entry: CorpusEntry, suite: str, points: int = 10, seed: int = 0) -> SuiteReport:
    h = entry.h
    rep = SuiteReport(f"tube-check:{suite}:{entry.name}")
    rng = sub_rng(seed, "tube", suite, entry.name)
    if suite == "isometries":
        pts = sample_tube_points(h, entry.seed_point, points, rng)
        for m in isometry_candidates(h.n, lam=2.0, X0=_translation_vector(rng, h.n)):
            try:
                dev = check_pullback_isometry(h, m, pts)
            except ConeExitError as exc:
                rep.expect(f"{m.name}.pullback", False, "STATED", error=str(exc))
                continue
            rep.measure(f"{m.name}.pullback", dev, 1e-9, "STATED")
        inv = inversion_cone_deviation(h, [Z.Y for Z in pts])
        rep.measure("inversion.cone_isometry", inv["cone_isometry"], 1e-10, "STATED")
        rep.measure("inversion.involution", inv["involution"], 1e-10, "STATED")
        rep.measure("inversion.fixes_level_set", inv["fixes_level_set"], 1e-10, "STATED")
    elif suite == "product":
        Ys = sample_cone_points(h, entry.seed_point, points, rng)
        samples = [(float(Fraction(int(rng.integers(-8, 9)), 8)), project_to_level(h, Y)) for Y in Ys]
        rep.measure("cone_product.pullback", cone_product_check(h, samples), 1e-10, "STATED")
    elif suite == "pullback":
        pts = sample_tube_points(h, entry.seed_point, points, rng)
        fd = max(fd_deviation(h, Z, relative=True) for Z in pts[: max(1, min(points, 3))])
        rep.measure("tube_metric.finite_difference", fd, 1e-6, "DERIVED", relative=True)
        X0 = project_to_level(h, entry.seed_point)
        for name, A in entry.automorphisms:
            rep.measure(f"automorphism[{name}].hypersurface", automorphism_deviation(h, A, X0), 1e-10, "STATED")
            rep.measure(f"automorphism[{name}].tube", check_pullback_isometry(h, AffineMap(A), pts), 1e-9, "STATED")
        for name, A in entry.negative_controls:
            try:
                automorphism_deviation(h, A, X0)
                rejected = False
            except PreconditionError:
                rejected = True
            rep.expect(f"negative_control[{name}].rejected", rejected, "TRIVIAL")
    else:
        raise ValueError(f"unknown tube suite {suite!r}")
    return rep


# -- special cone -------------------------------------------------------------

def _exact_chart_points(entry: CorpusEntry, count: int, rng) -> list:
    pts = sample_tube_points(entry.h, entry.seed_point, count, rng)
    return [[ExactComplex(1)] + [ExactComplex(x, y) for x, y in zip(Z.X, Z.Y)] for Z in pts]


@_timed
def cone_suite(entry: CorpusEntry, suite: str, points: int = 10, seed: int = 0) -> SuiteReport:
    h = entry.h
    rep = SuiteReport(f"cone-check:{suite}:{entry.name}")
    rng = sub_rng(seed, "cone", suite, entry.name)
    if suite == "lagrangean":
        F = r_map(h)
        pts = _exact_chart_points(entry, points, rng)
        rep.measure("lift.omega_isotropy", max(lagrangean_defect(F, Z) for Z in pts), 1e-10, "STATED")
        rep.measure("cone_metric.gamma_pullback", max(cone_metric_routes(F, Z) for Z in pts), 1e-10, "STATED")
    elif suite == "gamma":
        m = h.n + 1
        rep.expect("gamma.hermitian", is_hermitian(gamma_gram(m)), "STATED")
        sig = gamma_signature(m)
        rep.expect("gamma.signature", tuple(sig) == (m, m, 0), "STATED", signature=list(sig), expected=[m, m, 0])
    elif suite == "gc-gs":
        if h.d != 3:
            rep.skip("gc_gs", f"needs a cubic, got degree {h.d}", "STATED")
            return rep
        pts = sample_tube_points(h, entry.seed_point, points, rng)
        res = check_gc_equals_gs(h, pts)
        rep.measure("gc_gs.metric", res["metric_deviation"], 1e-6, "STATED")
        rep.measure("gc_gs.potential_constant", res["potential_deviation"], 1e-10, "STATED", constant=res["constant"])
    elif suite == "lemma4h":
        if h.d != 3:
            rep.skip("lemma4h", f"needs a cubic, got degree {h.d}", "STATED")
            return rep
        H = polarize(h)
        bad = 0
        for _ in range(points):
            r = lemma4h_residual(h, rand_complex_vector(rng, h.n), H)
            bad += bool(r)
        rep.expect("lemma4h.exact", bad == 0, "STATED", samples=points, nonzero=bad)
    else:
        raise ValueError(f"unknown cone suite {suite!r}")
    return rep


@_timed
def lemma4h_random_suite(count: int = 100, seed: int = 0) -> SuiteReport:
    """The 4h(Y) identity on random exact cubics and random exact points."""
    rep = SuiteReport("cone-check:lemma4h:random")
    rng = sub_rng(seed, "lemma4h-random")
    bad = 0
    for _ in range(count):
        n = int(rng.integers(1, 5))
        h = rand_homopoly(rng, n, 3, density=0.7)
        if not h.monomials:
            h = parse_poly("x1^3", 1).extend(n, [0])
        bad += bool(lemma4h_residual(h, rand_complex_vector(rng, n)))
    rep.expect("lemma4h.random_cubics", bad == 0, "STATED", samples=count, nonzero=bad)
    return rep


# -- hypersurfaces ------------------------------------------------------------

@_timed
def hypersurface_suite(seed: int = 0, points: int = 10) -> SuiteReport:
    rep = SuiteReport("hypersurface")
    for k in range(1, 7):
        for l in range(0, 7 - k):
            if k + l < 2:
                continue
            sig = pseudo_sphere_signature(k, l)
            rep.expect(f"pseudo_sphere[{k},{l}].signature", tuple(sig) == (l, k - 1, 0), "STATED",
                       signature=list(sig))
    rng = sub_rng(seed, "hypersurface")
    for entry in shipped_corpus():
        # canonical_metric raises RouteMismatchError when the three routes disagree
        for Y in sample_cone_points(entry.h, entry.seed_point, points, rng):
            canonical_metric(entry.h, project_to_level(entry.h, Y))
        rep.expect(f"routes[{entry.name}].agree", True, "STATED", points=points)
    return rep


# -- J-algebras ---------------------------------------------------------------

def _algebra_records(rep: SuiteReport, tag: str, L, S, h, expect_invariant: bool = True):
    v = verify_algebra(L)
    for key in ("jacobi", "complex_structure", "solvable", "normal_one_form", "parallel_J"):
        rep.expect(f"{tag}.{key}", v[key]["ok"], "STATED")
    rep.measure(f"{tag}.real_ad_spectrum", v["real_ad_spectrum"]["max_imag"], 1e-9, "STATED")
    rep.expect(f"{tag}.type_one", type_one_checks(L, S)["ok"], "STATED")
    res = invariance_check(L, S, h)
    if expect_invariant:
        rep.measure(f"{tag}.invariance", float(res), 0.0, "STATED")
    else:
        rep.expect(f"{tag}.invariance_nonzero", bool(res), "STATED", residual=str(res))
        return
    rk = orbit_rank(L, S)
    rep.expect(f"{tag}.orbit_rank", rk == len(S.Jb) - 1, "STATED", rank=rk, expected=len(S.Jb) - 1)
    pb = pullback_metric_check(L, S, h)
    rep.measure(f"{tag}.tube_pullback", pb["deviation"], 1e-10, "STATED", exact=pb["exact"])


@_timed
def jalg_suite(seed: int = 0, p_max: int = 3, s_max: int = 4) -> SuiteReport:
    rep = SuiteReport("jalg")
    for p in range(0, p_max + 1):
        for s in range(1, s_max + 1):
            L, S, h = build_u0_rank2(p, s)
            _algebra_records(rep, f"u0({p},{s})", L, S, h)
    for p, q in ((0, 0), (1, 1), (2, 2), (1, 2), (2, 1)):
        psi = IsometricMap.zero(p, q, 0)
        L, S, h = build_u0_rank3(psi)
        _algebra_records(rep, f"u0(psi=0;{p},{q})", L, S, h)
    for path in shipped_psi_files():
        psi = load_isometric_map(path)
        tag = f"u0(psi={path.stem})"
        if psi.is_zero or psi.special:
            L, S, h = build_u0_rank3(psi)
            _algebra_records(rep, tag, L, S, h)
        else:
            # negative control: a non-special map of order one breaks invariance
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NotSpecialWarning)
                L, S, h = build_u0_rank3(psi)
            _algebra_records(rep, tag, L, S, h, expect_invariant=False)
    got, expected = forbidden_extension_residual(1)
    rep.expect("forbidden_extension.residual", got == expected and bool(got.monomials), "STATED")
    return rep


# -- prehomogeneous modules ---------------------------------------------------

def _pv_entry_records(rep: SuiteReport, entry, samples: int, rng):
    pts = [rand_vector(rng, entry.dim) for _ in range(samples)]
    rep.measure(f"{entry.name}.invariance", pv.infinitesimal_invariance(entry, pts), 1e-12, "DERIVED")
    rep.measure(f"{entry.name}.euler", pv.euler_residual(entry, pts), 0.0, "TRIVIAL")
    rep.measure(f"{entry.name}.closed_form", pv.closed_form_deviation(entry, pts), 1e-9, "DERIVED")
    rep.expect(f"{entry.name}.regular", pv.regularity_check(entry), "STATED")
    od = pv.orbit_dimension(entry)
    rep.expect(f"{entry.name}.orbit_dimension", od == entry.dim - 1, "DERIVED", rank=od, expected=entry.dim - 1)


@_timed
def pv_entry_suite(name: str, samples: int = 20, seed: int = 0) -> SuiteReport:
    entry = pv.get_entry(name).require()
    rep = SuiteReport(f"pv:{name}")
    _pv_entry_records(rep, entry, samples, sub_rng(seed, "pv", name))
    return rep


MONOMIAL_CASES = [
    ("det3", None, [("M", list(range(9)))], "1"),
    ("x1*q", "x1*x2^2 + x1*x3^2 - x1*x4^2", [("l", [0]), ("q", [1, 2, 3])], "2"),
    ("x1x2x3", "x1*x2*x3", [("a", [0]), ("b", [1]), ("c", [2])], "3"),
    ("sum_of_cubes", "x1^3 + x2^3", [("a", [0]), ("b", [1])], "violates"),
]

KEY_TABLE = [
    {"d": 2, "rank": 2, "mu2": ["1", "1"], "poly": "a1*a2"},
    {"d": 3, "rank": 2, "mu2": ["1", "2"], "poly": "a1^2*a2"},
    {"d": 3, "rank": 3, "mu2": ["1", "1", "1"], "poly": "a1*a2*a3"},
]


@_timed
def pv_suite(samples: int = 20, seed: int = 0) -> SuiteReport:
    rep = SuiteReport("pv")
    for entry in pv.catalog():
        if not entry.implemented:
            rep.skip(f"{entry.name}", "metadata only", "STATED")
            continue
        _pv_entry_records(rep, entry, samples, sub_rng(seed, "pv", entry.name))
    ratio = pv.pfaffian_ratio()
    rep.expect("pfaffian.normalization_ratio", ratio == 48, "DERIVED", ratio=str(ratio))
    rows = [{k: r[k] for k in ("d", "rank", "mu2", "poly")} for r in pv.enumerate_key_solutions(3)]
    rep.expect("key_table.dmax3", rows == KEY_TABLE, "STATED")
    rep.expect("key_table.dmax2", len(pv.enumerate_key_solutions(2)) == 1, "STATED")
    for label, text, blocks, want in MONOMIAL_CASES:
        h = pv.get_entry("det3_V9").poly if text is None else parse_poly(text, sum(len(b) for _, b in blocks))
        got = pv.monomial_structure(h, BlockStructure(blocks))
        rep.expect(f"monomial_structure[{label}]", got == want, "STATED", got=got, expected=want)
    q = pv.get_entry("pff_AtJA_n2").poly
    origin = [0] * q.n
    sig = signature([[p.evaluate(origin) for p in row] for row in q.hessian_polys])
    rep.expect("pff_AtJA.split_signature", tuple(sig) == (4, 4, 0), "DERIVED", signature=list(sig))
    return rep


# -- everything ---------------------------------------------------------------

def run_all(seed: int = 0, points: int = 10) -> list[SuiteReport]:
    reports = [hypersurface_suite(seed, points=3)]
    corpus = shipped_corpus()
    for entry in corpus:
        for s in TUBE_SUITES:
            reports.append(tube_suite(entry, s, points, seed))
    for entry in corpus:
        for s in CONE_SUITES:
            if s in ("gc-gs", "lemma4h") and not entry.is_cubic:
                continue
            n = 20 if s == "lagrangean" else points
            reports.append(cone_suite(entry, s, n, seed))
    reports.append(lemma4h_random_suite(100, seed))
    reports.append(jalg_suite(seed))
    reports.append(pv_suite(20, seed))
    return reports
