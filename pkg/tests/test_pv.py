import pytest
import sympy

from oracles import det_hessian_at, pfaffian_by_matchings, s6_pfaffian_sum
from specgeo import pv
from specgeo.errors import UnimplementedEntry
from specgeo.linalg import signature
from specgeo.poly import BlockStructure, parse_poly
from specgeo.randomness import rand_vector, rng_from

IMPLEMENTED = [e.name for e in pv.catalog() if e.implemented]

# Hessian determinants at the reference points, frozen from the sympy oracle
HESSIAN_DET = {
    "det3_V9": -2,
    "det3_Sym2": -16,
    "q_1_2": 8,
    "q_2_1": -8,
    "q_2_2": 16,
    "q_3_1": -16,
    "q_1_3": -16,
    "pff_AtJA_n2": 1,
    "torus_x1x2x3": 2,
}

ORBIT_DIM = {"det3_V9": 8, "det3_Sym2": 5, "pfaffian_L2R6": 14, "pff_AtJA_n2": 7, "q_2_1": 2, "q_2_2": 3}


def J6():
    J = sympy.zeros(6)
    for i in range(3):
        J[i, i + 3], J[i + 3, i] = 1, -1
    return J


# -- key algebras -------------------------------------------------------------

def test_invariant_exponents():
    assert pv.invariant_exponents(pv.RootData([1, 1])) == ((1, 1), 1, 2)
    assert pv.invariant_exponents(pv.RootData([1, 2])) == ((2, 1), 1, 3)
    assert pv.invariant_monomial(pv.RootData([1, 1, 1])) == parse_poly("x1*x2*x3", 3)


def test_root_data_validation():
    with pytest.raises(ValueError):
        pv.RootData([2, 1])
    with pytest.raises(ValueError):
        pv.RootData([1, -1])
    assert pv.normalize_roots([4, 2]) == (1, 2)


def test_key_table():
    rows = [{k: r[k] for k in ("d", "rank", "mu2", "poly")} for r in pv.enumerate_key_solutions(3)]
    assert rows == [
        {"d": 2, "rank": 2, "mu2": ["1", "1"], "poly": "a1*a2"},
        {"d": 3, "rank": 2, "mu2": ["1", "2"], "poly": "a1^2*a2"},
        {"d": 3, "rank": 3, "mu2": ["1", "1", "1"], "poly": "a1*a2*a3"},
    ]
    assert len(pv.enumerate_key_solutions(2)) == 1
    with pytest.raises(ValueError):
        pv.enumerate_key_solutions(1)


def test_key_table_degrees_are_bounded():
    for r in pv.enumerate_key_solutions(4):
        assert r["d"] <= 4 and sum(r["exponents"]) == r["d"]


def test_swap_equivalence():
    a = parse_poly("x1^2*x2", 2)
    b = parse_poly("x1*x2^2", 2)
    assert pv.swap_equivalent(a, b) == [1, 0]
    assert pv.swap_equivalent(a, parse_poly("x1^3", 2)) is None
    assert pv.swap_equivalent(a, parse_poly("x1*x2", 2)) is None


# -- catalog ------------------------------------------------------------------

def test_unknown_entry():
    with pytest.raises(KeyError):
        pv.get_entry("nope")


def test_metadata_only_entries_refuse_checks():
    e = pv.get_entry("spinor_spin7")
    assert not e.implemented
    assert e.describe()["implemented"] is False
    with pytest.raises(UnimplementedEntry):
        e.require()
    with pytest.raises(UnimplementedEntry):
        pv.orbit_dimension(e)


@pytest.mark.parametrize("name", IMPLEMENTED)
def test_entry_invariance_and_closed_form(name):
    e = pv.get_entry(name)
    rng = rng_from(3)
    pts = [rand_vector(rng, e.dim) for _ in range(5)]
    assert pv.infinitesimal_invariance(e, pts) == 0
    assert pv.euler_residual(e, pts) == 0
    assert pv.closed_form_deviation(e, pts) <= 1e-9
    assert pv.regularity_check(e)
    assert pv.orbit_dimension(e) == e.dim - 1


@pytest.mark.parametrize("name", sorted(HESSIAN_DET))
def test_hessian_determinant_frozen(name):
    e = pv.get_entry(name)
    assert pv.hessian_determinant(e.poly, e.reference) == HESSIAN_DET[name]


def test_hessian_determinant_against_sympy():
    e = pv.get_entry("det3_Sym2")
    assert pv.hessian_determinant(e.poly, e.reference) == det_hessian_at(e.poly.to_text(), e.dim, e.reference)


def test_x1sq_x2_hessian():
    h = parse_poly("x1^2*x2", 2)
    assert pv.hessian_determinant(h, [1, 1]) == -4
    assert pv.regularity_check(h, [1, 1])
    assert not pv.regularity_check(h, [0, 1])


@pytest.mark.parametrize("name,dim", sorted(ORBIT_DIM.items()))
def test_orbit_dimensions(name, dim):
    e = pv.get_entry(name)
    assert pv.orbit_dimension(e) == dim
    # the scaling generator adds the missing direction
    assert pv.orbit_dimension(e, with_scaling=True) == e.dim


def test_pfaffian_normalization():
    J = J6()
    assert pfaffian_by_matchings(J) == -1
    assert s6_pfaffian_sum(J) == -48
    assert pv.pfaffian_matching_value([[J[i, j] for j in range(6)] for i in range(6)]) == -1
    assert pv.pfaffian_ratio() == 48


def test_pfaffian_entry_at_J():
    e = pv.get_entry("pfaffian_L2R6")
    assert e.poly.evaluate(e.reference) == -48


def test_pff_split_signature():
    q = pv.get_entry("pff_AtJA_n2").poly
    origin = [0] * q.n
    assert signature([[p.evaluate(origin) for p in row] for row in q.hessian_polys]) == (4, 4, 0)


# -- monomial structure -------------------------------------------------------

def test_monomial_structure_cases():
    det3 = pv.get_entry("det3_V9").poly
    assert pv.monomial_structure(det3, BlockStructure([("M", list(range(9)))])) == "1"
    q = parse_poly("x1*x2^2 + x1*x3^2 - x1*x4^2", 4)
    assert pv.monomial_structure(q, BlockStructure([("l", [0]), ("q", [1, 2, 3])])) == "2"
    t = parse_poly("x1*x2*x3", 3)
    assert pv.monomial_structure(t, BlockStructure([("a", [0]), ("b", [1]), ("c", [2])])) == "3"


def test_monomial_structure_violations():
    blocks = BlockStructure([("a", [0]), ("b", [1])])
    assert pv.monomial_structure(parse_poly("x1^3 + x2^3", 2), blocks) == "violates"
    # a block the polynomial never touches
    assert pv.monomial_structure(parse_poly("x1^3", 2), blocks) == "violates"
    # linear factor on a block of dimension two
    q = parse_poly("x1*x3^2 + x2*x3^2", 3)
    assert pv.monomial_structure(q, BlockStructure([("l", [0, 1]), ("q", [2])])) == "violates"
    with pytest.raises(ValueError):
        pv.monomial_structure(parse_poly("x1*x2", 2), blocks)


def test_describe_has_no_callables():
    for e in pv.catalog():
        d = e.describe()
        assert d["name"] == e.name and isinstance(d["dim"], int)
        assert not any(callable(v) for v in d.values())

