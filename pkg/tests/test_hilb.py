from fractions import Fraction

import pytest

from hilbchow.constructions import VarietyData
from hilbchow.graded import subalgebra_closure
from hilbchow.hilb import (
    E_ONLY,
    F_ONLY,
    MIXED,
    SYM,
    ConsistencyError,
    NestedConfig,
    NotANestedClass,
    curve_coherence,
    extract_presentation,
    hilb2_model,
    hilb3_model,
    is_decomposable,
    nested_model,
    random_products,
    z2_normal_chern,
)
from hilbchow.oracles import builtin, fixed_point_count, goettsche_betti, nested_fixed_point_count
from hilbchow.poly import Polynomial, StructureError

_CACHE = {}


def model(name, **cfg):
    key = (name, tuple(sorted(cfg.items())))
    if key not in _CACHE:
        _CACHE[key] = nested_model(builtin(name), NestedConfig(**cfg) if cfg else None)
    return _CACHE[key]


def test_hilb2_ranks():
    assert hilb2_model(builtin("P1")).ranks() == [1, 1, 1]
    assert hilb2_model(builtin("P2")).ranks() == [1, 2, 3, 2, 1]
    assert hilb2_model(builtin("P1xP1")).ranks() == goettsche_betti([1, 0, 2, 0, 1], 2)


def test_normal_bundle_chern_classes():
    M = model("P2")
    h0, e = M.ambient.var("h0"), M.e
    c = z2_normal_chern(M.X, M.gens, e)
    assert c[0] == 1
    assert c[1] == h0.scale(3) - e
    assert c[2] == (h0 * h0).scale(3) - (h0 * e).scale(3) - e * e
    c1 = z2_normal_chern(builtin("P1"), M.gens, e)
    assert c1[1] == h0.scale(2) - e


def test_normal_bundle_trivial_input():
    X = builtin("P1")
    trivial = VarietyData("P1", X.ring, 1, X.ring.one(), X.diagonal, X.point_class)
    M = model("P1")
    assert z2_normal_chern(trivial, M.gens, Polynomial.zero(M.gens)) == [1, 0]


def test_curve_classes_are_decomposable():
    M = model("P1")
    h = [M.ambient.var(f"h{i}") for i in range(3)]
    assert M.normal_form(M.e) == h[1] + h[2]
    assert M.normal_form(M.f) == h[0].scale(2) + h[1] + h[2]
    assert M.ranks() == [1, 2, 2, 1]
    assert sum(M.ranks()) == nested_fixed_point_count(2, 1, 3)


def test_surface_nested_ranks():
    M = model("P2")
    assert M.ranks() == [1, 4, 9, 11, 9, 4, 1]
    assert sum(M.ranks()) == nested_fixed_point_count(3, 2, 3) == 39
    h1, h2 = M.ambient.var("h1"), M.ambient.var("h2")
    assert M.ambient.is_zero((h1 - h2) * M.e)


def test_relations_and_closure_of_w():
    for name in ("P1", "P2"):
        M = model(name)
        assert all(M.ambient.is_zero(r) for r in M.relations())
        for p in (M.ambient.one(), M.e, M.f):
            assert M.W.contains(M.normal_form(p))
        assert M.W.is_multiplicatively_closed()
        gens = M.symmetric_pair_classes() + [M.e, M.f]
        for g in M.X.gens:
            gens += [M.ambient.var(g.in_slot(1).label) * M.e, M.ambient.var(g.in_slot(0).label) * M.f]
        assert subalgebra_closure(M.ambient, [M.normal_form(p) for p in gens]).equals(M.W)


@pytest.mark.parametrize("name", ["P1", "P2", "P1xP1"])
def test_pushpull_ledger(name):
    M = model(name)
    e, f, one = M.e, M.f, M.ambient.one()
    nf = M.normal_form
    cases = [(one, one.scale(3)), (e, e + f), (f, (e + f).scale(2)), (e * f, (e * f).scale(3)),
             (f * f, (e * e + f * f).scale(2) + e * f), (e * e, e * e + f * f - e * f)]
    for a, b in cases:
        assert nf(M.pushpull(nf(a)) - b).is_zero(), a


def test_pushpull_rejects_non_members():
    M = model("P2")
    with pytest.raises(NotANestedClass, match="degree-1"):
        M.pushpull(M.ambient.var("h1"))


def test_typed_decomposition():
    M = model("P2")
    kinds = lambda p: [k for k, _ in M.decompose(M.normal_form(p))]
    assert kinds(M.ambient.var("h0")) == [SYM]
    assert kinds(M.e) == [E_ONLY]
    assert kinds(M.f) == [F_ONLY]
    assert kinds(M.e * M.f) == [MIXED]
    p = M.normal_form(M.e * M.e + M.f * M.ambient.var("h0") + M.e * M.f)
    total = sum((c for _, c in M.decompose(p)), Polynomial.zero(M.gens))
    assert M.normal_form(total - p).is_zero()


@pytest.mark.parametrize("name", ["P1", "P2", "P1xP1"])
def test_projector_and_eigenvalues(name):
    M = model(name)
    pi = M.pushpull_map()
    for k in range(M.ambient.top_degree + 1):
        A = pi.matrix(k)
        n = len(A)
        sq = [[sum(A[i][l] * A[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        assert sq == [[3 * x for x in row] for row in A]
    gens = [p for _, p in M.hilb3_generators()]
    for p in gens + [M.normal_form(q) for q in random_products(gens, 20, seed=5)]:
        assert M.normal_form(M.pushpull(p) - p.scale(3)).is_zero()


def test_hilb3_ranks_against_oracles():
    assert hilb3_model(model("P1")).ranks() == [1, 1, 1, 1]
    r2 = hilb3_model(model("P2")).ranks()
    assert r2 == goettsche_betti([1, 0, 1, 0, 1], 3)
    assert sum(r2) == fixed_point_count(3, 2, 3) == 22
    assert hilb3_model(model("P1xP1")).ranks() == goettsche_betti([1, 0, 2, 0, 1], 3)


def test_hilb3_of_threefold_matches_fixed_points():
    M = model("P3")
    assert sum(M.ranks()) == nested_fixed_point_count(4, 3, 3)
    r = hilb3_model(M).ranks()
    assert sum(r) == fixed_point_count(4, 3, 3) == 64
    assert r == r[::-1]


def test_eqcz_sign_is_adjudicated():
    M = model("P2", eqcz_sign="+")
    assert M.ranks() == [1, 4, 9, 11, 9, 4, 1]
    nf = M.normal_form
    assert not nf(M.pushpull(nf(M.e * M.e)) - (M.e * M.e + M.f * M.f - M.e * M.f)).is_zero()
    with pytest.raises(ConsistencyError):
        hilb3_model(M)


def test_half_constant_breaks_surface_image():
    with pytest.raises(ConsistencyError, match="degree 2"):
        hilb3_model(model("P2", rel3_constant=Fraction(1, 2)))


def test_curve_coherence():
    M = model("P1")
    assert is_decomposable(M, M.e) and is_decomposable(M, M.f)
    via_slots, via_rule = curve_coherence(M)
    h = [M.ambient.var(f"h{i}") for i in range(3)]
    assert via_slots == via_rule == (h[0] + h[1] + h[2]).scale(2)
    half = model("P1", rel3_constant=Fraction(1, 2))
    a, b = curve_coherence(half)
    assert a != b
    with pytest.raises(ValueError):
        curve_coherence(model("P2"))


def test_extract_presentation():
    H = hilb3_model(model("P1"))
    s1 = H.generators[0][1]
    one = model("P1").ambient.one()
    pres = extract_presentation(H, [("one", one), ("s1", s1)])
    assert [g.label for g in pres.gens] == ["s1"]
    assert pres.rank_table() == [1, 1, 1, 1]
    H2 = hilb3_model(model("P2"))
    gens = [(n, p) for n, p in H2.generators if n in ("s1", "s2", "p", "q")]
    pres2 = extract_presentation(H2, gens)
    assert pres2.rank_table() == [1, 2, 5, 6, 5, 2, 1]
    with pytest.raises(ConsistencyError, match="degree 1"):
        extract_presentation(H2, gens[:1])


def test_dimension_zero_rejected():
    with pytest.raises(StructureError, match="dimension"):
        nested_model(builtin("pt"))
