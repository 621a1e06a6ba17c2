from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hilbchow.poly import Generator, Polynomial, StructureError, format_terms, monomials_of_degree, order_key

GENS = (Generator("h", 1, 0), Generator("h", 1, 1), Generator("e", 1), Generator("f", 1))


def var(label):
    return Polynomial.variable(GENS, label)


def test_labels_include_slot():
    assert [g.label for g in GENS] == ["h0", "h1", "e", "f"]
    assert GENS[0].in_slot(2).label == "h2"


def test_generator_degree_must_be_positive():
    with pytest.raises(StructureError):
        Generator("x", 0)


def test_arithmetic_and_display():
    e, f = var("e"), var("f")
    p = (e + f) * (e + f)
    assert p.to_string() == "f^2 + 2*e*f + e^2"
    assert (e * f).scale(3).to_string() == "3*e*f"
    assert (var("h0").scale(Fraction(-1, 2))).to_string() == "-1/2*h0"
    assert (p - p).is_zero()
    assert Polynomial.zero(GENS).to_string() == "0"


def test_last_generators_dominate_order():
    monos = monomials_of_degree([1, 1, 1], 1)
    assert monos == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert order_key((0, 0, 1)) > order_key((5, 0, 0))


def test_mixed_generator_lists_rejected():
    other = (Generator("x", 1),)
    with pytest.raises(StructureError):
        var("e") + Polynomial.variable(other, "x")


def test_homogeneous_components():
    p = var("e") * var("f") + var("h0") + 2
    comps = dict(p.homogeneous_components())
    assert set(comps) == {0, 1, 2}
    assert not p.is_homogeneous()
    assert comps[2].degree() == 2


def test_substitute_and_embed():
    small = (Generator("h", 1),)
    h = Polynomial.variable(small, "h")
    p = h ** 2 + h
    img = p.substitute({"h": var("h0") + var("h1")}, GENS)
    assert img == (var("h0") + var("h1")) ** 2 + var("h0") + var("h1")
    assert p.embed(GENS, {"h": "e"}) == var("e") ** 2 + var("e")
    with pytest.raises(StructureError):
        p.substitute({}, GENS)


coeff = st.integers(-4, 4)
mono = st.tuples(*[st.integers(0, 2)] * 4)
polys = st.dictionaries(mono, coeff, max_size=5).map(lambda d: Polynomial(GENS, d))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == 0


@settings(max_examples=60, deadline=None)
@given(polys)
def test_display_is_deterministic(a):
    assert a.to_string() == Polynomial(GENS, dict(reversed(list(a.terms.items())))).to_string()
    assert format_terms(a.terms, GENS) == a.to_string()
