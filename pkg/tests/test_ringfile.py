from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from hilbchow.oracles import BUILTIN_NAMES, builtin
from hilbchow.poly import Generator, Polynomial
from hilbchow.ringfile import (
    RingFile,
    RingFileError,
    load_variety,
    parse_element,
    parse_ring_file,
    serialize_ring_file,
)

RINGS = Path(__file__).resolve().parent.parent / "rings"

P1_TEXT = """variety P1 dim 1
generators: h:1
relations: h^2
chern_tangent: 1 + 2*h
diagonal: h (x) 1 + 1 (x) h
point: h
"""


@pytest.mark.parametrize("name", ["P1", "P2", "P3", "P1xP1"])
def test_shipped_files_match_builtins(name):
    rf = parse_ring_file((RINGS / f"{name}.ring").read_text())
    assert rf == RingFile.from_variety(builtin(name))
    assert parse_ring_file(serialize_ring_file(rf)) == rf


@pytest.mark.parametrize("name", [n for n in BUILTIN_NAMES if n != "pt"])
def test_builtin_round_trip(name):
    rf = RingFile.from_variety(builtin(name))
    text = serialize_ring_file(rf)
    assert parse_ring_file(text) == rf
    assert serialize_ring_file(parse_ring_file(text)) == text


def test_comments_and_rationals():
    text = "# a comment\n" + P1_TEXT.replace("point: h", "point: 2/2*h  # trailing")
    assert parse_ring_file(text) == parse_ring_file(P1_TEXT)


def test_load_variety_paths_and_builtins():
    assert load_variety("builtin:P2").name == "P2"
    assert load_variety(str(RINGS / "P1.ring")).dimension == 1


def _error(text):
    with pytest.raises(RingFileError) as info:
        parse_ring_file(text)
    return info.value


def test_inhomogeneous_relation_is_positioned():
    err = _error(P1_TEXT.replace("relations: h^2", "relations: h^2 + h"))
    assert err.line == 3 and err.column == 18
    assert "inhomogeneous relation at line 3: term of degree 1, expected degree 2" in str(err)


def test_dimension_must_be_positive():
    err = _error(P1_TEXT.replace("dim 1", "dim 0"))
    assert err.line == 1 and "dimension must be >= 1" in str(err)


@pytest.mark.parametrize("bad, line", [
    (P1_TEXT.replace("relations: h^2", "relations: k^2"), 3),
    (P1_TEXT.replace("relations: h^2", "relations: h^2 +"), 3),
    (P1_TEXT.replace("point: h", "point: h/0"), 6),
    (P1_TEXT.replace("point: h", "point: h\npoint: h"), 7),
    (P1_TEXT.replace("generators: h:1", "generators: e:1"), 2),
    (P1_TEXT.replace("generators: h:1", "generators: h:0"), 2),
    (P1_TEXT.replace("point: h\n", ""), 6),
    (P1_TEXT.replace("chern_tangent: 1 + 2*h", "chern_tangent: 1 + 2*h $"), 4),
    (P1_TEXT.replace("diagonal: h (x) 1", "diagonal: h (x) 1 (x) h"), 5),
    ("variety P1\n", 1),
    (P1_TEXT.replace("generators: h:1", "generators: h:1, h:1"), 2),
    (P1_TEXT.replace("chern_tangent: 1 + 2*h", "chern_tangent: 2 + 2*h"), 4),
])
def test_errors_carry_position_and_hint(bad, line):
    err = _error(bad)
    assert err.line == line
    assert err.column >= 1
    assert err.expected
    assert str(err).startswith(f"line {line}, column {err.column}: ")


def test_expected_tokens_reported():
    err = _error(P1_TEXT.replace("relations: h^2", "relations: h^2 +"))
    assert err.expected


def test_parse_element_over_labelled_generators():
    gens = (Generator("h", 1, 0), Generator("h", 1, 1), Generator("e", 1), Generator("f", 1))
    p = parse_element("h0*h1 - 3/2*e^2 + f", gens)
    assert p.terms[(1, 1, 0, 0)] == 1
    assert p.terms[(0, 0, 2, 0)] == Fraction(-3, 2)
    with pytest.raises(RingFileError):
        parse_element("h0 h1 h2", gens)


QUAD = (Generator("a", 1), Generator("b", 1))
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeffs, min_size=3, max_size=3), st.lists(coeffs, min_size=5, max_size=5))
def test_random_files_round_trip(rel, chern):
    base = RingFile.from_variety(builtin("P1xP1"))
    mons = [(2, 0), (1, 1), (0, 2)]
    extra = Polynomial(QUAD, {m: c for m, c in zip(mons, rel)})
    rels = base.relations + ((extra,) if not extra.is_zero() else ())
    c = Polynomial(QUAD, {(0, 0): 1, **{m: x for m, x in zip([(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)], chern)}})
    rf = RingFile(base.name, base.dimension, base.generators, rels, c, base.diagonal, base.point_class)
    assert parse_ring_file(serialize_ring_file(rf)) == rf


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs, max_size=6))
def test_element_text_round_trip(terms):
    p = Polynomial(QUAD, terms)
    assert parse_element(p.to_string(), QUAD) == p
