"""Exact multivariate polynomials over Q with graded, slot-labelled generators.

Monomials are dense exponent tuples over a fixed, ordered generator list.
Within one degree, monomials compare by their exponent vector read from the
*last* generator backwards, so generators listed last (``e``, ``f``) dominate
and are the first to be eliminated by echelon reductions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

Monomial = Tuple[int, ...]
Terms = Dict[Monomial, Fraction]
Scalar = Union[int, Fraction]


class StructureError(ValueError):
    """Raised when objects over incompatible generator lists are combined."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    slot: Optional[int] = None

    def __post_init__(self):
        if self.degree < 1:
            raise StructureError(f"generator {self.name!r} must have degree >= 1")

    @property
    def label(self) -> str:
        return self.name if self.slot is None else f"{self.name}{self.slot}"

    def in_slot(self, slot: Optional[int]) -> "Generator":
        return Generator(self.name, self.degree, slot)


def check_unique(gens: Sequence[Generator]) -> None:
    seen = set()
    for g in gens:
        key = (g.name, g.slot)
        if key in seen:
            raise StructureError(f"duplicate generator {g.label!r}")
        seen.add(key)
    labels = [g.label for g in gens]
    if len(set(labels)) != len(labels):
        raise StructureError(f"ambiguous generator labels {labels}")


def monomial_degree(mono: Monomial, degrees: Sequence[int]) -> int:
    return sum(a * d for a, d in zip(mono, degrees))


def order_key(mono: Monomial) -> Tuple[int, ...]:
    """Sort key inside one degree; larger keys are eliminated first."""
    return mono[::-1]


def monomials_of_degree(degrees: Sequence[int], k: int) -> List[Monomial]:
    """All exponent vectors of weighted degree ``k``, largest first."""
    n = len(degrees)
    out: List[Monomial] = []

    def rec(i: int, rest: int, acc: List[int]) -> None:
        if i == n:
            if rest == 0:
                out.append(tuple(acc))
            return
        d = degrees[i]
        for a in range(rest // d + 1):
            acc.append(a)
            rec(i + 1, rest - a * d, acc)
            acc.pop()

    if k < 0:
        return []
    rec(0, k, [])
    out.sort(key=order_key, reverse=True)
    return out


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def terms_add(a: Terms, b: Mapping[Monomial, Fraction], scale: Scalar = 1) -> Terms:
    """In-place ``a += scale * b``; returns ``a``."""
    for m, c in b.items():
        v = a.get(m, 0) + scale * c
        if v:
            a[m] = v
        else:
            a.pop(m, None)
    return a


def terms_mul(a: Mapping[Monomial, Fraction], b: Mapping[Monomial, Fraction]) -> Terms:
    out: Terms = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = mono_mul(ma, mb)
            v = out.get(m, 0) + ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


class Polynomial:
    """An immutable polynomial with rational coefficients."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: Sequence[Generator], terms: Optional[Mapping[Monomial, Scalar]] = None):
        self.gens: Tuple[Generator, ...] = tuple(gens)
        n = len(self.gens)
        clean: Terms = {}
        for m, c in (terms or {}).items():
            if len(m) != n:
                raise StructureError(f"monomial {m} does not match {n} generators")
            c = Fraction(c)
            if c:
                clean[tuple(m)] = clean.get(tuple(m), 0) + c
        self.terms: Terms = {m: c for m, c in clean.items() if c}

    # constructors
    @classmethod
    def zero(cls, gens: Sequence[Generator]) -> "Polynomial":
        return cls(gens)

    @classmethod
    def constant(cls, gens: Sequence[Generator], c: Scalar) -> "Polynomial":
        return cls(gens, {(0,) * len(gens): c})

    @classmethod
    def variable(cls, gens: Sequence[Generator], label: str) -> "Polynomial":
        gens = tuple(gens)
        idx = index_of(gens, label)
        m = [0] * len(gens)
        m[idx] = 1
        return cls(gens, {tuple(m): 1})

    # structure
    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(g.degree for g in self.gens)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.gens != self.gens:
                raise StructureError("polynomials live over different generator lists")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.gens, other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.gens, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.gens, frozenset(self.terms.items())))

    # arithmetic
    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.gens, terms_add(dict(self.terms), other.terms))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.gens, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.gens, terms_add(dict(self.terms), other.terms, -1))

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.gens, terms_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        return Polynomial(self.gens, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.gens, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # grading
    def monomial_degree(self, m: Monomial) -> int:
        return monomial_degree(m, self.degrees)

    def homogeneous_components(self) -> List[Tuple[int, "Polynomial"]]:
        parts: Dict[int, Terms] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.monomial_degree(m), {})[m] = c
        return [(k, Polynomial(self.gens, parts[k])) for k in sorted(parts)]

    def component(self, k: int) -> "Polynomial":
        return Polynomial(self.gens, {m: c for m, c in self.terms.items() if self.monomial_degree(m) == k})

    def is_homogeneous(self) -> bool:
        return len({self.monomial_degree(m) for m in self.terms}) <= 1

    def degree(self) -> int:
        """Degree of a nonzero homogeneous polynomial."""
        degs = {self.monomial_degree(m) for m in self.terms}
        if len(degs) != 1:
            raise ValueError("degree() needs a nonzero homogeneous polynomial")
        return degs.pop()

    # substitution
    def substitute(self, images: Mapping[str, "Polynomial"], target_gens: Sequence[Generator]) -> "Polynomial":
        """Ring map sending each generator label to a polynomial over ``target_gens``."""
        target_gens = tuple(target_gens)
        imgs = []
        for g in self.gens:
            if g.label not in images:
                raise StructureError(f"no image given for generator {g.label!r}")
            p = images[g.label]
            if p.gens != target_gens:
                raise StructureError(f"image of {g.label!r} is over the wrong generators")
            imgs.append(p)
        cache: Dict[Tuple[int, int], Terms] = {}

        def power(i: int, a: int) -> Terms:
            if (i, a) not in cache:
                cache[(i, a)] = (imgs[i] ** a).terms
            return cache[(i, a)]

        out: Terms = {}
        one = {(0,) * len(target_gens): Fraction(1)}
        for m, c in self.terms.items():
            acc: Mapping[Monomial, Fraction] = one
            for i, a in enumerate(m):
                if a:
                    acc = terms_mul(acc, power(i, a))
            terms_add(out, acc, c)
        return Polynomial(target_gens, out)

    def embed(self, target_gens: Sequence[Generator], mapping: Optional[Mapping[str, str]] = None) -> "Polynomial":
        """Relabel generators into a larger list (monomial-to-monomial map)."""
        target_gens = tuple(target_gens)
        mapping = mapping or {}
        index = [index_of(target_gens, mapping.get(g.label, g.label)) for g in self.gens]
        out: Terms = {}
        for m, c in self.terms.items():
            t = [0] * len(target_gens)
            for i, a in enumerate(m):
                t[index[i]] += a
            terms_add(out, {tuple(t): c})
        return Polynomial(target_gens, out)

    # display
    def to_string(self) -> str:
        return format_terms(self.terms, self.gens)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_string()!r})"


def index_of(gens: Sequence[Generator], label: str) -> int:
    for i, g in enumerate(gens):
        if g.label == label:
            return i
    raise StructureError(f"unknown generator {label!r}")


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Monomial, gens: Sequence[Generator]) -> str:
    parts = []
    for a, g in zip(m, gens):
        if a == 1:
            parts.append(g.label)
        elif a > 1:
            parts.append(f"{g.label}^{a}")
    return "*".join(parts)


def format_terms(terms: Mapping[Monomial, Fraction], gens: Sequence[Generator]) -> str:
    """Canonical text: terms by degree (high first), then monomial order."""
    if not terms:
        return "0"
    degrees = [g.degree for g in gens]
    ordered = sorted(terms, key=lambda m: (monomial_degree(m, degrees), order_key(m)), reverse=True)
    out = []
    for i, m in enumerate(ordered):
        c = terms[m]
        mono = format_monomial(m, gens)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not mono:
            body = format_coefficient(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_coefficient(mag)}*{mono}"
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


