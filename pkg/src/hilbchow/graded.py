"""Finitely presented graded commutative Q-algebras with a top degree.

Everything is degree-wise linear algebra: the degree-k piece of the ideal is
spanned by (monomial x relation) products of degree k (a truncated Macaulay
matrix) and normal forms come from its reduced echelon form.  Subrings,
invariants and images are :class:`GradedSubspace` objects living inside one
ambient presentation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .linalg import Echelon, axpy
from .poly import (
    Generator,
    Monomial,
    Polynomial,
    StructureError,
    Terms,
    check_unique,
    divides,
    mono_mul,
    monomials_of_degree,
    order_key,
    terms_add,
    terms_mul,
)


class NotAHomomorphism(ValueError):
    pass


class DegreeBasis:
    """Standard monomials and reduction data for one degree."""

    def __init__(self, degree: int, monomials: List[Monomial], killed: Callable[[Monomial], bool], echelon: Echelon):
        self.degree = degree
        self.all_monomials = monomials
        self._killed = killed
        self.echelon = echelon
        self.basis = [m for m in monomials if not killed(m) and m not in echelon.rows]
        self.index = {m: i for i, m in enumerate(self.basis)}

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, terms: Mapping[Monomial, Fraction]) -> Terms:
        live = {m: Fraction(c) for m, c in terms.items() if c and not self._killed(m)}
        return self.echelon.reduce(live)[0]

    def coordinates(self, terms: Mapping[Monomial, Fraction]) -> List[Fraction]:
        red = self.reduce(terms)
        vec = [Fraction(0)] * len(self.basis)
        for m, c in red.items():
            vec[self.index[m]] = c
        return vec


class RingPresentation:
    """``Q[generators] / (relations)`` with everything above ``top_degree`` zero."""

    def __init__(self, generators: Sequence[Generator], relations: Iterable[Polynomial], top_degree: int, name: str = "R"):
        self.gens: Tuple[Generator, ...] = tuple(generators)
        check_unique(self.gens)
        if top_degree < 0:
            raise StructureError("top degree must be nonnegative")
        self.top_degree = top_degree
        self.name = name
        self.degrees = tuple(g.degree for g in self.gens)
        rels = []
        for r in relations:
            if r.gens != self.gens:
                raise StructureError(f"relation {r} is over a different generator list")
            if r.is_zero():
                continue
            if not r.is_homogeneous():
                raise StructureError(f"relation {r} is not homogeneous")
            if r.degree() < 1:
                raise StructureError(f"relation {r} has degree 0")
            rels.append(r)
        self.relations: Tuple[Polynomial, ...] = tuple(rels)
        self._monomial_rels = [next(iter(r.terms)) for r in rels if len(r.terms) == 1]
        self._other_rels = [r for r in rels if len(r.terms) > 1]
        self._bases: Dict[int, DegreeBasis] = {}

    def __repr__(self) -> str:
        return f"RingPresentation({self.name!r}, gens={[g.label for g in self.gens]}, top={self.top_degree})"

    # polynomial helpers
    def poly(self, terms: Optional[Mapping[Monomial, Fraction]] = None) -> Polynomial:
        return Polynomial(self.gens, terms or {})

    def var(self, label: str) -> Polynomial:
        return Polynomial.variable(self.gens, label)

    def one(self) -> Polynomial:
        return Polynomial.constant(self.gens, 1)

    def killed(self, m: Monomial) -> bool:
        return any(divides(r, m) for r in self._monomial_rels)

    def monomials(self, k: int) -> List[Monomial]:
        return monomials_of_degree(self.degrees, k)

    # degree-wise quotient
    def degree_basis(self, k: int) -> DegreeBasis:
        if not 0 <= k <= self.top_degree:
            raise StructureError(f"degree {k} outside 0..{self.top_degree} for {self.name}")
        if k not in self._bases:
            self._bases[k] = self._build_basis(k)
        return self._bases[k]

    def _build_basis(self, k: int) -> DegreeBasis:
        monos = self.monomials(k)
        killed = self.killed
        ech = Echelon(order_key)
        for r in self._other_rels:
            rd = r.degree()
            if rd > k:
                continue
            for m in monomials_of_degree(self.degrees, k - rd):
                if killed(m):
                    continue
                row: Terms = {}
                for t, c in r.terms.items():
                    mt = mono_mul(m, t)
                    if not killed(mt):
                        row[mt] = c
                if row:
                    ech.add(row)
        return DegreeBasis(k, monos, killed, ech)

    def rank(self, k: int) -> int:
        if k < 0 or k > self.top_degree:
            return 0
        return self.degree_basis(k).rank

    def rank_table(self) -> List[int]:
        return [self.rank(k) for k in range(self.top_degree + 1)]

    def reduce_terms(self, terms: Mapping[Monomial, Fraction], k: int) -> Terms:
        """Normal form of a homogeneous degree-k term dict."""
        if k < 0 or k > self.top_degree:
            return {}
        return self.degree_basis(k).reduce(terms)

    def normal_form(self, p: Polynomial) -> Polynomial:
        if p.gens != self.gens:
            raise StructureError("class is over a different generator list")
        out: Terms = {}
        for k, comp in p.homogeneous_components():
            out.update(self.reduce_terms(comp.terms, k))
        return Polynomial(self.gens, out)

    def is_zero(self, p: Polynomial) -> bool:
        return self.normal_form(p).is_zero()

    def multiply(self, a: Polynomial, b: Polynomial) -> Polynomial:
        return self.normal_form(a * b)

    def basis_polys(self, k: int) -> List[Polynomial]:
        return [Polynomial(self.gens, {m: 1}) for m in self.degree_basis(k).basis]


# ---------------------------------------------------------------------------
# graded vector spaces inside an ambient ring


class GradedSpace:
    """Protocol shared by rings (all of it) and subspaces (part of it)."""

    ambient: RingPresentation

    @property
    def top_degree(self) -> int:
        return self.ambient.top_degree

    def basis(self, k: int) -> List[Terms]:
        raise NotImplementedError

    def coordinates(self, k: int, terms: Mapping[Monomial, Fraction]) -> List[Fraction]:
        raise NotImplementedError

    def rank(self, k: int) -> int:
        return len(self.basis(k)) if 0 <= k <= self.top_degree else 0

    def rank_table(self) -> List[int]:
        return [self.rank(k) for k in range(self.top_degree + 1)]


class FullSpace(GradedSpace):
    def __init__(self, ring: RingPresentation):
        self.ambient = ring

    def basis(self, k: int) -> List[Terms]:
        if not 0 <= k <= self.top_degree:
            return []
        return [{m: Fraction(1)} for m in self.ambient.degree_basis(k).basis]

    def coordinates(self, k: int, terms) -> List[Fraction]:
        return self.ambient.degree_basis(k).coordinates(terms)

    def rank(self, k: int) -> int:
        return self.ambient.rank(k)


def as_space(x) -> GradedSpace:
    if isinstance(x, GradedSpace):
        return x
    if isinstance(x, RingPresentation):
        return FullSpace(x)
    raise TypeError(f"not a graded model: {x!r}")


class GradedSubspace(GradedSpace):
    """Per-degree echelonized spans of normal-form vectors in an ambient ring."""

    def __init__(self, ambient: RingPresentation, name: str = "V"):
        self.ambient = ambient
        self.name = name
        self._ech: Dict[int, Echelon] = {k: Echelon(order_key) for k in range(ambient.top_degree + 1)}

    def add(self, k: int, terms: Mapping[Monomial, Fraction]) -> bool:
        """Add a (reduced or not) degree-k vector; True if the span grew."""
        if not 0 <= k <= self.top_degree:
            return False
        red = self.ambient.reduce_terms(terms, k)
        if not red:
            return False
        return self._ech[k].add(red) is None

    def add_poly(self, p: Polynomial) -> None:
        for k, comp in p.homogeneous_components():
            self.add(k, comp.terms)

    def basis(self, k: int) -> List[Terms]:
        if not 0 <= k <= self.top_degree:
            return []
        return self._ech[k].basis()

    def rank(self, k: int) -> int:
        return self._ech[k].rank if 0 <= k <= self.top_degree else 0

    def contains_terms(self, k: int, terms) -> bool:
        if not 0 <= k <= self.top_degree:
            return True
        return self._ech[k].contains(self.ambient.reduce_terms(terms, k))

    def contains(self, p: Polynomial) -> bool:
        return all(self.contains_terms(k, c.terms) for k, c in p.homogeneous_components())

    def first_missing(self, p: Polynomial) -> Optional[int]:
        for k, c in p.homogeneous_components():
            if not self.contains_terms(k, c.terms):
                return k
        return None

    def coordinates(self, k: int, terms) -> List[Fraction]:
        return self._ech[k].coordinates(self.ambient.reduce_terms(terms, k))

    def is_subspace_of(self, other: "GradedSubspace") -> bool:
        return all(other.contains_terms(k, v) for k in range(self.top_degree + 1) for v in self.basis(k))

    def equals(self, other: "GradedSubspace") -> bool:
        return self.rank_table() == other.rank_table() and self.is_subspace_of(other)

    def is_multiplicatively_closed(self) -> bool:
        amb = self.ambient
        for i in range(1, self.top_degree + 1):
            for j in range(i, self.top_degree + 1 - i):
                for u in self.basis(i):
                    for v in self.basis(j):
                        if not self.contains_terms(i + j, amb.reduce_terms(terms_mul(u, v), i + j)):
                            return False
        return True

    def polys(self, k: int) -> List[Polynomial]:
        return [Polynomial(self.ambient.gens, v) for v in self.basis(k)]


# ---------------------------------------------------------------------------
# linear maps


class GradedLinearMap:
    """Per-degree exact matrices between two graded spaces.

    ``columns[k][i]`` is the target coordinate vector (degree ``k + shift``)
    of the i-th source basis vector in degree ``k``.
    """

    def __init__(self, source, target, shift: int, columns: Dict[int, List[List[Fraction]]], name: str = "map"):
        self.source = as_space(source)
        self.target = as_space(target)
        self.shift = shift
        self.columns = columns
        self.name = name

    @classmethod
    def from_function(cls, source, target, shift: int, fn: Callable[[int, Terms], Terms], name: str = "map") -> "GradedLinearMap":
        """Build from a function sending a degree-k source vector (ambient terms)
        to target ambient terms of degree k + shift."""
        src, tgt = as_space(source), as_space(target)
        cols: Dict[int, List[List[Fraction]]] = {}
        for k in range(src.top_degree + 1):
            kt = k + shift
            out = []
            for v in src.basis(k):
                img = fn(k, v)
                if 0 <= kt <= tgt.top_degree:
                    out.append(tgt.coordinates(kt, img))
                else:
                    out.append([])
            cols[k] = out
        return cls(src, tgt, shift, cols, name)

    def matrix(self, k: int) -> List[List[Fraction]]:
        """Row-major matrix of degree k (rows: target basis, cols: source basis)."""
        cols = self.columns.get(k, [])
        nrows = self.target.rank(k + self.shift)
        return [[col[i] if col else Fraction(0) for col in cols] for i in range(nrows)]

    def apply_terms(self, k: int, terms) -> Terms:
        kt = k + self.shift
        if not 0 <= kt <= self.target.top_degree or not 0 <= k <= self.source.top_degree:
            return {}
        coords = self.source.coordinates(k, terms)
        out: Terms = {}
        tb = self.target.basis(kt)
        for c, col in zip(coords, self.columns[k]):
            if c:
                for i, t in enumerate(col):
                    if t:
                        axpy(out, tb[i], c * t)
        return out

    def apply(self, p: Polynomial) -> Polynomial:
        out: Terms = {}
        for k, comp in p.homogeneous_components():
            terms_add(out, self.apply_terms(k, comp.terms))
        return Polynomial(self.target.ambient.gens, out)

    def compose(self, other: "GradedLinearMap") -> "GradedLinearMap":
        """``self ∘ other``."""
        return GradedLinearMap.from_function(
            other.source, self.target, other.shift + self.shift,
            lambda k, v: self.apply_terms(k + other.shift, other.apply_terms(k, v)),
            name=f"{self.name}*{other.name}",
        )


def induced_map(images: Mapping[str, Polynomial], source: RingPresentation, target: RingPresentation, name: str = "hom") -> GradedLinearMap:
    """The ring homomorphism ``source -> target`` given on generators."""
    for g in source.gens:
        img = images.get(g.label)
        if img is None:
            raise StructureError(f"no image for generator {g.label!r}")
        if img.gens != target.gens:
            raise StructureError(f"image of {g.label!r} lives over the wrong generators")
        nf = target.normal_form(img)
        if nf and (not nf.is_homogeneous() or nf.degree() != g.degree):
            raise StructureError(f"image of {g.label!r} does not have degree {g.degree}")
    for r in source.relations:
        if r.degree() > target.top_degree:
            continue
        img = target.normal_form(r.substitute(images, target.gens))
        if img:
            raise NotAHomomorphism(f"not a homomorphism: relation {r} maps to {img}")
    cache: Dict[Monomial, Terms] = {}

    def image_of_monomial(m: Monomial) -> Terms:
        if m not in cache:
            cache[m] = Polynomial(source.gens, {m: 1}).substitute(images, target.gens).terms
        return cache[m]

    def fn(k: int, v: Terms) -> Terms:
        out: Terms = {}
        for m, c in v.items():
            terms_add(out, image_of_monomial(m), c)
        return target.reduce_terms(out, k)

    return GradedLinearMap.from_function(source, target, 0, fn, name)


def image_kernel(m: GradedLinearMap) -> Tuple[GradedSubspace, GradedSubspace]:
    """Exact per-degree column space and null space of ``m``."""
    img = GradedSubspace(m.target.ambient, f"im({m.name})")
    ker = GradedSubspace(m.source.ambient, f"ker({m.name})")
    for k in range(m.source.top_degree + 1):
        kt = k + m.shift
        sb = m.source.basis(k)
        tb = m.target.basis(kt) if 0 <= kt <= m.target.top_degree else []
        ech = Echelon(lambda c: c, track=True)
        for i, col in enumerate(m.columns.get(k, [])):
            vec = {j: t for j, t in enumerate(col) if t}
            dep = ech.add(vec, tag=i)
            if dep is not None:
                kv: Terms = {}
                for idx, c in dep.items():
                    axpy(kv, sb[idx], c)
                ker.add(k, kv)
            else:
                tv: Terms = {}
                for j, t in vec.items():
                    axpy(tv, tb[j], t)
                img.add(kt, tv)
    return img, ker


def preimage(m: GradedLinearMap, p: Polynomial) -> Optional[Polynomial]:
    """Some element mapping to ``p`` (echelon back-substitution), or None."""
    out: Terms = {}
    for kt, comp in p.homogeneous_components():
        k = kt - m.shift
        if not 0 <= kt <= m.target.top_degree:
            continue
        if not 0 <= k <= m.source.top_degree:
            if m.target.ambient.reduce_terms(comp.terms, kt):
                return None
            continue
        ech = Echelon(lambda c: c, track=True)
        for i, col in enumerate(m.columns[k]):
            ech.add({j: t for j, t in enumerate(col) if t}, tag=i)
        coords = m.target.coordinates(kt, comp.terms)
        sol = ech.solve({j: c for j, c in enumerate(coords) if c})
        if sol is None:
            return None
        sb = m.source.basis(k)
        for idx, c in sol.items():
            axpy(out, sb[idx], c)
    return Polynomial(m.source.ambient.gens, out)


# ---------------------------------------------------------------------------
# finite group actions by generator permutations

Perm = Tuple[int, ...]


def _perm_from(ring: RingPresentation, action) -> Perm:
    if isinstance(action, Mapping):
        labels = [g.label for g in ring.gens]
        idx = {l: i for i, l in enumerate(labels)}
        perm = list(range(len(labels)))
        for a, b in action.items():
            perm[idx[a]] = idx[b]
        action = perm
    perm = tuple(action)
    if sorted(perm) != list(range(len(ring.gens))):
        raise StructureError(f"{action} is not a permutation of the generators")
    for i, j in enumerate(perm):
        if ring.gens[i].degree != ring.gens[j].degree:
            raise StructureError("permutation does not preserve degrees")
    return perm


def permute_terms(terms: Mapping[Monomial, Fraction], perm: Perm) -> Terms:
    """Apply the substitution ``gen_i -> gen_perm[i]``."""
    out: Terms = {}
    n = len(perm)
    for m, c in terms.items():
        t = [0] * n
        for i, a in enumerate(m):
            t[perm[i]] += a
        t = tuple(t)
        out[t] = out.get(t, 0) + c
    return {m: c for m, c in out.items() if c}


class GroupAction:
    """A finite group of generator permutations acting on a ring."""

    MAX_ORDER = 5040

    def __init__(self, ring: RingPresentation, generators: Sequence):
        self.ring = ring
        gens = [_perm_from(ring, g) for g in generators]
        for p in gens:
            for r in ring.relations:
                if r.degree() > ring.top_degree:
                    continue
                img = ring.reduce_terms(permute_terms(r.terms, p), r.degree())
                if img:
                    raise NotAHomomorphism(f"permutation {p} does not preserve relation {r}")
        ident = tuple(range(len(ring.gens)))
        elements = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = tuple(s[g[i]] for i in range(len(g)))
                    if h not in elements:
                        elements.add(h)
                        nxt.append(h)
                        if len(elements) > self.MAX_ORDER:
                            raise StructureError("action does not close into a small finite group")
            frontier = nxt
        self.elements: List[Perm] = sorted(elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def symmetrize_terms(self, k: int, terms) -> Terms:
        out: Terms = {}
        inv = Fraction(1, self.order)
        for g in self.elements:
            terms_add(out, permute_terms(terms, g), inv)
        return self.ring.reduce_terms(out, k)

    def symmetrize(self, p: Polynomial) -> Polynomial:
        out: Terms = {}
        for k, comp in p.homogeneous_components():
            out.update(self.symmetrize_terms(k, comp.terms))
        return Polynomial(self.ring.gens, out)

    def invariant_subspace(self, name: str = "invariants") -> GradedSubspace:
        V = GradedSubspace(self.ring, name)
        for k in range(self.ring.top_degree + 1):
            for m in self.ring.degree_basis(k).basis:
                V.add(k, self.symmetrize_terms(k, {m: Fraction(1)}))
        return V


def symmetrize(ring: RingPresentation, action: Sequence, c: Polynomial) -> Polynomial:
    return GroupAction(ring, action).symmetrize(c)


def invariant_subspace(ring: RingPresentation, action: Sequence) -> GradedSubspace:
    return GroupAction(ring, action).invariant_subspace()


def subalgebra_closure(ambient: RingPresentation, generators: Iterable[Polynomial], name: str = "closure") -> GradedSubspace:
    """Smallest graded subspace containing 1 and the generators, closed under
    multiplication.  Built degree by degree from generator x lower-degree span."""
    gens_by_degree: Dict[int, List[Terms]] = {}
    for g in generators:
        for k, comp in g.homogeneous_components():
            if k == 0 or k > ambient.top_degree:
                continue
            red = ambient.reduce_terms(comp.terms, k)
            if red:
                gens_by_degree.setdefault(k, []).append(red)
    V = GradedSubspace(ambient, name)
    V.add(0, ambient.one().terms)
    for k in range(1, ambient.top_degree + 1):
        for v in gens_by_degree.get(k, []):
            V.add(k, v)
        for j, gs in gens_by_degree.items():
            if j > k:
                continue
            for g in gs:
                for u in V.basis(k - j):
                    V.add(k, ambient.reduce_terms(terms_mul(g, u), k))
    return V


def product_ranks(*tables: Sequence[int]) -> List[int]:
    """Convolution of rank tables (Künneth count)."""
    out = [1]
    for t in tables:
        new = [0] * (len(out) + len(t) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(t):
                new[i + j] += a * b
        out = new
    return out
