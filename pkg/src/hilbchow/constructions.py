"""Künneth products, diagonal checks, projective bundles and blowups.

Rings here are :class:`RingPresentation` objects; pushforwards are
:class:`GradedLinearMap` objects computed from the direct-sum splittings

    A*(P(N))   = (+)_{j<r} A*(Y) h^j
    A*(Bl_Y X) = A*(X) (+) (+)_{1<=j<codim} A*(Y) e^j
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .graded import (
    GradedLinearMap,
    GradedSubspace,
    GroupAction,
    RingPresentation,
    as_space,
    image_kernel,
    induced_map,
    preimage,
)
from .linalg import Echelon, axpy
from .poly import Generator, Polynomial, StructureError, Terms, terms_add


class InvalidDiagonal(ValueError):
    pass


class BlowupError(ValueError):
    pass


@dataclass
class VarietyData:
    """Chow-ring data of a smooth projective variety with Künneth property."""

    name: str
    ring: RingPresentation
    dimension: int
    chern_tangent: Polynomial
    diagonal: Polynomial
    point_class: Polynomial
    _square: Optional[RingPresentation] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension < 0:
            raise StructureError("dimension must be nonnegative")
        if self.ring.top_degree != self.dimension:
            raise StructureError("top degree of A*(X) must equal dim X")
        if self.chern_tangent.gens != self.ring.gens or self.point_class.gens != self.ring.gens:
            raise StructureError("Chern class and point class must be polynomials in the generators of X")
        if self.chern_tangent.component(0) != 1:
            raise StructureError("c_0(T_X) must be 1")
        sq = self.square()
        if self.diagonal.gens != sq.gens:
            raise StructureError("diagonal must be a polynomial in the slot-0 and slot-1 generators")
        if self.diagonal and (not self.diagonal.is_homogeneous() or self.diagonal.degree() != self.dimension):
            raise StructureError("diagonal must be homogeneous of degree dim X")

    @property
    def gens(self) -> Tuple[Generator, ...]:
        return self.ring.gens

    def chern_classes(self) -> List[Polynomial]:
        return [self.chern_tangent.component(j) for j in range(self.dimension + 1)]

    def square(self) -> RingPresentation:
        if self._square is None:
            self._square = tensor_power(self.ring, 2)
        return self._square


# ---------------------------------------------------------------------------
# slot bookkeeping


def place(p: Polynomial, gens: Sequence[Generator], slot: int) -> Polynomial:
    """Put a polynomial in unslotted X-generators into tensor slot ``slot``."""
    return p.embed(gens, {g.label: g.in_slot(slot).label for g in p.gens})


def place_slots(p: Polynomial, gens: Sequence[Generator], slots: Dict[int, int]) -> Polynomial:
    """Re-slot a slotted polynomial: generator in slot s goes to ``slots[s]``.

    Several source slots may map to the same target slot (diagonal restriction).
    """
    return p.embed(gens, {g.label: g.in_slot(slots[g.slot]).label for g in p.gens})


def kunneth_product(*factors, name: Optional[str] = None) -> RingPresentation:
    """Tensor product of presentations; unslotted generators of factor i go to slot i."""
    rings = [f.ring if isinstance(f, VarietyData) else f for f in factors]
    gens: List[Generator] = []
    relabel = []
    for i, R in enumerate(rings):
        mp = {}
        for g in R.gens:
            ng = g if g.slot is not None else g.in_slot(i)
            mp[g.label] = ng.label
            gens.append(ng)
        relabel.append(mp)
    keys = [(g.name, g.slot) for g in gens]
    if len(set(keys)) != len(keys):
        raise StructureError("slot collision in Künneth product")
    gens_t = tuple(gens)
    rels = []
    for R, mp in zip(rings, relabel):
        for r in R.relations:
            rels.append(r.embed(gens_t, mp))
    top = sum(R.top_degree for R in rings)
    return RingPresentation(gens_t, rels, top, name or "(x)".join(R.name for R in rings))


def tensor_power(ring: RingPresentation, n: int, name: Optional[str] = None) -> RingPresentation:
    if any(g.slot is not None for g in ring.gens):
        raise StructureError("tensor_power expects an unslotted presentation")
    return kunneth_product(*([ring] * n), name=name or f"{ring.name}^{n}")


def slot_generators(X_gens: Sequence[Generator], slots: Sequence[int]) -> Tuple[Generator, ...]:
    return tuple(g.in_slot(s) for s in slots for g in X_gens)


# ---------------------------------------------------------------------------
# diagonal


def validate_diagonal(X: VarietyData) -> None:
    """Raise :class:`InvalidDiagonal` unless ``(g x 1) D = (1 x g) D`` for all
    generators g and the (d, 0) component of D is ``point x 1``."""
    sq = X.square()
    D = X.diagonal
    for g in X.gens:
        left = sq.var(g.in_slot(0).label) * D
        right = sq.var(g.in_slot(1).label) * D
        res = sq.normal_form(left - right)
        if res:
            raise InvalidDiagonal(f"invalid diagonal: (g x 1)D != (1 x g)D for g = {g.label}; residual {res}")
    d = X.dimension
    dd = {}
    degs0 = [g.degree if g.slot == 0 else 0 for g in sq.gens]
    for m, c in D.terms.items():
        if sum(a * w for a, w in zip(m, degs0)) == d:
            dd[m] = c
    head = Polynomial(sq.gens, dd)
    expected = place(X.point_class, sq.gens, 0)
    res = sq.normal_form(head - expected)
    if res:
        raise InvalidDiagonal(f"invalid diagonal: (dim X, 0) component differs from point x 1 by {res}")
    if X.ring.rank(d) != 1:
        raise InvalidDiagonal("A^d(X) must have rank 1")


# ---------------------------------------------------------------------------
# direct-sum decompositions


class Splitting:
    """A per-degree isomorphism ``(+)_i piece_i -> target``.

    Each piece is ``(space, shift, embed)`` where ``embed(k, v)`` sends a
    degree-k vector of ``space`` to target terms of degree ``k + shift``.
    """

    def __init__(self, target, pieces):
        self.target = as_space(target)
        self.pieces = [(as_space(s), shift, fn) for s, shift, fn in pieces]
        self._solvers: Dict[int, Tuple[Echelon, List[Tuple[int, int]]]] = {}

    def _solver(self, k: int):
        if k not in self._solvers:
            ech = Echelon(lambda c: c, track=True)
            labels = []
            for pi, (space, shift, fn) in enumerate(self.pieces):
                ks = k - shift
                for bi, v in enumerate(space.basis(ks)):
                    img = self.target.coordinates(k, fn(ks, v))
                    dep = ech.add({j: c for j, c in enumerate(img) if c}, tag=len(labels))
                    if dep is not None:
                        raise StructureError(f"pieces are dependent in degree {k}")
                    labels.append((pi, bi))
            if ech.rank != self.target.rank(k):
                raise StructureError(f"pieces do not span degree {k}: {ech.rank} vs {self.target.rank(k)}")
            self._solvers[k] = (ech, labels)
        return self._solvers[k]

    def check(self) -> None:
        for k in range(self.target.top_degree + 1):
            self._solver(k)

    def decompose(self, k: int, terms) -> List[Tuple[int, Terms]]:
        """Split a degree-k target vector into one source vector per piece."""
        ech, labels = self._solver(k)
        coords = self.target.coordinates(k, terms)
        sol = ech.solve({j: c for j, c in enumerate(coords) if c})
        parts: Dict[int, Terms] = {}
        for tag, c in sol.items():
            pi, bi = labels[tag]
            space, shift, _ = self.pieces[pi]
            axpy(parts.setdefault(pi, {}), space.basis(k - shift)[bi], c)
        return sorted(parts.items())

    def projection(self, piece: int, name: str = "proj") -> GradedLinearMap:
        space, shift, _ = self.pieces[piece]

        def fn(k, v):
            for pi, part in self.decompose(k, v):
                if pi == piece:
                    return part
            return {}

        return GradedLinearMap.from_function(self.target, space, -shift, fn, name)


def _embed_times_power(src_gens, tgt: RingPresentation, var_label: str, j: int):
    var = tgt.var(var_label) ** j

    def fn(k, v):
        p = Polynomial(src_gens, v).embed(tgt.gens) * var
        return tgt.reduce_terms(p.terms, k + j * tgt.gens[[g.label for g in tgt.gens].index(var_label)].degree)

    return fn


# ---------------------------------------------------------------------------
# projective bundles


@dataclass
class ProjectiveBundle:
    ring: RingPresentation
    base: RingPresentation
    rank: int
    h: Polynomial
    push: GradedLinearMap
    pull: GradedLinearMap
    splitting: Splitting


def _homogeneous_chern(chern: Sequence[Polynomial], gens) -> List[Polynomial]:
    out = []
    for j, c in enumerate(chern):
        if c.gens != tuple(gens):
            raise StructureError("Chern classes must be polynomials over the base generators")
        if c and (not c.is_homogeneous() or c.degree() != j):
            raise StructureError(f"Chern entry c_{j} = {c} is not homogeneous of degree {j}")
        out.append(c)
    return out


def projective_bundle(Y: RingPresentation, chern: Sequence[Polynomial], gen_name: str = "h", name: Optional[str] = None) -> ProjectiveBundle:
    """``A*(Y)[h] / (h^r + c_1 h^{r-1} + ... + c_r)`` with ``r = len(chern) - 1``."""
    r = len(chern) - 1
    if r < 1:
        raise StructureError("bundle rank must be at least 1")
    chern = _homogeneous_chern(chern, Y.gens)
    if chern[0] != 1:
        raise StructureError("c_0 must be 1")
    if any(g.label == gen_name for g in Y.gens):
        raise StructureError(f"generator name {gen_name!r} already used")
    hg = Generator(gen_name, 1)
    gens = Y.gens + (hg,)
    h = Polynomial.variable(gens, gen_name)
    rel = h ** r
    for i in range(1, r + 1):
        rel = rel + chern[i].embed(gens) * h ** (r - i)
    rels = [q.embed(gens) for q in Y.relations] + [rel]
    E = RingPresentation(gens, rels, Y.top_degree + r - 1, name or f"P({Y.name})")
    pieces = [(Y, j, _embed_times_power(Y.gens, E, gen_name, j)) for j in range(r)]
    split = Splitting(E, pieces)
    split.check()
    push = split.projection(r - 1, name="p_*")
    pull = induced_map({g.label: Polynomial.variable(gens, g.label) for g in Y.gens}, Y, E, name="p^*")
    return ProjectiveBundle(E, Y, r, h, push, pull, split)


# ---------------------------------------------------------------------------
# blowups


@dataclass
class Blowup:
    ring: RingPresentation
    base: RingPresentation
    codim: int
    e: Polynomial
    lifted_chern: List[Polynomial]
    kernel: GradedSubspace
    push: GradedLinearMap
    pull: GradedLinearMap
    key_relation: Polynomial


def blowup(X: RingPresentation, iota_pullback: GradedLinearMap, chern: Sequence[Polynomial], class_Y: Polynomial, gen_name: str = "e", name: Optional[str] = None) -> Blowup:
    """Chow ring of the blowup of X along Y given ``iota^*: A*(X) -> A*(Y)``
    (must be onto), the Chern classes ``c_0..c_d'`` of the normal bundle (in
    A*(Y)) and the class of Y in A*(X)."""
    Y = iota_pullback.target.ambient
    dprime = len(chern) - 1
    if dprime < 1:
        raise BlowupError("codimension must be at least 1")
    chern = _homogeneous_chern(chern, Y.gens)
    if class_Y.gens != X.gens or (class_Y and (not class_Y.is_homogeneous() or class_Y.degree() != dprime)):
        raise BlowupError(f"class of the center must be homogeneous of degree {dprime}")
    for k in range(Y.top_degree + 1):
        if k > X.top_degree:
            break
        if _column_rank(iota_pullback.columns[k]) != Y.rank(k):
            raise BlowupError(f"iota^* is not surjective in degree {k}")
    _, ker = image_kernel(iota_pullback)
    lifted = []
    for j, c in enumerate(chern):
        pre = preimage(iota_pullback, c)
        if pre is None:
            raise BlowupError(f"c_{j} has no preimage under iota^*")
        lifted.append(pre)
    ident = {g.label: Polynomial.variable(X.gens, g.label) for g in X.gens}
    if dprime == 1:
        e = X.normal_form(class_Y)
        pull = induced_map(ident, X, X, name="pi^*")
        key = Polynomial.zero(X.gens)
        return Blowup(X, X, 1, e, lifted, ker, pull, pull, key)
    if any(g.label == gen_name for g in X.gens):
        raise StructureError(f"generator name {gen_name!r} already used")
    gens = X.gens + (Generator(gen_name, 1),)
    e = Polynomial.variable(gens, gen_name)
    rels = [q.embed(gens) for q in X.relations]
    for k in range(1, X.top_degree):
        for v in ker.basis(k):
            rels.append(Polynomial(X.gens, v).embed(gens) * e)
    key = e ** dprime
    for j in range(1, dprime):
        key = key + lifted[dprime - j].embed(gens) * e ** j
    key = key + class_Y.embed(gens).scale((-1) ** dprime)
    rels.append(key)
    B = RingPresentation(gens, rels, X.top_degree, name or f"Bl({X.name})")
    pieces = [(X, 0, lambda k, v: B.reduce_terms(Polynomial(X.gens, v).embed(gens).terms, k))]
    for j in range(1, dprime):
        pieces.append((Y, j, _lifted_times_e(iota_pullback, B, gens, e, j)))
    split = Splitting(B, pieces)
    split.check()
    push = split.projection(0, name="pi_*")
    pull = induced_map({g.label: Polynomial.variable(gens, g.label) for g in X.gens}, X, B, name="pi^*")
    return Blowup(B, X, dprime, e, lifted, ker, push, pull, key)


def _column_rank(columns) -> int:
    ech = Echelon(lambda c: c)
    for col in columns:
        ech.add({j: t for j, t in enumerate(col) if t})
    return ech.rank


def _lifted_times_e(iota: GradedLinearMap, B: RingPresentation, gens, e: Polynomial, j: int):
    Y = iota.target.ambient
    ej = e ** j

    def fn(k, v):
        pre = preimage(iota, Polynomial(Y.gens, v))
        p = pre.embed(gens) * ej
        return B.reduce_terms(p.terms, k + j)

    return fn


# ---------------------------------------------------------------------------
# symmetric powers


def swap_permutation(ring: RingPresentation, a: int, b: int) -> Tuple[int, ...]:
    """Generator permutation exchanging tensor slots ``a`` and ``b``."""
    labels = [g.label for g in ring.gens]
    perm = []
    for g in ring.gens:
        if g.slot == a:
            perm.append(labels.index(g.in_slot(b).label))
        elif g.slot == b:
            perm.append(labels.index(g.in_slot(a).label))
        else:
            perm.append(labels.index(g.label))
    return tuple(perm)


def symmetric_group_action(ring: RingPresentation, slots: Sequence[int]) -> GroupAction:
    gens = [swap_permutation(ring, slots[i], slots[i + 1]) for i in range(len(slots) - 1)]
    return GroupAction(ring, gens)


def symmetric_quotient(ring: RingPresentation, n: int) -> GradedSubspace:
    """Rational model of A*(Sym^n X): the S_n-invariants of the n-fold power."""
    if n < 1:
        raise StructureError("n must be positive")
    P = tensor_power(ring, n)
    if n == 1:
        V = GradedSubspace(P, f"Sym^1({ring.name})")
        for k in range(P.top_degree + 1):
            for m in P.degree_basis(k).basis:
                V.add(k, {m: Fraction(1)})
        return V
    V = symmetric_group_action(P, list(range(n))).invariant_subspace(f"Sym^{n}({ring.name})")
    return V
