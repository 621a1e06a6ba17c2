"""Rational Chow-ring models of Hilb^2 X, the nested scheme Hilb^[2,3] X and Hilb^3 X.

The nested model lives in one ambient ring on three slot copies of the
generators of X plus two degree-one classes ``e`` (exceptional divisor of
X x Bl_D(X x X), slots 1 and 2) and ``f`` (exceptional divisor over the
universal family Z_2 in X x Hilb^2 X).  The Chow ring of the nested scheme is
the subspace W of swap(1,2)-invariants.  As a graded vector space

    W = (A^{(x)3})^{S_2}  (+)  (+)_m (A (x) A) e^m  (+)  (+)_j A*(Z_2) f^j

with A*(Z_2) = (A (x) A) (+) (+)_m A e^m, and the push-pull operator
``Pi = pi_3^* pi_3*`` is evaluated piece by piece on this splitting.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .constructions import (
    Blowup,
    VarietyData,
    blowup,
    swap_permutation,
    symmetric_group_action,
    tensor_power,
    validate_diagonal,
)
from .graded import (
    GradedLinearMap,
    GradedSubspace,
    GroupAction,
    RingPresentation,
    image_kernel,
    induced_map,
    permute_terms,
    subalgebra_closure,
)
from .linalg import Echelon, axpy
from .poly import Generator, Polynomial, StructureError, Terms, order_key, terms_add

SYM, E_ONLY, F_ONLY, MIXED = "SYM", "E_ONLY", "F_ONLY", "MIXED"


class ConsistencyError(ArithmeticError):
    """A mathematical identity that must hold failed on the constructed model."""


class NotANestedClass(ValueError):
    pass


@dataclass(frozen=True)
class NestedConfig:
    rel3_constant: Fraction = Fraction(1)
    eqcz_sign: str = "-"

    def __post_init__(self):
        if self.eqcz_sign not in "+-" or len(self.eqcz_sign) != 1:
            raise ValueError("eqcz sign must be '+' or '-'")
        object.__setattr__(self, "rel3_constant", Fraction(self.rel3_constant))


def place_diagonal(X: VarietyData, gens, slots: Tuple[int, int]) -> Polynomial:
    sq = X.square()
    mp = {g.label: g.in_slot(slots[g.slot]).label for g in sq.gens}
    return X.diagonal.embed(gens, mp)


def place_in_slot(X: VarietyData, p: Polynomial, gens, slot: int) -> Polynomial:
    return p.embed(gens, {g.label: g.in_slot(slot).label for g in X.gens})


# ---------------------------------------------------------------------------
# Hilb^2


@dataclass
class Hilb2Model:
    X: VarietyData
    blowup: Blowup
    invariants: GradedSubspace

    @property
    def ring(self) -> RingPresentation:
        return self.blowup.ring

    def ranks(self) -> List[int]:
        return self.invariants.rank_table()


def hilb2_model(X: VarietyData) -> Hilb2Model:
    """Bl_D(X x X) with its swap invariants."""
    validate_diagonal(X)
    sq = X.square()
    collapse = induced_map({g.label: X.ring.var(g.name) for g in sq.gens}, sq, X.ring, name="diag^*")
    bl = blowup(sq, collapse, X.chern_classes(), X.diagonal, gen_name="e", name=f"Bl_D({X.name}^2)")
    act = GroupAction(bl.ring, [swap_permutation(bl.ring, 0, 1)])
    return Hilb2Model(X, bl, act.invariant_subspace(f"Hilb2({X.name})"))


# ---------------------------------------------------------------------------
# normal bundle of the universal family


def z2_normal_chern(X: VarietyData, gens, e: Polynomial, sign: str = "-") -> List[Polynomial]:
    """Components c_0..c_d of ``c(T_X)(slot 0) (1 -+ 2e)/(1 -+ e)``."""
    d = X.dimension
    s = 1 if sign == "-" else -1
    cT = place_in_slot(X, X.chern_tangent, gens, 0)
    geo = Polynomial.constant(gens, 0)
    for i in range(d + 1):
        geo = geo + (e.scale(s)) ** i
    total = cT * (Polynomial.constant(gens, 1) - e.scale(2 * s)) * geo
    return [total.component(j) for j in range(d + 1)]


# ---------------------------------------------------------------------------
# nested model


class NestedModel:
    """Ambient presentation, W and the push-pull operator for one input X."""

    def __init__(self, X: VarietyData, config: Optional[NestedConfig] = None):
        config = config or NestedConfig()
        if X.dimension < 1:
            raise StructureError("dimension must be >= 1")
        validate_diagonal(X)
        self.X = X
        self.config = config
        self.d = d = X.dimension
        n = len(X.gens)
        self.n = n
        tgens = tuple(g.in_slot(s) for s in range(3) for g in X.gens)
        eg, fg = Generator("e", 1), Generator("f", 1)
        bgens = tgens + (eg,)
        self.triple = tensor_power(X.ring, 3)
        self.square = X.square()

        # X x Bl_D(X x X), exceptional divisor e over slots 1, 2
        e_b = Polynomial.variable(bgens, "e")
        slot_rels = [r.embed(bgens) for r in self.triple.relations]
        rel1 = []
        for g in X.gens:
            rel1.append((Polynomial.variable(bgens, g.in_slot(1).label) - Polynomial.variable(bgens, g.in_slot(2).label)) * e_b)
        cT = X.chern_classes()
        rel2 = e_b ** d
        for j in range(1, d):
            rel2 = rel2 + place_in_slot(X, cT[d - j], bgens, 1) * e_b ** j
        rel2 = rel2 + place_diagonal(X, bgens, (1, 2)).scale((-1) ** d)
        self.base = RingPresentation(bgens, slot_rels + rel1 + [rel2], 3 * d, f"{X.name}xBl_D({X.name}^2)")
        base_act = GroupAction(self.base, [swap_permutation(self.base, 1, 2)])
        self.base_invariants = base_act.invariant_subspace(f"A({X.name}xHilb2)")

        # universal family Z_2 = Bl_D(X x X) and its incidence ideal
        self.hilb2 = hilb2_model(X)
        z2 = self.hilb2.ring
        images = {}
        for g in X.gens:
            a = Polynomial.variable(z2.gens, g.in_slot(0).label)
            b = Polynomial.variable(z2.gens, g.in_slot(1).label)
            images[g.in_slot(0).label] = a
            images[g.in_slot(1).label] = a
            images[g.in_slot(2).label] = b
        e_img = self.hilb2.blowup.e
        images["e"] = e_img if e_img.gens == z2.gens else e_img.embed(z2.gens)
        j_full = induced_map(images, self.base, z2, name="j^*")
        self.incidence_pullback = GradedLinearMap.from_function(self.base_invariants, z2, 0, j_full.apply_terms, name="j^*")
        img, ideal = image_kernel(self.incidence_pullback)
        for k in range(z2.top_degree + 1):
            if img.rank(k) != z2.rank(k):
                raise ConsistencyError(f"restriction to Z_2 is not onto in degree {k}")
        self.incidence_ideal = ideal

        # blow up X x Hilb^2 along Z_2: exceptional divisor f
        agens = bgens + (fg,)
        self.gens = agens
        e = Polynomial.variable(agens, "e")
        f = Polynomial.variable(agens, "f")
        rel0 = []
        for k in range(1, 3 * d):
            for v in ideal.basis(k):
                rel0.append(Polynomial(bgens, v).embed(agens) * f)
        self.chern_normal = z2_normal_chern(X, agens, e, config.eqcz_sign)
        rel3 = f ** d
        for j in range(1, d):
            rel3 = rel3 + self.chern_normal[d - j] * f ** j
        incidence = place_diagonal(X, agens, (0, 1)) + place_diagonal(X, agens, (0, 2))
        rel3 = rel3 + incidence.scale(config.rel3_constant * (-1) ** d)
        self.named_relations: Dict[str, List[Polynomial]] = {
            "slots": [r.embed(agens) for r in slot_rels],
            "rel0": rel0,
            "rel1": [r.embed(agens) for r in rel1],
            "rel2": [rel2.embed(agens)],
            "rel3": [rel3],
        }
        rels = [r for group in self.named_relations.values() for r in group]
        self.ambient = RingPresentation(agens, rels, 3 * d, f"Hilb[2,3]({X.name})")
        self.e = e
        self.f = f
        self.divisor_D = e.scale(2)
        self.action = GroupAction(self.ambient, [swap_permutation(self.ambient, 1, 2)])
        self.W = self.action.invariant_subspace(f"A(Hilb[2,3]({X.name}))")
        self._param: Dict[int, Tuple[Echelon, list]] = {}
        self._pi: Optional[GradedLinearMap] = None

    # -- helpers --------------------------------------------------------
    def poly(self, terms) -> Polynomial:
        return Polynomial(self.gens, terms)

    def normal_form(self, p: Polynomial) -> Polynomial:
        return self.ambient.normal_form(p)

    def ranks(self) -> List[int]:
        return self.W.rank_table()

    def relations(self) -> List[Polynomial]:
        return list(self.ambient.relations)

    def contains(self, c: Polynomial) -> bool:
        return self.W.contains(c)

    def check_member(self, c: Polynomial) -> None:
        k = self.W.first_missing(c)
        if k is not None:
            raise NotANestedClass(f"not a nested-Hilbert class: degree-{k} component {c.component(k)} is not swap(1,2)-invariant")

    def _mono(self, slots: Sequence[Tuple[int, Sequence[int]]], e: int = 0, f: int = 0) -> Tuple[int, ...]:
        m = [0] * len(self.gens)
        for s, exps in slots:
            for i, a in enumerate(exps):
                m[s * self.n + i] += a
        m[-2] += e
        m[-1] += f
        return tuple(m)

    def _times(self, terms: Terms, e: int, f: int) -> Terms:
        out: Terms = {}
        for m, c in terms.items():
            t = list(m)
            t[-2] += e
            t[-1] += f
            out[tuple(t)] = c
        return out

    def embed_pair(self, r: Terms, slots=(0, 1)) -> Terms:
        """``r(a, b)`` in A (x) A placed as ``r(x_{slots[0]}, x_{slots[1]})``."""
        n = self.n
        out: Terms = {}
        for m, c in r.items():
            terms_add(out, {self._mono([(slots[0], m[:n]), (slots[1], m[n:])]): c})
        return out

    def lift(self, r: Terms) -> Terms:
        """A swap-invariant class restricting to ``r(a, b)`` on Z_2."""
        n = self.n
        out: Terms = {}
        for m, c in r.items():
            al, be = m[:n], m[n:]
            terms_add(out, {self._mono([(0, al), (1, be)]): c})
            terms_add(out, {self._mono([(0, al), (2, be)]): c})
            terms_add(out, {self._mono([(0, al), (0, be)]): -c})
        return out

    def collapse(self, r: Terms) -> Terms:
        """``r(x, x)`` placed in slot 0."""
        return self.embed_pair(r, (0, 0))

    def _swap_pair(self, r: Terms) -> Terms:
        return permute_terms(r, swap_permutation(self.square, 0, 1))

    def _embed_single(self, a: Terms) -> Terms:
        return {self._mono([(0, m)]): c for m, c in a.items()}

    # -- splitting of W -------------------------------------------------
    def parametrization(self, k: int):
        """Echelon over W-coordinates of the typed parameter vectors in degree k,
        plus the list ``(type, w_terms, pushpull_terms)`` they came from."""
        if k in self._param:
            return self._param[k]
        d = self.d
        X = self.X
        items = []
        sym = self._triple_invariants()
        for v in sym.basis(k):
            w = self._embed_triple(v)
            img: Terms = {}
            for perm in self._coset_perms():
                terms_add(img, self._embed_triple(permute_terms(v, perm)))
            items.append((SYM, w, img))
        sq = self.square
        for m in range(1, d):
            if not 0 <= k - m <= sq.top_degree:
                continue
            for mono in sq.degree_basis(k - m).basis:
                r = {mono: Fraction(1)}
                w = self._times(self.embed_pair(r), m, 0)
                img = dict(w)
                terms_add(img, self._times(self.lift(self._swap_pair(r)), 0, m))
                d0 = self.collapse(r)
                for i in range(1, m):
                    terms_add(img, self._times(d0, i, m - i), -1)
                items.append((E_ONLY, w, img))
        for j in range(1, d):
            if not 0 <= k - j <= sq.top_degree:
                continue
            for mono in sq.degree_basis(k - j).basis:
                r = {mono: Fraction(1)}
                w = self._times(self.lift(r), 0, j)
                img: Terms = {}
                terms_add(img, self._times(self.embed_pair(self._swap_pair(r)), j, 0), 2)
                terms_add(img, w, 2)
                r0 = self.collapse(r)
                for i in range(1, j):
                    terms_add(img, self._times(r0, i, j - i))
                items.append((F_ONLY, w, img))
        for m in range(1, d):
            for j in range(1, d):
                if not 0 <= k - m - j <= d:
                    continue
                for mono in X.ring.degree_basis(k - m - j).basis:
                    a = self._embed_single({mono: Fraction(1)})
                    w = self._times(a, m, j)
                    items.append((MIXED, w, self._mixed_rule(a, m, j)))
        ech = Echelon(lambda c: c, track=True)
        for idx, (_, w, _) in enumerate(items):
            coords = self.W.coordinates(k, w)
            if ech.add({i: c for i, c in enumerate(coords) if c}, tag=idx) is not None:
                raise ConsistencyError(f"typed pieces of W are dependent in degree {k}")
        if ech.rank != self.W.rank(k):
            raise ConsistencyError(f"typed pieces span {ech.rank} of {self.W.rank(k)} dimensions of W in degree {k}")
        self._param[k] = (ech, items)
        return self._param[k]

    def _mixed_rule(self, a: Terms, m: int, j: int) -> Terms:
        img: Terms = {}
        if m == j:
            terms_add(img, self._times(a, m, j), 3)
        elif j > m:
            l = j - m
            terms_add(img, self._times(a, m + l, m), 2)
            terms_add(img, self._times(a, m, m + l), 2)
            for i in range(1, l):
                terms_add(img, self._times(a, m + i, m + l - i))
        else:
            l = m - j
            terms_add(img, self._times(a, j + l, j))
            terms_add(img, self._times(a, j, j + l))
            for i in range(1, l):
                terms_add(img, self._times(a, j + i, j + l - i), -1)
        return img

    def _triple_invariants(self) -> GradedSubspace:
        if not hasattr(self, "_sym"):
            act = GroupAction(self.triple, [swap_permutation(self.triple, 1, 2)])
            self._sym = act.invariant_subspace("(A^3)^S2")
        return self._sym

    def _coset_perms(self):
        T = self.triple
        ident = tuple(range(len(T.gens)))
        return [ident, swap_permutation(T, 0, 1), swap_permutation(T, 0, 2)]

    def _embed_triple(self, v: Terms) -> Terms:
        return {m + (0, 0): c for m, c in v.items()}

    def decompose(self, c: Polynomial) -> List[Tuple[str, Polynomial]]:
        """Split a class of W into its typed components (SYM, E_ONLY, ...)."""
        self.check_member(c)
        parts: Dict[str, Terms] = {}
        for k, comp in c.homogeneous_components():
            ech, items = self.parametrization(k)
            coords = self.W.coordinates(k, comp.terms)
            sol = ech.solve({i: x for i, x in enumerate(coords) if x})
            for idx, x in sol.items():
                kind, w, _ = items[idx]
                axpy(parts.setdefault(kind, {}), self.ambient.reduce_terms(w, k), x)
        return [(kind, self.normal_form(self.poly(parts[kind]))) for kind in (SYM, E_ONLY, F_ONLY, MIXED) if kind in parts]

    # -- push-pull ------------------------------------------------------
    def _pushpull_terms(self, k: int, terms) -> Terms:
        ech, items = self.parametrization(k)
        coords = self.W.coordinates(k, terms)
        sol = ech.solve({i: x for i, x in enumerate(coords) if x})
        out: Terms = {}
        for idx, x in sol.items():
            axpy(out, items[idx][2], x)
        red = self.ambient.reduce_terms(out, k)
        if not self.W.contains_terms(k, red):
            raise ConsistencyError(f"push-pull left W in degree {k}: {self.poly(red)}")
        return red

    def pushpull_map(self) -> GradedLinearMap:
        if self._pi is None:
            self._pi = GradedLinearMap.from_function(self.W, self.W, 0, self._pushpull_terms, name="Pi")
        return self._pi

    def pushpull(self, c: Polynomial) -> Polynomial:
        """``pi_3^* pi_3*`` applied to a class of W."""
        if c.gens != self.gens:
            raise StructureError("class is over a different generator list")
        self.check_member(c)
        out: Terms = {}
        for k, comp in c.homogeneous_components():
            terms_add(out, self._pushpull_terms(k, comp.terms))
        return self.poly(out)

    # -- distinguished classes --------------------------------------------
    def symmetric_slot_classes(self) -> List[Polynomial]:
        """Orbit sums of slot monomials under S_3, one per independent orbit."""
        act = symmetric_group_action(self.triple, [0, 1, 2])
        out = []
        for k in range(1, self.triple.top_degree + 1):
            seen = Echelon(lambda c: c)
            for mono in self.triple.degree_basis(k).basis:
                orbit = {permute_terms({mono: Fraction(1)}, g).popitem()[0] for g in act.elements}
                v = self.triple.reduce_terms({m: Fraction(1) for m in orbit}, k)
                if v and seen.add(v) is None:
                    out.append(self.normal_form(self.poly(self._embed_triple(v))))
        return out

    def symmetric_pair_classes(self) -> List[Polynomial]:
        """A basis of the swap(1,2)-symmetric slot classes (A^{(x)3})^{S_2}."""
        sym = self._triple_invariants()
        return [self.normal_form(self.poly(self._embed_triple(v))) for k in range(1, sym.top_degree + 1) for v in sym.basis(k)]

    def hilb3_generators(self) -> List[Tuple[str, Polynomial]]:
        """Generators of the Hilb^3 subring in Künneth form: S_3 orbit sums
        ``s*``, ``p = e+f``, ``q = ef`` and ``t_g = g(x1) e + g(x0) f``."""
        gens = [(f"s{i + 1}", p) for i, p in enumerate(self.symmetric_slot_classes())]
        gens.append(("p", self.normal_form(self.e + self.f)))
        gens.append(("q", self.normal_form(self.e * self.f)))
        for g in self.X.gens:
            x1 = Polynomial.variable(self.gens, g.in_slot(1).label)
            x0 = Polynomial.variable(self.gens, g.in_slot(0).label)
            gens.append((f"t_{g.name}", self.normal_form(x1 * self.e + x0 * self.f)))
        return gens


def nested_model(X: VarietyData, config: Optional[NestedConfig] = None) -> NestedModel:
    return NestedModel(X, config)


# ---------------------------------------------------------------------------
# Hilb^3


@dataclass
class Hilb3Model:
    nested: NestedModel
    subspace: GradedSubspace
    generators: List[Tuple[str, Polynomial]]
    closure: GradedSubspace

    def ranks(self) -> List[int]:
        return self.subspace.rank_table()


def hilb3_model(model: NestedModel) -> Hilb3Model:
    """Image of the push-pull operator, checked against the generated subring."""
    img, _ = image_kernel(model.pushpull_map())
    gens = model.hilb3_generators()
    clo = subalgebra_closure(model.ambient, [p for _, p in gens], name="closure")
    for k in range(model.ambient.top_degree + 1):
        a, b = img.rank(k), clo.rank(k)
        witness = None
        for v in img.basis(k):
            if not clo.contains_terms(k, v):
                witness = v
                break
        if witness is None:
            for v in clo.basis(k):
                if not img.contains_terms(k, v):
                    witness = v
                    break
        if a != b or witness is not None:
            w = model.poly(witness) if witness is not None else "none"
            raise ConsistencyError(f"image of Pi differs from the generated subring in degree {k}: ranks {a} vs {b}, witness {w}")
    return Hilb3Model(model, img, gens, clo)


def random_products(gens: Sequence[Polynomial], count: int, seed: int = 0, max_factors: int = 4) -> List[Polynomial]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        p = Polynomial.constant(gens[0].gens, 1)
        for _ in range(rng.randint(1, max_factors)):
            p = p * rng.choice(gens)
        out.append(p)
    return out


def extract_presentation(h: Hilb3Model, chosen: Sequence[Tuple[str, Polynomial]], name: str = "Hilb3") -> RingPresentation:
    """Generators and relations for the Hilb^3 subring.

    Degree-0 (constant) choices are dropped.  Relations are the new kernel
    elements of each degree that do not already follow from lower ones.
    """
    model = h.nested
    top = model.ambient.top_degree
    named = []
    for label, p in chosen:
        p = model.normal_form(p)
        if not p or p.homogeneous_components()[0][0] == 0:
            continue
        if not p.is_homogeneous():
            raise StructureError(f"generator {label} is not homogeneous")
        named.append((label, p))
    fgens = tuple(Generator(_safe_name(label, i), p.degree()) for i, (label, p) in enumerate(named))
    free = RingPresentation(fgens, [], top, name)
    images = {g.label: p for g, (_, p) in zip(fgens, named)}
    cache: Dict = {}

    def fn(k, v):
        out: Terms = {}
        for m, c in v.items():
            if m not in cache:
                cache[m] = Polynomial(fgens, {m: 1}).substitute(images, model.gens).terms
            terms_add(out, cache[m], c)
        return model.ambient.reduce_terms(out, k)

    phi = GradedLinearMap.from_function(free, model.ambient, 0, fn, name="present")
    img, ker = image_kernel(phi)
    for k in range(top + 1):
        if img.rank(k) != h.subspace.rank(k) or not img.is_subspace_of(h.subspace):
            raise ConsistencyError(f"chosen generators do not generate the subring in degree {k}")
    rels: List[Polynomial] = []
    for k in range(1, top + 1):
        so_far = RingPresentation(fgens, rels, top, name)
        new = Echelon(order_key)
        for v in ker.basis(k):
            red = so_far.reduce_terms(v, k)
            if red and new.add(red) is None:
                rels.append(Polynomial(fgens, red))
    pres = RingPresentation(fgens, rels, top, name)
    if pres.rank_table() != h.ranks():
        raise ConsistencyError("extracted presentation has the wrong rank table")
    return pres


def _safe_name(label: str, i: int) -> str:
    return label if label.isidentifier() else f"y{i + 1}"


def is_decomposable(model: NestedModel, c: Polynomial) -> bool:
    """True if the normal form of ``c`` involves neither e nor f."""
    return all(m[-1] == 0 and m[-2] == 0 for m in model.normal_form(c).terms)


def curve_coherence(model: NestedModel) -> Tuple[Polynomial, Polynomial]:
    """Two evaluations of Pi(e) on a curve.

    For d = 1 the class e is a slot class, so Pi(e) can be computed by the
    slot-permutation rule or by the rule Pi(e) = e + f.  Returns both normal
    forms; they agree exactly when f is the class of the incidence divisor.
    """
    if model.d != 1:
        raise ValueError("curve coherence needs a curve (d = 1)")
    e_nf = model.normal_form(model.e)
    if not is_decomposable(model, model.e):
        raise ConsistencyError("e is not decomposable on a curve")
    slot_terms = {m[:-2]: c for m, c in e_nf.terms.items()}
    via_slots: Terms = {}
    for perm in model._coset_perms():
        terms_add(via_slots, model._embed_triple(permute_terms(slot_terms, perm)))
    via_rule = model.normal_form(model.e + model.f)
    return model.normal_form(model.poly(via_slots)), via_rule
