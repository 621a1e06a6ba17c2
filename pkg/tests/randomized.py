"""Random small presentations (at most 3 generators, top degree at most 4) for
projective-bundle and blowup identity checks."""

from fractions import Fraction
from math import comb
import random

from hilbchow.constructions import blowup, kunneth_product, projective_bundle
from hilbchow.graded import RingPresentation, induced_map
from hilbchow.poly import Generator, Polynomial

NAMES = "xyz"


def product_of_projective_spaces(dims, names=NAMES):
    gens = tuple(Generator(names[i], 1) for i in range(len(dims)))
    rels = [Polynomial.variable(gens, g.label) ** (n + 1) for g, n in zip(gens, dims)]
    return RingPresentation(gens, rels, sum(dims), "x".join(f"P{n}" for n in dims))


def random_invertible(rng, n):
    while True:
        M = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        inv = _inverse(M)
        if inv is not None:
            return M, inv


def _inverse(M):
    n = len(M)
    A = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return None
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def linear_change(ring, M):
    """Rewrite a ring with degree-1 generators in new coordinates g -> M g.

    Returns the new ring and the substitution images (to move classes over).
    """
    gens = ring.gens
    phi = {}
    for i, g in enumerate(gens):
        p = Polynomial.zero(gens)
        for j, h in enumerate(gens):
            p = p + Polynomial.variable(gens, h.label).scale(M[i][j])
        phi[g.label] = p
    rels = [r.substitute(phi, gens) for r in ring.relations]
    return RingPresentation(gens, rels, ring.top_degree, ring.name + "'"), phi


def random_class(rng, ring, k):
    p = Polynomial.zero(ring.gens)
    for m in ring.degree_basis(k).basis:
        p = p + Polynomial(ring.gens, {m: rng.randint(-3, 3)})
    return p


def bundle_case(rng):
    dims = rng.choice([[1], [2], [3], [1, 1], [2, 1], [1, 1, 1], [2, 2]])
    Y = product_of_projective_spaces(dims)
    if len(dims) > 1 and rng.random() < 0.5:
        Y, _ = linear_change(Y, random_invertible(rng, len(dims))[0])
    r = rng.randint(1, 3)
    chern = [Y.one()] + [random_class(rng, Y, j) if j <= Y.top_degree else Polynomial.zero(Y.gens) for j in range(1, r + 1)]
    return Y, chern, projective_bundle(Y, chern, gen_name="h")


def _linear_center(n, k):
    """P^n along a linear P^k."""
    X = product_of_projective_spaces([n])
    Y = RingPresentation(X.gens, [X.var("x") ** (k + 1)], k, f"P{k}")
    iota = {"x": Y.var("x")}
    chern = [Y.var("x") ** j * comb(n - k, j) for j in range(n - k + 1)]
    return X, Y, iota, chern, X.var("x") ** (n - k)


def _point_fibre(ydims, m):
    """Y x P^m along Y x point."""
    Y = product_of_projective_spaces(ydims)
    t = Generator("t", 1)
    X = kunneth_product(Y, RingPresentation((t,), [Polynomial.variable((t,), "t") ** (m + 1)], m, f"P{m}"))
    iota = {g.label: Polynomial.variable(Y.gens, NAMES[i]) for i, g in enumerate(X.gens[:-1])}
    iota[X.gens[-1].label] = Polynomial.zero(Y.gens)
    chern = [Y.one()] + [Polynomial.zero(Y.gens)] * m
    cls = Polynomial.variable(X.gens, X.gens[-1].label) ** m
    return X, Y, iota, chern, cls


def _diagonal(n):
    """P^n x P^n along the diagonal."""
    X = product_of_projective_spaces([n, n])
    Y = product_of_projective_spaces([n])
    iota = {"x": Y.var("x"), "y": Y.var("x")}
    h = Y.var("x")
    chern = [h ** j * comb(n + 1, j) for j in range(n + 1)]
    x, y = X.var("x"), X.var("y")
    cls = sum((x ** i * y ** (n - i) for i in range(n + 1)), Polynomial.zero(X.gens))
    return X, Y, iota, chern, cls


def blowup_case(rng):
    family = rng.choice(["linear", "fibre", "diagonal"])
    if family == "linear":
        n = rng.randint(2, 4)
        X, Y, iota, chern, cls = _linear_center(n, rng.randint(0, n - 2))
    elif family == "fibre":
        ydims, m = rng.choice([([1], 2), ([2], 2), ([1], 3), ([1, 1], 2)])
        X, Y, iota, chern, cls = _point_fibre(ydims, m)
    else:
        X, Y, iota, chern, cls = _diagonal(rng.choice([1, 2]))
    if len(X.gens) > 1 and rng.random() < 0.6:
        M, Minv = random_invertible(rng, len(X.gens))
        X, phi = linear_change(X, M)
        cls = cls.substitute(phi, X.gens)
        new_iota = {}
        for i, g in enumerate(X.gens):
            p = Polynomial.zero(Y.gens)
            for j, h in enumerate(X.gens):
                p = p + iota[h.label].scale(Minv[i][j])
            new_iota[g.label] = p
        iota = new_iota
    pull = induced_map(iota, X, Y, name="iota^*")
    return X, Y, blowup(X, pull, chern, cls)


def bundle_checks(Y, chern, pb):
    r = len(chern) - 1
    E = pb.ring
    out = {}
    out["bundle rank identity"] = all(
        E.rank(k) == sum(Y.rank(k - j) for j in range(r)) for k in range(E.top_degree + 1))
    ok = True
    for k in range(Y.top_degree + 1):
        for a in Y.basis_polys(k):
            pa = pb.pull.apply(a)
            for j in range(r):
                got = Y.normal_form(pb.push.apply(E.normal_form(pa * pb.h ** j)))
                want = a if j == r - 1 else Polynomial.zero(Y.gens)
                if Y.normal_form(got - want):
                    ok = False
    out["p_* extracts the top h-coefficient"] = ok
    return out


def blowup_checks(X, Y, bl):
    B = bl.ring
    dp = bl.codim
    out = {}
    out["blowup rank identity"] = all(
        B.rank(k) == X.rank(k) + sum(Y.rank(k - j - 1) for j in range(dp - 1)) for k in range(B.top_degree + 1))
    ident = True
    comp = bl.push.compose(bl.pull)
    for k in range(X.top_degree + 1):
        n = X.rank(k)
        if comp.matrix(k) != [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]:
            ident = False
    out["pi_* pi^* = id"] = ident
    out["blowup relation normal-forms to 0"] = B.is_zero(bl.key_relation)
    return out


def random_cases(count=10, seed=2024):
    rng = random.Random(seed)
    cases = []
    for i in range(count):
        if i % 2 == 0:
            Y, chern, pb = bundle_case(rng)
            cases.append((f"bundle over {Y.name} rank {len(chern) - 1}", bundle_checks(Y, chern, pb)))
        else:
            X, Y, bl = blowup_case(rng)
            cases.append((f"blowup of {X.name} along {Y.name}", blowup_checks(X, Y, bl)))
    return cases
