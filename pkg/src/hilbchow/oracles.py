"""Independent reference data: built-in varieties, symmetric-power ranks,
the surface generating function for Hilbert schemes of points, and torus
fixed-point counts.

Nothing here depends on the Hilbert-scheme pipeline.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .constructions import VarietyData, kunneth_product, symmetric_quotient, tensor_power
from .graded import RingPresentation
from .poly import Generator, Polynomial

BUILTIN_NAMES = ("pt", "P1", "P2", "P3", "P1xP1")


class UnsupportedInput(ValueError):
    pass


# ---------------------------------------------------------------------------
# built-in inputs


def projective_space(n: int, name: str = None) -> VarietyData:
    h = Generator("h", 1)
    gens = (h,)
    H = Polynomial.variable(gens, "h")
    ring = RingPresentation(gens, [H ** (n + 1)], n, name or f"P{n}")
    chern = sum((H ** j).scale(comb(n + 1, j)) for j in range(n + 1))
    sq = tensor_power(ring, 2)
    h0, h1 = sq.var("h0"), sq.var("h1")
    diag = sum((h0 ** i * h1 ** (n - i) for i in range(n + 1)), Polynomial.zero(sq.gens))
    return VarietyData(ring.name, ring, n, chern, diag, H ** n, _square=sq)


def point() -> VarietyData:
    ring = RingPresentation((), [], 0, "pt")
    one = ring.one()
    return VarietyData("pt", ring, 0, one, tensor_power(ring, 2).one(), one)


def p1xp1() -> VarietyData:
    gens = (Generator("a", 1), Generator("b", 1))
    a, b = (Polynomial.variable(gens, x) for x in "ab")
    ring = RingPresentation(gens, [a * a, b * b], 2, "P1xP1")
    sq = tensor_power(ring, 2)
    a0, a1, b0, b1 = (sq.var(x) for x in ("a0", "a1", "b0", "b1"))
    diag = a0 * b0 + a0 * b1 + b0 * a1 + a1 * b1
    chern = (1 + a.scale(2)) * (1 + b.scale(2))
    return VarietyData("P1xP1", ring, 2, chern, diag, a * b, _square=sq)


def builtin(name: str) -> VarietyData:
    if name == "pt":
        return point()
    if name in ("P1", "P2", "P3"):
        return projective_space(int(name[1]))
    if name == "P1xP1":
        return p1xp1()
    raise UnsupportedInput(f"unknown built-in {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


# ---------------------------------------------------------------------------
# symmetric powers


def sym_ranks(X, n: int) -> List[int]:
    ring = X.ring if isinstance(X, VarietyData) else X
    return symmetric_quotient(ring, n).rank_table()


def kunneth_ranks(X, n: int) -> List[int]:
    ring = X.ring if isinstance(X, VarietyData) else X
    return kunneth_product(*([ring] * n)).rank_table()


# ---------------------------------------------------------------------------
# generating function for surfaces

Series = Dict[Tuple[int, int], int]  # (z-exponent, q-exponent) -> coefficient


def _mul(a: Series, b: Series, nmax: int) -> Series:
    out: Series = {}
    for (za, qa), ca in a.items():
        for (zb, qb), cb in b.items():
            if qa + qb > nmax:
                continue
            key = (za + zb, qa + qb)
            out[key] = out.get(key, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def _inverse_power(zexp: int, qexp: int, b: int, nmax: int) -> Series:
    """(1 - z^zexp q^qexp)^(-b) truncated at q^nmax."""
    out: Series = {}
    k = 0
    while k * qexp <= nmax:
        out[(k * zexp, k * qexp)] = comb(b + k - 1, k) if b else int(k == 0)
        k += 1
    return out


def goettsche_betti(b: Sequence[int], n: int) -> List[int]:
    """Even Betti numbers of Hilb^n of a surface with Betti numbers ``b``,
    indexed by Chow degree."""
    b = list(b)
    if len(b) != 5:
        raise UnsupportedInput("expected five Betti numbers b0..b4 of a surface")
    if b[1] or b[3]:
        raise UnsupportedInput("odd Betti numbers must vanish")
    if any(x < 0 for x in b) or b[0] != 1:
        raise UnsupportedInput("Betti numbers must be nonnegative with b0 = 1")
    if not 0 <= n <= 6:
        raise UnsupportedInput("n must lie in 0..6")
    series: Series = {(0, 0): 1}
    for m in range(1, n + 1):
        for i in (0, 2, 4):
            if b[i]:
                series = _mul(series, _inverse_power(2 * m - 2 + i, m, b[i], n), n)
    coeffs = {z: c for (z, q), c in series.items() if q == n}
    top = 2 * n
    for z in coeffs:
        if z % 2:
            raise AssertionError("odd cohomological degree in an even expansion")
    return [coeffs.get(2 * k, 0) for k in range(top + 1)]


# ---------------------------------------------------------------------------
# torus fixed points

Cell = Tuple[int, ...]


@lru_cache(maxsize=None)
def downsets(dim: int, size: int) -> Tuple[FrozenSet[Cell], ...]:
    """Finite order ideals of N^dim with ``size`` cells (monomial ideals of colength size)."""
    if size == 0:
        return (frozenset(),)
    found = set()
    for D in downsets(dim, size - 1):
        for c in _addable(D, dim):
            found.add(D | {c})
    return tuple(sorted(found, key=sorted))


def _addable(D: FrozenSet[Cell], dim: int):
    cands = {(0,) * dim}
    for c in D:
        for i in range(dim):
            cands.add(c[:i] + (c[i] + 1,) + c[i + 1:])
    for c in cands:
        if c in D:
            continue
        if all(c[i] == 0 or (c[:i] + (c[i] - 1,) + c[i + 1:]) in D for i in range(dim)):
            yield c


def _removable(D: FrozenSet[Cell], dim: int) -> int:
    count = 0
    for c in D:
        if all((c[:i] + (c[i] + 1,) + c[i + 1:]) not in D for i in range(dim)):
            count += 1
    return count


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def fixed_point_count(points: int, dim: int, n: int) -> int:
    """Torus-fixed points of Hilb^n of a toric variety with ``points`` fixed
    points, each with a chart of dimension ``dim``."""
    total = 0
    for comp in _compositions(n, points):
        term = 1
        for s in comp:
            term *= len(downsets(dim, s))
        total += term
    return total


def nested_fixed_point_count(points: int, dim: int, n: int) -> int:
    """Torus-fixed pairs (xi_{n-1} in xi_n) of the nested Hilbert scheme."""
    total = 0
    for comp in _compositions(n, points):
        choices = [downsets(dim, s) for s in comp]
        for config in product(*choices):
            total += sum(_removable(D, dim) for D in config)
    return total


def projective_fixed_points(d: int, n: int, nested: bool = False) -> int:
    fn = nested_fixed_point_count if nested else fixed_point_count
    return fn(d + 1, d, n)
