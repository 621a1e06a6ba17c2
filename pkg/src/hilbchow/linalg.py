"""Sparse exact row reduction over Q.

Vectors are dicts ``{column: Fraction}``. Columns are ordered by a key
function; the pivot of a row is its largest column, so reductions prefer to
eliminate the columns that sort first.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Tuple

Vector = Dict[Hashable, Fraction]


def axpy(y: Vector, x: Mapping[Hashable, Fraction], a) -> None:
    """``y += a * x`` in place."""
    for k, v in x.items():
        w = y.get(k, 0) + a * v
        if w:
            y[k] = w
        else:
            y.pop(k, None)


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Every stored row has coefficient 1 at its pivot and contains no other
    pivot, so reducing a vector is a single pass over its pivot entries.
    With ``track=True`` each row carries the combination of inserted vectors
    that produced it, which gives kernels and preimages.
    """

    def __init__(self, key: Callable[[Hashable], object], track: bool = False):
        self.key = key
        self.track = track
        self.rows: Dict[Hashable, Vector] = {}
        self.combos: Dict[Hashable, Vector] = {}
        self._holders: Dict[Hashable, set] = {}
        self._count = 0

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping[Hashable, Fraction], combo: Optional[Vector] = None) -> Tuple[Vector, Optional[Vector]]:
        out = {k: v for k, v in vec.items() if v}
        hits = [c for c in out if c in self.rows]
        for p in hits:
            a = out.get(p)
            if not a:
                continue
            axpy(out, self.rows[p], -a)
            if combo is not None:
                axpy(combo, self.combos[p], -a)
        return out, combo

    def contains(self, vec: Mapping[Hashable, Fraction]) -> bool:
        return not self.reduce(vec)[0]

    def add(self, vec: Mapping[Hashable, Fraction], tag: Optional[Hashable] = None) -> Optional[Vector]:
        """Insert ``vec``. Returns ``None`` if it was independent, otherwise the
        dependency combination (only meaningful when tracking)."""
        combo: Optional[Vector] = None
        if self.track:
            if tag is None:
                tag = self._count
            combo = {tag: Fraction(1)}
        self._count += 1
        red, combo = self.reduce(vec, combo)
        if not red:
            return combo if self.track else {}
        pivot = max(red, key=self.key)
        inv = 1 / Fraction(red[pivot])
        red = {k: v * inv for k, v in red.items()}
        if combo is not None:
            combo = {k: v * inv for k, v in combo.items()}
        for q in list(self._holders.get(pivot, ())):
            row = self.rows[q]
            a = row.get(pivot)
            if not a:
                continue
            self._untrack(q, row)
            axpy(row, red, -a)
            self._retrack(q, row)
            if combo is not None:
                axpy(self.combos[q], combo, -a)
        self.rows[pivot] = red
        if combo is not None:
            self.combos[pivot] = combo
        self._retrack(pivot, red)
        return None

    def _untrack(self, p, row):
        for c in row:
            s = self._holders.get(c)
            if s is not None:
                s.discard(p)

    def _retrack(self, p, row):
        for c in row:
            if c != p:
                self._holders.setdefault(c, set()).add(p)

    def pivots(self) -> List[Hashable]:
        return sorted(self.rows, key=self.key, reverse=True)

    def basis(self) -> List[Vector]:
        return [dict(self.rows[p]) for p in self.pivots()]

    def coordinates(self, vec: Mapping[Hashable, Fraction]) -> List[Fraction]:
        """Coordinates of a member vector along :meth:`basis`."""
        red, _ = self.reduce(vec)
        if red:
            raise ValueError("vector is not in the span")
        return [Fraction(vec.get(p, 0)) for p in self.pivots()]

    def solve(self, vec: Mapping[Hashable, Fraction]) -> Optional[Vector]:
        """A combination of inserted tags reproducing ``vec`` (needs tracking)."""
        if not self.track:
            raise ValueError("solve() needs a tracking echelon")
        red, combo = self.reduce(vec, {})
        if red:
            return None
        return {k: -v for k, v in combo.items() if v}


def span_key(vectors, key) -> Echelon:
    ech = Echelon(key)
    for v in vectors:
        ech.add(v)
    return ech
