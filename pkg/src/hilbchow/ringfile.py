"""The ``.ring`` text format: parser with positioned errors, and serializer.

    # comment
    variety P2 dim 2
    generators: h:1
    relations: h^3
    chern_tangent: 1 + 3*h + 3*h^2
    diagonal: h^2 (x) 1 + h (x) h + 1 (x) h^2
    point: h^2

Items in ``generators`` and ``relations`` are separated by commas or line
breaks.  Expressions are sums of terms ``[rational *] factor (* factor)*``
with ``factor = name [^ int]``; diagonal terms join a slot-0 term and a
slot-1 term with the tensor token ``(x)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .constructions import VarietyData, tensor_power
from .graded import RingPresentation
from .poly import Generator, Polynomial, StructureError, format_coefficient, format_monomial, order_key

SECTIONS = ("generators", "relations", "chern_tangent", "diagonal", "point")
RESERVED = set(SECTIONS) | {"variety", "dim", "e", "f"}


class RingFileError(ValueError):
    """Input error with a position (1-based line and column)."""

    def __init__(self, message: str, line: int = 0, column: int = 0, expected: Sequence[str] = ()):
        self.line, self.column, self.expected = line, column, tuple(expected)
        where = f"line {line}, column {column}: " if line else ""
        hint = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{where}{message}{hint}")


@dataclass(frozen=True)
class Token:
    kind: str  # name int op tensor newline end
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"(?P<tensor>\(x\))|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<op>[-+*/^:,])")


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            ch = line[pos]
            if ch.isspace():
                pos += 1
                continue
            m = _TOKEN.match(line, pos)
            if not m:
                raise RingFileError(f"unexpected character {ch!r}", ln, pos + 1, ("name", "integer", "operator"))
            kind = m.lastgroup
            toks.append(Token(kind, m.group(), ln, pos + 1))
            pos = m.end()
        toks.append(Token("newline", "\n", ln, len(line) + 1))
    last = len(text.splitlines()) + 1
    toks.append(Token("end", "", last, 1))
    return toks


class Parser:
    """Recursive descent over the token list."""

    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def skip_newlines(self) -> None:
        while self.tok.kind == "newline":
            self.i += 1

    def error(self, message: str, expected: Sequence[str]) -> RingFileError:
        t = self.tok
        found = "end of input" if t.kind == "end" else ("end of line" if t.kind == "newline" else repr(t.text))
        return RingFileError(f"{message}, found {found}", t.line, t.col, expected)

    def expect(self, kind: str, text: Optional[str] = None, what: Optional[str] = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            label = what or (repr(text) if text else kind)
            raise self.error(f"expected {label}", (label,))
        return self.advance()

    def at_section(self) -> bool:
        t = self.tok
        nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
        return t.kind == "name" and t.text in SECTIONS and nxt is not None and nxt.text == ":"

    # grammar
    def integer(self) -> int:
        return int(self.expect("int", what="integer").text)

    def rational(self) -> Fraction:
        num = self.integer()
        if self.tok.text == "/":
            self.advance()
            den_tok = self.tok
            den = self.integer()
            if den == 0:
                raise RingFileError("zero denominator", den_tok.line, den_tok.col, ("nonzero integer",))
            return Fraction(num, den)
        return Fraction(num)

    def factor(self, scope: "Scope") -> Polynomial:
        t = self.tok
        if t.kind != "name":
            raise self.error("expected a generator", ("generator name",))
        self.advance()
        p = scope.variable(t)
        if self.tok.text == "^":
            self.advance()
            p = p ** self.integer()
        return p

    def term(self, scope: "Scope") -> Polynomial:
        """``[rational *] factor (* factor)*`` or a bare rational."""
        if self.tok.kind == "int":
            c = self.rational()
            p = scope.constant(c)
            if self.tok.text != "*":
                return p
            self.advance()
        elif self.tok.kind == "name":
            p = scope.constant(1)
        else:
            raise self.error("expected a term", ("rational", "generator name"))
        p = p * self.factor(scope)
        while self.tok.text == "*":
            self.advance()
            p = p * self.factor(scope)
        return p

    def tensor_term(self, scope: "Scope") -> Polynomial:
        left = self.term(scope.slot(0))
        if self.tok.kind != "tensor":
            raise self.error("expected the tensor token", ("(x)",))
        self.advance()
        right = self.term(scope.slot(1))
        return left * right

    def expression(self, scope: "Scope", tensor: bool = False) -> Tuple[Polynomial, List[Tuple[Polynomial, Token]]]:
        """Signed sum of terms; also returns each term with its first token."""
        parts: List[Tuple[Polynomial, Token]] = []
        sign = 1
        if self.tok.text in "+-" and self.tok.kind == "op":
            sign = -1 if self.advance().text == "-" else 1
        while True:
            start = self.tok
            t = self.tensor_term(scope) if tensor else self.term(scope)
            parts.append((t.scale(sign), start))
            if self.tok.kind == "op" and self.tok.text in "+-":
                sign = -1 if self.advance().text == "-" else 1
                continue
            break
        total = scope.constant(0)
        for p, _ in parts:
            total = total + p
        return total, parts

    def end_item(self) -> bool:
        """Consume an item separator; True if more items may follow in this section."""
        if self.tok.text == ",":
            self.advance()
            self.skip_newlines()
            return not self.at_section() and self.tok.kind != "end"
        if self.tok.kind == "newline":
            self.skip_newlines()
            return not self.at_section() and self.tok.kind != "end"
        if self.tok.kind == "end":
            return False
        raise self.error("expected end of item", ("',' or line break", "'+'", "'-'", "'*'"))


class Scope:
    """Name resolution for expressions."""

    def __init__(self, gens: Sequence[Generator], target: Sequence[Generator], slot: Optional[int] = None):
        self.gens = tuple(gens)
        self.target = tuple(target)
        self.slot_index = slot
        self.by_name = {g.label: g for g in gens}

    def slot(self, s: int) -> "Scope":
        return Scope(self.gens, self.target, s)

    def constant(self, c) -> Polynomial:
        return Polynomial.constant(self.target, c)

    def variable(self, t: Token) -> Polynomial:
        g = self.by_name.get(t.text)
        if g is None:
            raise RingFileError(f"unknown generator {t.text!r}", t.line, t.col, sorted(self.by_name) or ("no generators declared",))
        if self.slot_index is not None:
            g = g.in_slot(self.slot_index)
        return Polynomial.variable(self.target, g.label)


@dataclass
class RingFile:
    name: str
    dimension: int
    generators: Tuple[Tuple[str, int], ...]
    relations: Tuple[Polynomial, ...]
    chern_tangent: Polynomial
    diagonal: Polynomial
    point_class: Polynomial

    def gens(self) -> Tuple[Generator, ...]:
        return tuple(Generator(n, d) for n, d in self.generators)

    def to_variety(self) -> VarietyData:
        ring = RingPresentation(self.gens(), self.relations, self.dimension, self.name)
        return VarietyData(self.name, ring, self.dimension, self.chern_tangent, self.diagonal, self.point_class)

    @classmethod
    def from_variety(cls, X: VarietyData) -> "RingFile":
        return cls(X.name, X.dimension, tuple((g.name, g.degree) for g in X.gens), tuple(X.ring.relations),
                   X.chern_tangent, X.diagonal, X.point_class)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingFile):
            return NotImplemented
        return (self.name, self.dimension, self.generators, self.relations, self.chern_tangent, self.diagonal, self.point_class) == (
            other.name, other.dimension, other.generators, other.relations, other.chern_tangent, other.diagonal, other.point_class)


def parse_ring_file(text: str) -> RingFile:
    p = Parser(text)
    p.skip_newlines()
    p.expect("name", "variety", what="'variety'")
    name = p.expect("name", what="variety name").text
    p.expect("name", "dim", what="'dim'")
    dim_tok = p.tok
    dim = p.integer()
    if dim < 1:
        raise RingFileError("dimension must be >= 1", dim_tok.line, dim_tok.col, ("positive integer",))
    if p.tok.kind not in ("newline", "end"):
        raise p.error("expected end of header line", ("line break",))
    p.skip_newlines()

    found: Dict[str, Token] = {}
    gens: List[Generator] = []
    raw: Dict[str, list] = {}
    while p.tok.kind != "end":
        if not p.at_section():
            raise p.error("expected a section header", tuple(f"'{s}:'" for s in SECTIONS if s not in found))
        head = p.advance()
        p.advance()
        if head.text in found:
            raise RingFileError(f"duplicate section {head.text!r}", head.line, head.col,
                                tuple(f"'{s}:'" for s in SECTIONS if s not in found) or ("end of input",))
        if head.text != "generators" and "generators" not in found:
            raise RingFileError("the generators section must come first", head.line, head.col, ("'generators:'",))
        found[head.text] = head
        p.skip_newlines()
        if head.text == "generators":
            gens = _parse_generators(p)
            continue
        scope = Scope(gens, gens)
        if head.text == "relations":
            items = []
            while not p.at_section() and p.tok.kind != "end":
                items.append(p.expression(scope))
                if not p.end_item():
                    break
            raw["relations"] = items
            continue
        if head.text == "diagonal":
            sq = tensor_power(RingPresentation(gens, [], dim, name), 2)
            raw["diagonal"] = [p.expression(Scope(gens, sq.gens), tensor=True), head]
        else:
            raw[head.text] = [p.expression(scope), head]
        if p.end_item():
            raise p.error(f"section {head.text!r} takes a single expression", ("section header",))
    missing = [s for s in SECTIONS if s not in found]
    if missing:
        last = p.tok
        raise RingFileError(f"missing section(s) {', '.join(missing)}", last.line, last.col, tuple(f"'{s}:'" for s in missing))

    relations = []
    for poly, parts in raw.get("relations", []):
        _check_homogeneous(poly, parts, "relation")
        relations.append(poly)
    diag, parts = raw["diagonal"][0]
    _check_homogeneous(diag, parts, "diagonal", dim)
    point, parts = raw["point"][0]
    _check_homogeneous(point, parts, "point class", dim)
    chern, _ = raw["chern_tangent"][0]
    rf = RingFile(name, dim, tuple((g.name, g.degree) for g in gens), tuple(relations), chern, diag, point)
    try:
        rf.to_variety()
    except StructureError as ex:
        t = raw["chern_tangent"][1] if "c_0" in str(ex) or "Chern" in str(ex) else found["generators"]
        raise RingFileError(str(ex), t.line, t.col, ("a constant term 1",) if t is not found["generators"] else ("consistent ring data",)) from ex
    return rf


def _parse_generators(p: Parser) -> List[Generator]:
    gens: List[Generator] = []
    seen = set()
    p.skip_newlines()
    while not p.at_section() and p.tok.kind != "end":
        t = p.expect("name", what="generator name")
        if t.text in RESERVED:
            raise RingFileError(f"generator name {t.text!r} is reserved", t.line, t.col, ("another name",))
        if t.text in seen:
            raise RingFileError(f"duplicate generator {t.text!r}", t.line, t.col, ("a new generator name",))
        p.expect("op", ":", what="':'")
        dt = p.tok
        deg = p.integer()
        if deg < 1:
            raise RingFileError("generator degree must be >= 1", dt.line, dt.col, ("positive integer",))
        seen.add(t.text)
        gens.append(Generator(t.text, deg))
        if p.tok.text == ",":
            p.advance()
        p.skip_newlines()
    if not gens:
        raise p.error("expected at least one generator", ("name:degree",))
    return gens


def _check_homogeneous(poly: Polynomial, parts, what: str, degree: Optional[int] = None) -> None:
    ref = degree
    for term, tok in parts:
        for k, _ in term.homogeneous_components():
            if ref is None:
                ref = k
            elif k != ref:
                raise RingFileError(
                    f"inhomogeneous {what} at line {tok.line}: term of degree {k}, expected degree {ref}",
                    tok.line, tok.col, (f"a term of degree {ref}",))


# ---------------------------------------------------------------------------
# serialization


def format_expression(p: Polynomial) -> str:
    return p.to_string()


def format_tensor(p: Polynomial) -> str:
    """Canonical text of a two-slot class using ``(x)``."""
    if not p.terms:
        return "0"
    gens = p.gens
    left = [i for i, g in enumerate(gens) if g.slot == 0]
    right = [i for i, g in enumerate(gens) if g.slot == 1]
    base = [g.in_slot(None) for g in gens]
    lg = [base[i] for i in left]
    rg = [base[i] for i in right]
    ordered = sorted(p.terms, key=lambda m: (p.monomial_degree(m), order_key(m)), reverse=True)
    out = []
    for i, m in enumerate(ordered):
        c = p.terms[m]
        lm = format_monomial(tuple(m[j] for j in left), lg) or "1"
        rm = format_monomial(tuple(m[j] for j in right), rg) or "1"
        mag = abs(c)
        body = f"{lm} (x) {rm}" if mag == 1 else f"{format_coefficient(mag)}*{lm} (x) {rm}"
        if i == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" {'+' if c > 0 else '-'} {body}")
    return "".join(out)


def serialize_ring_file(rf: RingFile) -> str:
    lines = [f"variety {rf.name} dim {rf.dimension}"]
    lines.append("generators: " + ", ".join(f"{n}:{d}" for n, d in rf.generators))
    lines.append("relations: " + ", ".join(format_expression(r) for r in rf.relations))
    lines.append("chern_tangent: " + format_expression(rf.chern_tangent))
    lines.append("diagonal: " + format_tensor(rf.diagonal))
    lines.append("point: " + format_expression(rf.point_class))
    return "\n".join(lines) + "\n"


def parse_element(text: str, gens: Sequence[Generator]) -> Polynomial:
    """Parse a single expression over the given (labelled) generators."""
    p = Parser(text)
    p.skip_newlines()
    poly, _ = p.expression(Scope(gens, gens))
    p.skip_newlines()
    if p.tok.kind != "end":
        raise p.error("unexpected trailing input", ("end of input", "'+'", "'-'", "'*'"))
    return poly


def load_variety(source: str) -> VarietyData:
    """``builtin:NAME`` or a path to a ``.ring`` file."""
    from .oracles import builtin

    if source.startswith("builtin:"):
        return builtin(source.split(":", 1)[1])
    with open(source, encoding="utf-8") as fh:
        return parse_ring_file(fh.read()).to_variety()
