"""Command-line interface.

Exit codes: 0 success, 1 a mathematical consistency check failed, 2 bad input.
Machine output goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from .constructions import BlowupError, InvalidDiagonal, VarietyData, validate_diagonal
from .graded import NotAHomomorphism, subalgebra_closure
from .hilb import (
    ConsistencyError,
    Hilb3Model,
    NestedConfig,
    NestedModel,
    NotANestedClass,
    curve_coherence,
    extract_presentation,
    hilb2_model,
    hilb3_model,
    is_decomposable,
    nested_model,
    random_products,
)
from .oracles import UnsupportedInput, goettsche_betti, sym_ranks
from .poly import Polynomial, StructureError
from .ringfile import RingFileError, load_variety, parse_element

STAGES = ("hilb2", "nested", "hilb3")


class InputError(ValueError):
    pass


@dataclass
class ResultDocument:
    stage: str
    input_name: str
    dimension: int
    ranks: List[int] = field(default_factory=list)
    generators: List[dict] = field(default_factory=list)
    relations: List[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    checks: List[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "stage": self.stage,
            "input_name": self.input_name,
            "dimension": self.dimension,
            "ranks": list(self.ranks),
            "generators": [{"name": g["name"], "degree": g["degree"], "expr": g["expr"]} for g in self.generators],
            "relations": list(self.relations),
            "config": {"rel3_constant": self.config.get("rel3_constant", "1"), "eqcz_sign": self.config.get("eqcz_sign", "-")},
            "checks": [{"name": c["name"], "pass": bool(c["pass"])} for c in self.checks],
        }

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)


def emit(doc: ResultDocument, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(doc.as_dict(), indent=2) + "\n"
    d = doc.as_dict()
    lines = [
        f"stage      {d['stage']}",
        f"input      {d['input_name']}",
        f"dimension  {d['dimension']}",
        f"config     rel3_constant={d['config']['rel3_constant']} eqcz_sign={d['config']['eqcz_sign']}",
    ]
    if d["ranks"]:
        width = max(len(str(x)) for x in d["ranks"] + [len(d["ranks"]) - 1])
        lines.append("ranks")
        lines.append("  degree " + " ".join(str(k).rjust(width) for k in range(len(d["ranks"]))))
        lines.append("  rank   " + " ".join(str(r).rjust(width) for r in d["ranks"]))
        lines.append(f"  total  {sum(d['ranks'])}")
    if d["generators"]:
        nw = max(len(g["name"]) for g in d["generators"])
        lines.append("generators")
        for g in d["generators"]:
            lines.append(f"  {g['name'].ljust(nw)}  deg {g['degree']}  {g['expr']}")
    if d["relations"]:
        lines.append(f"relations ({len(d['relations'])})")
        lines.extend(f"  {r}" for r in d["relations"])
    if d["checks"]:
        lines.append("checks")
        for c in d["checks"]:
            lines.append(f"  {'PASS' if c['pass'] else 'FAIL'}  {c['name']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# stage runners


def config_from(args) -> NestedConfig:
    return NestedConfig(Fraction(1, 2) if getattr(args, "rel3_half", False) else Fraction(1), getattr(args, "eqcz_e_sign", "-"))


def config_echo(cfg: NestedConfig) -> dict:
    return {"rel3_constant": str(cfg.rel3_constant), "eqcz_sign": cfg.eqcz_sign}


def _gen_entry(name: str, p: Polynomial) -> dict:
    comps = p.homogeneous_components()
    return {"name": name, "degree": comps[-1][0] if comps else 0, "expr": p.to_string()}


def minimal_generators(model: NestedModel, gens: List[Tuple[str, Polynomial]]) -> List[Tuple[str, Polynomial]]:
    """Greedy by degree: keep a generator only if the kept ones do not produce it."""
    ordered = sorted(gens, key=lambda t: t[1].homogeneous_components()[0][0])
    kept: List[Tuple[str, Polynomial]] = []
    closure = subalgebra_closure(model.ambient, [])
    for name, p in ordered:
        if not closure.contains(p):
            kept.append((name, p))
            closure = subalgebra_closure(model.ambient, [q for _, q in kept])
    return kept


def build_document(X: VarietyData, stage: str, cfg: NestedConfig, with_relations: bool = True) -> ResultDocument:
    doc = ResultDocument(stage, X.name, X.dimension, config=config_echo(cfg))
    if stage == "hilb2":
        h2 = hilb2_model(X)
        doc.ranks = h2.ranks()
        doc.generators = [{"name": g.label, "degree": g.degree, "expr": g.label} for g in h2.ring.gens]
        doc.relations = [r.to_string() for r in h2.ring.relations]
        return doc
    model = nested_model(X, cfg)
    if stage == "nested":
        doc.ranks = model.ranks()
        doc.generators = [{"name": g.label, "degree": g.degree, "expr": g.label} for g in model.gens]
        doc.relations = [r.to_string() for r in model.relations()]
        return doc
    h3 = hilb3_model(model)
    doc.ranks = h3.ranks()
    gens = minimal_generators(model, h3.generators)
    doc.generators = [_gen_entry(n, p) for n, p in gens]
    if with_relations:
        pres = extract_presentation(h3, gens)
        doc.relations = [r.to_string() for r in pres.relations]
    return doc


def oracle_ranks(X: VarietyData, n: int) -> Optional[List[int]]:
    """Independent rank table of Hilb^n X, when one is available."""
    r = X.ring.rank_table()
    if X.dimension == 1:
        return sym_ranks(X, n)
    if X.dimension == 2:
        return goettsche_betti([r[0], 0, r[1], 0, r[2]], n)
    return None


def verify_document(X: VarietyData, cfg: NestedConfig, samples: int = 50, seed: int = 0) -> ResultDocument:
    doc = ResultDocument("verify", X.name, X.dimension, config=config_echo(cfg))

    def check(name: str, fn: Callable[[], bool]) -> None:
        try:
            ok = bool(fn())
        except (ConsistencyError, NotAHomomorphism, BlowupError, NotANestedClass, StructureError) as ex:
            print(f"{name}: {ex}", file=sys.stderr)
            ok = False
        doc.checks.append({"name": name, "pass": ok})

    check("diagonal identity", lambda: validate_diagonal(X) is None)
    h2 = hilb2_model(X)
    ref2 = oracle_ranks(X, 2)
    if ref2 is not None:
        check("hilb2 ranks match the oracle", lambda: h2.ranks() == ref2)
    model = nested_model(X, cfg)
    nf = model.normal_form
    e, f = model.e, model.f
    amb = model.ambient
    check("relations normal-form to zero", lambda: all(amb.is_zero(r) for r in model.relations()))
    check("W contains 1, e, f", lambda: all(model.W.contains(nf(p)) for p in (amb.one(), e, f)))
    check("W is closed under multiplication", model.W.is_multiplicatively_closed)

    def w_generated():
        gens = [p for p in model.symmetric_pair_classes()] + [e, f]
        for g in model.X.gens:
            gens.append(amb.var(g.in_slot(1).label) * e)
            gens.append(amb.var(g.in_slot(0).label) * f)
        return subalgebra_closure(amb, [nf(p) for p in gens]).equals(model.W)

    check("W equals the subalgebra generated by slot classes, e, f, x1*e, x0*f", w_generated)
    ledger = [
        ("Pi(1) = 3", amb.one(), amb.one().scale(3)),
        ("Pi(e) = e+f", e, e + f),
        ("Pi(f) = 2e+2f", f, (e + f).scale(2)),
        ("Pi(ef) = 3ef", e * f, (e * f).scale(3)),
        ("Pi(f^2) = 2e^2+2f^2+ef", f * f, (e * e + f * f).scale(2) + e * f),
        ("Pi(e^2) = e^2+f^2-ef", e * e, e * e + f * f - e * f),
    ]
    for name, a, b in ledger:
        check(name, lambda a=a, b=b: nf(model.pushpull(nf(a)) - b).is_zero())
    pi = model.pushpull_map()

    def projector():
        for k in range(amb.top_degree + 1):
            for v in model.W.basis(k):
                once = pi.apply_terms(k, v)
                twice = pi.apply_terms(k, once)
                diff = dict(twice)
                for m, c in once.items():
                    diff[m] = diff.get(m, 0) - 3 * c
                if amb.reduce_terms(diff, k):
                    return False
        return True

    check("Pi^2 = 3 Pi on W", projector)
    gens = [p for _, p in model.hilb3_generators()]
    check("Pi = 3 on Hilb^3 generators", lambda: all(nf(model.pushpull(p) - p.scale(3)).is_zero() for p in gens))

    def eigen_products():
        for p in random_products(gens, samples, seed=seed):
            p = nf(p)
            if not nf(model.pushpull(p) - p.scale(3)).is_zero():
                return False
        return True

    check(f"Pi = 3 on {samples} random products", eigen_products)
    h3: List[Hilb3Model] = []
    check("image of Pi equals the generated subring", lambda: h3.append(hilb3_model(model)) is None)
    if h3:
        ranks = h3[0].ranks()
        ref3 = oracle_ranks(X, 3)
        if ref3 is not None:
            check("hilb3 ranks match the oracle", lambda: ranks == ref3)
        check("hilb3 ranks are palindromic", lambda: ranks == ranks[::-1])
        doc.ranks = ranks
    if X.dimension == 1:
        check("e and f are decomposable", lambda: is_decomposable(model, e) and is_decomposable(model, f))
        check("curve coherence of Pi(e)", lambda: curve_coherence(model)[0] == curve_coherence(model)[1])
    return doc


# ---------------------------------------------------------------------------
# argument handling


def _stage_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel3-half", action="store_true", help="use the constant 1/2 in the f relation")
    p.add_argument("--eqcz-e-sign", choices=["+", "-"], default="-", help="sign of e in the normal-bundle Chern class (default -)")
    p.add_argument("--format", choices=["text", "json"], default="text")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hilbchow", description="Chow rings of Hilbert schemes of two and three points.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("build", "ranks"):
        p = sub.add_parser(name, help=f"{name} a stage model")
        p.add_argument("file", help=".ring file or builtin:NAME")
        p.add_argument("--stage", choices=STAGES, required=True)
        _stage_flags(p)
    p = sub.add_parser("apply", help="apply the push-pull operator to a class")
    p.add_argument("file")
    p.add_argument("--element", required=True, help="expression in the slot generators (e.g. h0, h1, h2), e and f")
    _stage_flags(p)
    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    _stage_flags(p)
    p = sub.add_parser("presentation", help="generators and relations of the Hilb^3 subring")
    p.add_argument("file")
    _stage_flags(p)
    p = sub.add_parser("oracle", help="reference rank tables")
    osub = p.add_subparsers(dest="oracle", required=True)
    g = osub.add_parser("goettsche")
    g.add_argument("--betti", required=True, help="b0,b1,b2,b3,b4")
    g.add_argument("-n", type=int, required=True)
    g.add_argument("--format", choices=["text", "json"], default="text")
    s = osub.add_parser("sym")
    s.add_argument("file")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--format", choices=["text", "json"], default="text")
    return ap


def _ranks_line(ranks) -> str:
    return ",".join(str(r) for r in ranks) + "\n"


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = make_parser().parse_args(argv)
    try:
        return _dispatch(args, out)
    except (RingFileError, UnsupportedInput, InvalidDiagonal, NotANestedClass, InputError, OSError) as ex:
        print(f"input error: {ex}", file=err)
        return 2
    except StructureError as ex:
        print(f"input error: {ex}", file=err)
        return 2
    except (ConsistencyError, NotAHomomorphism, BlowupError) as ex:
        print(f"consistency failure: {ex}", file=err)
        return 1


def _dispatch(args, out) -> int:
    if args.command == "oracle":
        if args.oracle == "goettsche":
            try:
                betti = [int(x) for x in args.betti.split(",")]
            except ValueError:
                raise InputError(f"cannot read Betti numbers {args.betti!r}")
            ranks = goettsche_betti(betti, args.n)
            name = "surface"
        else:
            X = load_variety(args.file)
            ranks = sym_ranks(X, args.n)
            name = X.name
        if args.format == "json":
            doc = ResultDocument(f"oracle-{args.oracle}", name, 0, ranks)
            out.write(emit(doc, "json"))
        else:
            out.write(_ranks_line(ranks))
        return 0

    X = load_variety(args.file)
    cfg = config_from(args)
    if args.command == "ranks":
        doc = build_document(X, args.stage, cfg, with_relations=False)
        out.write(emit(doc, "json") if args.format == "json" else _ranks_line(doc.ranks))
        return 0
    if args.command == "build":
        out.write(emit(build_document(X, args.stage, cfg), args.format))
        return 0
    if args.command == "presentation":
        out.write(emit(build_document(X, "hilb3", cfg), args.format))
        return 0
    if args.command == "apply":
        model = nested_model(X, cfg)
        try:
            c = parse_element(args.element, model.gens)
        except RingFileError as ex:
            raise InputError(f"element: {ex}")
        res = model.normal_form(model.pushpull(model.normal_form(c)))
        if args.format == "json":
            doc = ResultDocument("apply", X.name, X.dimension, model.ranks(), config=config_echo(cfg))
            doc.generators = [_gen_entry("element", model.normal_form(c)), _gen_entry("Pi(element)", res)]
            out.write(emit(doc, "json"))
        else:
            out.write(res.to_string() + "\n")
        return 0
    if args.command == "verify":
        doc = verify_document(X, cfg, args.samples, args.seed)
        out.write(emit(doc, args.format))
        return 0 if doc.ok else 1
    raise InputError(f"unknown command {args.command}")


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
