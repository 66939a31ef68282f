"""Command line front end.

Exit codes: 0 success, 1 usage or parse error, 2 a property check failed.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field

from .boolean import BooleanInverseSemigroup, check_bis
from .congruence import classify, mu
from .core import DEFAULT_MAX_ELEMENTS, ClosureBudgetExceeded, SizeBudgetExceeded, generate, \
    verify_inverse_semigroup
from .formats import (ParseError, detect_format, parse_cayley, parse_generators, parse_graph,
                      parse_presentation)
from .graph import GraphHasCycle, graph_inverse_semigroup, graph_monoid, path_count_matrix, \
    tight_booleanization, verify_graph_theorem
from .rook import (check_delta_embedding, check_quasi_ideal, grm_semigroup, verify_d_lemmas,
                   verify_type_theorem)
from .structure import atom_groupoid, decompose, to_dot
from .typemonoid import (BadVector, Budget, Inconclusive, MAX_COMPONENT, decide_equal,
                         default_budget, int_monoid, reduce_presentation, typ)

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2
CLASSIFY_LIMIT = 256
DECOMPOSE_LIMIT = 2000


class UsageError(Exception):
    pass


@dataclass
class AnalysisReport:
    """Ordered ``key: value`` entries plus per-stage timings."""

    source: str
    entries: list = field(default_factory=list)     # (key, human text, machine fields)
    timing: dict = field(default_factory=dict)
    failed: bool = False

    def add(self, key, text, fail=False, **fields):
        self.entries.append((key, text, fields))
        self.failed |= fail

    def render(self, fmt: str = "text", timing: bool = False) -> str:
        if fmt == "kv":
            blocks = [f"input: {self.source}"]
            for key, text, fields in self.entries:
                lines = [f"section: {key}", f"value: {text}"]
                lines += [f"{k}: {v}" for k, v in fields.items()]
                blocks.append("\n".join(lines))
            if timing:
                blocks.append("\n".join(["section: timing"]
                                        + [f"{k}: {v:.3f}" for k, v in self.timing.items()]))
            blocks.append(f"status: {'fail' if self.failed else 'ok'}")
            return "\n\n".join(blocks) + "\n"
        out = [f"{key}: {text}" for key, text, _ in self.entries]
        return "\n".join(out) + "\n"

    def timing_text(self) -> str:
        return "".join(f"time {k}: {v:.3f}s\n" for k, v in self.timing.items())


class _Timer:
    def __init__(self, report, name):
        self.report, self.name = report, name

    def __enter__(self):
        self.t = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timing[self.name] = time.perf_counter() - self.t


# ---------------------------------------------------------------------------
# loading


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load(path: str, max_elements: int = DEFAULT_MAX_ELEMENTS):
    """``(kind, object)`` where object is a semigroup, graph or presentation."""
    text = _read(path)
    kind = detect_format(text)
    if kind == "cayley":
        return kind, parse_cayley(text)
    if kind == "generators":
        _, _, gens = parse_generators(text)
        S, _ = generate(gens, max_elements)
        return kind, S
    if kind == "graph":
        return kind, parse_graph(text)
    if kind == "presentation":
        return kind, parse_presentation(text)
    raise UsageError(f"{kind} files cannot be analyzed on their own")


def _semigroup(kind, obj):
    if kind == "cayley":
        return obj.semigroup, obj.boolean_certified
    return obj, False


def _labels(S, xs) -> str:
    return ",".join(S.label(int(x)) for x in xs)


def _typ_text(red) -> str:
    if red.free:
        return f"free on {red.rank} generator{'' if red.rank == 1 else 's'}"
    return f"{red.rank} generators after reduction, {len(red.remaining)} relations remain"


# ---------------------------------------------------------------------------
# analysis pipeline


def analyze_semigroup(S, report: AnalysisReport, claimed_boolean=False):
    with _Timer(report, "verify"):
        violations = verify_inverse_semigroup(S)
    if violations:
        v = violations[0]
        report.add("inverse", f"FAIL {v.kind} witness {_labels(S, v.witness)}", fail=True,
                   kind=v.kind, witness=list(v.witness))
        return None
    report.add("inverse", f"OK ({S.size} elements)", size=S.size)
    with _Timer(report, "boolean"):
        B = check_bis(S)
    if isinstance(B, BooleanInverseSemigroup):
        report.add("boolean", "OK", status="ok")
    else:
        report.add("boolean", f"FAIL ({B.axiom}) witness {_labels(S, B.witness)}", fail=True,
                   axiom=B.axiom, witness=list(B.witness), detail=B.detail)
        if claimed_boolean:
            report.add("certified", "FAIL (header claims a Boolean inverse semigroup)", fail=True)
    with _Timer(report, "mu"):
        m = mu(S)
    nontrivial = [c for c in m.classes if len(c) > 1]
    report.add("mu", "trivial" if not nontrivial else
               " ".join("{" + _labels(S, c) + "}" for c in nontrivial),
               classes=[list(c) for c in nontrivial])
    report.add("fundamental", "yes" if not nontrivial else "no")
    if not isinstance(B, BooleanInverseSemigroup):
        return None
    if S.size <= CLASSIFY_LIMIT:
        with _Timer(report, "classify"):
            c = classify(B)
        report.add("simple", "yes" if c.simple else "no",
                   additively_0_simple=c.additively_0_simple, fundamental=c.fundamental)
    if S.size <= DECOMPOSE_LIMIT:
        with _Timer(report, "decompose"):
            dec = decompose(B)
        report.add("decompose", _blocks(dec), blocks=dec.summary())
    with _Timer(report, "typ"):
        I = int_monoid(B)
        red = reduce_presentation(typ(B))
    report.add("int", f"{I.pcm.size} classes", classes=list(I.pcm.labels))
    report.add("typ", _typ_text(red), rank=red.rank, free=red.free)
    return B


def _blocks(dec) -> str:
    return " + ".join(f"M_{n}({name})" for n, name in dec.summary()) or "0"


def analyze_graph(G, report: AnalysisReport, verify: bool, budget, max_elements):
    report.add("graph", f"{G.num_vertices} vertices, {len(G.edges)} edges, "
               f"{'acyclic' if G.is_acyclic else 'has a cycle'}")
    gm = graph_monoid(G)
    report.add("graph_monoid", f"{len(gm.presentation.relations)} relations",
               relations=[list(map(list, r)) for r in gm.presentation.relations])
    if not G.is_acyclic:
        if verify:
            raise GraphHasCycle("the theorem check needs an acyclic graph")
        return
    with _Timer(report, "gis"):
        I = graph_inverse_semigroup(G, max_elements)
    report.add("gis", f"{I.semigroup.size} elements")
    with _Timer(report, "tight"):
        T = tight_booleanization(G, max_elements)
    report.add("tight", f"{T.B.base.size} elements, "
               + ", ".join(f"{len(T.paths_by_sink[w])} paths to {G.vertices[w]}" for w in G.sinks))
    with _Timer(report, "typ"):
        red = reduce_presentation(typ(T.B))
    report.add("typ", _typ_text(red), rank=red.rank, free=red.free)
    if verify:
        with _Timer(report, "theorem"):
            R = verify_graph_theorem(G, budget, max_elements)
        report.add("theorem", R.summary(), fail=not R,
                   generator_map={k: list(v) for k, v in R.generator_map.items()})


# ---------------------------------------------------------------------------
# verbs


def cmd_analyze(args) -> AnalysisReport:
    kind, obj = load(args.path, args.max_elements)
    report = AnalysisReport(args.path)
    report.add("input", kind)
    if kind == "graph":
        analyze_graph(obj, report, args.verify_graph_theorem, _budget(args), args.max_elements)
    elif kind == "presentation":
        red = reduce_presentation(obj)
        report.add("typ", _typ_text(red), rank=red.rank, free=red.free)
    else:
        S, claimed = _semigroup(kind, obj)
        analyze_semigroup(S, report, claimed)
    return report


def _boolean(kind, obj):
    if kind not in ("cayley", "generators"):
        raise UsageError("this verb needs a Cayley table or generator file")
    S, _ = _semigroup(kind, obj)
    bad = verify_inverse_semigroup(S)
    if bad:
        return None, f"not an inverse semigroup: {bad[0]}"
    B = check_bis(S)
    if not isinstance(B, BooleanInverseSemigroup):
        return None, f"not Boolean ({B.axiom}) witness {_labels(S, B.witness)}"
    return B, ""


def _budget(args) -> Budget:
    if args.budget is not None:
        return Budget(args.budget, MAX_COMPONENT)
    return default_budget()


def _vector(text: str, k: int) -> tuple:
    parts = text.replace(",", " ").split()
    try:
        v = tuple(int(x) for x in parts)
    except ValueError:
        raise BadVector(f"not a vector of naturals: {text!r}") from None
    if len(v) != k or min(v, default=0) < 0:
        raise BadVector(f"vector {text!r} must have {k} non-negative entries")
    return v


def cmd_typ(args) -> AnalysisReport:
    kind, obj = load(args.path, args.max_elements)
    report = AnalysisReport(args.path)
    if kind == "graph":
        pres = graph_monoid(obj).presentation
    elif kind == "presentation":
        pres = obj
    else:
        B, why = _boolean(kind, obj)
        if B is None:
            report.add("typ", f"FAIL {why}", fail=True)
            return report
        pres = typ(B)
    report.add("generators", " ".join(pres.labels) or "-", k=pres.k)
    for lhs, rhs in pres.relations:
        report.add("relation", " ".join(map(str, lhs)) + " = " + " ".join(map(str, rhs)))
    red = reduce_presentation(pres)
    report.add("reduced", _typ_text(red), basis=[pres.labels[i] for i in red.basis])
    if not args.word:
        return report
    if len(args.word) != 2:
        raise UsageError("give exactly two --word vectors")
    u, v = (_vector(w, pres.k) for w in args.word)
    with _Timer(report, "decide"):
        verdict = decide_equal(pres, u, v, _budget(args))
    if verdict.kind == "equal":
        report.add("verdict", f"equal ({len(verdict.trace)}-step trace)", steps=len(verdict.trace))
        for i, step in enumerate(verdict.trace, start=1):
            arrow = "->" if step.forward else "<-"
            report.add(f"step {i}", f"relation {step.relation + 1} {arrow} "
                       + " ".join(map(str, step.result)))
    elif verdict.kind == "distinct":
        report.add("verdict", f"distinct (class of u saturated at {len(verdict.certificate)} vectors)",
                   certificate=len(verdict.certificate))
    else:
        report.add("verdict", f"unknown ({verdict.reason})")
    return report


def cmd_decompose(args) -> AnalysisReport:
    kind, obj = load(args.path, args.max_elements)
    report = AnalysisReport(args.path)
    B, why = _boolean(kind, obj)
    if B is None:
        report.add("decompose", f"FAIL {why}", fail=True)
        return report
    dec = decompose(B, args.max_elements)
    report.add("decompose", _blocks(dec), blocks=dec.summary())
    for n, name in dec.summary():
        report.add("block", f"{n} x {n} rook matrices over {name}")
    report.add("fundamental", "yes" if dec.fundamental else "no")
    return report


def cmd_graph(args) -> AnalysisReport:
    kind, G = load(args.path, args.max_elements)
    if kind != "graph":
        raise UsageError("this verb needs a graph file")
    report = AnalysisReport(args.path)
    analyze_graph(G, report, args.verify_graph_theorem, _budget(args), args.max_elements)
    if G.is_acyclic:
        N = path_count_matrix(G)
        for v in range(G.num_vertices):
            counts = ",".join(str(int(N[v, w])) for w in G.sinks)
            report.add("normal_form", f"a_{G.vertices[v]} = ({counts})")
    return report


def cmd_verify_graph(args) -> AnalysisReport:
    kind, G = load(args.path, args.max_elements)
    if kind != "graph":
        raise UsageError("this verb needs a graph file")
    report = AnalysisReport(args.path)
    R = verify_graph_theorem(G, _budget(args), args.max_elements)
    for name, c in R.checks.items():
        report.add(name, "OK" if c else f"FAIL witness {c.witness}", fail=not c)
    report.add("theorem", R.summary(), fail=not R)
    return report


def cmd_verify_rook(args) -> AnalysisReport:
    kind, obj = load(args.path, args.max_elements)
    report = AnalysisReport(args.path)
    B, why = _boolean(kind, obj)
    if B is None:
        report.add("rook", f"FAIL {why}", fail=True)
        return report
    with _Timer(report, "build"):
        M = grm_semigroup(B, args.dim, args.max_elements)
    report.add("rook", f"M_{args.dim} has {M.size} elements")
    for name, c in verify_d_lemmas(M).items():
        report.add(name, "OK" if c else f"FAIL witness {c.witness}", fail=not c)
    report.add("delta_embedding", "OK" if (c := check_delta_embedding(M)) else f"FAIL {c.witness}",
               fail=not c)
    report.add("quasi_ideal", "OK" if (c := check_quasi_ideal(M)) else f"FAIL {c.witness}",
               fail=not c)
    with _Timer(report, "theorem"):
        R = verify_type_theorem(M, _budget(args))
    for name in ("well_defined", "soundness", "completeness", "distinctness"):
        c = getattr(R, name)
        report.add(name, "OK" if c else f"FAIL witness {c.witness}", fail=not c)
    report.add("theorem", f"VERIFIED at k={args.dim} ({R.equalities} D-equalities checked)"
               if R else "FAILED", fail=not R)
    return report


def cmd_export_dot(args) -> str:
    kind, obj = load(args.path, args.max_elements)
    if kind == "graph":
        return to_dot(tight_booleanization(obj, args.max_elements).groupoid, "boundary")
    B, why = _boolean(kind, obj)
    if B is None:
        raise UsageError(why)
    G, _ = atom_groupoid(B)
    return to_dot(G, "atoms")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("path", help="input file")
    common.add_argument("--format", choices=("text", "kv"), default="text")
    common.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS)
    common.add_argument("--budget", type=int, default=None,
                        help="max vectors per word-problem search (env BISEM_BUDGET)")
    common.add_argument("--timing", action="store_true", help="print stage timings to stderr")
    p = argparse.ArgumentParser(prog="bisem", description="Finite Boolean inverse semigroups.")
    sub = p.add_subparsers(dest="verb", required=True)
    a = sub.add_parser("analyze", parents=[common], help="run the full pipeline")
    a.add_argument("--verify-graph-theorem", action="store_true")
    t = sub.add_parser("typ", parents=[common], help="type monoid presentation and word problem")
    t.add_argument("--word", action="append", help="vector such as 3,0,0; give twice")
    sub.add_parser("decompose", parents=[common], help="semisimple decomposition")
    g = sub.add_parser("graph", parents=[common], help="graph inverse semigroup data")
    g.add_argument("--verify-graph-theorem", action="store_true")
    sub.add_parser("export-dot", parents=[common], help="DOT of the atom or boundary groupoid")
    r = sub.add_parser("verify-rook", parents=[common], help="rook matrix checks at dimension --dim")
    r.add_argument("--dim", type=int, default=2)
    sub.add_parser("verify-graph", parents=[common], help="Typ of the tight Booleanization vs M_G")
    return p


VERBS = {"analyze": cmd_analyze, "typ": cmd_typ, "decompose": cmd_decompose, "graph": cmd_graph,
         "verify-rook": cmd_verify_rook, "verify-graph": cmd_verify_graph}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.verb == "export-dot":
            sys.stdout.write(cmd_export_dot(args))
            return EXIT_OK
        report = VERBS[args.verb](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, BadVector, GraphHasCycle, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ClosureBudgetExceeded, SizeBudgetExceeded, Inconclusive) as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_CHECK
    sys.stdout.write(report.render(args.format, args.timing))
    if args.timing and args.format == "text":
        sys.stderr.write(report.timing_text())
    return EXIT_CHECK if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
