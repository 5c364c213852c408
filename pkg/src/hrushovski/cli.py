"""Command-line entry point.  Exit codes: 0 pass, 1 verification failure, 2 input or usage error."""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

from .amalgam import free_join
from .errors import HrushovskiError, InputError, InternalError, NotClosedError, ResourceError
from .forests import build_pseudofinite_witness, check_star_homogeneity, check_tuniv
from .generic import Approximation, replay, snapshot
from .interpretation import (
    build_configuration,
    canonical_triple,
    construct_E_witness,
    construct_O_witness,
    eval_equiv,
    eval_order,
)
from .minimal_pairs import build_zero_biminimal, chi, classify_pair
from .predimension import ClassParams, closure, closure_steps, delta, delta_rel, is_closed, is_in_class, parse_alpha
from .structures import Structure, dumps, loads, parse_edge_list, to_dict, to_dot
from .trees import TreeCatalog

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(InputError):
    pass


class Output:
    """Collects a report either as text lines or as one JSON document."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.record: dict = {}

    def text(self, line: str) -> None:
        if not self.as_json:
            print(line)

    def put(self, **fields) -> None:
        self.record.update(fields)

    def finish(self) -> None:
        if self.as_json:
            print(json.dumps(self.record, sort_keys=True))


def _sorted(vs) -> list[str]:
    return sorted(vs)


def _fmt(vs) -> str:
    return "{" + ", ".join(sorted(vs)) + "}"


def _vertex_list(text: str | None) -> list[str]:
    if not text:
        return []
    return [v.strip() for v in text.split(",") if v.strip()]


def load_structure(path: str, max_size: int | None = None) -> Structure:
    """JSON structure format, or the binary edge-list shorthand; ``-`` reads stdin."""
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    S = loads(text) if text.lstrip().startswith("{") else parse_edge_list(text)
    if max_size is not None and len(S.vertices) > max_size:
        raise InputError(f"{path} has {len(S.vertices)} vertices, above --max-size {max_size}")
    return S


def _params(args) -> ClassParams:
    return ClassParams(parse_alpha(args.alpha))


# ---------------------------------------------------------------------------
# predimension and amalgamation
# ---------------------------------------------------------------------------


def cmd_delta(args, out: Output) -> int:
    S = load_structure(args.file, args.max_size)
    params = _params(args)
    base = _vertex_list(args.base)
    value = delta_rel(S, base, params) if args.base is not None else delta(S, params)
    out.text(str(value))
    out.put(delta=str(value), base=_sorted(base) if args.base is not None else None)
    return EXIT_OK


def cmd_check_class(args, out: Output) -> int:
    S = load_structure(args.file, args.max_size)
    verdict = is_in_class(S, _params(args))
    if verdict:
        out.text("in class")
    else:
        out.text(f"not in class: violating subset {_fmt(verdict.witness)}")
    out.put(in_class=verdict.ok, witness=_sorted(verdict.witness) if verdict.witness else None)
    return EXIT_OK if verdict else EXIT_FAIL


def cmd_is_closed(args, out: Output) -> int:
    S = load_structure(args.file, args.max_size)
    A = _vertex_list(args.base)
    verdict = is_closed(A, S, _params(args))
    if verdict:
        out.text("closed")
    else:
        out.text(f"not closed: violating extension {_fmt(verdict.witness)}")
    out.put(closed=verdict.ok, witness=_sorted(verdict.witness) if verdict.witness else None)
    return EXIT_OK if verdict else EXIT_FAIL


def cmd_closure(args, out: Output) -> int:
    S = load_structure(args.file, args.max_size)
    params = _params(args)
    A = _vertex_list(args.base)
    cl = closure(A, S, params)
    steps = closure_steps(A, S, params) if args.steps else []
    for base, added in steps:
        out.text(f"step\t{_fmt(base)}\t+{_fmt(added)}")
    out.text(" ".join(sorted(cl)))
    out.put(closure=_sorted(cl), steps=[[_sorted(b), _sorted(a)] for b, a in steps])
    return EXIT_OK


def cmd_free_join(args, out: Output) -> int:
    N1 = load_structure(args.left, args.max_size)
    N2 = load_structure(args.right, args.max_size)
    J = free_join(N1, N2, _vertex_list(args.shared))
    out.text(dumps(J))
    out.put(structure=to_dict(J))
    return EXIT_OK


def cmd_dot(args, out: Output) -> int:
    S = load_structure(args.file, args.max_size)
    out.text(to_dot(S).rstrip("\n"))
    out.put(dot=to_dot(S))
    return EXIT_OK


# ---------------------------------------------------------------------------
# minimal pairs
# ---------------------------------------------------------------------------


def cmd_classify_pair(args, out: Output) -> int:
    B = load_structure(args.file, args.max_size)
    cert = classify_pair(_vertex_list(args.base), B, _params(args))
    if not cert:
        msg = f"not a minimal pair: {cert.reason}"
        if cert.witness is not None:
            msg += f" {_fmt(cert.witness)}"
        out.text(msg)
        out.put(minimal=False, reason=cert.reason, witness=_sorted(cert.witness) if cert.witness else None)
        return EXIT_FAIL
    out.text(f"{cert.kind.value}\trelative delta {cert.relative_delta}\tintermediates {len(cert.evidence)}")
    out.put(minimal=True, kind=cert.kind.value, relative_delta=str(cert.relative_delta), intermediates=len(cert.evidence))
    return EXIT_OK


def cmd_gadget(args, out: Output) -> int:
    if args.file:
        A = load_structure(args.file, args.max_size)
    else:
        if args.size is None or args.size < 1:
            raise InputError("give --size n >= 1 or a base structure file")
        A = Structure.build(3, [f"a{i}" for i in range(1, args.size + 1)])
    C = build_zero_biminimal(A)
    if args.dot:
        out.text(to_dot(C, "gadget").rstrip("\n"))
    else:
        out.text(dumps(C))
    out.put(structure=to_dict(C), base=_sorted(A.vertices))
    return EXIT_OK


def cmd_chi(args, out: Output) -> int:
    N = load_structure(args.host, args.max_size)
    B = load_structure(args.extension, args.max_size)
    A = _vertex_list(args.base)
    value = chi(A, B, N)
    out.text(str(value))
    out.put(chi=value)
    return EXIT_OK


# ---------------------------------------------------------------------------
# generic approximations (snapshot files)
# ---------------------------------------------------------------------------


def _load_snapshot(path: str) -> Approximation:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return replay(text)


def _save_snapshot(approx: Approximation, path: str) -> None:
    Path(path).write_text(snapshot(approx))


def _embedding_record(emb) -> dict:
    return dict(sorted(emb.map.items()))


def cmd_generic(args, out: Output) -> int:
    if args.action == "new":
        seed = load_structure(args.structure, args.max_size) if args.structure else Structure.empty(args.arity)
        approx = Approximation(seed, _params(args))
        _save_snapshot(approx, args.snapshot)
        out.text(f"created\t{args.snapshot}\tvertices={len(seed.vertices)}")
        out.put(snapshot=args.snapshot, vertices=len(seed.vertices))
        return EXIT_OK
    approx = _load_snapshot(args.snapshot)
    if args.action == "audit":
        problems = approx.audit()
        for p in problems:
            out.text(f"problem\t{p}")
        out.text(f"audit\t{'pass' if not problems else 'FAIL'}\tsteps={len(approx.ledger)} vertices={len(approx.current.vertices)}")
        out.put(ok=not problems, problems=problems, steps=len(approx.ledger))
        return EXIT_OK if not problems else EXIT_FAIL
    if args.action == "ensure-universal":
        A = load_structure(args.structure, args.max_size)
        emb = approx.ensure_universal(A, fresh=args.fresh)
        result = _embedding_record(emb)
    elif args.action == "ensure-homogeneous":
        B = load_structure(args.structure, args.max_size)
        base_map = {}
        for item in _vertex_list(args.map):
            src, sep, dst = item.partition("=")
            if not sep:
                raise InputError(f"map entries look like b=v, got {item!r}")
            base_map[src.strip()] = dst.strip()
        emb = approx.ensure_homogeneous(B, base_map)
        result = _embedding_record(emb)
    elif args.action == "code":
        family = [_vertex_list(part.replace(" ", ",")) for part in (args.family or "").split(";") if part.strip()]
        handle = approx.realize_code(_vertex_list(args.scope), args.k, family)
        result = {"vertex": handle.vertex, "family": sorted(sorted(Y) for Y in handle.family)}
    elif args.action == "decode":
        fam = approx.decode_code(args.vertex, _vertex_list(args.scope), args.k)
        rows = sorted(sorted(Y) for Y in fam)
        for row in rows:
            out.text(" ".join(row))
        out.put(family=rows)
        return EXIT_OK
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown action {args.action}")
    _save_snapshot(approx, args.snapshot)
    out.text(json.dumps(result, sort_keys=True))
    out.put(result=result, vertices=len(approx.current.vertices))
    return EXIT_OK


# ---------------------------------------------------------------------------
# interpretation demo
# ---------------------------------------------------------------------------


def cmd_interpret(args, out: Output) -> int:
    for name in ("p", "q", "p2", "q2"):
        if getattr(args, name) < 1:
            raise InputError(f"--{name} must be at least 1")
    triple = canonical_triple()
    approx = Approximation(Structure.empty(3))
    x = build_configuration(triple, args.p, args.q, approx)
    y = build_configuration(triple, args.p2, args.q2, approx)
    eq, lt = eval_equiv(x, y), eval_order(x, y)
    out.text(f"chi(x)\t{x.chi()[0]}\t{x.chi()[1]}")
    out.text(f"chi(y)\t{y.chi()[0]}\t{y.chi()[1]}")
    out.text(f"E(x,y)\t{str(eq).lower()}")
    out.text(f"O(x,y)\t{str(lt).lower()}")
    out.put(chi_x=list(x.chi()), chi_y=list(y.chi()), equiv=eq, order=lt)
    status = EXIT_OK
    if args.constructive:
        if eq:
            bundle = construct_E_witness(x, y, approx)
        elif lt:
            bundle = construct_O_witness(x, y, approx)
        else:
            bundle = construct_O_witness(y, x, approx)
        for name, ok in bundle.conjuncts:
            out.text(f"{bundle.formula}\t{'pass' if ok else 'FAIL'}\t{name}")
        sizes = bundle.sizes()
        out.text("codes\t" + " ".join(f"{k}={sizes[k]}" for k in sorted(sizes)))
        out.put(
            formula=bundle.formula,
            conjuncts=[{"name": n, "ok": ok} for n, ok in bundle.conjuncts],
            code_sizes=sizes,
            host_vertices=len(approx.current.vertices),
        )
        status = EXIT_OK if bundle.ok else EXIT_FAIL
    return status


# ---------------------------------------------------------------------------
# binary case
# ---------------------------------------------------------------------------


def cmd_binary(args, out: Output) -> int:
    from .ef import ef_equivalent, spencer_desk_check

    if args.action == "check-tuniv":
        N = load_structure(args.file, args.max_size)
        reports = [check_tuniv(N, args.bound)]
        if args.homogeneity:
            reports.append(check_star_homogeneity(N, args.bound))
        ok = True
        for rep in reports:
            for f in rep.failures:
                out.text(f"{rep.name}\tFAIL\t{f}")
            out.text(f"{rep.name}\t{'pass' if rep.ok else 'FAIL'}\tchecked={rep.checked}")
            ok = ok and rep.ok
        out.put(reports=[{"name": r.name, "ok": r.ok, "checked": r.checked, "failures": r.failures} for r in reports])
        return EXIT_OK if ok else EXIT_FAIL
    if args.action == "witness":
        if args.stage < 0:
            raise InputError("--stage must be nonnegative")
        B = build_pseudofinite_witness(TreeCatalog(), args.stage)
        if args.output:
            Path(args.output).write_text(dumps(B) + "\n")
            out.text(f"stage {args.stage}\t{len(B.vertices)} vertices\t{len(B.components())} components")
        else:
            out.text(dumps(B))
        out.put(stage=args.stage, vertices=len(B.vertices), components=len(B.components()))
        return EXIT_OK
    if args.action == "ef":
        G = load_structure(args.left, args.max_size)
        H = load_structure(args.right, args.max_size)
        eq = ef_equivalent(G, H, args.rank)
        out.text(f"rank {args.rank}\t{'equivalent' if eq else 'inequivalent'}")
        out.put(rank=args.rank, equivalent=eq)
        return EXIT_OK
    if args.action == "spencer":
        rep = spencer_desk_check(args.size, args.mult, args.rank, args.pairs, args.seed, extras=args.extras)
        out.text(f"spencer\ts={rep.s} m={rep.m} r={rep.r}\tpairs={rep.pairs}\tfailures={len(rep.failures)}")
        out.put(s=rep.s, m=rep.m, r=rep.r, pairs=rep.pairs, failures=len(rep.failures))
        return EXIT_OK if rep.ok else EXIT_FAIL
    raise InputError(f"unknown action {args.action}")  # pragma: no cover


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args, out: Output) -> int:
    from . import verify as V

    max_size = args.max_size if args.max_size is not None else 8
    if not 1 <= max_size <= 8:
        raise InputError("verify corpora support --max-size between 1 and 8")
    single = {
        "lemma-gadget": lambda: [V.suite_gadget(args.seed)],
        "amalgamation": lambda: [V.suite_amalgamation(args.seed)],
        "closure": lambda: [V.suite_closure(args.seed, 500, max_size)],
        "interpretation": lambda: [V.suite_interpretation(args.seed)],
        "coding": lambda: [V.suite_coding(args.seed)],
        "binary": lambda: [V.suite_binary(max_size)],
        "tuniv": lambda: [V.suite_tuniv()],
        "spencer": lambda: [V.suite_spencer(args.seed)],
    }
    if args.suite == "all":
        results = V.run_all(args.seed, max_size)
    else:
        results = single[args.suite]()
    ok = all(r.ok for r in results)
    if args.json:
        out.put(seed=args.seed, ok=ok, suites=[r.to_dict() for r in results])
    else:
        out.text(f"# verify {args.suite} seed={args.seed} max-size={max_size}")
        for r in results:
            for line in r.lines(args.verbose):
                out.text(line)
        out.text(f"verify\t{args.suite}\t{'pass' if ok else 'FAIL'}")
    if args.figures:
        from .plotting import write_figures

        for path in write_figures(results, args.figures):
            print(f"figure\t{path}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--alpha", default=d("1/1"), help="weight alpha as p/q in (0, 1] (default 1/1)")
    parser.add_argument("--json", action="store_true", default=d(False), help="machine-readable report")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for randomized suites (default 0)")
    parser.add_argument("--max-size", type=int, default=d(None), help="vertex cap for inputs and verify corpora")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 2, as argparse does, but via our handler
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hrushovski", description=__doc__)
    _global_flags(parser, suppress=False)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("delta", cmd_delta, "predimension of a structure, or relative to --base")
    p.add_argument("file")
    p.add_argument("--base", default=None, help="comma-separated base vertices")
    p = add("check-class", cmd_check_class, "membership in the class; exit 1 with a violating subset")
    p.add_argument("file")
    p = add("is-closed", cmd_is_closed, "is --base closed in the structure")
    p.add_argument("file")
    p.add_argument("--base", default="")
    p = add("closure", cmd_closure, "closure of --base")
    p.add_argument("file")
    p.add_argument("--base", default="")
    p.add_argument("--steps", action="store_true", help="print each minimal violator added")
    p = add("free-join", cmd_free_join, "free join of two structures over shared vertices")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--shared", default="")
    p = add("classify-pair", cmd_classify_pair, "certify (base, structure) as a minimal pair")
    p.add_argument("file")
    p.add_argument("--base", default="")
    p = add("gadget", cmd_gadget, "zero-biminimal extension over --size points or a given base")
    p.add_argument("file", nargs="?")
    p.add_argument("--size", type=int)
    p.add_argument("--dot", action="store_true")
    p = add("chi", cmd_chi, "number of copies of an extension over --base pairwise meeting in the base")
    p.add_argument("host")
    p.add_argument("extension")
    p.add_argument("--base", default="")
    p = add("dot", cmd_dot, "DOT export")
    p.add_argument("file")

    p = add("generic", cmd_generic, "finite approximations to the generic model (snapshot files)")
    p.add_argument("action", choices=["new", "ensure-universal", "ensure-homogeneous", "code", "decode", "audit"])
    p.add_argument("snapshot")
    p.add_argument("structure", nargs="?", help="structure file for new/ensure-*")
    p.add_argument("--arity", type=int, default=3, help="arity of an empty seed for new")
    p.add_argument("--fresh", action="store_true", help="ensure-universal: always add a new copy")
    p.add_argument("--map", default="", help="ensure-homogeneous: b=v,... base map")
    p.add_argument("--scope", default="")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--family", default="", help='code: k-subsets separated by ";", e.g. "a b;b c"')
    p.add_argument("--vertex", default="", help="decode: the code vertex")

    p = add("interpret", cmd_interpret, "configurations, E/O verdicts and witnesses")
    p.add_argument("action", choices=["demo"])
    for name in ("p", "q", "p2", "q2"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--constructive", action="store_true")

    p = add("binary", cmd_binary, "binary case: forests, T_univ witnesses, EF games")
    p.add_argument("action", choices=["check-tuniv", "witness", "ef", "spencer"])
    p.add_argument("left", nargs="?", help="graph file (check-tuniv, ef)")
    p.add_argument("right", nargs="?", help="second graph (ef)")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--homogeneity", action="store_true", help="check-tuniv: also check star-homogeneity")
    p.add_argument("--stage", type=int, default=0)
    p.add_argument("--output", default=None)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--size", type=int, default=2)
    p.add_argument("--mult", type=int, default=2)
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--extras", action="store_true", help="spencer: add 0..2 trees of size s+1..s+2")

    p = add("verify", cmd_verify, "run property suites")
    p.add_argument(
        "suite",
        choices=["all", "lemma-gadget", "amalgamation", "closure", "interpretation", "coding", "binary", "tuniv", "spencer"],
    )
    p.add_argument("--figures", default=None, help="write PNG figures to this directory")
    p.add_argument("--verbose", action="store_true", help="list passing cases too")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    out = None
    try:
        args = build_parser().parse_args(argv)
        if args.command == "binary":
            if args.action in ("check-tuniv", "ef") and not args.left:
                raise UsageError(f"binary {args.action} needs a graph file")
            if args.action == "ef" and not args.right:
                raise UsageError("binary ef needs two graph files")
            args.file = args.left
        if args.command == "generic" and args.action in ("ensure-universal", "ensure-homogeneous") and not args.structure:
            raise UsageError(f"generic {args.action} needs a structure file")
        out = Output(args.json)
        code = args.func(args, out)
        out.finish()
        return code
    except (InputError, NotClosedError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except HrushovskiError as exc:  # snapshot problems are malformed input
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
