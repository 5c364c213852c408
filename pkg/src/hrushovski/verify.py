"""Property suites behind ``verify``; every report line is deterministic for a given seed."""

from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from . import corpus
from .amalgam import verify_full_amalgamation
from .ef import ef_equivalent, multiplicity_witness, spencer_desk_check, spencer_sweep
from .forests import (
    build_pseudofinite_witness,
    check_star_homogeneity,
    check_tuniv,
    delta_components,
    first_theta_stage,
    forest_from_codes,
    forests_up_to,
    gamma_cl_eval,
    is_forest,
)
from .generic import Approximation
from .interpretation import (
    build_configuration,
    canonical_triple,
    construct_E_witness,
    construct_O_witness,
    eval_equiv,
    eval_order,
)
from .minimal_pairs import (
    Kind,
    MinimalPairCertificate,
    build_zero_biminimal,
    classify_pair,
    copy_images,
    gadget_size,
    minimal_extensions,
)
from .predimension import DEFAULT, ClassParams, closure, closure_steps, delta, delta_of, is_closed, is_in_class
from .structures import Structure, induced
from .trees import TreeCatalog

ANCHORS = {
    "lemma-gadget": "Lemma: zero-biminimal extensions exist over every base",
    "amalgamation": "Fact: full amalgamation",
    "closure": "Lemma: closure is the least closed superset",
    "minimal-pairs": "Fact: minimal pair inequalities",
    "interpretation": "Theorem: the ratio order is interpretable",
    "coding": "Lemma: coding k-subsets of a finite scope",
    "binary": "Lemma: binary structures in the class are forests",
    "tuniv": "Theorem: T_univ has pseudofinite witnesses",
    "spencer": "Fact: forests with repeated components are equivalent",
}


@dataclass
class Case:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    cases: list[Case] = field(default_factory=list)
    certificates: list[MinimalPairCertificate] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def anchor(self) -> str:
        return ANCHORS[self.suite]

    @property
    def failures(self) -> list[Case]:
        return [c for c in self.cases if not c.ok]

    @property
    def ok(self) -> bool:
        return bool(self.cases) and not self.failures

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.cases.append(Case(name, bool(ok), detail))

    def lines(self, verbose: bool = False) -> list[str]:
        out = []
        for c in self.cases:
            if verbose or not c.ok:
                status = "pass" if c.ok else f"FAIL\t{self.anchor}"
                out.append(f"{self.suite}\t{c.name}\t{status}\t{c.detail}".rstrip("\t"))
        passed = len(self.cases) - len(self.failures)
        verdict = "pass" if self.ok else "FAIL"
        out.append(f"{self.suite}\tsummary\t{verdict}\t{passed}/{len(self.cases)}")
        scalars = [f"{k}={v}" for k, v in sorted(self.data.items()) if isinstance(v, (int, str, tuple))]
        if scalars:
            out.append(f"{self.suite}\tinfo\t" + " ".join(scalars))
        return out

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "anchor": self.anchor,
            "ok": self.ok,
            "cases": len(self.cases),
            "failures": [{"name": c.name, "detail": c.detail} for c in self.failures],
        }


def _fmt(S) -> str:
    return "{" + ",".join(sorted(S)) + "}"


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def suite_gadget(seed: int, per_n: int = 10, max_n: int = 6) -> SuiteResult:
    res = SuiteResult("lemma-gadget")
    for n in range(1, max_n + 1):
        for j, A in enumerate(corpus.lemma_bases(seed, n, per_n)):
            C = build_zero_biminimal(A, verify=False)
            cert = classify_pair(A.vertices, C)
            new = len(C.vertices - A.vertices)
            ok = bool(cert) and cert.kind is Kind.ZERO_BIMINIMAL and new == gadget_size(n)
            res.add(f"n={n}#{j}", ok, f"edges={len(A.edges)} new={new}")
            if cert:
                res.certificates.append(cert)
    return res


def suite_amalgamation(seed: int, count: int = 200, max_n: int = 6) -> SuiteResult:
    res = SuiteResult("amalgamation")
    triples = corpus.amalgamation_triples(seed, count, max_n)
    report = verify_full_amalgamation([(t.N1, t.N2, t.N0) for t in triples])
    for case, t in zip(report.cases, triples):
        detail = f"arity={t.N1.arity} |N1|={len(t.N1.vertices)} |N2|={len(t.N2.vertices)} |N0|={len(t.N0)}"
        if case.status != "pass":
            detail += f" {case.status}: {case.note}"
            if case.witness is not None:
                detail += f" {_fmt(case.witness)}"
        res.add(f"triple#{case.index}", case.status == "pass", detail)
        res.certificates.extend(_step_certificates(t.start, t.N1))
    return res


def _step_certificates(A, N: Structure, params: ClassParams = DEFAULT) -> list[MinimalPairCertificate]:
    """Each closure step adds a ⊆-minimal violator, so base and step form a minimal pair."""
    out = []
    for base, added in closure_steps(A, N, params):
        cert = classify_pair(base, induced(N, base | added), params, check_class=False)
        if not cert:
            raise AssertionError(f"closure step over {_fmt(base)} is not a minimal pair: {cert.reason}")
        out.append(cert)
    return out


def brute_force_closure(A, N: Structure, params: ClassParams = DEFAULT) -> frozenset[str]:
    """Least closed superset by exhaustive subset tables (scaled integer predimension)."""
    verts = N.sorted_vertices
    n = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    p, q = params.alpha.numerator, params.alpha.denominator
    masks = [sum(1 << idx[x] for x in e) for e in N.edges]
    full = (1 << n) - 1
    d = [q * bin(S).count("1") - p * sum(1 for m in masks if m & S == m) for S in range(1 << n)]
    # best[S] = min of d over supersets of S
    best = list(d)
    for i in range(n):
        for S in range(1 << n):
            if not S >> i & 1:
                best[S] = min(best[S], best[S | 1 << i])
    closed = [all(best[S | 1 << i] > d[S] for i in range(n) if not S >> i & 1) for S in range(1 << n)]
    a = sum(1 << idx[x] for x in A)
    supers = [S for S in range(1 << n) if S & a == a and closed[S]]
    least = min(supers, key=lambda S: bin(S).count("1"))
    if any(S & least != least for S in supers):
        raise AssertionError("closed supersets have no least element")
    assert closed[full]
    return frozenset(v for v in verts if least >> idx[v] & 1)


def suite_closure(seed: int, count: int = 500, max_n: int = 8) -> SuiteResult:
    res = SuiteResult("closure")
    mismatches = 0
    checked = 0
    for j, N in enumerate(corpus.closure_corpus(seed, count, max_n)):
        verts = N.sorted_vertices
        subsets = [frozenset(c) for k in (1, 2) for c in itertools.combinations(verts, k)]
        bad = []
        for A in subsets:
            checked += 1
            got = closure(A, N, check_class=False)
            want = brute_force_closure(A, N)
            if got != want:
                bad.append(f"{_fmt(A)}: {_fmt(got)} != {_fmt(want)}")
            res.certificates.extend(_step_certificates(A, N))
        mismatches += len(bad)
        detail = f"arity={N.arity} n={len(verts)} e={len(N.edges)} subsets={len(subsets)}"
        if bad:
            detail += " " + "; ".join(bad[:3])
        res.add(f"structure#{j}", not bad, detail)
    res.data = {"structures": count, "subsets": checked, "mismatches": mismatches}
    return res


def check_certificate(cert: MinimalPairCertificate, params: ClassParams = DEFAULT) -> bool:
    """Recompute the minimal pair inequalities from the extension, ignoring stored evidence."""
    B, A = cert.extension, cert.base
    dA = delta_of(B, A, params)
    if delta_of(B, B.vertices, params) - dA > 0:
        return False
    new = sorted(B.vertices - A)
    for k in range(1, len(new)):
        for X in itertools.combinations(new, k):
            if delta_of(B, A | frozenset(X), params) - dA <= 0:
                return False
    return cert.check()


def suite_minimal_pairs(sources: list[SuiteResult]) -> SuiteResult:
    res = SuiteResult("minimal-pairs")
    for src in sources:
        bad = [c for c in src.certificates if not check_certificate(c)]
        res.add(
            f"from-{src.suite}",
            not bad and bool(src.certificates),
            f"certificates={len(src.certificates)} bad={len(bad)}",
        )
    return res


def suite_interpretation(seed: int, max_pq: int = 5, constructive_pq: int = 4) -> SuiteResult:
    res = SuiteResult("interpretation")
    triple = canonical_triple()
    host = Approximation(Structure.empty(3))
    grid = [(p, q) for p in range(1, max_pq + 1) for q in range(1, max_pq + 1)]
    conf = {pq: build_configuration(triple, *pq, host) for pq in grid}
    matrix = []
    for (p, q), (p2, q2) in itertools.product(grid, grid):
        w1, w2 = conf[(p, q)], conf[(p2, q2)]
        eq, lt = eval_equiv(w1, w2), eval_order(w1, w2)
        matrix.append(1 if lt else (0 if eq else -1))
        ok = eq == (p * q2 == p2 * q) and lt == (p * q2 < p2 * q)
        res.add(f"({p},{q})~({p2},{q2})", ok, f"equiv={int(eq)} order={int(lt)}")
    res.data["grid"] = grid
    res.data["order_matrix"] = [matrix[i : i + len(grid)] for i in range(0, len(matrix), len(grid))]
    res.data["host_vertices"] = len(host.current.vertices)
    small = [(p, q) for p in range(1, constructive_pq + 1) for q in range(1, constructive_pq + 1)]
    bundles = 0
    for (p, q), (p2, q2) in itertools.product(small, small):
        if p * q2 == p2 * q:
            formula = "E"
        elif p * q2 < p2 * q:
            formula = "O"
        else:
            continue
        approx = Approximation(Structure.empty(3))
        x = build_configuration(triple, p, q, approx)
        y = build_configuration(triple, p2, q2, approx)
        try:
            if formula == "E":
                bundle = construct_E_witness(x, y, approx)
            else:
                bundle = construct_O_witness(x, y, approx)
            ok = bundle.ok and not approx.audit()
            sizes = bundle.sizes()
            detail = " ".join(f"{k}={sizes[k]}" for k in sorted(sizes))
        except Exception as exc:  # reported as a failed case, never swallowed silently
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        bundles += 1
        res.add(f"{formula}({p},{q};{p2},{q2})", ok, detail)
    res.data["bundles"] = bundles
    return res


def suite_coding(seed: int, count: int = 100) -> SuiteResult:
    res = SuiteResult("coding")
    for j, case in enumerate(corpus.coding_cases(seed, count)):
        approx = Approximation(case.seed_structure)
        h = approx.realize_code(case.scope, case.k, case.family)
        got = approx.decode_code(h.vertex, case.scope, case.k)
        res.add(
            f"case#{j}",
            got == case.family,
            f"|S|={len(case.scope)} k={case.k} |X|={len(case.family)} decoded={len(got)}",
        )
    return res


def suite_binary(max_n: int = 8, pair_n: int = 6) -> SuiteResult:
    res = SuiteResult("binary")
    graphs = corpus.binary_graphs(max_n)
    one = ClassParams(Fraction(1))
    agree = sum(1 for G in graphs if is_forest(G) == bool(is_in_class(G, one)))
    res.add("is_forest<=>is_in_class", agree == len(graphs), f"graphs={len(graphs)} agree={agree}")
    forests = [G for G in graphs if is_forest(G)]
    comp_ok = sum(1 for G in forests if delta_components(G) == delta(G, one))
    res.add("delta_components=delta", comp_ok == len(forests), f"forests={len(forests)}")
    checked = bad = 0
    for G in forests:
        for k in range(len(G.vertices) + 1):
            for abar in itertools.combinations(G.sorted_vertices, k):
                checked += 1
                if gamma_cl_eval(abar, G) != bool(is_closed(abar, G, one, check_class=False)):
                    bad += 1
    res.add("gamma_cl<=>is_closed", bad == 0, f"tuples={checked} mismatches={bad}")
    n_pairs = n_bad = 0
    for G in (F for F in forests if len(F.vertices) <= pair_n):
        for k in range(len(G.vertices)):
            for A in itertools.combinations(G.sorted_vertices, k):
                for cert in minimal_extensions(A, G, one, max_new=3):
                    n_pairs += 1
                    if not _binary_pair_ok(cert, G):
                        n_bad += 1
    res.add("binary minimal pairs are singletons", n_bad == 0 and n_pairs > 0, f"pairs={n_pairs} bad={n_bad}")
    return res


def _binary_pair_ok(cert: MinimalPairCertificate, G: Structure) -> bool:
    new = cert.extension.vertices - cert.base
    if len(new) != 1:
        return False
    (b,) = new
    to_base = len(G.neighbours[b] & cert.base)
    if cert.kind.is_zero:
        return to_base == 1
    return to_base >= 2 and len(copy_images(cert.base, cert.extension, G)) == 1


def suite_tuniv(max_stage: int = 12, forest_bound: int = 4, homog_bound: int = 3) -> SuiteResult:
    res = SuiteResult("tuniv")
    catalog = TreeCatalog()
    B0 = build_pseudofinite_witness(catalog, 0)
    res.add("B_0 is a single vertex", len(B0.vertices) == 1 and not B0.edges)
    stages = []
    for codes in forests_up_to(forest_bound):
        A = forest_from_codes(codes)
        i = first_theta_stage(A, catalog, max_stage)
        stages.append(i)
        res.add(f"theta[{' '.join(codes) or 'empty'}]", i is not None, f"from_stage={i}")
    res.data["first_stages"] = stages
    top = build_pseudofinite_witness(catalog, max_stage)
    rep = check_tuniv(top, forest_bound)
    res.add(f"check_tuniv(B_{max_stage},{forest_bound})", rep.ok, f"checked={rep.checked}")
    rep = check_star_homogeneity(top, homog_bound)
    res.add(f"star-homogeneity(B_{max_stage},{homog_bound})", rep.ok, f"checked={rep.checked}")
    res.data["top_stage_vertices"] = len(top.vertices)
    return res


def suite_spencer(seed: int, pairs: int = 20) -> SuiteResult:
    res = SuiteResult("spencer")
    v = Structure.build(2, ["x"])
    e = Structure.build(2, ["a", "b"], [("a", "b")])
    res.add("vertex vs edge r=1 equivalent", ef_equivalent(v, e, 1))
    res.add("vertex vs edge r=2 inequivalent", not ef_equivalent(v, e, 2))
    res.add("1 vs 2 isolated vertices r=2 inequivalent", multiplicity_witness(2) == (1, 2))
    rep = spencer_desk_check(2, 2, 2, pairs, seed)
    res.add("r=2 s=2 m=2", rep.ok and rep.pairs >= 20, f"pairs={rep.pairs} failures={len(rep.failures)}")
    found, reports = spencer_sweep(3, pairs=pairs, seed=seed)
    trail = " ".join(f"({r.s},{r.m}):{len(r.failures)}" for r in reports)
    res.add("r=3 sweep finds a sufficient (s,m)", found is not None, f"found={found} trail={trail}")
    res.data["sweep"] = [(r.s, r.m, r.pairs, len(r.failures)) for r in reports]
    res.data["rank3_sufficient"] = f"s={found[0]},m={found[1]}" if found else "none"
    return res


def run_all(seed: int, max_size: int = 8, progress: Callable[[str], None] | None = None) -> list[SuiteResult]:
    """Every suite in a fixed order; the minimal pair suite consumes the first three."""
    out = []

    def step(fn, *args):
        if progress:
            progress(fn.__name__)
        r = fn(*args)
        out.append(r)
        return r

    g = step(suite_gadget, seed)
    a = step(suite_amalgamation, seed)
    c = step(suite_closure, seed, 500, max_size)
    step(suite_minimal_pairs, [g, a, c])
    step(suite_interpretation, seed)
    step(suite_coding, seed)
    step(suite_binary, max_size)
    step(suite_tuniv)
    step(suite_spencer, seed)
    return out
