"""Bounded-rank Ehrenfeucht-Fraisse games on finite graphs, and the Spencer desk check."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .errors import InputError, ResourceError
from .forests import forest_from_codes, is_forest
from .structures import Structure, canonical_form, induced
from .trees import TreeCatalog, centres, tree_code

STATE_BUDGET = 2_000_000


class _TypeTable:
    """Interns rank-j types so types from different graphs compare by integer id."""

    def __init__(self) -> None:
        self.ids: dict = {}

    def intern(self, key) -> int:
        got = self.ids.get(key)
        if got is None:
            got = self.ids[key] = len(self.ids)
        return got


class _GameGraph:
    def __init__(self, G: Structure, table: _TypeTable) -> None:
        if G.arity != 2:
            raise InputError("EF games are played on binary structures")
        self.G = G
        self.table = table
        self.nb = G.neighbours
        self.forest = is_forest(G)
        comps = sorted((sorted(c) for c in G.components()), key=lambda c: c[0])
        self.comp_of = {v: i for i, c in enumerate(comps) for v in c}
        self.comps = comps
        if self.forest:
            self.comp_type = [tree_code(self.nb, c) for c in comps]
        else:
            self.comp_type = [canonical_form(induced(G, c)) for c in comps]
        # first component of each isomorphism type, in label order
        self.reps: dict[str, list[int]] = {}
        for i, t in enumerate(self.comp_type):
            self.reps.setdefault(t, []).append(i)
        self.memo: dict = {}

    def candidates(self, tup: tuple[str, ...]) -> list[str]:
        """Moves up to automorphisms fixing tup: touched components in full,
        plus one untouched component of each isomorphism type."""
        touched = {self.comp_of[v] for v in tup}
        out = [v for i in sorted(touched) for v in self.comps[i]]
        for t, idxs in self.reps.items():
            for i in idxs:
                if i not in touched:
                    out.extend(self.comps[i])
                    break
        return out

    def atomic(self, tup: tuple[str, ...]) -> tuple:
        eq = tuple(tup.index(x) for x in tup)
        adj = tuple(
            tup[j] in self.nb[tup[i]] for i in range(len(tup)) for j in range(i + 1, len(tup))
        )
        return eq, adj

    def key(self, tup: tuple[str, ...]):
        if not self.forest:
            return tup
        parts = []
        for i in sorted({self.comp_of[v] for v in tup}):
            parts.append(self._marked_code(self.comps[i], tup))
        return tuple(sorted(parts))

    def _marked_code(self, comp, tup) -> str:
        marks = {}
        for pos, v in enumerate(tup):
            marks.setdefault(v, []).append(pos)
        best = None
        for c in centres(self.nb, comp):
            code = self._rooted(c, marks)
            if best is None or code < best:
                best = code
        return best

    def _rooted(self, root, marks) -> str:
        stack = [(root, None, False)]
        codes: dict = {}
        while stack:
            v, par, done = stack.pop()
            if done:
                kids = sorted(codes.pop(c) for c in self.nb[v] if c != par)
                label = ",".join(map(str, marks.get(v, ())))
                codes[v] = "(" + label + "".join(kids) + ")"
            else:
                stack.append((v, par, True))
                for c in self.nb[v]:
                    if c != par:
                        stack.append((c, v, False))
        return codes[root]

    def type_of(self, tup: tuple[str, ...], rounds: int) -> int:
        k = (self.key(tup), rounds)
        got = self.memo.get(k)
        if got is not None:
            return got
        atom = self.atomic(tup)
        if rounds == 0:
            val = self.table.intern((0, atom))
        else:
            ext = frozenset(self.type_of(tup + (b,), rounds - 1) for b in self.candidates(tup))
            val = self.table.intern((rounds, atom, ext))
        self.memo[k] = val
        return val


def _estimate(G: Structure, r: int) -> int:
    n = max(1, len(G.vertices))
    return n**r


def ef_equivalent(G: Structure, H: Structure, r: int, *, budget: int = STATE_BUDGET) -> bool:
    """True iff Duplicator wins the r-round EF game on G and H."""
    if r < 0:
        raise InputError("rank must be nonnegative")
    if G.arity != 2 or H.arity != 2:
        raise InputError("EF games are played on binary structures")
    table = _TypeTable()
    gg, hh = _GameGraph(G, table), _GameGraph(H, table)
    for g in (gg, hh):
        # forests collapse to marked-component keys; other graphs enumerate raw tuples
        if not g.forest and _estimate(g.G, r) > budget:
            raise ResourceError(f"rank {r} on {len(g.G.vertices)} vertices exceeds the state budget")
    return gg.type_of((), r) == hh.type_of((), r)


def ef_naive(G: Structure, H: Structure, r: int) -> bool:
    """Direct game search over partial maps; exponential, for cross-checking only."""
    gv, hv = sorted(G.vertices), sorted(H.vertices)
    gn, hn = G.neighbours, H.neighbours

    def partial_iso(xs, ys) -> bool:
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                if (xs[i] == xs[j]) != (ys[i] == ys[j]):
                    return False
                if (xs[j] in gn[xs[i]]) != (ys[j] in hn[ys[i]]):
                    return False
        return True

    def dup_wins(xs, ys, left) -> bool:
        if not partial_iso(xs, ys):
            return False
        if left == 0:
            return True
        for a in gv:
            if not any(dup_wins(xs + (a,), ys + (b,), left - 1) for b in hv):
                return False
        for b in hv:
            if not any(dup_wins(xs + (a,), ys + (b,), left - 1) for a in gv):
                return False
        return True

    return dup_wins((), (), r)


# ---------------------------------------------------------------------------
# Spencer desk check
# ---------------------------------------------------------------------------


def sample_forest_codes(
    rng: random.Random, catalog: TreeCatalog, s: int, m: int, *, extras: bool = False
) -> list[str]:
    """Every tree type of size <= s at multiplicity m..m+2.

    With ``extras``, also 0..2 copies of each type of size s+1..s+2; this
    harsher variant needs much larger s, since rank 3 already sees P5.
    """
    codes = []
    for c in catalog.stage(s):
        codes += [c] * (m + rng.randint(0, 2))
    if extras:
        for c in catalog.stage(s + 2)[len(catalog.stage(s)):]:
            codes += [c] * rng.randint(0, 2)
    return codes


@dataclass
class SpencerReport:
    s: int
    m: int
    r: int
    pairs: int = 0
    failures: list[tuple[list[str], list[str]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.pairs > 0 and not self.failures


def spencer_desk_check(
    s: int, m: int, r: int, pairs: int = 20, seed: int = 0, *, extras: bool = False
) -> SpencerReport:
    if s < 0 or m < 1 or r < 0 or pairs < 1:
        raise InputError("need s >= 0, m >= 1, r >= 0 and at least one pair")
    rng = random.Random(f"spencer:{seed}:{s}:{m}:{r}")
    catalog = TreeCatalog()
    report = SpencerReport(s, m, r)
    for _ in range(pairs):
        a = sample_forest_codes(rng, catalog, s, m, extras=extras)
        b = sample_forest_codes(rng, catalog, s, m, extras=extras)
        report.pairs += 1
        if not ef_equivalent(forest_from_codes(a, "g"), forest_from_codes(b, "h"), r):
            report.failures.append((a, b))
    return report


def spencer_sweep(
    r: int, max_s: int = 4, max_m: int = 4, pairs: int = 20, seed: int = 0, *, extras: bool = False
):
    """Try (s, m) in order of s + m, then s; return the first with zero failures and all reports."""
    grid = sorted(((s, m) for s in range(1, max_s + 1) for m in range(1, max_m + 1)),
                  key=lambda sm: (sm[0] + sm[1], sm[0]))
    reports = []
    for s, m in grid:
        rep = spencer_desk_check(s, m, r, pairs, seed, extras=extras)
        reports.append(rep)
        if rep.ok:
            return (s, m), reports
    return None, reports


def multiplicity_witness(r: int, max_mult: int = 4) -> tuple[int, int] | None:
    """Least (a, b), a < b, such that a vs b isolated vertices is distinguished at rank r."""
    for a, b in combinations(range(1, max_mult + 1), 2):
        G = forest_from_codes(["()"] * a, "g")
        H = forest_from_codes(["()"] * b, "h")
        if not ef_equivalent(G, H, r):
            return a, b
    return None
