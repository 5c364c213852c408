"""Predimension, class membership, closedness and closure.

All values are exact :class:`fractions.Fraction`.  Internally the search works
on integers by scaling with the denominator of alpha: for alpha = p/q the
scaled relative predimension of X over a base is ``q*|X| - p*e(X)`` where
``e(X)`` counts edges inside base ∪ X that meet X.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, ResourceError
from .structures import Structure, edges_within, induced

EDGE_ENUMERATION_LIMIT = 20
BRUTE_FORCE_COMPONENT = 12
BRANCH_BUDGET = 1 << 18


@dataclass(frozen=True)
class ClassParams:
    alpha: Fraction = Fraction(1)
    arity: int | None = None

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if not 0 < alpha <= 1:
            raise InputError(f"alpha must lie in (0, 1], got {alpha}")
        if self.arity not in (None, 2, 3):
            raise InputError(f"arity must be 2 or 3, got {self.arity}")

    def check(self, S: Structure) -> None:
        if self.arity is not None and S.arity != self.arity:
            raise InputError(f"structure has arity {S.arity}, parameters require {self.arity}")


DEFAULT = ClassParams()


def parse_alpha(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse alpha {text!r}") from exc
    ClassParams(value)
    return value


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome with an optional witness set; truthy when ``ok``."""

    ok: bool
    witness: frozenset[str] | None = None

    def __bool__(self) -> bool:
        return self.ok


def delta(S: Structure, params: ClassParams = DEFAULT) -> Fraction:
    params.check(S)
    return len(S.vertices) - params.alpha * len(S.edges)


def delta_of(S: Structure, V: frozenset[str], params: ClassParams = DEFAULT) -> Fraction:
    """delta of the substructure induced on V, without materialising it."""
    return len(V) - params.alpha * edges_within(S, V)


def delta_rel(B: Structure, A: Iterable[str], params: ClassParams = DEFAULT) -> Fraction:
    A = frozenset(A)
    if not A <= B.vertices:
        raise InputError(f"base vertices {sorted(A - B.vertices)} are not in the structure")
    return delta(B, params) - delta_of(B, A, params)


# ---------------------------------------------------------------------------
# Exact minimisation of the relative predimension
# ---------------------------------------------------------------------------


class _Minimiser:
    """min over X ⊆ U of q|X| - p·#{h ∈ H : h ⊆ X}, split by connectivity.

    Components up to BRUTE_FORCE_COMPONENT vertices are enumerated outright;
    larger ones are split by branching on a vertex of maximum degree.
    """

    def __init__(self, p: int, q: int):
        self.p, self.q = p, q
        self.nodes = 0

    def solve(self, U: frozenset[str], H: list[frozenset[str]]):
        """Return (any_val, any_set, ne_val, ne_set); ne_* is None when U is empty."""
        self.nodes += 1
        if self.nodes > BRANCH_BUDGET:
            raise ResourceError("closedness search exceeded its branch budget")
        comps = _components(U, H)
        any_val, any_set = 0, frozenset()
        results = []
        for cu, ch in comps:
            r = self._solve_component(cu, ch)
            results.append(r)
            any_val += r[0]
            any_set |= r[1]
        ne_val, ne_set = None, None
        for i, (a_val, a_set, n_val, n_set) in enumerate(results):
            if n_val is None:
                continue
            # nonempty piece from component i, best (possibly empty) choice elsewhere
            v = any_val - a_val + n_val
            if ne_val is None or v < ne_val:
                ne_val = v
                ne_set = (any_set - a_set) | n_set
        return any_val, any_set, ne_val, ne_set

    def _solve_component(self, U: frozenset[str], H: list[frozenset[str]]):
        if len(U) <= BRUTE_FORCE_COMPONENT:
            return self._brute(U, H)
        deg: dict[str, int] = {v: 0 for v in U}
        for h in H:
            for v in h:
                deg[v] += 1
        t = min(U, key=lambda v: (-deg[v], v))
        rest = U - {t}
        excl = self.solve(rest, [h for h in H if t not in h])
        const = self.q
        inc_h = []
        for h in H:
            if t in h:
                if len(h) == 1:
                    const -= self.p
                else:
                    inc_h.append(h - {t})
            else:
                inc_h.append(h)
        incl = self.solve(rest, inc_h)
        inc_val = const + incl[0]
        inc_set = incl[1] | {t}
        if excl[0] <= inc_val:
            any_val, any_set = excl[0], excl[1]
        else:
            any_val, any_set = inc_val, inc_set
        ne_val, ne_set = inc_val, inc_set
        if excl[2] is not None and excl[2] <= ne_val:
            ne_val, ne_set = excl[2], excl[3]
        return any_val, any_set, ne_val, ne_set

    def _brute(self, U: frozenset[str], H: list[frozenset[str]]):
        order = sorted(U)
        idx = {v: i for i, v in enumerate(order)}
        masks = []
        for h in H:
            m = 0
            for v in h:
                m |= 1 << idx[v]
            masks.append(m)
        p, q = self.p, self.q
        any_val, any_mask = 0, 0
        ne_val, ne_mask = None, 0
        for mask in range(1, 1 << len(order)):
            val = q * mask.bit_count() - p * sum(1 for m in masks if m & mask == m)
            if ne_val is None or val < ne_val:
                ne_val, ne_mask = val, mask
            if val < any_val:
                any_val, any_mask = val, mask

        def unpack(mask):
            return frozenset(v for v, i in idx.items() if mask >> i & 1)

        if ne_val is None:
            return 0, frozenset(), None, None
        return any_val, unpack(any_mask), ne_val, unpack(ne_mask)


def _components(U: frozenset[str], H: list[frozenset[str]]):
    parent = {v: v for v in U}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h in H:
        it = iter(h)
        r = find(next(it))
        for v in it:
            s = find(v)
            if s != r:
                parent[s] = r
    groups: dict[str, set[str]] = {}
    for v in U:
        groups.setdefault(find(v), set()).add(v)
    edge_groups: dict[str, list[frozenset[str]]] = {r: [] for r in groups}
    for h in H:
        edge_groups[find(next(iter(h)))].append(h)
    keys = sorted(groups, key=lambda r: min(groups[r]))
    return [(frozenset(groups[r]), edge_groups[r]) for r in keys]


def _relative_hypergraph(N: Structure, base: frozenset[str], U: frozenset[str]) -> list[frozenset[str]]:
    allowed = base | U
    seen = set()
    H = []
    inc = N.incident
    for v in U:
        for e in inc[v]:
            if e in seen:
                continue
            seen.add(e)
            if allowed.issuperset(e):
                H.append(frozenset(e) & U)
    return H


def min_relative_delta(
    N: Structure, base: Iterable[str], params: ClassParams = DEFAULT, universe: Iterable[str] | None = None
) -> tuple[Fraction, frozenset[str]] | None:
    """Least delta(base ∪ X) - delta(base) over nonempty X ⊆ universe (default: all of N outside base).

    Returns ``(value, X)`` or None when the universe is empty.
    """
    base = frozenset(base)
    U = frozenset(universe) - base if universe is not None else N.vertices - base
    if not U:
        return None
    alpha = params.alpha
    solver = _Minimiser(alpha.numerator, alpha.denominator)
    _, _, val, X = solver.solve(U, _relative_hypergraph(N, base, U))
    return Fraction(val, alpha.denominator), X


def _shrink_violator(N: Structure, base: frozenset[str], X: frozenset[str], params: ClassParams) -> frozenset[str]:
    """Shrink a violating X until no proper subset violates (⊆-minimal)."""
    changed = True
    while changed:
        changed = False
        for x in sorted(X):
            Y = X - {x}
            if not Y:
                continue
            found = min_relative_delta(N, base, params, universe=Y)
            if found is not None and found[0] <= 0:
                X = found[1]
                changed = True
                break
    return X


def violating_extension(N: Structure, base: Iterable[str], params: ClassParams = DEFAULT) -> frozenset[str] | None:
    """A ⊆-minimal nonempty X outside base with delta(base ∪ X) <= delta(base), or None."""
    base = frozenset(base)
    found = min_relative_delta(N, base, params)
    if found is None or found[0] > 0:
        return None
    return _shrink_violator(N, base, found[1], params)


# ---------------------------------------------------------------------------
# Public checks
# ---------------------------------------------------------------------------


def is_in_class(S: Structure, params: ClassParams = DEFAULT) -> Verdict:
    """Every nonempty substructure has positive predimension.

    Only supports of edge subsets need checking, since dropping an edge-free
    vertex lowers delta.  Up to EDGE_ENUMERATION_LIMIT edges the edge subsets
    are enumerated by increasing size; larger inputs use the relative
    minimiser over the empty base.  A violation is shrunk to a ⊆-minimal set.
    """
    params.check(S)
    if len(S.edges) <= EDGE_ENUMERATION_LIMIT:
        W = _edge_subset_violation(S, params)
        if W is None:
            return Verdict(True)
        return Verdict(False, _shrink_violator(S, frozenset(), W, params))
    W = violating_extension(S, frozenset(), params)
    return Verdict(W is None, W)


def _edge_subset_violation(S: Structure, params: ClassParams) -> frozenset[str] | None:
    p, q = params.alpha.numerator, params.alpha.denominator
    edges = S.sorted_edges
    idx = {v: i for i, v in enumerate(S.sorted_vertices)}
    masks = [sum(1 << idx[v] for v in e) for e in edges]
    for k in range(1, len(edges) + 1):
        for combo in itertools.combinations(range(len(edges)), k):
            sup = 0
            for i in combo:
                sup |= masks[i]
            if q * sup.bit_count() <= p * k:
                return frozenset(v for v, i in idx.items() if sup >> i & 1)
    return None


def _require_subset(A: frozenset[str], B: Structure) -> None:
    if not A <= B.vertices:
        raise InputError(f"vertices {sorted(A - B.vertices)} are not in the structure")


def is_closed(A: Iterable[str], B: Structure, params: ClassParams = DEFAULT, *, check_class: bool = True) -> Verdict:
    """A ≤* B: every strictly larger subset of B has strictly larger delta."""
    A = frozenset(A)
    params.check(B)
    _require_subset(A, B)
    if check_class and not is_in_class(B, params):
        raise InputError("ambient structure is not in the class")
    X = violating_extension(B, A, params)
    if X is None:
        return Verdict(True)
    return Verdict(False, A | X)


def closure(A: Iterable[str], N: Structure, params: ClassParams = DEFAULT, *, check_class: bool = True) -> frozenset[str]:
    """Least closed superset of A, grown by ⊆-minimal violating extensions."""
    S = frozenset(A)
    params.check(N)
    _require_subset(S, N)
    if check_class and not is_in_class(N, params):
        raise InputError("ambient structure is not in the class")
    while True:
        X = violating_extension(N, S, params)
        if X is None:
            return S
        S = S | X


def closure_steps(A: Iterable[str], N: Structure, params: ClassParams = DEFAULT) -> list[tuple[frozenset[str], frozenset[str]]]:
    """The (base, added) pairs of the closure iteration, in order."""
    S = frozenset(A)
    steps = []
    while True:
        X = violating_extension(N, S, params)
        if X is None:
            return steps
        steps.append((S, X))
        S = S | X
