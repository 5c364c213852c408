"""The binary case: forests, closedness by components, and the T_univ witnesses."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InputError, InternalError
from .predimension import delta
from .structures import Structure
from .trees import TreeCatalog, code_size, code_to_adjacency, tree_code, trees_of_size


def _require_binary(G: Structure) -> None:
    if G.arity != 2:
        raise InputError("binary structures only")


def is_forest(G: Structure) -> bool:
    _require_binary(G)
    parent = {v: v for v in G.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in G.sorted_edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def delta_components(G: Structure) -> int:
    """Number of components of a forest, cross-checked against its predimension."""
    if not is_forest(G):
        raise InputError("not a forest")
    k = len(G.components())
    if delta(G) != k:
        raise InternalError(f"forest with {k} components has delta {delta(G)}")
    return k


def gamma_cl_eval(abar: Iterable[str], N: Structure) -> bool:
    """No vertex outside abar is adjacent to a vertex of abar."""
    _require_binary(N)
    A = frozenset(abar)
    nb = N.neighbours
    return all(nb[a] <= A for a in A)


@lru_cache(maxsize=64)
def forest_profile(N: Structure) -> tuple[tuple[str, int], ...]:
    """Multiset of component tree types of a forest, as sorted (code, count) pairs."""
    if not is_forest(N):
        raise InputError("not a forest")
    nb = N.neighbours
    counts = Counter(tree_code(nb, comp) for comp in N.components())
    return tuple(sorted(counts.items()))


def _profile_counter(N: Structure) -> Counter:
    return Counter(dict(forest_profile(N)))


def theta_eval(A: Structure, N: Structure) -> bool:
    """N has a closed copy of A.

    Closed subsets of a forest are unions of whole components, so this is
    an injective assignment of A's components to isomorphic components of N,
    which for isomorphism types reduces to comparing multiplicities.
    """
    _require_binary(A)
    _require_binary(N)
    if not is_forest(A):
        raise InputError("A is not a forest")
    need = _profile_counter(A)
    have = _profile_counter(N)
    return all(have[t] >= c for t, c in need.items())


def forest_from_codes(codes: Iterable[str], prefix: str = "t") -> Structure:
    """Disjoint union of trees given by canonical codes, with deterministic labels."""
    verts = []
    edges = []
    for i, code in enumerate(codes):
        adj = code_to_adjacency(code)
        names = [f"{prefix}{i}.{j}" for j in range(len(adj))]
        verts += names
        for v, nbrs in enumerate(adj):
            for u in nbrs:
                if v < u:
                    edges.append((names[v], names[u]))
    return Structure.build(2, verts, edges)


def witness_codes(catalog: TreeCatalog, i: int) -> list[str]:
    """Component types of the i-th witness: stages 1 .. i+1 of the catalog, concatenated."""
    if i < 0:
        raise InputError("stage index must be nonnegative")
    return [c for s in range(1, i + 2) for c in catalog.stage(s)]


def build_pseudofinite_witness(catalog: TreeCatalog, i: int) -> Structure:
    """Free amalgam over the empty set of catalog stages 1 .. i+1.

    A tree with t vertices occurs i + 2 - t times, so every multiplicity
    grows without bound along the sequence.
    """
    return forest_from_codes(witness_codes(catalog, i), prefix="s")


def forests_up_to(n: int) -> Iterator[tuple[str, ...]]:
    """Isomorphism types of forests with at most n vertices, as sorted code tuples."""
    codes = [c for k in range(1, n + 1) for c in trees_of_size(k)]

    def rec(start: int, room: int, acc: list[str]) -> Iterator[tuple[str, ...]]:
        yield tuple(acc)
        for j in range(start, len(codes)):
            size = code_size(codes[j])
            if size <= room:
                acc.append(codes[j])
                yield from rec(j, room - size, acc)
                acc.pop()

    yield from rec(0, n, [])


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_tuniv(N: Structure, size_bound: int) -> CheckReport:
    """Acyclicity plus theta_A for every forest A with at most size_bound vertices."""
    _require_binary(N)
    report = CheckReport("T_univ")
    report.checked += 1
    if not is_forest(N):
        report.failures.append("acyclicity: the graph has a cycle")
        return report
    have = _profile_counter(N)
    for codes in forests_up_to(size_bound):
        report.checked += 1
        need = Counter(codes)
        if any(have[t] < c for t, c in need.items()):
            report.failures.append(f"theta fails for forest {list(codes)}")
    return report


def check_star_homogeneity(N: Structure, size_bound: int) -> CheckReport:
    """For closed abar (|abar| <= bound) and abar ≤* B (|B| <= bound), N has a closed copy of B over abar.

    Every closed abar is a union of whole components, and B is abar plus a
    forest F not joined to abar; a closed copy of B over abar is then a set of
    components outside abar realising F.
    """
    _require_binary(N)
    report = CheckReport("star-homogeneity")
    if not is_forest(N):
        report.failures.append("not a forest")
        return report
    nb = N.neighbours
    small = [(tree_code(nb, c), c) for c in N.components() if len(c) <= size_bound]
    have = _profile_counter(N)
    extensions = {n: list(forests_up_to(n)) for n in range(size_bound + 1)}

    def rec(start: int, room: int, chosen: list[int]) -> Iterator[list[int]]:
        yield chosen
        for j in range(start, len(small)):
            if len(small[j][1]) <= room:
                chosen.append(j)
                yield from rec(j + 1, room - len(small[j][1]), chosen)
                chosen.pop()

    for chosen in rec(0, size_bound, []):
        used = Counter(small[j][0] for j in chosen)
        size = sum(len(small[j][1]) for j in chosen)
        for F in extensions[size_bound - size]:
            report.checked += 1
            need = Counter(F)
            if any(have[t] - used[t] < c for t, c in need.items()):
                abar = sorted(v for j in chosen for v in small[j][1])
                report.failures.append(f"no closed copy of {list(F)} over {abar}")
    return report


def first_theta_stage(A: Structure, catalog: TreeCatalog, max_stage: int) -> int | None:
    """Least i <= max_stage with theta_A true in B_i and in every later B_j up to max_stage."""
    first = None
    need = _profile_counter(A) if A.vertices else Counter()
    for i in range(max_stage + 1):
        have = Counter(witness_codes(catalog, i))
        ok = all(have[t] >= c for t, c in need.items())
        if ok and first is None:
            first = i
        elif not ok:
            first = None
    return first


def random_tree_code(rng, n: int) -> str:
    """Canonical code of a uniformly random labelled tree on n vertices (Prüfer)."""
    if n == 1:
        return "()"
    if n == 2:
        return "(())"
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    adj: list[list[int]] = [[] for _ in range(n)]
    for x in seq:
        leaf = min(j for j in range(n) if degree[j] == 1)
        adj[leaf].append(x)
        adj[x].append(leaf)
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [j for j in range(n) if degree[j] == 1]
    adj[u].append(w)
    adj[w].append(u)
    return tree_code(adj, range(n))
