"""Finite structures with one symmetric anti-reflexive relation.

A :class:`Structure` is a vertex set plus a set of ``arity``-element hyperedges.
Vertex ids are opaque strings; each edge is stored as a sorted tuple, so two
structures compare equal exactly when they have the same vertices and edges.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .errors import InputError

ARITIES = (2, 3)
FRESH_PREFIX = "@"

Edge = tuple[str, ...]


@dataclass(frozen=True)
class Structure:
    arity: int
    vertices: frozenset[str]
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.arity not in ARITIES:
            raise InputError(f"arity must be 2 or 3, got {self.arity}")
        for e in self.edges:
            if len(e) != self.arity or len(set(e)) != self.arity:
                raise InputError(f"edge {e} is not a set of {self.arity} distinct vertices")
            if tuple(sorted(e)) != e:
                raise InputError(f"edge {e} is not stored sorted")
            if not self.vertices.issuperset(e):
                raise InputError(f"edge {e} mentions unknown vertices")

    @classmethod
    def build(cls, arity: int, vertices: Iterable[str] = (), edges: Iterable[Iterable[str]] = ()) -> Structure:
        """Normalise loose input: edges may be any iterables and their vertices are added."""
        verts = set(vertices)
        norm = set()
        for e in edges:
            e = tuple(sorted(e))
            verts.update(e)
            norm.add(e)
        return cls(arity, frozenset(verts), frozenset(norm))

    @classmethod
    def empty(cls, arity: int) -> Structure:
        return cls(arity, frozenset(), frozenset())

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Structure(arity={self.arity}, |V|={len(self.vertices)}, |E|={len(self.edges)})"

    @cached_property
    def sorted_vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self.vertices))

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def incident(self) -> dict[str, tuple[Edge, ...]]:
        """Edges containing each vertex."""
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.sorted_edges:
            for v in e:
                inc[v].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def neighbours(self) -> dict[str, frozenset[str]]:
        """Vertices sharing at least one edge with each vertex."""
        return {
            v: frozenset(u for e in es for u in e if u != v)
            for v, es in self.incident.items()
        }

    def degree(self, v: str) -> int:
        return len(self.incident[v])

    def components(self) -> list[frozenset[str]]:
        """Connected components, ordered by their least vertex id."""
        seen: set[str] = set()
        out = []
        nb = self.neighbours
        for v in self.sorted_vertices:
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                x = stack.pop()
                for y in nb[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return out


def _check_vertices(S: Structure, V: Iterable[str]) -> frozenset[str]:
    V = frozenset(V)
    unknown = V - S.vertices
    if unknown:
        raise InputError(f"unknown vertex ids: {sorted(unknown)}")
    return V


def induced(S: Structure, V: Iterable[str]) -> Structure:
    V = _check_vertices(S, V)
    if V == S.vertices:
        return S
    if len(V) * 4 < len(S.vertices):
        inc = S.incident
        edges = frozenset(e for v in V for e in inc[v] if V.issuperset(e))
    else:
        edges = frozenset(e for e in S.edges if V.issuperset(e))
    return Structure(S.arity, V, edges)


def edges_within(S: Structure, V: frozenset[str]) -> int:
    """Number of edges of S contained in V (V must be a subset of the vertices)."""
    inc = S.incident
    seen = set()
    for v in V:
        for e in inc[v]:
            if e not in seen and V.issuperset(e):
                seen.add(e)
    return len(seen)


def rename(S: Structure, mapping: Mapping[str, str]) -> Structure:
    """Apply an injective relabelling; unmapped vertices keep their id."""
    f = lambda v: mapping.get(v, v)  # noqa: E731
    verts = frozenset(map(f, S.vertices))
    if len(verts) != len(S.vertices):
        raise InputError("renaming is not injective")
    edges = frozenset(tuple(sorted(map(f, e))) for e in S.edges)
    return Structure(S.arity, verts, edges)


class FreshIds:
    """Supply of vertex ids under a reserved prefix that user data may not use."""

    def __init__(self, counter: int = 0, prefix: str = FRESH_PREFIX):
        self.counter = counter
        self.prefix = prefix

    def __call__(self) -> str:
        v = f"{self.prefix}{self.counter}"
        self.counter += 1
        return v

    def take(self, n: int) -> list[str]:
        return [self() for _ in range(n)]


def reject_reserved(S: Structure) -> None:
    bad = sorted(v for v in S.vertices if v.startswith(FRESH_PREFIX))
    if bad:
        raise InputError(f"vertex ids {bad} use the reserved prefix {FRESH_PREFIX!r}")


# ---------------------------------------------------------------------------
# Embeddings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    source: Structure
    target: Structure
    pairs: tuple[tuple[str, str], ...]

    @classmethod
    def from_map(cls, source: Structure, target: Structure, mapping: Mapping[str, str]) -> Embedding:
        return cls(source, target, tuple(sorted(mapping.items())))

    @cached_property
    def map(self) -> dict[str, str]:
        return dict(self.pairs)

    @cached_property
    def image(self) -> frozenset[str]:
        return frozenset(v for _, v in self.pairs)

    def __call__(self, v: str) -> str:
        return self.map[v]

    def __repr__(self) -> str:
        body = ", ".join(f"{a}->{b}" for a, b in self.pairs)
        return f"Embedding({body})"

    def is_valid(self) -> bool:
        """Check injectivity and that the map is an isomorphism onto the induced image."""
        f = self.map
        if set(f) != set(self.source.vertices) or len(self.image) != len(f):
            return False
        if not self.target.vertices.issuperset(self.image):
            return False
        mapped = {tuple(sorted(f[v] for v in e)) for e in self.source.edges}
        return mapped == set(induced(self.target, self.image).edges)


def _search_order(B: Structure, fixed: Iterable[str], sort_only: bool) -> list[str]:
    rest = [v for v in B.sorted_vertices if v not in set(fixed)]
    if sort_only:
        return rest
    placed = set(fixed)
    order = []
    remaining = set(rest)
    nb = B.neighbours
    while remaining:
        # most links into the placed set first, then highest degree, then id
        best = min(remaining, key=lambda v: (-len(nb[v] & placed), -B.degree(v), v))
        order.append(best)
        placed.add(best)
        remaining.discard(best)
    return order


def iter_embeddings(
    B: Structure,
    N: Structure,
    fix: Mapping[str, str] | None = None,
    *,
    lexicographic: bool = False,
) -> Iterator[Embedding]:
    """Yield every embedding of B into N extending ``fix``, in a deterministic order.

    Plain backtracking: candidates for the next vertex are drawn from the
    common neighbourhood of its already-placed neighbours and filtered by
    degree; each placement is checked for edge preservation and reflection
    against the placed part.  With ``lexicographic=True`` vertices are placed
    in sorted id order, so the first embedding yielded is the least one.
    """
    if B.arity != N.arity:
        raise InputError("arity mismatch")
    fix = dict(fix or {})
    _check_vertices(B, fix.keys())
    _check_vertices(N, fix.values())
    if len(set(fix.values())) != len(fix):
        raise InputError("fixed map is not injective")
    if not _consistent(B, N, fix):
        raise InputError("fixed map is not an embedding of the induced substructure")
    if len(B.vertices) > len(N.vertices):
        return

    order = _search_order(B, fix, lexicographic)
    nbB, nbN = B.neighbours, N.neighbours
    incB, incN = B.incident, N.incident
    n_vertices = N.sorted_vertices
    f = dict(fix)
    used = set(f.values())

    def candidates(u: str) -> Iterable[str]:
        anchors = [f[x] for x in nbB[u] if x in f]
        if anchors:
            anchors.sort(key=lambda w: len(nbN[w]))
            pool = set(nbN[anchors[0]])
            for w in anchors[1:]:
                pool &= nbN[w]
            return sorted(pool - used)
        return [w for w in n_vertices if w not in used]

    def fits(u: str, w: str) -> bool:
        if len(incN[w]) < len(incB[u]):
            return False
        count = 0
        for e in incB[u]:
            if all(x == u or x in f for x in e):
                img = tuple(sorted(w if x == u else f[x] for x in e))
                if img not in N.edges:
                    return False
                count += 1
        # reflection: no extra target edge inside the image
        img_count = 0
        for e in incN[w]:
            if all(y == w or y in used for y in e):
                img_count += 1
        return img_count == count

    def rec(i: int) -> Iterator[Embedding]:
        if i == len(order):
            yield Embedding.from_map(B, N, f)
            return
        u = order[i]
        for w in candidates(u):
            if fits(u, w):
                f[u] = w
                used.add(w)
                yield from rec(i + 1)
                del f[u]
                used.discard(w)

    yield from rec(0)


def _consistent(B: Structure, N: Structure, fix: Mapping[str, str]) -> bool:
    dom = frozenset(fix)
    img = frozenset(fix.values())
    mapped = {tuple(sorted(fix[v] for v in e)) for e in induced(B, dom).edges}
    return mapped == set(induced(N, img).edges)


def enumerate_embeddings(B: Structure, N: Structure, fix: Mapping[str, str] | None = None) -> list[Embedding]:
    return list(iter_embeddings(B, N, fix))


def find_isomorphism(S: Structure, T: Structure) -> Embedding | None:
    """Lexicographically least isomorphism S -> T, or None."""
    if S.arity != T.arity:
        raise InputError("arity mismatch")
    if len(S.vertices) != len(T.vertices) or len(S.edges) != len(T.edges):
        return None
    if _degree_profile(S) != _degree_profile(T):
        return None
    return next(iter_embeddings(S, T, lexicographic=True), None)


def is_isomorphic(S: Structure, T: Structure) -> bool:
    return find_isomorphism(S, T) is not None


def _degree_profile(S: Structure) -> list[int]:
    return sorted(S.degree(v) for v in S.vertices)


def automorphisms(S: Structure, fix: Iterable[str] = ()) -> list[Embedding]:
    return enumerate_embeddings(S, S, {v: v for v in fix})


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------


def _refine(n: int, inc: list[list[tuple[int, ...]]], colors: list[int]) -> list[int]:
    """Colour refinement to a stable partition; colour ids are assigned canonically."""
    while True:
        sigs = []
        for v in range(n):
            around = sorted(tuple(sorted(colors[x] for x in e if x != v)) for e in inc[v])
            sigs.append((colors[v], tuple(around)))
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _component_form(arity: int, n: int, edges: list[tuple[int, ...]]) -> tuple:
    inc: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for e in edges:
        for x in e:
            inc[x].append(e)
    edge_set = set(edges)
    best: list[tuple | None] = [None]

    def swap_is_auto(a: int, b: int) -> bool:
        def sw(x):
            return b if x == a else a if x == b else x

        for e in inc[a] + inc[b]:
            if tuple(sorted(map(sw, e))) not in edge_set:
                return False
        return True

    def search(colors: list[int]) -> None:
        colors = _refine(n, inc, colors)
        k = len(set(colors))
        if k == n:
            code = tuple(sorted(tuple(sorted(colors[x] for x in e)) for e in edges))
            if best[0] is None or code < best[0]:
                best[0] = code
            return
        sizes: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            sizes.setdefault(c, []).append(v)
        target = min(c for c, vs in sizes.items() if len(vs) > 1)
        reps: list[int] = []
        for v in sizes[target]:
            if any(swap_is_auto(r, v) for r in reps):
                continue
            reps.append(v)
            search([2 * c + (0 if x == v else 1) if c == target else 2 * c + 1 for x, c in enumerate(colors)])

    search([0] * n)
    return best[0] or ()


@lru_cache(maxsize=4096)
def canonical_form(S: Structure) -> str:
    """Isomorphism-invariant string: equal strings iff the structures are isomorphic.

    Computed per connected component by individualisation and refinement with
    transposition pruning, then the sorted component codes are concatenated.
    """
    codes = []
    for comp in S.components():
        idx = {v: i for i, v in enumerate(sorted(comp))}
        local = [tuple(idx[x] for x in e) for v in comp for e in S.incident[v] if e[0] == v]
        codes.append((len(comp), _component_form(S.arity, len(comp), local)))
    codes.sort()
    parts = []
    offset = 0
    for size, code in codes:
        parts.append(";".join(",".join(str(x + offset) for x in e) for e in code))
        offset += size
    body = ";".join(p for p in parts if p)
    return f"{S.arity}|{len(S.vertices)}|{body}"


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------


def to_dict(S: Structure) -> dict:
    return {
        "arity": S.arity,
        "vertices": list(S.sorted_vertices),
        "edges": [list(e) for e in S.sorted_edges],
    }


def from_dict(data: Mapping) -> Structure:
    try:
        arity = int(data["arity"])
        verts = [str(v) for v in data.get("vertices", [])]
        edges = [[str(v) for v in e] for e in data.get("edges", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed structure record: {exc}") from exc
    if len(set(verts)) != len(verts):
        raise InputError("duplicate vertex ids")
    for e in edges:
        if len(e) != arity or len(set(e)) != arity:
            raise InputError(f"edge {e} is not a set of {arity} distinct vertices")
        missing = set(e) - set(verts)
        if missing:
            raise InputError(f"edge {e} mentions unknown vertices {sorted(missing)}")
    norm = [tuple(sorted(e)) for e in edges]
    if len(set(norm)) != len(norm):
        raise InputError("duplicate edges")
    return Structure(arity, frozenset(verts), frozenset(norm))


def dumps(S: Structure) -> str:
    return json.dumps(to_dict(S), separators=(", ", ": "))


def loads(text: str) -> Structure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at offset {exc.pos}: {exc.msg}") from exc
    return from_dict(data)


def parse_edge_list(text: str) -> Structure:
    """Binary shorthand: one ``a-b`` edge or one bare vertex id per line; ``#`` comments."""
    verts: list[str] = []
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "-" in line:
            a, _, b = line.partition("-")
            a, b = a.strip(), b.strip()
            if not a or not b or a == b:
                raise InputError(f"line {lineno}: bad edge {raw!r}")
            edges.append((a, b))
        else:
            verts.append(line)
    return Structure.build(2, verts, edges)


def to_dot(S: Structure, name: str = "S") -> str:
    lines = [f"graph {name} {{"]
    for v in S.sorted_vertices:
        lines.append(f'  "{v}";')
    if S.arity == 2:
        for a, b in S.sorted_edges:
            lines.append(f'  "{a}" -- "{b}";')
    else:
        for i, e in enumerate(S.sorted_edges):
            lines.append(f'  "e{i}" [shape=square, label="", width=0.15];')
            for v in e:
                lines.append(f'  "e{i}" -- "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def combos(items: Iterable[str], k: int) -> Iterator[frozenset[str]]:
    for c in itertools.combinations(sorted(items), k):
        yield frozenset(c)
