"""Deterministic generators for the verification suites."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import networkx as nx

from .predimension import DEFAULT, ClassParams, closure, is_in_class
from .structures import Structure, induced


def rng_for(seed: int, label: str) -> random.Random:
    """Independent stream per suite so adding a suite never shifts another."""
    return random.Random(f"{seed}:{label}")


def grow_in_class(
    rng: random.Random,
    S: Structure,
    candidates: list[tuple[str, ...]],
    target: int,
    params: ClassParams = DEFAULT,
) -> Structure:
    """Add candidate edges in random order, keeping each only if S stays in the class."""
    pool = list(candidates)
    rng.shuffle(pool)
    edges = set(S.edges)
    for e in pool:
        if len(edges) - len(S.edges) >= target:
            break
        trial = Structure(S.arity, S.vertices, frozenset(edges | {e}))
        if is_in_class(trial, params):
            edges.add(e)
    return Structure(S.arity, S.vertices, frozenset(edges))


def random_class_structure(
    rng: random.Random,
    arity: int,
    n: int,
    max_edges: int,
    params: ClassParams = DEFAULT,
    prefix: str = "x",
) -> Structure:
    verts = [f"{prefix}{i}" for i in range(n)]
    cands = [tuple(e) for e in itertools.combinations(verts, arity)]
    target = rng.randint(0, max_edges)
    return grow_in_class(rng, Structure.build(arity, verts), cands, target, params)


def closure_corpus(seed: int, count: int = 500, max_n: int = 8) -> list[Structure]:
    """Random members of the class, both arities, 1..max_n vertices."""
    rng = rng_for(seed, "closure-corpus")
    out = []
    for i in range(count):
        arity = 2 + i % 2
        n = rng.randint(1, max_n)
        out.append(random_class_structure(rng, arity, n, 2 * n))
    return out


def lemma_bases(seed: int, n: int, count: int = 10, max_edges: int = 8) -> list[Structure]:
    """Random ternary members of the class with exactly n vertices."""
    rng = rng_for(seed, f"lemma-bases:{n}")
    return [random_class_structure(rng, 3, n, max_edges, prefix="a") for _ in range(count)]


@dataclass(frozen=True)
class Triple:
    N1: Structure
    N2: Structure
    N0: frozenset[str]
    start: frozenset[str]  # the subset whose closure in N1 gave N0


def amalgamation_triples(seed: int, count: int = 200, max_n: int = 6) -> list[Triple]:
    """Triples with N0 closed in N1 and N2 an extension of the same base structure."""
    rng = rng_for(seed, "amalgamation")
    out = []
    for i in range(count):
        arity = 2 + i % 2
        N1 = random_class_structure(rng, arity, rng.randint(1, max_n), 2 * max_n, prefix="x")
        k = rng.randint(0, min(2, len(N1.vertices)))
        start = frozenset(rng.sample(N1.sorted_vertices, k))
        N0 = closure(start, N1)
        base = induced(N1, N0)
        extra = [f"y{j}" for j in range(rng.randint(0, max_n - len(N0)))]
        S = Structure(arity, base.vertices | frozenset(extra), base.edges)
        cands = [
            tuple(sorted(e))
            for e in itertools.combinations(sorted(S.vertices), arity)
            if any(v in extra for v in e)
        ]
        N2 = grow_in_class(rng, S, cands, rng.randint(0, 2 * max_n))
        out.append(Triple(N1, N2, N0, start))
    return out


@dataclass(frozen=True)
class CodingCase:
    seed_structure: Structure
    scope: frozenset[str]
    k: int
    family: frozenset[frozenset[str]]


def coding_cases(seed: int, count: int = 100, max_scope: int = 5) -> list[CodingCase]:
    rng = rng_for(seed, "coding")
    out = []
    for _ in range(count):
        k = rng.choice((1, 2))
        n = rng.randint(k, max_scope)
        S = random_class_structure(rng, 3, n, n, prefix="s")
        subsets = [frozenset(c) for c in itertools.combinations(S.sorted_vertices, k)]
        fam = frozenset(Y for Y in subsets if rng.random() < 0.5)
        out.append(CodingCase(S, S.vertices, k, fam))
    return out


def _from_nx(g: nx.Graph) -> Structure:
    return Structure.build(2, [f"v{i}" for i in g.nodes()], [(f"v{a}", f"v{b}") for a, b in g.edges()])


@lru_cache(maxsize=None)
def _graphs8() -> tuple[Structure, ...]:
    data = resources.files("hrushovski").joinpath("data/graphs8.g6").read_bytes()
    return tuple(_from_nx(nx.from_graph6_bytes(line)) for line in data.split())


def binary_graphs(max_n: int = 8) -> list[Structure]:
    """Every graph with at most max_n (<= 8) vertices, one per isomorphism type.

    Up to 7 vertices this is the networkx atlas; the 8-vertex graphs ship
    as a graph6 file generated by one-vertex extension of the atlas.
    """
    out = [_from_nx(g) for g in nx.graph_atlas_g() if g.number_of_nodes() <= min(max_n, 7)]
    if max_n >= 8:
        out.extend(_graphs8())
    return out
