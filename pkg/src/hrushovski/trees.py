"""Canonical encodings of trees (AHU via centres) and a cumulative tree catalog."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

Adjacency = Mapping[str, Sequence[str]] | Sequence[Sequence[int]]


def rooted_code(adj, root, parent=None) -> str:
    """AHU encoding of the tree hanging from ``root``."""
    stack = [(root, parent, False)]
    codes: dict = {}
    while stack:
        v, par, done = stack.pop()
        if done:
            kids = sorted(codes.pop(c) for c in adj[v] if c != par)
            codes[v] = "(" + "".join(kids) + ")"
        else:
            stack.append((v, par, True))
            for c in adj[v]:
                if c != par:
                    stack.append((c, v, False))
    return codes[root]


def centres(adj, nodes) -> list:
    nodes = list(nodes)
    if len(nodes) <= 2:
        return nodes
    deg = {v: len(adj[v]) for v in nodes}
    leaves = [v for v in nodes if deg[v] <= 1]
    remaining = len(nodes)
    while remaining > 2:
        remaining -= len(leaves)
        nxt = []
        for v in leaves:
            for u in adj[v]:
                deg[u] -= 1
                if deg[u] == 1:
                    nxt.append(u)
            deg[v] = 0
        leaves = nxt
    return leaves


def tree_code(adj, nodes) -> str:
    """Canonical string of an unrooted tree: least AHU code over its centres."""
    return min(rooted_code(adj, c) for c in centres(adj, nodes))


def code_size(code: str) -> int:
    return code.count("(")


def code_to_adjacency(code: str) -> list[list[int]]:
    """Rebuild a tree on vertices 0..n-1 from an AHU code (vertex 0 is the root)."""
    adj: list[list[int]] = []
    stack: list[int] = []
    for ch in code:
        if ch == "(":
            v = len(adj)
            adj.append([])
            if stack:
                adj[stack[-1]].append(v)
                adj[v].append(stack[-1])
            stack.append(v)
        else:
            stack.pop()
    return adj


@lru_cache(maxsize=None)
def trees_of_size(n: int) -> tuple[str, ...]:
    """Canonical codes of all trees with n vertices, sorted."""
    if n <= 0:
        return ()
    if n == 1:
        return ("()",)
    out = set()
    for code in trees_of_size(n - 1):
        adj = code_to_adjacency(code)
        for v in range(len(adj)):
            grown = [list(a) for a in adj] + [[v]]
            grown[v].append(len(adj))
            out.add(tree_code(grown, range(len(grown))))
    return tuple(sorted(out))


@dataclass
class TreeCatalog:
    """Stage s lists every tree type with at most s vertices; stages are cumulative."""

    _stages: dict[int, tuple[str, ...]] = field(default_factory=dict)

    def stage(self, s: int) -> tuple[str, ...]:
        if s not in self._stages:
            self._stages[s] = tuple(c for n in range(1, s + 1) for c in trees_of_size(n))
        return self._stages[s]
