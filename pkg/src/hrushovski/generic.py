"""Lazy finite approximations to the generic model.

An :class:`Approximation` is a chain A0 ≤* A1 ≤* ... of finite structures.
Each realised task extends the current structure by a free join over a
closed base, so the previous stage stays closed; every append re-checks
this.  The task ledger replays bit-exactly from the seed.
"""

from __future__ import annotations

import itertools
import json
import threading
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .amalgam import free_join
from .errors import InputError, InternalError, NotClosedError, SnapshotError
from .minimal_pairs import Kind, classify_pair, gadget_edges, gadget_size
from .predimension import DEFAULT, ClassParams, is_closed, is_in_class, violating_extension
from .structures import (
    Embedding,
    FreshIds,
    Structure,
    from_dict,
    induced,
    iter_embeddings,
    reject_reserved,
    rename,
    to_dict,
)

SNAPSHOT_FORMAT = "hrushovski-approximation/1"


@dataclass(frozen=True)
class Task:
    kind: str  # universal | homogeneous | code
    payload: dict
    new_vertices: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "payload": self.payload, "new_vertices": list(self.new_vertices)}


@dataclass(frozen=True)
class CodeHandle:
    vertex: str
    k: int
    scope: frozenset[str]
    family: frozenset[frozenset[str]]
    gadgets: dict[frozenset[str], tuple[str, ...]] = field(hash=False, compare=False)


def _family_key(family: Iterable[Iterable[str]]) -> list[list[str]]:
    return sorted(sorted(Y) for Y in family)


class Approximation:
    """Single-writer chain of closed extensions; see the module docstring."""

    def __init__(self, seed: Structure, params: ClassParams = DEFAULT, *, fresh_counter: int = 0):
        params.check(seed)
        reject_reserved(seed)
        verdict = is_in_class(seed, params)
        if not verdict:
            raise InputError(f"seed is not in the class: violating set {sorted(verdict.witness)}")
        self.params = params
        self.chain: list[Structure] = [seed]
        self.ledger: list[Task] = []
        self.fresh = FreshIds(fresh_counter)
        self._lock = threading.RLock()

    @property
    def current(self) -> Structure:
        return self.chain[-1]

    @property
    def arity(self) -> int:
        return self.chain[0].arity

    # -- extension machinery -------------------------------------------------

    def _append(self, new: Structure, task: Task) -> None:
        old = self.current
        # old ≤* new reduces to the new vertices over old, which the minimiser handles per component
        X = violating_extension(new, old.vertices, self.params)
        if X is not None:
            raise InternalError(f"{task.kind} step broke closedness: {sorted(X)}")
        self.chain.append(new)
        self.ledger.append(task)

    def _realize_universal(self, A: Structure, payload: dict) -> Embedding:
        names = self.fresh.take(len(A.vertices))
        mapping = dict(zip(A.sorted_vertices, names))
        copy = rename(A, mapping)
        self._append(free_join(self.current, copy, ()), Task("universal", payload, tuple(names)))
        return Embedding.from_map(A, self.current, mapping)

    def _realize_homogeneous(self, B: Structure, base_map: Mapping[str, str], payload: dict) -> Embedding:
        new = [v for v in B.sorted_vertices if v not in base_map]
        names = self.fresh.take(len(new))
        mapping = dict(base_map)
        mapping.update(zip(new, names))
        copy = rename_into(B, mapping)
        joined = free_join(self.current, copy, frozenset(base_map.values()))
        self._append(joined, Task("homogeneous", payload, tuple(names)))
        return Embedding.from_map(B, self.current, mapping)

    def _realize_code(self, S: frozenset[str], k: int, X: list[frozenset[str]], payload: dict) -> CodeHandle:
        v = self.fresh()
        names = [v]
        own = self.fresh.take(3)
        names += own
        edges = set(gadget_edges([v], own))
        gadgets = {}
        m = gadget_size(k + 1)
        for Y in X:
            cs = self.fresh.take(m)
            names += cs
            edges.update(gadget_edges(sorted(Y) + [v], cs))
            gadgets[Y] = tuple(cs)
        cur = self.current
        new = Structure(3, cur.vertices | frozenset(names), cur.edges | frozenset(edges))
        self._append(new, Task("code", payload, tuple(names)))
        handle = CodeHandle(v, k, S, frozenset(X), gadgets)
        got = self.decode_code(v, S, k)
        if got != handle.family:
            extra = sorted(map(sorted, got - handle.family))
            missing = sorted(map(sorted, handle.family - got))
            raise InternalError(f"code {v} decodes wrongly: extra {extra}, missing {missing}")
        return handle

    # -- tasks ---------------------------------------------------------------

    def ensure_universal(self, A: Structure, *, fresh: bool = False) -> Embedding:
        """Closed embedding of A; reuses the least existing closed copy unless ``fresh``."""
        self.params.check(A)
        verdict = is_in_class(A, self.params)
        if not verdict:
            raise InputError(f"structure is not in the class: violating set {sorted(verdict.witness)}")
        with self._lock:
            if not A.vertices:
                return Embedding.from_map(A, self.current, {})
            if not fresh:
                found = self._closed_copy(A, {})
                if found is not None:
                    return found
            return self._realize_universal(A, {"structure": to_dict(A), "fresh": fresh})

    def ensure_homogeneous(self, B: Structure, base_map: Mapping[str, str]) -> Embedding:
        """Closed copy of B over the closed image of its base, realised by a free join if absent.

        ``base_map`` sends the base vertices of B to their images in the
        current structure.
        """
        self.params.check(B)
        base_map = dict(base_map)
        A_in_B = frozenset(base_map)
        A_image = frozenset(base_map.values())
        if not A_in_B <= B.vertices:
            raise InputError("base map mentions vertices outside B")
        if len(A_image) != len(base_map):
            raise InputError("base map is not injective")
        if not A_image <= self.current.vertices:
            raise InputError("base image is not in the current structure")
        if not is_closed(A_in_B, B, self.params):
            raise InputError("the base is not closed in B")
        A_struct = induced(B, A_in_B)
        mapped = {tuple(sorted(base_map[x] for x in e)) for e in A_struct.edges}
        if mapped != set(induced(self.current, A_image).edges):
            raise InputError("base map is not an isomorphism onto its image")
        with self._lock:
            X = violating_extension(self.current, A_image, self.params)
            if X is not None:
                raise NotClosedError("base image is not closed in the current structure", A_image | X)
            found = self._closed_copy(B, base_map)
            if found is not None:
                return found
            payload = {"extension": to_dict(B), "base_map": dict(sorted(base_map.items()))}
            return self._realize_homogeneous(B, base_map, payload)

    def _closed_copy(self, B: Structure, fix: Mapping[str, str]) -> Embedding | None:
        checked = set()
        for emb in iter_embeddings(B, self.current, fix, lexicographic=True):
            if emb.image in checked:
                continue
            checked.add(emb.image)
            if violating_extension(self.current, emb.image, self.params) is None:
                return emb
        return None

    def realize_code(self, S: Iterable[str], k: int, X: Iterable[Iterable[str]]) -> CodeHandle:
        """Add a code vertex v whose gadgets pick out exactly X among the k-subsets of S."""
        if self.arity != 3:
            raise InputError("codes are realised in the ternary case")
        S = frozenset(S)
        if not S <= self.current.vertices:
            raise InputError(f"scope vertices {sorted(S - self.current.vertices)} are not present")
        if k < 1:
            raise InputError("k must be at least 1")
        fam = sorted({frozenset(Y) for Y in X}, key=sorted)
        for Y in fam:
            if len(Y) != k or not Y <= S:
                raise InputError(f"family member {sorted(Y)} is not a {k}-subset of the scope")
        payload = {"scope": sorted(S), "k": k, "family": _family_key(fam)}
        with self._lock:
            return self._realize_code(S, k, fam, payload)

    def decode_code(self, v: str, S: Iterable[str], k: int) -> frozenset[frozenset[str]]:
        """k-subsets Y of S such that Y ∪ {v} has a zero-biminimal extension of gadget size.

        Extension points are drawn from outside S ∪ {v}; candidates are grown
        from the edges through v, since a biminimal extension meets v and is
        connected through its own edges.
        """
        N = self.current
        S = frozenset(S)
        if v not in N.vertices:
            raise InputError(f"unknown vertex {v}")
        m = gadget_size(k + 1)
        blocked = S | {v}
        inc = N.incident
        seen: set[frozenset[str]] = set()
        frontier = []
        for e in inc[v]:
            Z0 = frozenset(x for x in e if x not in blocked)
            if Z0 and len(Z0) <= m and Z0 not in seen:
                seen.add(Z0)
                frontier.append(Z0)
        full = []
        while frontier:
            nxt = []
            for Z in frontier:
                if len(Z) == m:
                    full.append(Z)
                    continue
                for z in sorted(Z):
                    for e in inc[z]:
                        add = frozenset(x for x in e if x not in blocked and x not in Z)
                        if add and len(Z) + len(add) <= m:
                            Z2 = Z | add
                            if Z2 not in seen:
                                seen.add(Z2)
                                nxt.append(Z2)
            frontier = nxt
        out = set()
        for Z in sorted(full, key=sorted):
            allowed = blocked | Z
            touch = set()
            for z in Z:
                for e in inc[z]:
                    if allowed.issuperset(e):
                        touch.update(x for x in e if x in S)
            for Y in itertools.combinations(sorted(touch), k):
                Y = frozenset(Y)
                if Y in out:
                    continue
                base = Y | {v}
                cert = classify_pair(base, induced(N, base | Z), self.params, check_class=False)
                if cert and cert.kind is Kind.ZERO_BIMINIMAL:
                    out.add(Y)
        return frozenset(out)

    # -- auditing ------------------------------------------------------------

    def audit(self) -> list[str]:
        """Re-verify the chain; returns a list of problems (empty when sound)."""
        problems = []
        if not is_in_class(self.chain[0], self.params):
            problems.append("seed is not in the class")
        for i in range(len(self.chain) - 1):
            a, b = self.chain[i], self.chain[i + 1]
            if not a.vertices <= b.vertices or not a.edges <= b.edges:
                problems.append(f"step {i}: not an extension")
                continue
            if induced(b, a.vertices) != a:
                problems.append(f"step {i}: old part not induced")
                continue
            X = violating_extension(b, a.vertices, self.params)
            if X is not None:
                problems.append(f"step {i}: stage {i} not closed in stage {i + 1}, witness {sorted(X)}")
        return problems


def rename_into(B: Structure, mapping: Mapping[str, str]) -> Structure:
    """Total renaming of B by ``mapping``."""
    if set(mapping) != set(B.vertices):
        raise InputError("renaming must cover every vertex")
    return rename(B, mapping)


def new_approximation(seed: Structure, params: ClassParams = DEFAULT) -> Approximation:
    return Approximation(seed, params)


# ---------------------------------------------------------------------------
# Snapshots
# ---------------------------------------------------------------------------


def snapshot(approx: Approximation) -> str:
    data = {
        "format": SNAPSHOT_FORMAT,
        "alpha": str(approx.params.alpha),
        "chain": [to_dict(S) for S in approx.chain],
        "ledger": [t.to_dict() for t in approx.ledger],
        "fresh_counter": approx.fresh.counter,
    }
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


def _replay_task(approx: Approximation, task: dict) -> None:
    kind = task["kind"]
    payload = task["payload"]
    if kind == "universal":
        A = from_dict(payload["structure"])
        approx._realize_universal(A, payload)
    elif kind == "homogeneous":
        B = from_dict(payload["extension"])
        approx._realize_homogeneous(B, dict(payload["base_map"]), payload)
    elif kind == "code":
        fam = [frozenset(Y) for Y in payload["family"]]
        approx._realize_code(frozenset(payload["scope"]), int(payload["k"]), fam, payload)
    else:
        raise SnapshotError(f"unknown task kind {kind!r}")


def replay(text: str) -> Approximation:
    """Rebuild an approximation by re-running its ledger from the seed and compare."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"snapshot is not valid JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(data, dict) or data.get("format") != SNAPSHOT_FORMAT:
        raise SnapshotError("not an approximation snapshot")
    try:
        params = ClassParams(Fraction(data["alpha"]))
        chain = [from_dict(S) for S in data["chain"]]
        ledger = data["ledger"]
        counter = int(data["fresh_counter"])
    except (KeyError, TypeError, ValueError, InputError) as exc:
        raise SnapshotError(f"malformed snapshot field: {exc}") from exc
    if not chain:
        raise SnapshotError("snapshot has an empty chain")
    approx = Approximation(chain[0], params)
    for i, task in enumerate(ledger):
        try:
            _replay_task(approx, task)
        except (KeyError, TypeError, InputError) as exc:
            raise SnapshotError(f"ledger entry {i} cannot be replayed: {exc}") from exc
        if list(approx.ledger[-1].new_vertices) != list(task.get("new_vertices", [])):
            raise SnapshotError(f"ledger entry {i} replays to different vertex ids")
    if approx.chain != chain:
        raise SnapshotError("replayed chain differs from the recorded chain")
    if approx.fresh.counter != counter:
        raise SnapshotError("replayed id counter differs from the recorded one")
    return approx
