"""Minimal pairs, the zero-biminimal gadget, and copy counting."""

from __future__ import annotations

import enum
import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, InternalError
from .predimension import DEFAULT, ClassParams, delta_of, is_in_class
from .structures import Embedding, FreshIds, Structure, induced, iter_embeddings


class Kind(str, enum.Enum):
    MINIMAL = "minimal"
    ZERO_MINIMAL = "zero-minimal"
    BIMINIMAL = "biminimal"
    ZERO_BIMINIMAL = "zero-biminimal"

    @property
    def is_zero(self) -> bool:
        return self in (Kind.ZERO_MINIMAL, Kind.ZERO_BIMINIMAL)

    @property
    def is_bi(self) -> bool:
        return self in (Kind.BIMINIMAL, Kind.ZERO_BIMINIMAL)


@dataclass(frozen=True)
class MinimalPairCertificate:
    base: frozenset[str]
    extension: Structure
    kind: Kind
    relative_delta: Fraction
    base_delta: Fraction
    evidence: tuple[tuple[frozenset[str], Fraction], ...]

    def check(self) -> bool:
        """Re-derive the defining inequalities from the stored evidence."""
        if self.relative_delta > 0:
            return False
        if any(d <= self.base_delta for _, d in self.evidence):
            return False
        new = len(self.extension.vertices - self.base)
        if len(self.evidence) != 2**new - 2:
            return False
        if self.kind.is_zero != (self.relative_delta == 0):
            return False
        return True


@dataclass(frozen=True)
class Refusal:
    reason: str
    witness: frozenset[str] | None = None

    def __bool__(self) -> bool:
        return False


def _touches_new(B: Structure, a: str, base: frozenset[str]) -> bool:
    return any(any(x not in base for x in e) for e in B.incident[a])


def classify_pair(
    A: Iterable[str], B: Structure, params: ClassParams = DEFAULT, *, check_class: bool = True
) -> MinimalPairCertificate | Refusal:
    """Certify (A, B) as a minimal pair of the strongest applicable kind.

    Sweeps every intermediate A ⊊ C ⊊ B.  Returns a :class:`Refusal` naming
    the first failed condition instead of a certificate.
    """
    A = frozenset(A)
    if not A <= B.vertices:
        raise InputError(f"base vertices {sorted(A - B.vertices)} are not in the structure")
    if check_class and not is_in_class(B, params):
        raise InputError("extension is not in the class")
    new = sorted(B.vertices - A)
    if not new:
        return Refusal("the extension adds no vertices")
    dA = delta_of(B, A, params)
    evidence = []
    for k in range(1, len(new)):
        for X in itertools.combinations(new, k):
            C = A | frozenset(X)
            d = delta_of(B, C, params)
            if d <= dA:
                return Refusal("A is not closed in a proper intermediate substructure", C)
            evidence.append((C, d))
    dB = delta_of(B, B.vertices, params)
    if dB > dA:
        return Refusal(f"A is closed in B (delta rises by {dB - dA})")
    rel = dB - dA
    bi = all(_touches_new(B, a, A) for a in A)
    if rel == 0:
        kind = Kind.ZERO_BIMINIMAL if bi else Kind.ZERO_MINIMAL
    else:
        kind = Kind.BIMINIMAL if bi else Kind.MINIMAL
    return MinimalPairCertificate(A, B, kind, rel, dA, tuple(evidence))


def gadget_size(n: int) -> int:
    """Number of new vertices in the zero-biminimal gadget over n base points."""
    if n < 1:
        raise InputError("gadget base must be nonempty")
    return 3 if n == 1 else n


def gadget_edges(base: Sequence[str], new: Sequence[str]) -> list[tuple[str, str, str]]:
    """Edges of the gadget over the ordered base a1..an with new points c1..cm.

    n = 1: {a, ci, cj} for every pair i < j of the three new points.
    n >= 2: {ai, ci, ci+1} for 1 <= i <= n-1, closed up by {an, c1, cn}.
    """
    n = len(base)
    if len(new) != gadget_size(n):
        raise InputError(f"gadget over {n} points needs {gadget_size(n)} new vertices")
    if n == 1:
        a = base[0]
        return [tuple(sorted((a, x, y))) for x, y in itertools.combinations(new, 2)]
    out = [tuple(sorted((base[i], new[i], new[i + 1]))) for i in range(n - 1)]
    out.append(tuple(sorted((base[-1], new[0], new[-1]))))
    return out


def build_zero_biminimal(
    A: Structure,
    *,
    order: Sequence[str] | None = None,
    names: Sequence[str] | None = None,
    verify: bool = True,
) -> Structure:
    """Extend a ternary A by the zero-biminimal gadget; the result is self-checked."""
    if A.arity != 3:
        raise InputError("the gadget construction is for ternary structures")
    if not A.vertices:
        raise InputError("the base must be nonempty")
    if not is_in_class(A):
        raise InputError("the base is not in the class")
    base = list(order) if order is not None else list(A.sorted_vertices)
    if sorted(base) != list(A.sorted_vertices):
        raise InputError("order must list every base vertex once")
    m = gadget_size(len(base))
    if names is None:
        names = [f"c{i}" for i in range(1, m + 1)]
        if A.vertices & set(names):
            fresh = FreshIds()
            names = fresh.take(m)
    names = list(names)
    if A.vertices & set(names) or len(set(names)) != m:
        raise InputError("new vertex names clash with the base")
    C = Structure(3, A.vertices | frozenset(names), A.edges | frozenset(gadget_edges(base, names)))
    if verify:
        cert = classify_pair(A.vertices, C)
        if not cert or cert.kind is not Kind.ZERO_BIMINIMAL:
            raise InternalError(f"gadget over {len(base)} points failed certification: {cert}")
    return C


# ---------------------------------------------------------------------------
# Copies and chi
# ---------------------------------------------------------------------------


def iter_copies_over(A: Iterable[str], B: Structure, N: Structure) -> Iterator[Embedding]:
    A = frozenset(A)
    if not A <= B.vertices or not A <= N.vertices:
        raise InputError("the base must lie in both structures")
    yield from iter_embeddings(B, N, {a: a for a in A})


def enumerate_copies_over(A: Iterable[str], B: Structure, N: Structure) -> list[Embedding]:
    return list(iter_copies_over(A, B, N))


def copy_images(A: Iterable[str], B: Structure, N: Structure) -> list[frozenset[str]]:
    """Distinct images of copies of B over A, sorted."""
    seen = {e.image for e in iter_copies_over(A, B, N)}
    return sorted(seen, key=lambda s: sorted(s))


def max_disjoint_family(A: frozenset[str], images: Sequence[frozenset[str]]) -> list[frozenset[str]]:
    """Largest family of images pairwise meeting exactly in A (exact branch and bound)."""
    parts = [img - A for img in images]
    n = len(parts)
    conflicts = [
        {j for j in range(n) if j != i and parts[i] & parts[j]} for i in range(n)
    ]
    best: list[int] = []

    def rec(cands: list[int], chosen: list[int]) -> None:
        nonlocal best
        if len(chosen) + len(cands) <= len(best):
            return
        if not cands:
            best = list(chosen)
            return
        i = cands[0]
        rec([j for j in cands[1:] if j not in conflicts[i]], chosen + [i])
        rec(cands[1:], chosen)

    rec(list(range(n)), [])
    return [images[i] for i in best]


def chi(A: Iterable[str], B: Structure, N: Structure) -> int:
    A = frozenset(A)
    return len(max_disjoint_family(A, copy_images(A, B, N)))


def minimal_extensions(
    A: Iterable[str], N: Structure, params: ClassParams = DEFAULT, max_new: int = 5
) -> list[MinimalPairCertificate]:
    """All minimal pairs (A, A ∪ X) inside N with |X| <= max_new, by subset sweep."""
    A = frozenset(A)
    rest = sorted(N.vertices - A)
    found = []
    for k in range(1, min(max_new, len(rest)) + 1):
        for X in itertools.combinations(rest, k):
            cert = classify_pair(A, induced(N, A | frozenset(X)), params, check_class=False)
            if cert:
                found.append(cert)
    return found
