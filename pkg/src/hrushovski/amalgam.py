"""Free joins and the full-amalgamation check."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import InputError
from .predimension import DEFAULT, ClassParams, is_closed, is_in_class
from .structures import Structure, induced


def free_join(N1: Structure, N2: Structure, N0: Iterable[str] = ()) -> Structure:
    """Union of N1 and N2 over their common part N0, adding no edges across."""
    N0 = frozenset(N0)
    if N1.arity != N2.arity:
        raise InputError("arity mismatch")
    common = N1.vertices & N2.vertices
    if common != N0:
        raise InputError(
            f"shared vertices {sorted(common)} differ from the declared base {sorted(N0)}"
        )
    if induced(N1, N0).edges != induced(N2, N0).edges:
        raise InputError("the two sides induce different structures on the base")
    if N0 == N2.vertices:
        return N1
    if N0 == N1.vertices:
        return N2
    return Structure(N1.arity, N1.vertices | N2.vertices, N1.edges | N2.edges)


@dataclass
class AmalgamationCase:
    index: int
    status: str  # "pass", "fail" or "skipped"
    note: str = ""
    witness: frozenset[str] | None = None


@dataclass
class AmalgamationReport:
    cases: list[AmalgamationCase] = field(default_factory=list)

    @property
    def failures(self) -> list[AmalgamationCase]:
        return [c for c in self.cases if c.status == "fail"]

    @property
    def passed(self) -> int:
        return sum(c.status == "pass" for c in self.cases)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_full_amalgamation(
    sample: Sequence[tuple[Structure, Structure, Iterable[str]]], params: ClassParams = DEFAULT
) -> AmalgamationReport:
    """Check, per triple, that the free join stays in the class and keeps N2 closed.

    Triples whose hypotheses fail (N0 not closed in N1, or a side outside the
    class) are skipped with a note rather than counted.
    """
    report = AmalgamationReport()
    for i, (N1, N2, N0) in enumerate(sample):
        N0 = frozenset(N0)
        try:
            if not is_in_class(N1, params) or not is_in_class(N2, params):
                report.cases.append(AmalgamationCase(i, "skipped", "a side is not in the class"))
                continue
            if not is_closed(N0, N1, params, check_class=False):
                report.cases.append(AmalgamationCase(i, "skipped", "base not closed in N1"))
                continue
            N = free_join(N1, N2, N0)
        except InputError as exc:
            report.cases.append(AmalgamationCase(i, "skipped", str(exc)))
            continue
        member = is_in_class(N, params)
        if not member:
            report.cases.append(AmalgamationCase(i, "fail", "free join left the class", member.witness))
            continue
        closed = is_closed(N2.vertices, N, params, check_class=False)
        if not closed:
            report.cases.append(AmalgamationCase(i, "fail", "N2 not closed in the free join", closed.witness))
            continue
        report.cases.append(AmalgamationCase(i, "pass"))
    return report
