"""Configurations over a base, the ratio order, and constructive witnesses.

A configuration is a closed copy of A carrying p disjoint copies of B and q
disjoint copies of C, where B and C are non-isomorphic zero-minimal
extensions of A.  Two configurations compare through the cross products of
their copy counts, which are always recomputed from the host structure.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from .amalgam import free_join
from .errors import InputError, InternalError
from .generic import Approximation, CodeHandle
from .minimal_pairs import (
    MinimalPairCertificate,
    classify_pair,
    copy_images,
    max_disjoint_family,
)
from .structures import Structure, is_isomorphic, induced, rename

Family = frozenset[frozenset[str]]


@dataclass(frozen=True)
class ABCTriple:
    A: Structure
    B: Structure
    C: Structure
    cert_B: MinimalPairCertificate
    cert_C: MinimalPairCertificate

    def over(self, ext: Structure, abar: tuple[str, ...]) -> Structure:
        """ext with its base renamed onto abar and its new points given private ids."""
        mapping = dict(zip(self.A.sorted_vertices, abar))
        for v in ext.sorted_vertices:
            if v not in mapping:
                mapping[v] = f"~{v}"
        return rename(ext, mapping)


def canonical_triple() -> ABCTriple:
    """A = one point a; B = the three-point gadget; C = the four-cycle gadget around a."""
    A = Structure.build(3, ["a"])
    B = Structure.build(3, ["a"], [("a", "b1", "b2"), ("a", "b1", "b3"), ("a", "b2", "b3")])
    C = Structure.build(
        3, ["a"], [("a", "c1", "c2"), ("a", "c2", "c3"), ("a", "c3", "c4"), ("a", "c1", "c4")]
    )
    certs = []
    for ext in (B, C):
        cert = classify_pair(A.vertices, ext)
        if not cert or not cert.kind.is_zero:
            raise InternalError(f"triple member failed certification: {cert}")
        certs.append(cert)
    if is_isomorphic(B, C):
        raise InternalError("B and C must be non-isomorphic")
    return ABCTriple(A, B, C, certs[0], certs[1])


@dataclass
class ConfigurationWitness:
    triple: ABCTriple
    abar: tuple[str, ...]
    p: int
    q: int
    b_copies: list[frozenset[str]]
    c_copies: list[frozenset[str]]
    host: Approximation = field(repr=False)

    @property
    def base(self) -> frozenset[str]:
        return frozenset(self.abar)

    def copies(self, which: str) -> list[frozenset[str]]:
        """Copy images over abar recomputed from the current host."""
        ext = self.triple.B if which == "B" else self.triple.C
        return copy_images(self.base, self.triple.over(ext, self.abar), self.host.current)

    def chi(self) -> tuple[int, int]:
        b = max_disjoint_family(self.base, self.copies("B"))
        c = max_disjoint_family(self.base, self.copies("C"))
        return len(b), len(c)

    def b_points(self) -> frozenset[str]:
        return frozenset().union(*self.copies("B")) - self.base

    def c_points(self) -> frozenset[str]:
        return frozenset().union(*self.copies("C")) - self.base


def configuration_structure(triple: ABCTriple, p: int, q: int) -> Structure:
    """A with p copies of B and q copies of C, freely amalgamated over A."""
    A = triple.A.vertices
    D = triple.A
    for tag, ext, count in (("B", triple.B, p), ("C", triple.C, q)):
        for i in range(1, count + 1):
            mapping = {v: f"{tag}{i}.{v}" for v in ext.vertices if v not in A}
            D = free_join(D, rename(ext, mapping), A)
    return D


def setup_conditions(w: ConfigurationWitness) -> dict[str, bool]:
    """Conditions i, ii, iii and v on the configuration, evaluated in the host."""
    host = w.host.current
    bs, cs = w.copies("B"), w.copies("C")
    base = w.base

    def pairwise_disjoint(imgs):
        return all((x & y) == base for i, x in enumerate(imgs) for y in imgs[i + 1 :])

    return {
        "i": is_isomorphic(induced(host, base), w.triple.A),
        "ii": bool(bs) and bool(cs),
        "iii": pairwise_disjoint(bs) and pairwise_disjoint(cs),
        "v": all((x & y) == base for x in bs for y in cs),
    }


def build_configuration(triple: ABCTriple, p: int, q: int, approx: Approximation) -> ConfigurationWitness:
    """Embed a fresh configuration with copy counts (p, q) closedly into the host."""
    if p < 1 or q < 1:
        raise InputError("a configuration needs at least one copy of each extension")
    D = configuration_structure(triple, p, q)
    emb = approx.ensure_universal(D, fresh=True)
    abar = tuple(emb(v) for v in triple.A.sorted_vertices)
    groups: dict[str, list[frozenset[str]]] = {"B": [], "C": []}
    for tag, count in (("B", p), ("C", q)):
        for i in range(1, count + 1):
            pts = frozenset(emb(v) for v in D.vertices if v.startswith(f"{tag}{i}."))
            groups[tag].append(pts | frozenset(abar))
    w = ConfigurationWitness(triple, abar, p, q, groups["B"], groups["C"], approx)
    if w.chi() != (p, q):
        raise InternalError(f"configuration built for {(p, q)} counts {w.chi()}")
    failed = [k for k, ok in setup_conditions(w).items() if not ok]
    if failed:
        raise InternalError(f"configuration fails setup conditions {failed}")
    return w


def eval_equiv(w1: ConfigurationWitness, w2: ConfigurationWitness) -> bool:
    p1, q1 = w1.chi()
    p2, q2 = w2.chi()
    return p1 * q2 == p2 * q1


def eval_order(w1: ConfigurationWitness, w2: ConfigurationWitness) -> bool:
    p1, q1 = w1.chi()
    p2, q2 = w2.chi()
    return p1 * q2 < p2 * q1


# ---------------------------------------------------------------------------
# Set-theoretic coding helpers
# ---------------------------------------------------------------------------


def unordered_product(A: Iterable[str], B: Iterable[str]) -> Family:
    A, B = frozenset(A), frozenset(B)
    if not A or not B:
        raise InputError("both factors must be nonempty")
    if A & B:
        raise InputError("factors must be disjoint")
    return frozenset(frozenset((x, y)) for x in A for y in B)


def _support(F: Iterable[frozenset[str]]) -> frozenset[str]:
    return frozenset().union(*F) if F else frozenset()


def _matching(P: Family, Q: Family, n: int) -> Family:
    ps = sorted(P, key=sorted)
    qs = sorted(Q, key=sorted)
    return frozenset(ps[i] | qs[i] for i in range(n))


def _check_split(P: Family, Q: Family) -> None:
    if _support(P) & _support(Q):
        raise InputError("families share support points; four-sets would not split uniquely")
    for fam in (P, Q):
        for x in fam:
            if len(x) != 2:
                raise InputError("families must consist of 2-subsets")


def encode_bijection_witness(P: Family, Q: Family) -> Family:
    """Pair the members of P and Q in sorted order as four-sets."""
    _check_split(P, Q)
    if len(P) != len(Q):
        raise InputError(f"no bijection between families of sizes {len(P)} and {len(Q)}")
    return _matching(P, Q, len(P))


def encode_injection_witness(P: Family, Q: Family) -> Family:
    _check_split(P, Q)
    if len(P) > len(Q):
        raise InputError(f"no injection from a family of size {len(P)} into one of size {len(Q)}")
    return _matching(P, Q, len(P))


def _decompose(W: Family, P: Family, Q: Family) -> list[tuple[frozenset[str], frozenset[str]]] | None:
    _check_split(P, Q)
    sp, sq = _support(P), _support(Q)
    pairs = []
    for w in W:
        if len(w) != 4 or not w <= sp | sq:
            return None
        x, y = w & sp, w & sq
        if x not in P or y not in Q:
            return None
        pairs.append((x, y))
    return pairs


def _relation_profile(W: Family, P: Family, Q: Family):
    pairs = _decompose(W, P, Q)
    if pairs is None:
        return None
    left: dict[frozenset[str], set] = {}
    right: dict[frozenset[str], set] = {}
    for x, y in pairs:
        left.setdefault(x, set()).add(y)
        right.setdefault(y, set()).add(x)
    functional = all(len(v) == 1 for v in left.values())
    injective = all(len(v) == 1 for v in right.values())
    total = set(left) == set(P)
    onto = set(right) == set(Q)
    return functional, injective, total, onto


def check_bijection_witness(W: Family, P: Family, Q: Family) -> bool:
    prof = _relation_profile(W, P, Q)
    return prof is not None and all(prof)


def check_injection_witness(W: Family, P: Family, Q: Family, *, strict: bool = True) -> bool:
    """W is a total injective function from P to Q; with ``strict`` also not onto."""
    prof = _relation_profile(W, P, Q)
    if prof is None:
        return False
    functional, injective, total, onto = prof
    ok = functional and injective and total
    if strict:
        ok = ok and len(P) < len(Q) and not onto
    return ok


# ---------------------------------------------------------------------------
# Constructive witnesses for the equivalence and order formulas
# ---------------------------------------------------------------------------


@dataclass
class WitnessBundle:
    formula: str  # "E" or "O"
    x: ConfigurationWitness
    y: ConfigurationWitness
    z: ConfigurationWitness
    scope: frozenset[str]
    codes: dict[str, CodeHandle]
    conjuncts: list[tuple[str, bool]]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.conjuncts)

    def sizes(self) -> dict[str, int]:
        return {name: len(h.family) for name, h in self.codes.items()}


def _basis(copies: list[frozenset[str]], base: frozenset[str]) -> frozenset[str]:
    return frozenset(min(img - base) for img in copies)


def _flat(F: Family) -> frozenset[str]:
    return frozenset(x for Y in F for x in Y)


def _is_basis(points: frozenset[str], F: Family, copies: list[frozenset[str]], base: frozenset[str]) -> bool:
    if any(len(Y) != 1 for Y in F):
        return False
    return len(points) == len(copies) and all(len(points & (img - base)) == 1 for img in copies)


def _construct(formula: str, w1: ConfigurationWitness, w2: ConfigurationWitness, approx: Approximation) -> WitnessBundle:
    if w1.host is not approx or w2.host is not approx:
        raise InputError("both configurations must live in the given approximation")
    p2, q2 = w2.chi()
    z = build_configuration(w1.triple, p2, q2, approx)
    bx, cx = w1.copies("B"), w1.copies("C")
    bz, cz = z.copies("B"), z.copies("C")
    X_x, Y_x = _basis(bx, w1.base), _basis(cx, w1.base)
    X_z, Y_z = _basis(bz, z.base), _basis(cz, z.base)
    S = w1.b_points() | w1.c_points() | z.b_points() | z.c_points()
    codes = {}
    for name, pts in (("u1", X_x), ("u2", Y_x), ("u3", X_z), ("u4", Y_z)):
        codes[name] = approx.realize_code(S, 1, [[x] for x in sorted(pts)])
    codes["v1"] = approx.realize_code(S, 2, unordered_product(X_x, Y_z))
    codes["v2"] = approx.realize_code(S, 2, unordered_product(Y_x, X_z))
    P = approx.decode_code(codes["v1"].vertex, S, 2)
    Q = approx.decode_code(codes["v2"].vertex, S, 2)
    if formula == "E":
        W = encode_bijection_witness(P, Q)
    else:
        W = encode_injection_witness(P, Q)
    codes["w"] = approx.realize_code(S, 4, W)
    bundle = WitnessBundle(formula, w1, w2, z, S, codes, verify_conjuncts(formula, w1, w2, z, S, codes, approx))
    bad = [name for name, ok in bundle.conjuncts if not ok]
    if bad:
        raise InternalError(f"{formula} witness fails conjuncts {bad}")
    return bundle


def verify_conjuncts(
    formula: str,
    x: ConfigurationWitness,
    y: ConfigurationWitness,
    z: ConfigurationWitness,
    S: frozenset[str],
    codes: dict[str, CodeHandle],
    approx: Approximation,
) -> list[tuple[str, bool]]:
    """Evaluate every conjunct of the formula's matrix in the current host."""
    dec = {name: approx.decode_code(h.vertex, S, h.k) for name, h in codes.items()}
    out = []
    in_setup = all(all(setup_conditions(w).values()) for w in (x, y, z))
    same_counts = y.chi() == z.chi()
    x_copies = x.copies("B") + x.copies("C")
    z_copies = z.copies("B") + z.copies("C")
    separated = all(not (a & b) for a in x_copies for b in z_copies)
    out.append(("sep: x, y, z satisfy the setup conditions", in_setup))
    out.append(("sep: y and z have equal copy counts", same_counts))
    out.append(("sep: copies over z avoid copies over x", separated))
    bases = {
        "u1": ("B-basis for x", x, "B"),
        "u2": ("C-basis for x", x, "C"),
        "u3": ("B-basis for z", z, "B"),
        "u4": ("C-basis for z", z, "C"),
    }
    flat = {}
    for name, (label, w, which) in bases.items():
        flat[name] = _flat(dec[name])
        out.append((f"{name} codes a {label}", _is_basis(flat[name], dec[name], w.copies(which), w.base)))
    for name, (a, b) in (("v1", ("u1", "u4")), ("v2", ("u2", "u3"))):
        try:
            ok = dec[name] == unordered_product(flat[a], flat[b])
        except InputError:
            ok = False
        out.append((f"{name} codes the unordered product of {a} and {b}", ok))
    try:
        if formula == "E":
            ok = check_bijection_witness(dec["w"], dec["v1"], dec["v2"])
            out.append(("w codes a bijection between v1 and v2", ok))
        else:
            ok = check_injection_witness(dec["w"], dec["v1"], dec["v2"], strict=True)
            out.append(("w codes an injection but not a bijection from v1 to v2", ok))
    except InputError:
        out.append(("w decomposes over v1 and v2", False))
    return out


def construct_E_witness(w1: ConfigurationWitness, w2: ConfigurationWitness, approx: Approximation) -> WitnessBundle:
    if not eval_equiv(w1, w2):
        raise InputError("configurations are not equivalent")
    return _construct("E", w1, w2, approx)


def construct_O_witness(w1: ConfigurationWitness, w2: ConfigurationWitness, approx: Approximation) -> WitnessBundle:
    if not eval_order(w1, w2):
        raise InputError("first configuration does not precede the second")
    return _construct("O", w1, w2, approx)
