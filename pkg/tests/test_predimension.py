from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hrushovski.corpus import random_class_structure
from hrushovski.errors import InputError
from hrushovski.predimension import (
    ClassParams,
    closure,
    closure_steps,
    delta,
    delta_of,
    delta_rel,
    is_closed,
    is_in_class,
    min_relative_delta,
    parse_alpha,
    violating_extension,
)
from hrushovski.structures import Structure, induced
from hrushovski.verify import brute_force_closure

from conftest import class_structures


def brute_in_class(S: Structure, params: ClassParams = ClassParams()) -> bool:
    verts = S.sorted_vertices
    return all(
        delta_of(S, frozenset(c), params) > 0
        for k in range(1, len(verts) + 1)
        for c in itertools.combinations(verts, k)
    )


def brute_is_closed(A, B: Structure, params: ClassParams = ClassParams()) -> bool:
    A = frozenset(A)
    rest = sorted(B.vertices - A)
    dA = delta_of(B, A, params)
    return all(
        delta_of(B, A | frozenset(X), params) > dA
        for k in range(1, len(rest) + 1)
        for X in itertools.combinations(rest, k)
    )


def test_delta_empty():
    assert delta(Structure.empty(3)) == 0


def test_delta_gadget_is_one(gadget1):
    assert delta(gadget1) == 1
    assert isinstance(delta(gadget1), Fraction)


def test_delta_forest_counts_components():
    F = Structure.build(2, "abcdefg", [("a", "b"), ("b", "c"), ("d", "e"), ("e", "f")])
    assert delta(F) == 3


def test_delta_with_alpha():
    S = Structure.build(2, "ab", [("a", "b")])
    assert delta(S, ClassParams(Fraction(1, 2))) == Fraction(3, 2)


def test_delta_rel_trivial(gadget1):
    assert delta_rel(gadget1, gadget1.vertices) == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_delta_rel_gadget_zero(n):
    from hrushovski.minimal_pairs import build_zero_biminimal

    A = Structure.build(3, [f"a{i}" for i in range(n)])
    C = build_zero_biminimal(A)
    assert delta_rel(C, A.vertices) == 0


def test_delta_rel_two_edges_to_base():
    B = Structure.build(2, "abx", [("a", "x"), ("b", "x")])
    assert delta_rel(B, {"a", "b"}) == -1


def test_class_rejects_triangle(cycle3):
    v = is_in_class(cycle3)
    assert not v
    assert v.witness == cycle3.vertices


def test_class_accepts_gadget_and_empty(gadget1):
    assert is_in_class(gadget1)
    assert is_in_class(Structure.empty(3))


def test_alpha_parsing():
    assert parse_alpha("1/2") == Fraction(1, 2)
    for bad in ("0", "3/2", "x", "1/0"):
        with pytest.raises(InputError):
            parse_alpha(bad)


def test_small_alpha_admits_triangle(cycle3):
    assert is_in_class(cycle3, ClassParams(Fraction(1, 2)))


def test_closed_full_set(gadget1):
    assert is_closed(gadget1.vertices, gadget1)


def test_singleton_not_closed_in_gadget(gadget1):
    v = is_closed({"a"}, gadget1)
    assert not v
    assert v.witness == gadget1.vertices


def test_binary_disconnected_base_closed():
    B = Structure.build(2, "abcd", [("a", "b"), ("c", "d")])
    assert is_closed({"a", "b"}, B)
    assert not is_closed({"a"}, B)


def test_is_closed_requires_subset(gadget1):
    with pytest.raises(InputError):
        is_closed({"zz"}, gadget1)


def test_closure_examples(gadget1, path3):
    assert closure({"a"}, gadget1) == gadget1.vertices
    assert closure({"a"}, path3) == {"a", "b", "c"}
    assert closure(gadget1.vertices, gadget1) == gadget1.vertices


def test_closure_steps_add_minimal_violators(gadget1):
    steps = closure_steps({"a"}, gadget1)
    assert steps == [(frozenset({"a"}), frozenset({"c1", "c2", "c3"}))]


def test_empty_base_closed_iff_in_class(gadget1, cycle3):
    assert is_closed(set(), gadget1)
    assert violating_extension(cycle3, set()) is not None


def test_min_relative_delta_matches_brute_force():
    rng = random.Random(3)
    for _ in range(40):
        N = random_class_structure(rng, 3, 7, 6)
        base = frozenset(rng.sample(N.sorted_vertices, 2))
        got, _ = min_relative_delta(N, base, ClassParams())
        rest = sorted(N.vertices - base)
        want = min(
            delta_of(N, base | frozenset(X)) - delta_of(N, base)
            for k in range(1, len(rest) + 1)
            for X in itertools.combinations(rest, k)
        )
        assert got == want


@given(class_structures(max_n=7))
def test_is_in_class_matches_subset_oracle(S):
    assert bool(is_in_class(S)) == brute_in_class(S)


@given(class_structures(max_n=7), st.data())
def test_is_closed_matches_subset_oracle(N, data):
    A = data.draw(st.sets(st.sampled_from(N.sorted_vertices)) if N.vertices else st.just(set()))
    assert bool(is_closed(A, N)) == brute_is_closed(A, N)


@given(class_structures(max_n=8), st.data())
def test_closure_matches_brute_force(N, data):
    A = data.draw(st.sets(st.sampled_from(N.sorted_vertices), max_size=3) if N.vertices else st.just(set()))
    cl = closure(A, N)
    assert cl == brute_force_closure(A, N)
    assert closure(cl, N) == cl
    assert frozenset(A) <= cl


@given(class_structures(max_n=7), st.integers(0, 2**16))
def test_closedness_is_transitive(N, seed):
    rng = random.Random(seed)
    verts = N.sorted_vertices
    for _ in range(5):
        B = frozenset(v for v in verts if rng.random() < 0.6)
        A = frozenset(v for v in B if rng.random() < 0.5)
        if is_closed(A, induced(N, B)) and is_closed(B, N):
            assert is_closed(A, N)


@given(st.integers(0, 2**16))
def test_violation_is_monotone(seed):
    rng = random.Random(seed)
    S = Structure.build(2, "abc", [("a", "b"), ("b", "c"), ("a", "c")])
    extra = [f"x{i}" for i in range(rng.randint(0, 3))]
    edges = set(S.edges)
    for x in extra:
        edges.add(tuple(sorted((x, rng.choice("abc")))))
    T = Structure.build(2, list(S.vertices) + extra, edges)
    v = is_in_class(S)
    assert not is_in_class(T)
    assert v.witness <= T.vertices


def test_closure_contains_minimal_towers(gadget1):
    from hrushovski.minimal_pairs import minimal_extensions

    cl = closure({"a"}, gadget1)
    for cert in minimal_extensions({"a"}, gadget1):
        assert cert.extension.vertices <= cl
