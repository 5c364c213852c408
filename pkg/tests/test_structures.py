from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from hrushovski.amalgam import free_join
from hrushovski.errors import InputError
from hrushovski.structures import (
    Embedding,
    FreshIds,
    Structure,
    automorphisms,
    canonical_form,
    dumps,
    enumerate_embeddings,
    find_isomorphism,
    induced,
    is_isomorphic,
    loads,
    parse_edge_list,
    reject_reserved,
    rename,
    to_dot,
)

from conftest import any_graphs, class_structures


def brute_isomorphic(S: Structure, T: Structure) -> bool:
    """Oracle: try every bijection."""
    if S.arity != T.arity or len(S.vertices) != len(T.vertices) or len(S.edges) != len(T.edges):
        return False
    sv, tv = S.sorted_vertices, T.sorted_vertices
    for perm in itertools.permutations(tv):
        m = dict(zip(sv, perm))
        if {tuple(sorted(m[x] for x in e)) for e in S.edges} == set(T.edges):
            return True
    return False


def test_structure_rejects_bad_edges():
    with pytest.raises(InputError):
        Structure.build(3, ["a", "b"], [("a", "b", "b")])
    with pytest.raises(InputError):
        Structure(2, frozenset({"a"}), frozenset({("a", "z")}))
    with pytest.raises(InputError):
        Structure.build(2, ["a", "b"], [("a", "b", "a")])


def test_build_adds_edge_vertices():
    assert Structure.build(2, ["a"], [("a", "z")]).vertices == {"a", "z"}


def test_edges_are_stored_sorted():
    S = Structure.build(3, [], [("c", "a", "b")])
    assert S.sorted_edges == (("a", "b", "c"),)
    assert S == Structure.build(3, [], [("b", "c", "a")])


def test_induced_subpath(path3):
    T = induced(path3, {"a", "b"})
    assert len(T.vertices) == 2 and len(T.edges) == 1


def test_induced_empty(gadget1):
    assert induced(gadget1, set()) == Structure.empty(3)


def test_induced_gadget_triple(gadget1):
    T = induced(gadget1, {"a", "c1", "c2"})
    assert len(T.vertices) == 3
    assert T.edges == {("a", "c1", "c2")}


def test_induced_rejects_unknown(path3):
    with pytest.raises(InputError):
        induced(path3, {"z"})


@given(class_structures(), st.integers(0, 2**16))
def test_induced_composes(S, seed):
    rng = random.Random(seed)
    V2 = {v for v in S.vertices if rng.random() < 0.7}
    V1 = {v for v in V2 if rng.random() < 0.7}
    assert induced(induced(S, V2), V1) == induced(S, V1)


def test_isomorphic_single_vertices():
    assert is_isomorphic(Structure.build(2, ["x"]), Structure.build(2, ["y"]))


def test_gadget_not_isomorphic_to_cycle_gadget(gadget1):
    C = Structure.build(3, ["a"], [("a", "c1", "c2"), ("a", "c2", "c3"), ("a", "c3", "c4"), ("a", "c1", "c4")])
    assert not is_isomorphic(gadget1, C)


def test_relabelled_gadget_isomorphic(gadget1):
    T = rename(gadget1, {"a": "z", "c1": "p", "c2": "q", "c3": "r"})
    assert is_isomorphic(gadget1, T) and brute_isomorphic(gadget1, T)
    emb = find_isomorphism(gadget1, T)
    assert emb is not None and emb.is_valid()


def test_embeddings_single_vertex_into_three():
    B = Structure.build(2, ["x"])
    N = Structure.build(2, ["a", "b", "c"])
    assert len(enumerate_embeddings(B, N)) == 3


def test_gadget_self_embeddings_over_a(gadget1):
    embs = enumerate_embeddings(gadget1, gadget1, {"a": "a"})
    assert len(embs) == 6
    assert len(automorphisms(gadget1, ["a"])) == 6
    # brute force over the 3! images of c1..c3
    brute = 0
    for perm in itertools.permutations(["c1", "c2", "c3"]):
        m = {"a": "a", **dict(zip(["c1", "c2", "c3"], perm))}
        brute += Embedding.from_map(gadget1, gadget1, m).is_valid()
    assert brute == 6


def test_embeddings_into_free_join_do_not_mix_sides(gadget1):
    other = rename(gadget1, {"a": "a", "c1": "d1", "c2": "d2", "c3": "d3"})
    N = free_join(gadget1, other, {"a"})
    embs = enumerate_embeddings(gadget1, N, {"a": "a"})
    images = {e.image for e in embs}
    assert images == {gadget1.vertices, other.vertices}
    assert len(embs) == 12


def test_embedding_fix_must_be_consistent(path3):
    with pytest.raises(InputError):
        enumerate_embeddings(path3, path3, {"a": "zz"})


@given(class_structures(max_n=5))
def test_embeddings_closed_under_automorphisms(S):
    embs = {tuple(sorted(e.map.items())) for e in enumerate_embeddings(S, S)}
    for g in automorphisms(S):
        for e in list(embs)[:5]:
            m = dict(e)
            composed = tuple(sorted((v, m[g(v)]) for v in S.vertices))
            assert composed in embs


def test_canonical_form_empty_sentinel():
    assert canonical_form(Structure.empty(3)) == "3|0|"
    assert canonical_form(Structure.empty(2)) == "2|0|"


def test_canonical_form_relabelled_path(path3):
    T = rename(path3, {"a": "z", "b": "y", "c": "x"})
    assert canonical_form(path3) == canonical_form(T)


def test_canonical_form_path_vs_isolated(path3):
    assert canonical_form(path3) != canonical_form(Structure.build(2, "abc"))


@given(any_graphs(max_n=6), any_graphs(max_n=6))
def test_canonical_form_matches_brute_isomorphism(S, T):
    assert (canonical_form(S) == canonical_form(T)) == brute_isomorphic(S, T)


@given(class_structures(arity=3, max_n=7), st.integers(0, 2**16))
def test_canonical_form_invariant_under_relabelling(S, seed):
    names = list(S.sorted_vertices)
    shuffled = names[:]
    random.Random(seed).shuffle(shuffled)
    T = rename(S, {v: f"w{w}" for v, w in zip(names, shuffled)})
    assert canonical_form(S) == canonical_form(T)
    assert is_isomorphic(S, T)


def test_json_round_trip_is_bit_exact(gadget1):
    text = dumps(gadget1)
    assert loads(text) == gadget1
    assert dumps(loads(text)) == text
    assert text.startswith('{"arity": 3, "vertices": ["a", "c1", "c2", "c3"]')


def test_loads_rejects_garbage():
    with pytest.raises(InputError):
        loads("{not json")
    with pytest.raises(InputError):
        loads('{"arity": 2, "vertices": ["a"], "edges": [["a", "b"]]}')


def test_edge_list_shorthand():
    S = parse_edge_list("# a path\na-b\nb - c\nd\n")
    assert S.vertices == {"a", "b", "c", "d"}
    assert S.edges == {("a", "b"), ("b", "c")}


def test_dot_export_ternary_uses_square_nodes(gadget1):
    dot = to_dot(gadget1)
    assert dot.count("shape=square") == 3
    assert '"a" -- "b"' in to_dot(Structure.build(2, "ab", [("a", "b")]))


def test_fresh_ids_do_not_collide_with_user_ids():
    fresh = FreshIds()
    assert fresh.take(3) == ["@0", "@1", "@2"]
    with pytest.raises(InputError):
        reject_reserved(Structure.build(2, ["@0"]))
