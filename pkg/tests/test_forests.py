from __future__ import annotations

import pytest
from hypothesis import given

from hrushovski.errors import InputError
from hrushovski.forests import (
    build_pseudofinite_witness,
    check_star_homogeneity,
    check_tuniv,
    delta_components,
    first_theta_stage,
    forest_from_codes,
    forest_profile,
    forests_up_to,
    gamma_cl_eval,
    is_forest,
    theta_eval,
    witness_codes,
)
from hrushovski.predimension import delta, is_closed, is_in_class
from hrushovski.structures import Structure, rename
from hrushovski.trees import TreeCatalog

from conftest import any_graphs

# number of unlabelled forests on n vertices
FOREST_COUNTS = [1, 1, 2, 3, 6, 10, 20, 37]


def test_forest_examples(path3, cycle3):
    assert is_forest(path3)
    assert not is_forest(cycle3)
    assert is_forest(Structure.empty(2))


def test_ternary_rejected(gadget1):
    with pytest.raises(InputError):
        is_forest(gadget1)


@given(any_graphs(max_n=10))
def test_forest_iff_in_class(G):
    assert is_forest(G) == bool(is_in_class(G))
    if is_forest(G):
        assert delta_components(G) == len(G.components()) == delta(G)


@given(any_graphs(max_n=8))
def test_closed_iff_union_of_components(G):
    if not is_forest(G):
        return
    comps = sorted(G.components(), key=sorted)
    # every union of components is closed; dropping a vertex of one is not
    for mask in range(1 << min(len(comps), 5)):
        A = frozenset().union(*(c for i, c in enumerate(comps) if mask >> i & 1))
        assert gamma_cl_eval(A, G) and is_closed(A, G)
        for c in comps:
            if c <= A and len(c) > 1:
                part = A - {min(c)}
                assert not gamma_cl_eval(part, G) and not is_closed(part, G)


@pytest.mark.parametrize("n", range(8))
def test_forest_counts(n):
    assert sum(1 for f in forests_up_to(n) if sum(c.count("(") for c in f) == n) == FOREST_COUNTS[n]


def test_profile_and_theta():
    two_edges = forest_from_codes(["(())", "(())"], "x")
    one_edge = forest_from_codes(["(())"], "y")
    assert forest_profile(two_edges) == (("(())", 2),)
    assert theta_eval(one_edge, two_edges)
    assert not theta_eval(two_edges, one_edge)
    # a path of three does not contain a closed edge
    assert not theta_eval(one_edge, forest_from_codes(["((()))"]))
    assert theta_eval(Structure.empty(2), one_edge)


def test_theta_relabel_invariant():
    A = forest_from_codes(["(())", "()"], "a")
    N = build_pseudofinite_witness(TreeCatalog(), 3)
    B = rename(A, {v: f"z{v}" for v in A.vertices})
    assert theta_eval(A, N) == theta_eval(B, N)


def test_witness_multiplicities():
    cat = TreeCatalog()
    for i in range(6):
        codes = witness_codes(cat, i)
        for t in range(1, i + 2):
            for c in cat.stage(t)[len(cat.stage(t - 1)) if t > 1 else 0 :]:
                assert codes.count(c) == i + 2 - t
    assert len(build_pseudofinite_witness(cat, 0).vertices) == 1


def test_tuniv_examples(path3, cycle3):
    N = build_pseudofinite_witness(TreeCatalog(), 6)
    assert check_tuniv(N, 4).ok
    edge = Structure.build(2, "ab", [("a", "b")])
    rep = check_tuniv(edge, 2)
    assert not rep.ok and any("theta" in f for f in rep.failures)
    assert not check_tuniv(cycle3, 3).ok


def test_star_homogeneity_examples():
    assert check_star_homogeneity(Structure.empty(2), 0).ok
    edge = Structure.build(2, "ab", [("a", "b")])
    assert not check_star_homogeneity(edge, 2).ok
    N = build_pseudofinite_witness(TreeCatalog(), 6)
    assert check_star_homogeneity(N, 3).ok


def test_first_theta_stage():
    cat = TreeCatalog()
    single = forest_from_codes(["()"])
    assert first_theta_stage(single, cat, 8) == 0
    # two disjoint edges: an edge occurs i times in B_i
    assert first_theta_stage(forest_from_codes(["(())", "(())"]), cat, 8) == 2
    assert first_theta_stage(forest_from_codes(["(((())))"]), cat, 2) is None
