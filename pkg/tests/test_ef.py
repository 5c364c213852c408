from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from hrushovski.ef import (
    ef_equivalent,
    ef_naive,
    multiplicity_witness,
    sample_forest_codes,
    spencer_desk_check,
    spencer_sweep,
)
from hrushovski.errors import InputError, ResourceError
from hrushovski.forests import forest_from_codes, random_tree_code
from hrushovski.structures import Structure
from hrushovski.trees import TreeCatalog

from conftest import any_graphs


def points(k: int, prefix: str) -> Structure:
    return forest_from_codes(["()"] * k, prefix)


def test_isolated_points():
    assert ef_equivalent(points(2, "g"), points(3, "h"), 2)
    assert not ef_equivalent(points(1, "g"), points(2, "h"), 2)
    assert ef_equivalent(points(1, "g"), points(2, "h"), 1)


def test_rank_zero_is_always_equivalent(path3, cycle3):
    assert ef_equivalent(path3, Structure.empty(2), 0)


def path(n: int, prefix: str) -> Structure:
    names = [f"{prefix}{i}" for i in range(n)]
    return Structure.build(2, names, list(zip(names, names[1:])))


def test_paths_of_different_length():
    # two rounds cannot tell long paths apart
    assert ef_equivalent(path(4, "g"), path(5, "h"), 2)
    # but three rounds see the length of P4 against P5
    assert not ef_equivalent(path(4, "g"), path(5, "h"), 3)
    assert ef_naive(path(4, "g"), path(5, "h"), 2)


def test_non_forest_games(cycle3):
    tri = cycle3
    path = Structure.build(2, "abc", [("a", "b"), ("b", "c")])
    assert not ef_equivalent(tri, path, 3)
    assert ef_equivalent(tri, path, 1)


def test_budget_and_input_errors(cycle3, gadget1):
    with pytest.raises(ResourceError):
        ef_equivalent(cycle3, cycle3, 30, budget=10)
    with pytest.raises(InputError):
        ef_equivalent(gadget1, gadget1, 1)
    with pytest.raises(InputError):
        ef_equivalent(cycle3, cycle3, -1)


@settings(max_examples=40)
@given(any_graphs(max_n=4), any_graphs(max_n=4), st.integers(0, 3))
def test_matches_naive_game(G, H, r):
    assert ef_equivalent(G, H, r) == ef_naive(G, H, r)


@settings(max_examples=40)
@given(st.integers(0, 2**32), st.integers(1, 3))
def test_random_forests_match_naive(seed, r):
    rng = random.Random(seed)
    codes = lambda: [random_tree_code(rng, rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
    G, H = forest_from_codes(codes(), "g"), forest_from_codes(codes(), "h")
    assert ef_equivalent(G, H, r) == ef_naive(G, H, r)


@settings(max_examples=20)
@given(st.integers(0, 2**32))
def test_forest_equivalent_to_itself(seed):
    rng = random.Random(seed)
    codes = [random_tree_code(rng, rng.randint(1, 5)) for _ in range(4)]
    assert ef_equivalent(forest_from_codes(codes, "g"), forest_from_codes(codes[::-1], "h"), 3)


def test_sampler_multiplicities():
    cat = TreeCatalog()
    codes = sample_forest_codes(random.Random(1), cat, 3, 2)
    for c in cat.stage(3):
        assert 2 <= codes.count(c) <= 4
    assert set(codes) == set(cat.stage(3))


def test_spencer_rank_two():
    rep = spencer_desk_check(2, 2, 2, pairs=10)
    assert rep.ok and rep.pairs == 10


def test_spencer_sweep_rank_two():
    found, reports = spencer_sweep(2, max_s=3, max_m=3, pairs=10)
    assert found is not None
    assert reports[-1].ok and all(not r.ok for r in reports[:-1])


def test_spencer_rejects_bad_parameters():
    with pytest.raises(InputError):
        spencer_desk_check(1, 0, 2)


def test_multiplicity_witness():
    assert multiplicity_witness(2) == (1, 2)
    assert multiplicity_witness(1) is None
