from __future__ import annotations

import dataclasses

from hrushovski import verify
from hrushovski.structures import Structure


def test_suite_lines_format():
    r = verify.suite_gadget(1, per_n=2, max_n=3)
    lines = r.lines()
    assert r.ok and len(r.cases) == 6
    assert lines[-1] == "lemma-gadget\tsummary\tpass\t6/6"
    assert all("\tFAIL\t" not in line for line in lines)


def test_failure_lines_carry_anchor():
    r = verify.SuiteResult("coding")
    r.add("case#0", False, "decoded=1")
    assert r.lines()[0] == f"coding\tcase#0\tFAIL\t{verify.ANCHORS['coding']}\tdecoded=1"
    assert not r.ok and r.to_dict()["failures"] == [{"name": "case#0", "detail": "decoded=1"}]


def test_anchors_cover_every_suite():
    assert set(verify.ANCHORS) == {
        "lemma-gadget", "amalgamation", "closure", "minimal-pairs", "interpretation",
        "coding", "binary", "tuniv", "spencer",
    }


def test_small_suites_pass():
    g = verify.suite_gadget(2, per_n=2, max_n=2)
    a = verify.suite_amalgamation(2, count=20, max_n=5)
    c = verify.suite_closure(2, count=20, max_n=6)
    assert g.ok and a.ok and c.ok
    assert verify.suite_minimal_pairs([g, a, c]).ok
    assert verify.suite_coding(2, count=10).ok
    assert verify.suite_binary(max_n=5, pair_n=4).ok
    assert verify.suite_tuniv(6, 3, 2).ok


def test_small_interpretation_suite():
    r = verify.suite_interpretation(0, max_pq=2, constructive_pq=2)
    assert r.ok and len(r.data["order_matrix"]) == 4


def test_brute_force_closure_example(gadget1):
    assert verify.brute_force_closure({"a"}, gadget1) == gadget1.vertices
    path = Structure.build(2, "abcd", [("a", "b"), ("c", "d")])
    assert verify.brute_force_closure({"a"}, path) == {"a", "b"}


def test_check_certificate_rejects_tampering(gadget1):
    from hrushovski.minimal_pairs import classify_pair

    cert = classify_pair({"a"}, gadget1)
    assert verify.check_certificate(cert)
    bigger = Structure.build(3, gadget1.vertices | {"z"}, gadget1.edges)
    # an extra isolated point raises delta(B/A) above zero
    assert not verify.check_certificate(dataclasses.replace(cert, extension=bigger))
