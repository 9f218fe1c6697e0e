import json

import pytest

from taylorlab.errors import ArgumentError
from taylorlab.manifest import (claim_kinds, fixture_names, load_fixture, load_manifest,
                                verify_claim, verify_manifest)

NAMES = fixture_names()


def test_every_fixture_is_bundled():
    assert NAMES == ["join", "maj-first", "maj-two", "majority", "meet", "minority",
                     "noez-abelian", "noez-majority", "rps", "star", "z3"]


@pytest.mark.parametrize("name", NAMES)
def test_manifest_claims_hold(name):
    results = verify_manifest(name)
    assert results
    failed = [(r.claim, r.detail) for r in results if not r.passed]
    assert failed == []


@pytest.mark.parametrize("name", NAMES)
def test_manifests_use_known_checks(name):
    data, _ = load_manifest(name)
    assert data["description"]
    assert {c["check"] for c in data["claims"]} <= set(claim_kinds())


def test_false_claims_are_reported():
    rps = load_fixture("rps")
    assert not verify_claim(rps, {"check": "four_types_case", "expect": "a"}).passed
    assert not verify_claim(rps, {"check": "simple", "expect": False}).passed
    assert not verify_claim(rps, {"check": "edge", "pair": [1, 0], "type": "semilattice"}).passed
    star = load_fixture("star")
    assert not verify_claim(star, {"check": "absorbs_up_to", "set": [3], "arity": 4,
                                   "expect": True}).passed


def test_malformed_claims_are_usage_errors(tmp_path):
    rps = load_fixture("rps")
    with pytest.raises(ArgumentError):
        verify_claim(rps, {"check": "nonsense"})
    with pytest.raises(ArgumentError):
        verify_claim(rps, {"check": "simple"})
    bad = tmp_path / "x.manifest.json"
    bad.write_text("{")
    with pytest.raises(ArgumentError):
        verify_manifest(str(bad))


def test_manifest_next_to_custom_algebra(tmp_path):
    (tmp_path / "a.json").write_text(json.dumps(load_fixture("join").to_dict()))
    m = tmp_path / "a.manifest.json"
    m.write_text(json.dumps({"algebra": "a.json", "description": "join copy",
                             "claims": [{"check": "minimal_taylor", "expect": True}]}))
    assert [r.passed for r in verify_manifest(str(m))] == [True]
