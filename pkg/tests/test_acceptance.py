"""End-to-end acceptance checks, one test per criterion.

Each test records a label; the terminal summary prints PASS or FAIL per label.
"""

import time

import pytest

from oracles import unified_failures
from taylorlab import corpus
from taylorlab.absorption import min_taylor_3abs, verify_absorption
from taylorlab.catalogue import canonicalize, enumerate_minimal_taylor
from taylorlab.classify import check_names, four_types, omitting_types, theorem_suite
from taylorlab.clone import generates_clone, is_minimal_taylor, unified_operation
from taylorlab.manifest import load_fixture, verify_manifest
from taylorlab.terms import parse_term


@pytest.fixture
def criterion(request):
    def label(text):
        request.node.user_properties.append(("acceptance", text))
    return label


def _within(start, limit):
    elapsed = time.perf_counter() - start
    assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"


def _family():
    return [A for alg in corpus.corpus() for A in corpus.subalgebras_and_quotients(alg)]


def _suite_failures(suite, names):
    bad = []
    for A in _family():
        for c in theorem_suite(A, suite).checks:
            if c.name in names and c.status != "pass":
                bad.append((A.name, c.name, c.status, c.detail))
    return bad


def test_1_boolean_census(criterion):
    criterion("1 two-element census: four minimal Taylor clones")
    start = time.perf_counter()
    census = enumerate_minimal_taylor(2, "exhaustive")
    assert census.complete
    assert census.clone_count == 4
    keys = set(census.keys())
    for alg in corpus.boolean_four():
        assert canonicalize(alg).key in keys, alg.name
    # join and meet are one class up to relabeling
    assert census.class_count == 3
    _within(start, 5)


def test_2_four_types_exemplars(criterion):
    criterion("2 four types exemplars: join a, majority b, Z3 c, RPS d")
    start = time.perf_counter()
    got = [four_types(A).case for A in (corpus.semilattice_join(), corpus.majority2(),
                                         corpus.affine_zp(3), corpus.rock_paper_scissors())]
    assert got == ["a", "b", "c", "d"]
    _within(start, 10)


def test_3_fixture_manifests(criterion):
    criterion("3 fixture manifests: maj-first, noez-majority, noez-abelian, star")
    start = time.perf_counter()
    for name in ("maj-first", "noez-majority", "noez-abelian", "star"):
        failed = [r.claim for r in verify_manifest(name) if not r.passed]
        assert failed == [], name
    m = load_fixture("maj-first")
    assert verify_absorption(m, [0, 1], parse_term("(m (m (m x1 x2 x3) x2 x4) x3 x4)"))
    assert not min_taylor_3abs(m, [0, 1])
    _within(start, 60)


EQUIVALENCES = ["2-absorption equivalences", "3-absorption equivalences",
                "2-absorption is edge stability", "absorption and s/a stability",
                "2-absorbing unions and meets", "3-absorbing unions and meets",
                "3-absorption is transitive"]


def test_4_equivalence_suites(criterion):
    criterion("4 absorption equivalences over corpus subalgebras and quotients")
    start = time.perf_counter()
    assert set(EQUIVALENCES) <= set(check_names("minimal-taylor"))
    assert _suite_failures("minimal-taylor", EQUIVALENCES) == []
    _within(start, 120)


def test_5_structural_theorems(criterion):
    criterion("5 edge structure and closure of minimal Taylor algebras")
    start = time.perf_counter()
    names = set(check_names("edges")) | {"closed under subalgebras, quotients, squares"}
    assert _suite_failures("edges", names) == []
    assert _suite_failures("minimal-taylor", names) == []
    _within(start, 120)


def test_6_unified_operation(criterion):
    criterion("6 unified ternary operation meets edge requirements and generates the clone")
    start = time.perf_counter()
    for alg in corpus.corpus():
        f = unified_operation(alg)
        assert f.arity == 3
        assert unified_failures(alg, f) == [], alg.name
        assert generates_clone(alg, f), alg.name
    _within(start, 60)


def test_7_omitting_types(criterion):
    criterion("7 omitting types exemplars and m-free iff unique minimal center")
    start = time.perf_counter()
    z3 = omitting_types(corpus.affine_zp(3))
    assert z3.free["sm"] and z3.witnesses["malcev"] is not None
    maj = omitting_types(corpus.majority2())
    assert maj.free["as"] and maj.witnesses["majority"] is not None
    join = omitting_types(corpus.semilattice_join())
    assert join.free["a"] and not join.free["s"]
    assert all(join.witnesses[f"wnu{k}"] is not None for k in (2, 3, 4))
    for alg in corpus.corpus():
        rep = omitting_types(alg)
        assert rep.violations == [], alg.name
    _within(start, 60)


def test_8_search_outputs_are_minimal_taylor(criterion):
    criterion("8 (non-gating) three-element search outputs are minimal Taylor")
    census = enumerate_minimal_taylor(3, "search", budget=120)
    assert not census.complete
    for form in census.forms:
        assert is_minimal_taylor(form.algebra())[0], form.key
