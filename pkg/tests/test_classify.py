import itertools

import numpy as np
import pytest

from taylorlab import corpus
from taylorlab.absorption import minimal_3abs
from taylorlab.classify import (CASES, check_names, four_types, omitting_types,
                                produce_majority_term, produce_semilattice_block, theorem_suite,
                                verify_semilattice_block)
from taylorlab.clone import is_minimal_taylor
from taylorlab.core import Algebra, mu, subuniverses
from taylorlab.edges import classify_pair
from taylorlab.errors import ArgumentError, PreconditionError

JOIN_MINORITY = corpus.join_with_minority()


def edge_kinds(alg):
    return {w.kind for a, b in itertools.permutations(range(alg.size), 2)
            for w in classify_pair(alg, a, b)}


def satisfies(alg, t, pairs):
    tab = t.table(alg).reshape((alg.size,) * t.arity)
    return all(tab[lhs] == tab[rhs] if isinstance(rhs, tuple) else tab[lhs] == rhs
               for lhs, rhs in pairs)


def test_four_types_exemplars():
    assert four_types(corpus.semilattice_join()).case == "a"
    assert four_types(corpus.majority2()).case == "b"
    assert four_types(corpus.affine_zp(3)).case == "c"
    assert four_types(corpus.rock_paper_scissors()).case == "d"


def test_four_types_flags_in_detail():
    assert four_types(corpus.majority2()).cases == ["b"]
    assert four_types(corpus.affine_zp(3)).cases == ["c"]
    assert four_types(corpus.rock_paper_scissors()).cases == ["d"]
    # the join also has a nontrivial center, {1}
    assert four_types(corpus.semilattice_join()).cases == ["a", "b"]
    trivial = four_types(corpus.one_element())
    assert all(trivial.flags[c] for c in CASES) and trivial.note


def test_four_types_always_some_case():
    for alg in corpus.corpus() + [JOIN_MINORITY]:
        for A in corpus.subalgebras_and_quotients(alg):
            rep = four_types(A)
            assert rep.cases, A.name
            assert set(rep.to_dict()["flags"]) == set(CASES)


def test_majority_production():
    maj = corpus.majority2()
    with pytest.raises(PreconditionError):
        produce_majority_term(maj)
    t = produce_majority_term(maj, check_hypotheses=False)
    assert np.array_equal(t.table(maj), maj.operations[0].table)
    rps = corpus.rock_paper_scissors()
    # every pair of RPS lies in a proper two-generated subuniverse, so the
    # constraint set is empty and the first ternary term operation is returned
    assert mu(rps).is_full()
    assert produce_majority_term(rps) is not None
    with pytest.raises(PreconditionError):
        produce_majority_term(corpus.affine_zp(3))


def test_majority_production_on_identity_mu():
    # simple algebras with no proper irredundant subdirect subpowers and mu = equality
    for alg in [corpus.majority_two()]:
        t = produce_majority_term(alg, check_hypotheses=False)
        m = mu(alg)
        for a, b in itertools.permutations(range(alg.size), 2):
            if not m.related(a, b):
                assert satisfies(alg, t, [((a, a, b), a), ((a, b, a), a), ((b, a, a), a)])


def test_semilattice_block_production():
    with pytest.raises(PreconditionError):
        produce_semilattice_block(corpus.rock_paper_scissors())
    with pytest.raises(PreconditionError):
        produce_semilattice_block(corpus.affine_zp(3))
    alg = Algebra(3, [("f", 2, [0, 0, 0, 0, 1, 0, 1, 2, 2])], "f")
    res = produce_semilattice_block(alg)
    assert sorted(res.block) == [0, 1]
    assert verify_semilattice_block(alg, res)


def test_semilattice_block_on_simple_binary_algebras():
    # every simple three-element idempotent groupoid whose mu is not full
    # and which has a binary witness gets a verified block
    found = 0
    for values in itertools.product(range(3), repeat=6):
        it = iter(values)
        table = [x if x == y else next(it) for x in range(3) for y in range(3)]
        alg = Algebra(3, [("f", 2, table)])
        if mu(alg).is_full() or mu(alg).is_equality():
            continue
        try:
            res = produce_semilattice_block(alg)
        except PreconditionError:
            continue
        assert res is not None and verify_semilattice_block(alg, res)
        found += 1
        if found >= 25:
            break
    assert found >= 25


def test_omitting_types_exemplars():
    z3 = omitting_types(corpus.affine_zp(3))
    assert z3.free["s"] and z3.free["m"] and z3.free["sm"] and not z3.free["a"]
    assert str(z3.witnesses["malcev"]) == "(p x y z)"
    maj = omitting_types(corpus.majority2())
    assert maj.free["as"] and maj.properties["hasMajority"]
    join = omitting_types(corpus.semilattice_join())
    assert join.free["a"] and join.free["m"] and not join.free["s"]
    assert join.properties["wnuArities"] == [2, 3, 4]


def test_omitting_types_witnesses_satisfy_identities():
    for alg in corpus.corpus():
        rep = omitting_types(alg)
        assert rep.violations == [], (alg.name, rep.violations)
        n = alg.size
        pairs = list(itertools.product(range(n), repeat=2))
        if rep.witnesses["malcev"] is not None:
            assert satisfies(alg, rep.witnesses["malcev"],
                             [((y, x, x), y) for x, y in pairs] + [((x, x, y), y) for x, y in pairs])
        if rep.witnesses["majority"] is not None:
            assert satisfies(alg, rep.witnesses["majority"],
                             [((x, x, y), x) for x, y in pairs] + [((x, y, x), x) for x, y in pairs]
                             + [((y, x, x), x) for x, y in pairs])
        for k in rep.properties["wnuArities"]:
            t = rep.witnesses[f"wnu{k}"]
            eqs = []
            for x, y in pairs:
                pts = [tuple(y if j == i else x for j in range(k)) for i in range(k)]
                eqs += [(pts[0], pts[i]) for i in range(1, k)] + [((x,) * k, x)]
            assert satisfies(alg, t, eqs)


def test_m_free_iff_unique_minimal_center():
    for alg in corpus.corpus():
        rep = omitting_types(alg)
        unique = all(len(minimal_3abs(alg.subalgebra(S))) == 1
                     for S in subuniverses(alg) if len(S) > 1)
        assert rep.free["m"] == ("majority" not in edge_kinds(alg))
        assert rep.free["m"] == unique, alg.name


def test_omitting_types_refuses_non_taylor():
    with pytest.raises(PreconditionError):
        omitting_types(corpus.projection_algebra())


def test_theorem_suite_examples():
    rep = theorem_suite(corpus.no_ez_majority())
    assert rep.passed, [c.to_dict() for c in rep.failures()]
    rep = theorem_suite(corpus.rock_paper_scissors())
    assert rep.passed and all(c.status == "pass" for c in rep.checks)
    with pytest.raises(PreconditionError):
        theorem_suite(corpus.projection_algebra())
    with pytest.raises(ArgumentError):
        theorem_suite(corpus.majority2(), "nope")


def test_theorem_suite_skips_minimal_checks_on_non_minimal():
    rep = theorem_suite(JOIN_MINORITY, "minimal-taylor")
    assert not is_minimal_taylor(JOIN_MINORITY)[0]
    assert {c.status for c in rep.checks} == {"skip"}
    assert [c.name for c in rep.checks] == check_names("minimal-taylor")


def test_theorem_suite_on_corpus_family():
    for alg in corpus.corpus():
        for A in corpus.subalgebras_and_quotients(alg):
            rep = theorem_suite(A, "minimal-taylor")
            assert rep.passed, (A.name, [c.to_dict() for c in rep.failures()])


def test_unique_minimal_absorbing_is_reported():
    # majority: {0} and {1} both absorb, so the minimal absorbing set is not unique
    assert omitting_types(corpus.majority2()).details["uniqueMinimalAbsorbing"] is False
    assert omitting_types(corpus.semilattice_join()).details["uniqueMinimalAbsorbing"] is True
    assert omitting_types(corpus.affine_zp(3)).details["uniqueMinimalAbsorbing"] is True
