import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings

from oracles import idempotent_algebras, naive_clone, unified_failures
from taylorlab import corpus
from taylorlab.clone import (IdentitySpec, clone_slice, cyclic_spec, find_term,
                             generates_clone, is_minimal_taylor, is_taylor, majority_spec,
                             malcev_spec, minimal_taylor_reduct, term_equivalent,
                             ternary_algebra, unified_operation, verify_non_taylor, wnu_spec)
from taylorlab.core import Algebra, all_congruences, quotient, subuniverses
from taylorlab.errors import PreconditionError, ResourceError
from taylorlab.terms import Term, basic_term, parse_term

JOIN_OR_MINORITY = Algebra(2, [("j", 2, [0, 1, 1, 1]),
                               ("p", 3, [(x + y + z) % 2 for x, y, z in
                                         itertools.product(range(2), repeat=3)])], "join+minority")


def _rows(sl):
    return {tuple(int(v) for v in r) for r in sl.tables}


def test_clone_slice_examples():
    join = corpus.semilattice_join()
    assert _rows(clone_slice(join, 2)) == {(0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 1)}
    assert _rows(clone_slice(corpus.majority2(), 2)) == {(0, 0, 1, 1), (0, 1, 0, 1)}
    for alg in corpus.corpus():
        assert len(clone_slice(alg, 1)) == 1


@settings(max_examples=15)
@given(idempotent_algebras(sizes=(2, 3), arities=(2,)))
def test_clone_slice_matches_closure(alg):
    assert _rows(clone_slice(alg, 2)) == naive_clone(alg, 2)


def test_clone_slice_closed_under_basic_ops():
    for alg in corpus.corpus()[:6]:
        sl = clone_slice(alg, 2)
        rows = _rows(sl)
        for op in alg.operations:
            for args in itertools.product(sorted(rows), repeat=op.arity):
                idx = np.zeros(alg.size ** 2, dtype=np.int64)
                for r in args:
                    idx = idx * alg.size + np.array(r)
                assert tuple(int(v) for v in op.table[idx]) in rows


def test_witness_terms_reproduce_their_tables():
    for alg in corpus.corpus():
        sl = clone_slice(alg, 2)
        for i in range(len(sl)):
            t = sl.witness(i)
            fresh = parse_term(str(t), 2)
            assert np.array_equal(fresh.table(alg), sl.tables[i])
            for args in itertools.product(range(alg.size), repeat=2):
                assert t.at(alg, args) == sl.tables[i][args[0] * alg.size + args[1]]


def test_find_term_examples():
    z3 = corpus.affine_zp(3)
    t = find_term(z3, malcev_spec(3))
    assert np.array_equal(t.table(z3), z3.operations[0].table)
    assert find_term(corpus.semilattice_join(), malcev_spec(2)) is None
    maj = corpus.majority2()
    t = find_term(maj, cyclic_spec(2, 3))
    assert np.array_equal(t.table(maj), maj.operations[0].table)
    assert find_term(maj, majority_spec(2)) is not None


def test_find_term_pointwise_constraints():
    rps = corpus.rock_paper_scissors()
    # Sg(rock, paper) = {rock, paper}
    spec = IdentitySpec(2).allow((0, 1), {2})
    assert find_term(rps, spec) is None
    spec = IdentitySpec(2).allow((0, 1), {1}).allow((1, 0), {1})
    assert str(find_term(rps, spec)) in {"(w x y)", "(w y x)"}


def test_cyclic_terms_are_cyclic():
    for alg in corpus.corpus():
        cert = is_taylor(alg, with_cyclic=True)
        t = cert.cyclic
        if t is None:
            continue
        tab = t.table(alg).reshape((alg.size,) * 3)
        for x, y, z in itertools.product(range(alg.size), repeat=3):
            assert tab[x, y, z] == tab[y, z, x]


def test_star_composition_of_cyclic_terms_stays_cyclic():
    rng = random.Random(5)
    for alg in (corpus.majority2(), corpus.majority_two(), corpus.no_ez_abelian()):
        t = find_term(alg, cyclic_spec(alg.size, 3))
        s = t.star(t)
        assert s.arity == 9
        for _ in range(300):
            args = [rng.randrange(alg.size) for _ in range(9)]
            assert s.at(alg, args) == s.at(alg, args[1:] + args[:1])


def test_is_taylor_examples():
    assert is_taylor(corpus.rock_paper_scissors()).verdict
    proj = corpus.projection_algebra()
    cert = is_taylor(proj)
    assert not cert.verdict
    assert cert.subuniverse == (0, 1)
    assert verify_non_taylor(proj, cert)
    assert is_taylor(corpus.star_algebra()).verdict


def _projection_quotient_exists(alg):
    for E in subuniverses(alg):
        for c in all_congruences(alg, sorted(E)):
            if len(c.blocks) != 2:
                continue
            side = {x: c.block_of(x) for x in E}
            if all(any(all(side[alg.eval(op.name, xs)] == side[xs[i]]
                           for xs in itertools.product(sorted(E), repeat=op.arity))
                       for i in range(op.arity))
                   for op in alg.operations):
                return True
    return False


@given(idempotent_algebras())
def test_taylor_matches_projection_quotient_scan(alg):
    cert = is_taylor(alg)
    assert cert.verdict == (not _projection_quotient_exists(alg))
    if not cert.verdict:
        assert verify_non_taylor(alg, cert)


def test_is_minimal_taylor_examples():
    assert is_minimal_taylor(corpus.semilattice_join())[0]
    assert is_minimal_taylor(corpus.rock_paper_scissors())[0]
    ok, g = is_minimal_taylor(JOIN_OR_MINORITY)
    assert not ok
    assert not generates_clone(JOIN_OR_MINORITY, g)
    assert is_taylor(ternary_algebra(2, g.table(JOIN_OR_MINORITY))).verdict


def test_minimal_taylor_reduct():
    red, g = minimal_taylor_reduct(JOIN_OR_MINORITY)
    assert is_minimal_taylor(red)[0]
    # join and minority also generate meet and majority; x&y&z has the least table
    assert list(red.operations[0].table) == [0, 0, 0, 0, 0, 0, 0, 1]
    for alg in corpus.boolean_four() + [corpus.rock_paper_scissors()]:
        red, _ = minimal_taylor_reduct(alg)
        assert term_equivalent(red, alg)


def test_unified_operation_examples():
    maj = corpus.majority2()
    f = unified_operation(maj)
    assert np.array_equal(f.table(maj), maj.operations[0].table)
    z3 = corpus.affine_zp(3)
    assert np.array_equal(unified_operation(z3).table(z3), z3.operations[0].table)
    join = corpus.semilattice_join()
    assert list(unified_operation(join).table(join)) == [0, 1, 1, 1, 1, 1, 1, 1]
    with pytest.raises(PreconditionError):
        unified_operation(JOIN_OR_MINORITY)


def test_unified_operation_on_corpus():
    for alg in corpus.corpus():
        f = unified_operation(alg)
        assert f.arity == 3
        assert unified_failures(alg, f) == [], alg.name
        assert generates_clone(alg, f)


def test_generates_clone_examples():
    maj = corpus.majority2()
    assert not generates_clone(maj, Term.proj(0, 3))
    rps = corpus.rock_paper_scissors()
    assert generates_clone(rps, basic_term(rps, 0))


def test_unified_operation_clone_slices_agree():
    for alg in corpus.corpus()[:6]:
        f = unified_operation(alg)
        red = ternary_algebra(alg.size, f.table(alg))
        for k in (2, 3):
            assert _rows(clone_slice(red, k)) == _rows(clone_slice(alg, k))


def test_minimal_variety_subalgebras_quotients_squares():
    for alg in corpus.corpus():
        for sub in corpus.subalgebras_and_quotients(alg)[1:]:
            assert is_minimal_taylor(sub)[0], sub.name
        if alg.size <= 3:
            assert is_minimal_taylor(alg.power(2))[0], alg.name


def test_cyclic_minors_cover_small_clones():
    # every binary term operation is a minor of the ternary cyclic term
    # or of its star square
    for alg in corpus.boolean_four() + [corpus.majority_two()]:
        t = find_term(alg, cyclic_spec(alg.size, 3))
        minors = set()
        for src in (t, t.star(t)):
            for mapping in itertools.product(range(2), repeat=src.arity):
                minors.add(tuple(src.minor(list(mapping), 2).table(alg)))
        minors |= {tuple(r) for r in clone_slice(alg, 2).tables[:2]}
        assert _rows(clone_slice(alg, 2)) <= minors


def test_arity_cap_is_enforced():
    with pytest.raises(ResourceError):
        clone_slice(corpus.majority2(), 5)
    assert len(wnu_spec(2, 4).points()) > 0


def test_term_parsing_roundtrip():
    t = parse_term("(maj (maj x y z) y z)")
    assert t.arity == 3
    assert str(parse_term(str(t))) == str(t)
    maj = corpus.majority2()
    assert np.array_equal(t.table(maj), maj.operations[0].table)
