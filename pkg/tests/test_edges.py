import itertools

import pytest

from oracles import blocks_of
from taylorlab import corpus
from taylorlab.clone import clone_slice, is_minimal_taylor
from taylorlab.core import maximal_congruences, mu, sg_set, sub_quotient
from taylorlab.edges import (check_connectivity, classify_pair, edge_graph, edge_types,
                             is_minimal_edge, s_closed, s_edges, s_walk, stable_under,
                             verify_witness)
from taylorlab.errors import ArgumentError
from taylorlab.absorption import absorbs, min_taylor_2abs, min_taylor_3abs, nonempty_subsets
from taylorlab.relations import affine_structure


def kinds(alg, a, b):
    return sorted({w.kind for w in classify_pair(alg, a, b)})


def clo3(alg):
    return {bytes(r) for r in clone_slice(alg, 3).tables}


def test_classify_pair_examples():
    join = corpus.semilattice_join()
    [w] = classify_pair(join, 0, 1)
    assert w.kind == "semilattice" and w.congruence.is_equality()
    assert list(w.term.table(join)) == [0, 1, 1, 1]
    g = corpus.no_ez_majority()
    ws = [w for w in classify_pair(g, 0, 1) if w.kind == "majority"]
    assert [blocks_of(w.congruence) for w in ws] == [[[0, 2], [1, 3]]]
    p = corpus.no_ez_abelian()
    ws = [w for w in classify_pair(p, 0, 1) if w.kind == "abelian"]
    assert [blocks_of(w.congruence) for w in ws] == [[[0, 2], [1, 3]]]
    with pytest.raises(ArgumentError):
        classify_pair(join, 0, 0)


def test_witnesses_verify():
    for alg in corpus.corpus():
        for a, b in itertools.permutations(range(alg.size), 2):
            for w in classify_pair(alg, a, b):
                assert verify_witness(alg, w)


def test_minimal_edge_examples():
    join = corpus.semilattice_join()
    assert is_minimal_edge(join, classify_pair(join, 0, 1)[0])
    g = corpus.no_ez_majority()
    for a, b in itertools.permutations(range(4), 2):
        if a % 2 != b % 2:
            assert edge_types(g, a, b, minimal_only=True) == ["majority"]
    star = corpus.star_algebra()
    assert "semilattice" in kinds(star, 0, 3)


def test_every_pair_of_maj_two_is_a_minimal_majority_edge():
    m2 = corpus.majority_two()
    for a, b in itertools.permutations(range(3), 2):
        assert edge_types(m2, a, b, minimal_only=True) == ["majority"]


def test_edge_graph_connected_everywhere():
    for alg in corpus.corpus():
        for A in corpus.subalgebras_and_quotients(alg):
            assert check_connectivity(edge_graph(A, minimal_only=True)), A.name
    assert check_connectivity(edge_graph(corpus.one_element(), minimal_only=True))


def test_edge_graph_export_is_deterministic():
    rps = corpus.rock_paper_scissors()
    g = edge_graph(rps)
    assert [(a, b, k) for a, b, k, _ in g.arcs] == [(0, 1, "semilattice"), (1, 2, "semilattice"),
                                                    (2, 0, "semilattice")]
    assert g.to_dot(["rock", "paper", "scissors"]) == edge_graph(rps).to_dot(["rock", "paper", "scissors"])
    assert '"rock" -> "paper"' in g.to_dot(["rock", "paper", "scissors"])
    assert g.to_dict()["nonEdges"] == []


def test_stability_examples():
    star = corpus.star_algebra()
    assert stable_under(star, {3}, {"semilattice", "majority"})
    assert absorbs(star, {3}).verdict is False
    join = corpus.semilattice_join()
    assert not stable_under(join, {0}, {"semilattice"})
    with pytest.raises(ArgumentError):
        stable_under(join, {0}, {"bogus"})


def test_s_edges_and_walks():
    star = corpus.star_algebra()
    assert s_closed(star, {3})
    join = corpus.semilattice_join()
    assert s_walk(join, 0, {1}) == [0, 1]
    assert s_walk(corpus.majority2(), 0, {1}) is None
    assert s_edges(corpus.majority2()) == []


def _minimal_taylor_family():
    for alg in corpus.corpus():
        for A in corpus.subalgebras_and_quotients(alg):
            if A.size > 1 and is_minimal_taylor(A)[0]:
                yield A


def test_edge_quotient_shapes_and_unique_witness():
    join, meet, maj = corpus.semilattice_join(), corpus.semilattice_meet(), corpus.majority2()
    for A in _minimal_taylor_family():
        for a, b in itertools.permutations(range(A.size), 2):
            ws = classify_pair(A, a, b)
            E = sorted(sg_set(A, {a, b}))
            maximal = maximal_congruences(A, E)
            for kind in ("semilattice", "majority"):
                mine = [w for w in ws if w.kind == kind]
                assert len(mine) <= 1
                if mine:
                    assert mine[0].congruence in maximal
            for w in ws:
                Q = sub_quotient(A, w.congruence)
                if w.kind == "semilattice":
                    top = w.congruence.block_of(b)
                    assert Q.size == 2 and clo3(Q) == clo3(join if top == 1 else meet)
                elif w.kind == "majority":
                    assert Q.size == 2 and clo3(Q) == clo3(maj)
                else:
                    assert affine_structure(Q) is not None


def test_minimal_edges_unique_type_and_thin_semilattices():
    for A in _minimal_taylor_family():
        for a, b in itertools.permutations(range(A.size), 2):
            ws = [w for w in classify_pair(A, a, b) if is_minimal_edge(A, w)]
            if not ws:
                continue
            assert len({w.kind for w in ws}) == 1
            E = sorted(sg_set(A, {a, b}))
            maxi = maximal_congruences(A, E)
            sub = A.subalgebra(E)
            m = mu(sub)
            assert len(maxi) == 1
            assert blocks_of(maxi[0]) == sorted(sorted(E[x] for x in blk) for blk in m.blocks)
            if ws[0].kind == "semilattice":
                assert E == sorted({a, b}) and ws[0].congruence.is_equality()


def test_stability_characterizes_binary_absorption():
    for A in _minimal_taylor_family():
        for B in nonempty_subsets(A.size):
            assert stable_under(A, B, {"semilattice", "majority", "abelian"}) == min_taylor_2abs(A, B)
        for b in range(A.size):
            assert stable_under(A, {b}, {"semilattice", "abelian"}) == min_taylor_3abs(A, {b})
