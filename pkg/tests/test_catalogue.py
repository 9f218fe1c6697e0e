import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from taylorlab import corpus
from taylorlab.catalogue import (canonicalize, enumerate_minimal_taylor, load_checkpoint,
                                 same_class, table_at, table_count)
from taylorlab.classify import theorem_suite
from taylorlab.clone import clone_slice, is_minimal_taylor, is_taylor, ternary_algebra
from taylorlab.errors import ArgumentError, PreconditionError


def ternary_closure(n, table):
    """Clo_3 of (A; g) by repeatedly applying g to all triples of known rows."""
    g = np.asarray(table).reshape(n, n, n)
    pts = np.array(list(itertools.product(range(n), repeat=3)))
    rows = {tuple(pts[:, i]) for i in range(3)}
    while True:
        R = np.array(sorted(rows))
        new = g[R[:, None, None, :], R[None, :, None, :], R[None, None, :, :]]
        grown = rows | {tuple(r) for r in new.reshape(-1, n ** 3)}
        if grown == rows:
            return frozenset(rows)
        rows = grown


def brute_minimal_taylor_clones(n):
    """Distinct Clo_3 sets of Taylor ternary tables with no Taylor table
    generating a strictly smaller clone."""
    clones = {}
    for values in itertools.product(range(n), repeat=n ** 3 - n):
        it = iter(values)
        table = [x[0] if len(set(x)) == 1 else next(it)
                 for x in itertools.product(range(n), repeat=3)]
        g = ternary_algebra(n, table)
        if is_taylor(g).verdict:
            clones[tuple(table)] = ternary_closure(n, table)
    distinct = set(clones.values())
    return [c for c in distinct if not any(d < c for d in distinct)]


def test_boolean_census_matches_brute_force():
    census = enumerate_minimal_taylor(2, "exhaustive")
    assert census.complete
    assert census.clone_count == len(brute_minimal_taylor_clones(2)) == 4
    assert census.class_count == 3
    assert census.keys() == ["2:00010111", "2:00111111", "2:01101001"]


def test_boolean_census_contents():
    keys = set(enumerate_minimal_taylor(2).keys())
    assert canonicalize(corpus.majority2()).key in keys
    assert canonicalize(corpus.minority2()).key in keys
    assert canonicalize(corpus.semilattice_join()).key in keys


def test_canonical_examples():
    assert canonicalize(corpus.semilattice_join()).key == canonicalize(corpus.semilattice_meet()).key
    assert canonicalize(corpus.majority2()).key != canonicalize(corpus.minority2()).key
    rps = corpus.rock_paper_scissors()
    keys = {canonicalize(rps.relabel(p)).key for p in ([0, 1, 2], [1, 2, 0], [2, 0, 1])}
    assert len(keys) == 1
    assert same_class(rps, rps.relabel([1, 0, 2]))
    assert canonicalize(corpus.semilattice_join()).orbit == 2
    with pytest.raises(PreconditionError):
        canonicalize(corpus.join_with_minority())


def test_canonical_form_roundtrip():
    for alg in corpus.corpus()[:8]:
        form = canonicalize(alg)
        assert canonicalize(form.algebra()).key == form.key
        assert is_minimal_taylor(form.algebra())[0]
        assert json.loads(json.dumps(form.to_dict()))["key"] == form.key


@settings(max_examples=20)
@given(st.data())
def test_canonical_key_invariance(data):
    alg = data.draw(st.sampled_from([corpus.rock_paper_scissors(), corpus.majority_first(),
                                     corpus.majority_two(), corpus.affine_zp(3)]))
    perm = data.draw(st.permutations(range(3)))
    key = canonicalize(alg).key
    assert canonicalize(alg.relabel(perm)).key == key
    # any Taylor ternary term operation of a minimal Taylor algebra generates its clone
    rows = clone_slice(alg, 3).tables
    i = data.draw(st.integers(0, len(rows) - 1))
    g = ternary_algebra(3, rows[i])
    if is_taylor(g).verdict:
        assert canonicalize(g).key == key


def test_table_indexing():
    assert table_count(2) == 64
    assert list(table_at(2, 0)) == [0, 0, 0, 0, 0, 0, 0, 1]
    assert list(table_at(2, 63)) == [0, 1, 1, 1, 1, 1, 1, 1]


def test_search_resume_is_deterministic(tmp_path):
    ck = str(tmp_path / "ck.json")
    whole = enumerate_minimal_taylor(3, "search", budget=100)
    first = enumerate_minimal_taylor(3, "search", budget=60, checkpoint=ck)
    assert json.load(open(ck)) == first.keys()
    resumed = enumerate_minimal_taylor(3, "search", budget=40, checkpoint=ck)
    assert resumed.position == whole.position == 100
    assert resumed.keys() == whole.keys()
    assert load_checkpoint(ck, 3).keys() == whole.keys()
    for form in whole.forms:
        A = form.algebra()
        assert is_minimal_taylor(A)[0]
        assert theorem_suite(A, "edges").passed


def test_enumerate_argument_errors(tmp_path):
    with pytest.raises(ArgumentError):
        enumerate_minimal_taylor(3, "exhaustive")
    with pytest.raises(ArgumentError):
        enumerate_minimal_taylor(4, "search")
    with pytest.raises(ArgumentError):
        enumerate_minimal_taylor(2, "guess")
    bad = tmp_path / "bad.json"
    bad.write_text('{"not": "a list"}')
    with pytest.raises(ArgumentError):
        enumerate_minimal_taylor(3, "search", budget=1, checkpoint=str(bad))
