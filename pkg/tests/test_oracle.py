import itertools
from fractions import Fraction

import numpy as np
import pytest

from permstab.instances import bs_exact, perturb, random_commuting_tuple, torus_tuple
from permstab.oracle import ORACLE_CAP, centralizer, enumerate_solutions, nearest_solution
from permstab.perm import PermTuple, Permutation, compose, hamming, identity
from permstab.words import EnumerationCapExceeded, bs_system, commutator_system, defect, relator_system

from conftest import random_perm

S3_PAIR = PermTuple([Permutation([1, 2, 0]), Permutation([1, 0, 2])])


def _naive_commuting_pairs(n):
    sym = list(itertools.permutations(range(n)))
    return [
        (p, q)
        for p in sym
        for q in sym
        if all(p[q[x]] == q[p[x]] for x in range(n))
    ]


def test_commuting_pairs_s3_count():
    # brute force gives 18 = 3 classes * 6
    naive = _naive_commuting_pairs(3)
    assert len(naive) == 18
    got = [tuple(tuple(p.tolist()) for p in t) for t in enumerate_solutions(3, commutator_system(2))]
    assert got == naive


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_centralizer_matches_naive(n):
    sym = list(itertools.permutations(range(n)))
    for p in sym:
        naive = [q for q in sym if all(p[q[x]] == q[p[x]] for x in range(n))]
        assert centralizer(p) == naive


def test_enumeration_matches_naive_up_to_five():
    for n in (4, 5):
        got = [tuple(tuple(p.tolist()) for p in t) for t in enumerate_solutions(n, commutator_system(2))]
        assert got == _naive_commuting_pairs(n)


def test_enumerate_degree_one():
    for R in (commutator_system(2), bs_system(2, 3), relator_system(["x1^2", "x1 x2 x1^-1 x2^-2"], 2)):
        sols = list(enumerate_solutions(1, R))
        assert sols == [PermTuple([identity(1), identity(1)])]


def test_enumerate_bs_contains_exact():
    sols = list(enumerate_solutions(5, bs_system(2, 3)))
    assert bs_exact(2, 3, 5) in sols
    assert all(defect(s, bs_system(2, 3)).max_defect == 0 for s in sols)
    assert len(sols) == len(set(sols))


def test_rank_three_commuting_triples():
    sols = list(enumerate_solutions(3, commutator_system(3)))
    sym = list(itertools.permutations(range(3)))
    naive = [
        c
        for c in itertools.product(sym, repeat=3)
        if all(a[b[x]] == b[a[x]] for a, b in itertools.combinations(c, 2) for x in range(3))
    ]
    assert [tuple(tuple(p.tolist()) for p in s) for s in sols] == naive


def test_cap():
    with pytest.raises(EnumerationCapExceeded):
        next(enumerate_solutions(8, bs_system(1, 2)))
    with pytest.raises(EnumerationCapExceeded):
        nearest_solution(PermTuple([identity(11)] * 2), commutator_system(2))
    assert ORACLE_CAP == 10**7


def test_s3_optimum_is_two_thirds():
    res = nearest_solution(S3_PAIR, commutator_system(2))
    assert res.optimum == Fraction(2, 3)
    assert res.examined == 18
    # brute force over all 36 pairs, independent of the oracle code
    sym = [Permutation(p) for p in itertools.permutations(range(3))]
    best = min(
        max(hamming(S3_PAIR[0], p), hamming(S3_PAIR[1], q))
        for p in sym
        for q in sym
        if compose(p, q) == compose(q, p)
    )
    assert best == Fraction(2, 3)
    assert defect(res.witness, commutator_system(2)).max_defect == 0
    assert max(hamming(a, b) for a, b in zip(S3_PAIR, res.witness)) == res.optimum


def test_solution_has_optimum_zero():
    t = torus_tuple(2)
    res = nearest_solution(t, commutator_system(2))
    assert res.optimum == 0 and res.witness == t


def _optimum_reverse(t, n):
    """Independent scan: all pairs in reverse lexicographic order, naive commutation test."""
    sym = list(itertools.permutations(range(n)))[::-1]
    a, b = (p.tolist() for p in t)
    best = None
    for p in sym:
        for q in sym:
            if any(p[q[x]] != q[p[x]] for x in range(n)):
                continue
            cost = max(sum(u != v for u, v in zip(p, a)), sum(u != v for u, v in zip(q, b)))
            best = cost if best is None else min(best, cost)
    return Fraction(best, n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_optimum_independent_order(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(8):
        t = PermTuple(random_perm(rng, n) for _ in range(2))
        assert nearest_solution(t, commutator_system(2)).optimum == _optimum_reverse(t, n)


def test_optimum_conjugation_invariant():
    rng = np.random.default_rng(5)
    R = commutator_system(2)
    for _ in range(10):
        t = PermTuple(random_perm(rng, 5) for _ in range(2))
        r = random_perm(rng, 5)
        a = nearest_solution(t, R)
        b = nearest_solution(t.conjugate(r), R)
        assert a.optimum == b.optimum
        assert max(hamming(x, y) for x, y in zip(t.conjugate(r), a.witness.conjugate(r))) == a.optimum


def test_optimum_zero_iff_solution():
    rng = np.random.default_rng(9)
    R = commutator_system(2)
    for seed in range(10):
        t = perturb(random_commuting_tuple(5, 2, seed), Fraction(int(rng.integers(0, 3)), 5), seed)
        res = nearest_solution(t, R)
        assert (res.optimum == 0) == (defect(t, R).max_defect == 0)


def test_nearest_non_commutator_system():
    R = relator_system(["x1^2", "x2^2", "x1 x2 x1^-1 x2^-1"], 2)
    t = PermTuple([Permutation([1, 2, 0]), Permutation([0, 1, 2])])
    res = nearest_solution(t, R)
    assert defect(res.witness, R).max_defect == 0
    # an involution differs from a 3-cycle in at least 2 of 3 images
    assert res.optimum == Fraction(2, 3)


def test_rank_mismatch():
    with pytest.raises(ValueError):
        nearest_solution(torus_tuple(2), commutator_system(3))
