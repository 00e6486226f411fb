import itertools
from fractions import Fraction

import numpy as np
import pytest

from permstab.instances import glue, perturb, random_commuting_tuple, torus_tuple
from permstab.lattice import IntegerLattice, hnf
from permstab.oracle import nearest_solution
from permstab.perm import PermTuple, Permutation, compose, hamming, identity, power, sign
from permstab.rounding import (
    FAILED,
    KEPT,
    REPAIRED,
    ComponentInfo,
    ParityRepairExhausted,
    cluster_components,
    commutator_defect,
    defect_points,
    infer_stabilizer,
    is_regular,
    repair_component,
    round_tuple,
    round_tuple_even,
    window_evaluate,
)
from permstab.instances import coset_action
from permstab.words import commutator_system, defect

from conftest import random_perm, with_transposition

S3_PAIR = PermTuple([Permutation([1, 2, 0]), Permutation([1, 0, 2])])


def _commutes(t: PermTuple) -> bool:
    return all(compose(p, q) == compose(q, p) for p, q in itertools.combinations(t, 2))


def _bad_points_bruteforce(t: PermTuple) -> set[int]:
    imgs = [p.tolist() for p in t]
    return {
        x
        for x in range(t.degree)
        for a, b in itertools.combinations(imgs, 2)
        if a[b[x]] != b[a[x]]
    }


def test_defect_points_match_bruteforce(rng):
    for _ in range(100):
        t = PermTuple(random_perm(rng, 7) for _ in range(3))
        assert defect_points(t) == frozenset(_bad_points_bruteforce(t))
    assert defect_points(torus_tuple(5)) == frozenset()


def test_commutator_defect_agrees_with_words(rng):
    for _ in range(50):
        t = PermTuple(random_perm(rng, 8) for _ in range(3))
        assert commutator_defect(t) == defect(t, commutator_system(3)).max_defect


def test_window_matches_normal_form(rng):
    t = PermTuple(random_perm(rng, 10) for _ in range(2))
    table = window_evaluate(t, 3, 2)
    assert len(table.values) == 25
    for a1, a2 in itertools.product(range(-2, 3), repeat=2):
        # p1^a1 p2^a2 applied right to left
        expected = power(t[0], a1)(power(t[1], a2)(3))
        assert table[(a1, a2)] == expected


def test_is_regular():
    t = torus_tuple(12)
    assert all(is_regular(t, x, 6) for x in (0, 77))
    bad = with_transposition(t, 0, 0, 1)
    assert not is_regular(bad, 0, 6)
    # (6, 6) sits 6 steps from each corrupted point on both axes
    far = 6 * 12 + 6
    assert is_regular(bad, far, 6)
    assert not is_regular(bad, far, 7)


def test_infer_stabilizer_examples():
    for N in (3, 5):
        assert infer_stabilizer(window_evaluate(torus_tuple(N), 0, N)) == IntegerLattice.diagonal_lattice([N, N])
        assert infer_stabilizer(window_evaluate(torus_tuple(N), 0, N - 1)) is None
    t = coset_action(IntegerLattice.diagonal_lattice([2, 3]))
    for x in range(6):
        assert infer_stabilizer(window_evaluate(t, x, 3)) == IntegerLattice.diagonal_lattice([2, 3])


def test_infer_stabilizer_skewed_lattice():
    lat = hnf([[3, 0], [1, 2]])
    t = coset_action(lat)
    assert infer_stabilizer(window_evaluate(t, 0, 4)) == lat


def test_exact_tuple_components_kept():
    t = random_commuting_tuple(200, 2, 3)
    comps = cluster_components(t, 2)
    assert all(c.status == KEPT for c in comps)
    assert sum(len(c) for c in comps) == 200
    assert [c.base for c in comps] == sorted(c.base for c in comps)


@pytest.mark.parametrize("seed", range(5))
def test_components_disjoint(seed):
    t = perturb(random_commuting_tuple(400, 2, seed), "0.05", seed)
    comps = cluster_components(t, 3)
    seen = set()
    bad = defect_points(t)
    for c in comps:
        assert not (seen & c.points)
        seen |= c.points
        assert c.base == min(c.points)
        assert c.status in (KEPT, REPAIRED, FAILED)
        if c.status != KEPT:
            assert not (c.points & bad)
        if c.status == REPAIRED:
            assert c.lattice.index == len(c)


def test_repair_exact_component_reproduces_restriction():
    t = torus_tuple(4)
    comp = ComponentInfo(frozenset(range(16)), IntegerLattice.diagonal_lattice([4, 4]), 0, REPAIRED)
    parts = repair_component(t, comp)
    for p, pa in zip(t, parts):
        assert pa.support == comp.points
        assert all(pa(x) == p(x) for x in range(16))


def test_repair_fixed_point_component():
    t = glue([PermTuple([Permutation([1, 0]), Permutation([1, 0])]), PermTuple([identity(1)] * 2)])
    comp = ComponentInfo(frozenset({2}), IntegerLattice.identity(2), 2, REPAIRED)
    parts = repair_component(t, comp)
    assert all(pa.mapping == {2: 2} for pa in parts)


def test_repair_corrupted_torus_component():
    clean = torus_tuple(4)
    t = with_transposition(clean, 1, 5, 10)
    comp = ComponentInfo(frozenset(range(16)), IntegerLattice.diagonal_lattice([4, 4]), 0, REPAIRED)
    p1, p2 = repair_component(t, comp)
    for x in range(16):
        assert p1(p2(x)) == p2(p1(x))
    assert sorted(p1.mapping.values()) == list(range(16))
    changed = [x for x in range(16) if p2(x) != t[1](x)]
    assert changed == [5, 10]
    assert all(p1(x) == t[0](x) for x in range(16))


def test_repair_rejects_bad_components():
    t = torus_tuple(4)
    with pytest.raises(ValueError):
        repair_component(t, ComponentInfo(frozenset(range(16)), None, 0, FAILED))
    # chart of a 16-point lattice cannot fit inside an 8-point component
    wrong = ComponentInfo(frozenset(range(8)), IntegerLattice.diagonal_lattice([4, 4]), 0, REPAIRED)
    with pytest.raises(ValueError):
        repair_component(t, wrong)


def test_round_exact_is_identity_map():
    for t in (torus_tuple(40), random_commuting_tuple(500, 3, 1), torus_tuple(2)):
        out, rep = round_tuple(t, 3)
        assert out == t
        assert rep.max_displacement == 0 and rep.sum_displacement == 0
        assert rep.leftover_fraction == 0 and rep.displaced_points == 0


def test_round_non_commuting_s3():
    out, rep = round_tuple(S3_PAIR, 6)
    assert _commutes(out)
    # every point is a defect point, so everything is left over
    assert all(p.is_identity() for p in out)
    assert rep.leftover_fraction == 1
    assert rep.components[FAILED] == 0


@pytest.mark.parametrize("seed", range(8))
def test_round_soundness_and_report(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(20, 300))
    k = int(rng.integers(2, 4))
    t = perturb(random_commuting_tuple(n, k, seed), "0.05", seed)
    for L in (1, 3, 6):
        out, rep = round_tuple(t, L)
        assert _commutes(out)
        assert rep.residual_defect == 0
        assert rep.displacement == tuple(hamming(a, b) for a, b in zip(t, out))
        changed = {x for x in range(n) if any(a(x) != b(x) for a, b in zip(t, out))}
        assert rep.displaced_points == len(changed)
        assert rep.input_defect == commutator_defect(t)
        # kept components untouched
        for c in cluster_components(t, L):
            if c.status == KEPT:
                assert not (c.points & changed)
        assert round_tuple(t, L)[0] == out


def test_round_arbitrary_inputs(rng):
    for _ in range(40):
        n = int(rng.integers(1, 30))
        t = PermTuple(random_perm(rng, n) for _ in range(int(rng.integers(2, 4))))
        out, rep = round_tuple(t, int(rng.integers(1, 5)))
        assert _commutes(out)
        # leftover points are fixed by every output generator
        fixed_by_all = sum(1 for x in range(n) if all(p(x) == x for p in out))
        assert rep.leftover_fraction * n <= fixed_by_all


def test_round_idempotent_on_output():
    t = perturb(random_commuting_tuple(300, 2, 7), "0.03", 7)
    out, _ = round_tuple(t)
    again, rep = round_tuple(out)
    assert again == out and rep.max_displacement == 0


def test_round_requires_rank_two():
    with pytest.raises(ValueError):
        round_tuple(PermTuple([identity(3)]))


def test_even_matches_plain_when_already_even():
    t = torus_tuple(3)  # 3-cycles are even
    plain, _ = round_tuple(t)
    even, rep = round_tuple_even(t)
    assert even == plain and rep.parity_fixes == 0


def test_even_fixes_with_leftover_transpositions():
    odd_block = PermTuple([Permutation([1, 0]), identity(2)])
    noisy = glue([S3_PAIR, S3_PAIR])
    t = glue([odd_block, noisy])
    plain, prep = round_tuple(t)
    assert sign(plain[0]) == -1 and sign(plain[1]) == 1
    even, rep = round_tuple_even(t)
    assert _commutes(even)
    assert all(sign(p) == 1 for p in even)
    assert rep.parity_fixes == 1
    # smallest leftover pair is (2, 3)
    diff = [x for x in range(t.degree) if even[0](x) != plain[0](x)]
    assert diff == [2, 3]
    assert even[1] == plain[1]
    assert rep.max_displacement - prep.max_displacement <= Fraction(2, t.degree)


def test_even_exhausted():
    t = PermTuple([Permutation([1, 0, 2]), Permutation([1, 0, 2])])
    with pytest.raises(ParityRepairExhausted) as info:
        round_tuple_even(t)
    assert info.value.rounded == t
    assert info.value.report.max_displacement == 0


@pytest.mark.parametrize("seed", range(6))
def test_even_random(seed):
    t = perturb(random_commuting_tuple(500, 3, seed), "0.02", seed)
    try:
        out, rep = round_tuple_even(t, 4)
    except ParityRepairExhausted:
        return
    assert _commutes(out)
    assert all(sign(p) == 1 for p in out)


@pytest.mark.parametrize("n", [4, 5])
def test_round_never_beats_oracle(n):
    rng = np.random.default_rng(n)
    for seed in range(6):
        base = random_commuting_tuple(n, 2, seed)
        t = perturb(base, Fraction(int(rng.integers(1, 4)), n), seed)
        opt = nearest_solution(t, commutator_system(2)).optimum
        _, rep = round_tuple(t)
        assert rep.max_displacement >= opt
