from fractions import Fraction

import numpy as np
import pytest

from permstab.lattice import IntegerLattice, SingularMatrixError, hnf, lattice_index, span_hnf


def _solve(M, b):
    """Exact solution of M x = b over Q (M square, nonsingular)."""
    k = len(M)
    A = [[Fraction(M[i][j]) for j in range(k)] + [Fraction(b[i])] for i in range(k)]
    for c in range(k):
        piv = next(r for r in range(c, k) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        for r in range(k):
            if r != c and A[r][c]:
                f = A[r][c] / A[c][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [A[i][k] / A[i][i] for i in range(k)]


def _in_column_span(M, v):
    return all(x.denominator == 1 for x in _solve(M, v))


def _is_hnf(lat: IntegerLattice):
    B = lat.basis
    k = len(B)
    for i in range(k):
        if B[i][i] <= 0:
            return False
        for j in range(k):
            if j > i and B[i][j] != 0:
                return False
            if j < i and not 0 <= B[i][j] < B[i][i]:
                return False
    return True


def _random_nonsingular(rng, k):
    while True:
        M = rng.integers(-6, 7, size=(k, k))
        if round(np.linalg.det(M)) != 0:
            return M.tolist()


def _random_unimodular(rng, k):
    U = np.eye(k, dtype=np.int64)
    for _ in range(6):
        i, j = rng.choice(k, 2, replace=False)
        U[:, j] += int(rng.integers(-2, 3)) * U[:, i]
        if rng.random() < 0.3:
            U[:, [i, j]] = U[:, [j, i]]
    return U


def test_hnf_examples():
    assert hnf([[1, 0], [0, 1]]) == IntegerLattice.identity(2)
    assert lattice_index(IntegerLattice.identity(3)) == 1
    d = hnf([[2, 0], [0, 2]])
    assert d.diagonal == (2, 2) and d.index == 4
    e = hnf([[2, 2], [0, 2]])
    assert e.diagonal == (2, 2) and e.index == 4 and _is_hnf(e)
    assert lattice_index(IntegerLattice.diagonal_lattice([3, 5])) == 15


def test_hnf_singular():
    with pytest.raises(SingularMatrixError):
        hnf([[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        hnf([[1, 2, 3], [4, 5, 6]])
    assert span_hnf([(1, 1), (2, 2)], 2) is None


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_hnf_spans_same_lattice(rng, k):
    for _ in range(40):
        M = _random_nonsingular(rng, k)
        lat = hnf(M)
        assert _is_hnf(lat)
        assert lat.index == abs(round(np.linalg.det(M)))
        for j in range(k):
            assert lat.contains([M[i][j] for i in range(k)])
            assert _in_column_span(M, lat.column(j))


@pytest.mark.parametrize("k", [2, 3])
def test_hnf_idempotent_and_basis_invariant(rng, k):
    for _ in range(40):
        M = np.array(_random_nonsingular(rng, k))
        lat = hnf(M.tolist())
        cols = np.array([lat.column(j) for j in range(k)]).T
        assert hnf(cols.tolist()) == lat
        assert hnf((M @ _random_unimodular(rng, k)).tolist()) == lat


def test_reduce_and_cosets(rng):
    for _ in range(30):
        lat = hnf(_random_nonsingular(rng, 2))
        reps = lat.coset_representatives()
        assert len(reps) == lat.index
        assert reps == sorted(reps)
        assert all(lat.reduce(r) == r for r in reps)
        for _ in range(20):
            v = rng.integers(-50, 50, size=2).tolist()
            r = lat.reduce(v)
            assert r in reps
            assert lat.contains([a - b for a, b in zip(v, r)])
