"""Finite-index sublattices of Z^k in column-style Hermite normal form.

A lattice is stored by a lower-triangular basis matrix whose *columns* generate
it: the diagonal is positive and each entry left of the diagonal is reduced into
``[0, diag)`` of its row. Two generating sets with the same span always produce
the same basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

__all__ = ["IntegerLattice", "hnf", "span_hnf", "lattice_index", "SingularMatrixError"]


class SingularMatrixError(ValueError):
    pass


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class _Echelon:
    """Incremental lower-echelon basis; slot ``i`` holds the vector whose first nonzero entry is ``i``."""

    def __init__(self, k: int):
        self.k = k
        self.slots: list[list[int] | None] = [None] * k

    def insert(self, v: Sequence[int]) -> None:
        v = list(v)
        k = self.k
        for i in range(k):
            if v[i] == 0:
                continue
            b = self.slots[i]
            if b is None:
                if v[i] < 0:
                    v = [-x for x in v]
                self.slots[i] = v
                self._reduce_slot(i)
                return
            g, s, t = _xgcd(b[i], v[i])
            bi, vi = b[i] // g, v[i] // g
            new_b = [s * x + t * y for x, y in zip(b, v)]
            v = [bi * y - vi * x for x, y in zip(b, v)]
            if new_b[i] < 0:
                new_b = [-x for x in new_b]
            self.slots[i] = new_b
            self._reduce_slot(i)
            self._reduce_others(i)

    def _reduce_slot(self, i: int) -> None:
        b = self.slots[i]
        for r in range(i + 1, self.k):
            c = self.slots[r]
            if c is not None and b[r]:
                q = b[r] // c[r]
                if q:
                    b = [x - q * y for x, y in zip(b, c)]
        self.slots[i] = b

    def _reduce_others(self, i: int) -> None:
        for j in range(i):
            if self.slots[j] is not None:
                self._reduce_slot(j)

    def full_rank(self) -> bool:
        return all(s is not None for s in self.slots)

    def matrix(self) -> tuple[tuple[int, ...], ...]:
        for j in reversed(range(self.k)):
            self._reduce_slot(j)
        cols = self.slots
        return tuple(tuple(cols[j][i] for j in range(self.k)) for i in range(self.k))


@dataclass(frozen=True)
class IntegerLattice:
    """A full-rank sublattice of Z^k given by its HNF basis (rows of a lower-triangular matrix)."""

    basis: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.basis[i][i] for i in range(self.rank))

    @property
    def index(self) -> int:
        return prod(self.diagonal)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.basis)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        """Canonical coset representative: the unique ``r = v mod L`` with ``0 <= r_i < diag_i``."""
        v = list(v)
        for j in range(self.rank):
            q = v[j] // self.basis[j][j]
            if q:
                for i in range(j, self.rank):
                    v[i] -= q * self.basis[i][j]
        return tuple(v)

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def coset_representatives(self) -> list[tuple[int, ...]]:
        """All canonical residues, in lexicographic order."""
        return list(itertools.product(*(range(d) for d in self.diagonal)))

    @classmethod
    def identity(cls, k: int) -> "IntegerLattice":
        return cls(tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))

    @classmethod
    def diagonal_lattice(cls, diag: Sequence[int]) -> "IntegerLattice":
        k = len(diag)
        return hnf([[diag[i] if i == j else 0 for j in range(k)] for i in range(k)])


def span_hnf(vectors: Iterable[Sequence[int]], k: int) -> IntegerLattice | None:
    """HNF of the integer span of ``vectors`` in Z^k, or ``None`` when the span has rank < k."""
    ech = _Echelon(k)
    for v in vectors:
        if any(v):
            ech.insert(v)
    if not ech.full_rank():
        return None
    return IntegerLattice(ech.matrix())


def hnf(M: Sequence[Sequence[int]]) -> IntegerLattice:
    """HNF of the lattice spanned by the columns of the square integer matrix ``M``."""
    k = len(M)
    if any(len(row) != k for row in M):
        raise ValueError("hnf expects a square matrix")
    lat = span_hnf(([int(M[i][j]) for i in range(k)] for j in range(k)), k)
    if lat is None:
        raise SingularMatrixError("matrix is singular")
    return lat


def lattice_index(L: IntegerLattice) -> int:
    return L.index
