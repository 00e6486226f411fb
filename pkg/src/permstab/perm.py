"""Exact permutation algebra and the normalized Hamming metric.

Points are 0-based and a permutation is stored as its one-line image array,
``images[x] == p(x)``. Composition is right-to-left everywhere in the package:
``compose(p, q)(x) == p(q(x))``.

All distances are returned as :class:`fractions.Fraction` with the degree as
denominator, so identities such as ``hamming(p, id) == 1 - fixed_fraction(p)``
hold exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Permutation",
    "PermTuple",
    "PartialAssignment",
    "identity",
    "compose",
    "inverse",
    "hamming",
    "fixed_fraction",
    "hs_distance_squared",
    "sign",
    "cycles",
    "direct_sum",
    "tensor_then_pad",
    "power",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class Permutation:
    """A bijection of ``{0, ..., n-1}`` stored as a read-only image array."""

    __slots__ = ("_images", "_hash")

    def __init__(self, images: Iterable[int] | np.ndarray, *, check: bool = True):
        arr = np.asarray(images if isinstance(images, np.ndarray) else list(images), dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("permutation images must be one-dimensional")
        if check:
            n = arr.shape[0]
            if n == 0:
                raise ValueError("permutation degree must be at least 1")
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError(f"images out of range for degree {n}")
            seen = np.zeros(n, dtype=bool)
            seen[arr] = True
            if not seen.all():
                raise ValueError("images are not a bijection")
        self._images = _frozen(arr)
        self._hash = None

    @property
    def images(self) -> np.ndarray:
        return self._images

    @property
    def degree(self) -> int:
        return int(self._images.shape[0])

    def __len__(self) -> int:
        return self.degree

    def __call__(self, x: int) -> int:
        return int(self._images[x])

    def __getitem__(self, x):
        return self._images[x]

    def __iter__(self):
        return iter(self._images.tolist())

    def tolist(self) -> list[int]:
        return self._images.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.degree == other.degree and bool(np.array_equal(self._images, other._images))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._images.tobytes())
        return self._hash

    def __repr__(self) -> str:
        return f"Permutation({self.tolist()})"

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def __pow__(self, k: int) -> "Permutation":
        return power(self, k)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._images, np.arange(self.degree)))


class PermTuple:
    """An ordered tuple of permutations sharing one degree."""

    __slots__ = ("_perms",)

    def __init__(self, perms: Iterable[Permutation | Sequence[int]]):
        items = tuple(p if isinstance(p, Permutation) else Permutation(p) for p in perms)
        if not items:
            raise ValueError("a PermTuple needs at least one permutation")
        n = items[0].degree
        if any(p.degree != n for p in items):
            raise ValueError("all permutations in a tuple must share the same degree")
        self._perms = items

    @property
    def perms(self) -> tuple[Permutation, ...]:
        return self._perms

    @property
    def degree(self) -> int:
        return self._perms[0].degree

    @property
    def rank(self) -> int:
        return len(self._perms)

    def __len__(self) -> int:
        return len(self._perms)

    def __getitem__(self, i: int) -> Permutation:
        return self._perms[i]

    def __iter__(self):
        return iter(self._perms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermTuple):
            return NotImplemented
        return self._perms == other._perms

    def __hash__(self) -> int:
        return hash(self._perms)

    def __repr__(self) -> str:
        return f"PermTuple({[p.tolist() for p in self._perms]})"

    def to_array(self) -> np.ndarray:
        """Return an ``(m, n)`` array of images."""
        return np.stack([p.images for p in self._perms])

    def conjugate(self, r: Permutation) -> "PermTuple":
        r_inv = inverse(r)
        return PermTuple(compose(compose(r, p), r_inv) for p in self._perms)


class PartialAssignment:
    """A bijection of a subset ``support`` of ``{0, ..., n-1}`` onto itself."""

    __slots__ = ("degree", "mapping")

    def __init__(self, degree: int, mapping: dict[int, int]):
        keys = set(mapping)
        if set(mapping.values()) != keys or len(keys) != len(mapping):
            raise ValueError("partial assignment must map its support bijectively onto itself")
        if keys and (min(keys) < 0 or max(keys) >= degree):
            raise ValueError("support out of range")
        self.degree = degree
        self.mapping = dict(mapping)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.mapping)

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def __repr__(self) -> str:
        return f"PartialAssignment(degree={self.degree}, mapping={self.mapping})"


def _check_same_degree(p: Permutation, q: Permutation) -> None:
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} != {q.degree}")


def identity(n: int) -> Permutation:
    if n < 1:
        raise ValueError("degree must be at least 1")
    return Permutation(np.arange(n), check=False)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``p o q``, i.e. ``x -> p(q(x))``."""
    _check_same_degree(p, q)
    return Permutation(p.images[q.images], check=False)


def inverse(p: Permutation) -> Permutation:
    inv = np.empty_like(p.images)
    inv[p.images] = np.arange(p.degree)
    return Permutation(inv, check=False)


def power(p: Permutation, k: int) -> Permutation:
    """``p`` composed with itself ``k`` times (negative ``k`` uses the inverse)."""
    base = p.images if k >= 0 else inverse(p).images
    k = abs(k)
    result = np.arange(p.degree)
    while k:
        if k & 1:
            result = base[result]
        base = base[base]
        k >>= 1
    return Permutation(result, check=False)


def _disagreements(p: Permutation, q: Permutation) -> int:
    _check_same_degree(p, q)
    return int(np.count_nonzero(p.images != q.images))


def hamming(p: Permutation, q: Permutation) -> Fraction:
    """Normalized Hamming distance: the fraction of points where ``p`` and ``q`` differ."""
    return Fraction(_disagreements(p, q), p.degree)


def fixed_fraction(p: Permutation) -> Fraction:
    """Normalized trace of the permutation matrix (fraction of fixed points)."""
    fixed = int(np.count_nonzero(p.images == np.arange(p.degree)))
    return Fraction(fixed, p.degree)


def hs_distance_squared(p: Permutation, q: Permutation) -> Fraction:
    """Squared normalized Hilbert-Schmidt distance between the permutation matrices.

    Each disagreeing row contributes two unit entries of ``A_p - A_q``, so the
    value is ``2 * disagreements / n``.
    """
    return Fraction(2 * _disagreements(p, q), p.degree)


def cycles(p: Permutation) -> list[list[int]]:
    """Cycle decomposition, each cycle starting at its smallest point, sorted by that point."""
    images = p.images.tolist()
    seen = [False] * len(images)
    out = []
    for start in range(len(images)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = images[x]
        out.append(cyc)
    return out


def sign(p: Permutation) -> int:
    return -1 if (p.degree - len(cycles(p))) % 2 else 1


def direct_sum(ps: Sequence[Permutation]) -> Permutation:
    """Block-diagonal sum; block ``j`` is shifted by the total degree of the blocks before it."""
    if not ps:
        raise ValueError("direct_sum needs at least one permutation")
    parts = []
    offset = 0
    for p in ps:
        parts.append(p.images + offset)
        offset += p.degree
    return Permutation(np.concatenate(parts), check=False)


def tensor_then_pad(p: Permutation, c: int, r: int) -> Permutation:
    """``p (x) id_c (+) id_r``: point ``i*c + s`` goes to ``p(i)*c + s``; the last ``r`` points are fixed."""
    if c < 1 or r < 0:
        raise ValueError("need c >= 1 and r >= 0")
    n = p.degree
    block = (p.images[:, None] * c + np.arange(c)[None, :]).reshape(-1)
    pad = np.arange(n * c, n * c + r)
    return Permutation(np.concatenate([block, pad]), check=False)
