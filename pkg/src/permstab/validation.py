"""Input validation helpers, in the spirit of ``sklearn.utils.check_array``."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .perm import PermTuple, Permutation
from .words import RelatorSystem, as_fraction, commutator_system

__all__ = ["check_perm_tuple", "check_radius", "check_rate", "check_system"]


def check_perm_tuple(X, *, min_rank: int = 1, degree: int | None = None) -> PermTuple:
    """Coerce ``X`` to a :class:`PermTuple`.

    Accepts a PermTuple, a sequence of Permutations or image lists, or an
    ``(m, n)`` integer array whose rows are one-line image arrays.
    """
    if isinstance(X, PermTuple):
        t = X
    elif isinstance(X, Permutation):
        t = PermTuple([X])
    else:
        if isinstance(X, np.ndarray):
            if X.ndim != 2:
                raise ValueError(f"expected a 2-D array of images, got shape {X.shape}")
            if not np.issubdtype(X.dtype, np.integer):
                raise ValueError("image arrays must be integer typed")
        rows = list(X)
        if not rows:
            raise ValueError("empty input: need at least one permutation")
        t = PermTuple(r if isinstance(r, Permutation) else Permutation(np.asarray(r)) for r in rows)
    if t.rank < min_rank:
        raise ValueError(f"need at least {min_rank} permutations, got {t.rank}")
    if degree is not None and t.degree != degree:
        raise ValueError(f"expected degree {degree}, got {t.degree}")
    return t


def check_radius(L) -> int:
    if isinstance(L, bool) or not isinstance(L, (int, np.integer)):
        raise TypeError(f"radius must be an integer, got {type(L).__name__}")
    if L < 1:
        raise ValueError("radius must be at least 1")
    return int(L)


def check_rate(rho) -> Fraction:
    rate = as_fraction(rho)
    if not 0 <= rate < 1:
        raise ValueError("rate must lie in [0, 1)")
    return rate


def check_system(system: RelatorSystem | None, rank: int) -> RelatorSystem:
    """Default to the commutator system of ``rank``; otherwise check the rank matches."""
    if system is None:
        return commutator_system(rank)
    if system.rank != rank:
        raise ValueError(f"relator system has rank {system.rank}, tuple has rank {rank}")
    return system
