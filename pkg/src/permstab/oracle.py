"""Exhaustive ground truth at tiny degree.

``nearest_solution`` scans every exact solution and returns the one minimizing
the largest per-generator Hamming displacement (ties: smaller total
displacement, then lexicographically smaller image arrays).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator

from .perm import PermTuple, Permutation
from .words import EnumerationCapExceeded, FreeWord, RelatorSystem, commutator_system

__all__ = [
    "ORACLE_CAP",
    "OracleResult",
    "centralizer",
    "enumerate_solutions",
    "nearest_solution",
]

ORACLE_CAP = 10**7

Perm = tuple[int, ...]


@dataclass(frozen=True)
class OracleResult:
    optimum: Fraction
    witness: PermTuple
    examined: int


def _partition_count(n: int) -> int:
    p = [1] + [0] * n
    for part in range(1, n + 1):
        for s in range(part, n + 1):
            p[s] += p[s - part]
    return p[n]


def _is_commutator_system(R: RelatorSystem) -> bool:
    return R.membership == "abelian-commutator" and R.relators == commutator_system(R.rank).relators


def _check_cap(n: int, R: RelatorSystem) -> None:
    if _is_commutator_system(R) and R.rank == 2:
        # centralizer enumeration touches each commuting pair once
        cost = factorial(n) * _partition_count(n)
    else:
        cost = factorial(n) ** R.rank
    if cost > ORACLE_CAP:
        raise EnumerationCapExceeded(f"oracle work {cost} at degree {n} exceeds the cap of {ORACLE_CAP}")


def _cycles(p: Perm) -> list[list[int]]:
    seen = [False] * len(p)
    out = []
    for s in range(len(p)):
        if not seen[s]:
            cyc = []
            x = s
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = p[x]
            out.append(cyc)
    return out


def centralizer(p: Perm) -> list[Perm]:
    """All permutations commuting with ``p``, in lexicographic order.

    A commuting ``q`` maps each cycle of ``p`` onto a cycle of the same length,
    rotated by some shift; every such choice gives one element.
    """
    by_len: dict[int, list[list[int]]] = {}
    for c in _cycles(p):
        by_len.setdefault(len(c), []).append(c)
    per_length = []
    for length, cs in by_len.items():
        options = []
        for target in itertools.permutations(range(len(cs))):
            for shifts in itertools.product(range(length), repeat=len(cs)):
                options.append([(cs[a], cs[target[a]], shifts[a]) for a in range(len(cs))])
        per_length.append(options)
    out = []
    n = len(p)
    for choice in itertools.product(*per_length):
        q = [0] * n
        for block in choice:
            for src, dst, s in block:
                ln = len(src)
                for j, x in enumerate(src):
                    q[x] = dst[(j + s) % ln]
        out.append(tuple(q))
    out.sort()
    return out


def _power(p: Perm, e: int) -> Perm:
    if e < 0:
        inv = [0] * len(p)
        for i, v in enumerate(p):
            inv[v] = i
        p, e = tuple(inv), -e
    out = tuple(range(len(p)))
    for _ in range(e):
        out = tuple(p[x] for x in out)
    return out


def _evaluates_to_identity(w: FreeWord, perms: tuple[Perm, ...], cache: dict) -> bool:
    n = len(perms[0])
    arr = list(range(n))
    for g, e in reversed(w.letters):
        key = (perms[g], e)
        pw = cache.get(key)
        if pw is None:
            pw = cache[key] = _power(perms[g], e)
        arr = [pw[x] for x in arr]
    return arr == list(range(n))


def _commuting_tuples(n: int, m: int) -> Iterator[tuple[Perm, ...]]:
    def rec(prefix: tuple[Perm, ...], pool: list[Perm]):
        if len(prefix) == m:
            yield prefix
            return
        for q in pool:
            if len(prefix) + 1 == m:
                yield prefix + (q,)
            else:
                cq = set(centralizer(q))
                yield from rec(prefix + (q,), [r for r in pool if r in cq])

    for p in itertools.permutations(range(n)):
        yield from rec((p,), centralizer(p))


def _raw_solutions(n: int, R: RelatorSystem) -> Iterator[tuple[Perm, ...]]:
    if _is_commutator_system(R):
        yield from _commuting_tuples(n, R.rank)
        return
    cache: dict = {}
    sym = list(itertools.permutations(range(n)))
    for combo in itertools.product(sym, repeat=R.rank):
        if all(_evaluates_to_identity(r, combo, cache) for r in R.relators):
            yield combo


def enumerate_solutions(n: int, R: RelatorSystem) -> Iterator[PermTuple]:
    """Every exact solution of ``R`` in degree ``n``, in lexicographic order of image arrays."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    _check_cap(n, R)
    for combo in _raw_solutions(n, R):
        yield PermTuple(Permutation(p, check=False) for p in combo)


def nearest_solution(t: PermTuple, R: RelatorSystem) -> OracleResult:
    """Exact minimizer of ``max_i d_H(p_i, q_i)`` over all solutions ``q`` of ``R``."""
    if t.rank != R.rank:
        raise ValueError("rank mismatch between tuple and relator system")
    n = t.degree
    _check_cap(n, R)
    target = tuple(tuple(p.tolist()) for p in t)
    best_key = None
    best = None
    examined = 0
    for combo in _raw_solutions(n, R):
        examined += 1
        counts = [sum(a != b for a, b in zip(q, p)) for q, p in zip(combo, target)]
        key = (max(counts), sum(counts), combo)
        if best_key is None or key < best_key:
            best_key, best = key, combo
    if best is None:
        raise ValueError("relator system has no solution in this degree")
    witness = PermTuple(Permutation(p, check=False) for p in best)
    return OracleResult(Fraction(best_key[0], n), witness, examined)
