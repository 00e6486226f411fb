"""Free-group words, relator systems, and defect measurement on permutation tuples.

Text notation for words: generators ``x1 .. xm`` (1-based in text, 0-based
internally), an optional integer exponent ``^k``, letters juxtaposed or
separated by whitespace. ``1`` or ``e`` denotes the empty word. Commutators may
be written ``[u,v]`` where ``u`` and ``v`` are words; ``[u,v] = u v u^-1 v^-1``.

Example: ``"x2^-1 x1^2 x2 x1^-3"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Iterable, Iterator, Sequence

import numpy as np

from .perm import PermTuple, Permutation, identity, power

__all__ = [
    "FreeWord",
    "RelatorSystem",
    "DefectReport",
    "StrongCheckReport",
    "EnumerationCapExceeded",
    "MEMBERSHIP_KINDS",
    "WORD_ENUMERATION_CAP",
    "reduce",
    "parse_word",
    "word_length",
    "evaluate",
    "commutator",
    "commutator_system",
    "bs_system",
    "relator_system",
    "defect",
    "abelian_membership",
    "trivial_membership",
    "enumerate_reduced_words",
    "count_reduced_words",
    "strong_solution_check",
    "as_fraction",
]

MEMBERSHIP_KINDS = ("abelian-commutator", "trivial", "none")
WORD_ENUMERATION_CAP = 50_000


class EnumerationCapExceeded(RuntimeError):
    """Raised when a requested enumeration is larger than the hard cap."""


def as_fraction(value) -> Fraction:
    """Coerce ints, strings like ``"1/5"`` and decimal floats to an exact fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class FreeWord:
    """A freely reduced word; ``letters`` holds ``(generator, exponent)`` pairs."""

    rank: int
    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for i, (g, e) in enumerate(self.letters):
            if not 0 <= g < self.rank:
                raise ValueError(f"generator index {g} out of range for rank {self.rank}")
            if e == 0:
                raise ValueError("zero exponent in reduced word")
            if i and self.letters[i - 1][0] == g:
                raise ValueError("adjacent letters share a generator; word is not reduced")

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        return reduce(self.letters + other.letters, self.rank)

    def __invert__(self) -> "FreeWord":
        return FreeWord(self.rank, tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "FreeWord":
        base = self if k >= 0 else ~self
        return reduce(base.letters * abs(k), self.rank)

    def __len__(self) -> int:
        return word_length(self)

    def exponent_sums(self) -> list[int]:
        sums = [0] * self.rank
        for g, e in self.letters:
            sums[g] += e
        return sums

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"x{g + 1}" if e == 1 else f"x{g + 1}^{e}" for g, e in self.letters)


def reduce(letters: Iterable[tuple[int, int]], rank: int) -> FreeWord:
    """Free reduction: merge adjacent powers of one generator and drop zero exponents."""
    stack: list[list[int]] = []
    for g, e in letters:
        if not 0 <= g < rank:
            raise ValueError(f"generator index {g} out of range for rank {rank}")
        if e == 0:
            continue
        if stack and stack[-1][0] == g:
            stack[-1][1] += e
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([g, e])
    return FreeWord(rank, tuple((g, e) for g, e in stack))


_TOKEN = re.compile(r"\s*(?:(\[)|(\])|(,)|x(\d+)(?:\^(-?\d+))?|(1|e)(?![\w^])|(\S))")


def parse_word(text: str, rank: int) -> FreeWord:
    """Parse the text notation described in the module docstring."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        pos = m.end()
        if m.group(7):
            raise ValueError(f"unexpected character {m.group(7)!r} in word {text!r}")
        tokens.append(m)

    def parse_seq(i: int, stop: set[str]) -> tuple[FreeWord, int]:
        acc = FreeWord(rank)
        while i < len(tokens):
            t = tokens[i]
            if t.group(1):
                u, i = parse_seq(i + 1, {","})
                if i >= len(tokens) or not tokens[i].group(3):
                    raise ValueError(f"malformed commutator in {text!r}")
                v, i = parse_seq(i + 1, {"]"})
                if i >= len(tokens) or not tokens[i].group(2):
                    raise ValueError(f"unclosed commutator in {text!r}")
                acc = acc * commutator(u, v)
                i += 1
            elif t.group(2) or t.group(3):
                if (t.group(2) and "]" in stop) or (t.group(3) and "," in stop):
                    return acc, i
                raise ValueError(f"unexpected {t.group(0).strip()!r} in {text!r}")
            elif t.group(4):
                g = int(t.group(4)) - 1
                e = int(t.group(5)) if t.group(5) is not None else 1
                acc = acc * reduce([(g, e)], rank)
                i += 1
            else:
                i += 1
        if stop:
            raise ValueError(f"unterminated expression in {text!r}")
        return acc, i

    word, _ = parse_seq(0, set())
    return word


def word_length(w: FreeWord) -> int:
    return sum(abs(e) for _, e in w.letters)


def commutator(u: FreeWord, v: FreeWord) -> FreeWord:
    return u * v * ~u * ~v


def evaluate(w: FreeWord, t: PermTuple) -> Permutation:
    """Image of ``w`` under the homomorphism sending generator ``i`` to ``t[i]``."""
    if w.rank != t.rank:
        raise ValueError(f"rank mismatch: word rank {w.rank}, tuple rank {t.rank}")
    arr = np.arange(t.degree)
    cache: dict[tuple[int, int], np.ndarray] = {}
    for g, e in reversed(w.letters):
        key = (g, e)
        if key not in cache:
            cache[key] = power(t[g], e).images
        arr = cache[key][arr]
    return Permutation(arr, check=False)


@dataclass(frozen=True)
class RelatorSystem:
    rank: int
    relators: tuple[FreeWord, ...]
    membership: str = "none"

    def __post_init__(self):
        if not self.relators:
            raise ValueError("a relator system needs at least one relator")
        if self.membership not in MEMBERSHIP_KINDS:
            raise ValueError(f"unknown membership kind {self.membership!r}")
        for r in self.relators:
            if r.rank != self.rank:
                raise ValueError("relator rank does not match system rank")

    def __str__(self) -> str:
        return "; ".join(str(r) for r in self.relators)


def commutator_system(k: int) -> RelatorSystem:
    """All commutators ``[x_i, x_j]`` with ``i < j``."""
    if k < 2:
        raise ValueError("commutator system needs rank >= 2")
    gens = [FreeWord(k, ((i, 1),)) for i in range(k)]
    rels = tuple(commutator(gens[i], gens[j]) for i in range(k) for j in range(i + 1, k))
    return RelatorSystem(k, rels, "abelian-commutator")


def bs_system(mexp: int, nexp: int) -> RelatorSystem:
    """Baumslag-Solitar relator ``t^-1 a^m t a^-n`` with ``a = x1``, ``t = x2``."""
    if mexp == 0 or nexp == 0:
        raise ValueError("Baumslag-Solitar exponents must be nonzero")
    rel = reduce([(1, -1), (0, mexp), (1, 1), (0, -nexp)], 2)
    return RelatorSystem(2, (rel,), "none")


def relator_system(texts: Sequence[str], rank: int) -> RelatorSystem:
    """Literal relators parsed from text, with the ``trivial`` membership oracle."""
    return RelatorSystem(rank, tuple(parse_word(s, rank) for s in texts), "trivial")


@dataclass(frozen=True)
class DefectReport:
    per_relator: tuple[Fraction, ...]
    defect_points: frozenset[int] = field(repr=False)

    @property
    def max_defect(self) -> Fraction:
        return max(self.per_relator)

    def is_solution(self) -> bool:
        return self.max_defect == 0

    def is_delta_solution(self, delta) -> bool:
        return self.max_defect < as_fraction(delta)


def _check_rank(t: PermTuple, R: RelatorSystem) -> None:
    if t.rank != R.rank:
        raise ValueError(f"rank mismatch: tuple rank {t.rank}, system rank {R.rank}")


def defect(t: PermTuple, R: RelatorSystem) -> DefectReport:
    """Per-relator Hamming distance of the relator images from the identity."""
    _check_rank(t, R)
    n = t.degree
    points = np.arange(n)
    moved_any = np.zeros(n, dtype=bool)
    values = []
    for r in R.relators:
        moved = evaluate(r, t).images != points
        moved_any |= moved
        values.append(Fraction(int(moved.sum()), n))
    return DefectReport(tuple(values), frozenset(np.flatnonzero(moved_any).tolist()))


def abelian_membership(w: FreeWord, R: RelatorSystem) -> bool:
    """Membership in the commutator subgroup: all exponent sums vanish."""
    if R.membership != "abelian-commutator":
        raise ValueError("abelian membership needs an abelian-commutator system")
    return all(s == 0 for s in w.exponent_sums())


def trivial_membership(w: FreeWord, R: RelatorSystem) -> bool:
    """Recognizes only the empty word and literal powers of listed relators."""
    if R.membership != "trivial":
        raise ValueError("trivial membership needs a trivial-kind system")
    if not w.letters:
        return True
    for r in R.relators:
        lr = word_length(r)
        if lr == 0:
            continue
        top = word_length(w) // lr
        for e in range(1, top + 1):
            if w == r**e or w == r ** (-e):
                return True
    return False


def _membership_oracle(R: RelatorSystem):
    if R.membership == "abelian-commutator":
        return abelian_membership
    if R.membership == "trivial":
        return trivial_membership
    raise ValueError(f"no membership oracle for systems of kind {R.membership!r}")


def count_reduced_words(rank: int, max_length: int) -> int:
    """Number of reduced words of length ``<= max_length`` in the free group of ``rank``."""
    if max_length < 0:
        return 0
    total, level = 1, 2 * rank
    for _ in range(max_length):
        total += level
        level *= 2 * rank - 1
    return total


def enumerate_reduced_words(rank: int, max_length: int) -> Iterator[FreeWord]:
    """All reduced words up to ``max_length``, ordered by length then lexicographically.

    Unit letters are ordered ``x1, x1^-1, x2, x2^-1, ...``.
    """
    units = [(g, s) for g in range(rank) for s in (1, -1)]
    level: list[tuple[tuple[int, int], ...]] = [()]
    yield FreeWord(rank)
    for _ in range(max_length):
        nxt = []
        for seq in level:
            for g, s in units:
                if seq and seq[-1] == (g, -s):
                    continue
                nxt.append(seq + ((g, s),))
        for seq in nxt:
            yield reduce(seq, rank)
        level = nxt


@dataclass(frozen=True)
class StrongCheckReport:
    delta: Fraction
    max_length: int
    words_checked: int
    violations: tuple[tuple[FreeWord, bool, Fraction], ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def strong_solution_check(t: PermTuple, R: RelatorSystem, delta) -> StrongCheckReport:
    """Test the strong-solution dichotomy on every word shorter than ``1/delta``.

    Words in the normal closure must evaluate within ``delta`` of the identity;
    words outside it must be at distance greater than ``1 - delta``.
    """
    _check_rank(t, R)
    member = _membership_oracle(R)
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    # largest integer length strictly below 1/delta
    max_length = ceil(1 / delta) - 1
    total = count_reduced_words(R.rank, max_length)
    if total > WORD_ENUMERATION_CAP:
        raise EnumerationCapExceeded(
            f"{total} words of length < {1 / delta} exceed the cap of {WORD_ENUMERATION_CAP}"
        )
    ident = identity(t.degree)
    violations = []
    checked = 0
    for w in enumerate_reduced_words(R.rank, max_length):
        checked += 1
        moved = int(np.count_nonzero(evaluate(w, t).images != ident.images))
        dist = Fraction(moved, t.degree)
        inside = member(w, R)
        ok = dist < delta if inside else dist > 1 - delta
        if not ok:
            violations.append((w, inside, dist))
    return StrongCheckReport(delta, max_length, checked, tuple(violations))
