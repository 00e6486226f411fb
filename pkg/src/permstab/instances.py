"""Instance generators: exact Z^k-actions, Baumslag-Solitar solutions, perturbation,
amplification and gluing.

Randomness comes from :func:`make_rng`, a Philox (counter-based, 64-bit key)
generator keyed by ``(seed, *stream)``. Each generator index gets its own
stream, so changing one parameter never shifts the draws of another.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import ceil, gcd
from typing import Any, Sequence

import numpy as np

from .lattice import IntegerLattice, hnf
from .perm import PermTuple, Permutation, compose, direct_sum, tensor_then_pad
from .words import as_fraction

__all__ = [
    "GenSpec",
    "make_rng",
    "coset_action",
    "sample_lattices",
    "random_commuting_tuple",
    "perturb",
    "amplify",
    "amplify_even",
    "bs_exact",
    "glue",
    "torus_tuple",
    "generate",
]

_MASK64 = (1 << 64) - 1
_STREAM_LATTICES = 0
_STREAM_PERTURB = 1
# success probability of the geometric law for HNF diagonal entries
GEOMETRIC_P = 0.4


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for ``(seed, *stream)``; identical keys give identical draws."""
    ss = np.random.SeedSequence([int(seed) & _MASK64, *stream])
    return np.random.Generator(np.random.Philox(ss))


def coset_action(L: IntegerLattice) -> PermTuple:
    """Translation action of Z^k on Z^k / L.

    Cosets are labelled by canonical residues in lexicographic order; generator
    ``i`` adds the ``i``-th standard basis vector.
    """
    k = L.rank
    diag = np.array(L.diagonal, dtype=np.int64)
    d = int(np.prod(diag))
    reps = np.stack(np.unravel_index(np.arange(d), tuple(diag)), axis=1).astype(np.int64)
    radix = np.ones(k, dtype=np.int64)
    for i in range(k - 2, -1, -1):
        radix[i] = radix[i + 1] * diag[i + 1]
    basis = np.array(L.basis, dtype=np.int64)
    perms = []
    for i in range(k):
        v = reps.copy()
        v[:, i] += 1
        for j in range(k):
            q = v[:, j] // diag[j]
            v -= q[:, None] * basis[:, j][None, :]
        perms.append(Permutation(v @ radix, check=False))
    return PermTuple(perms)


def torus_tuple(N: int, k: int = 2) -> PermTuple:
    """Coordinate shifts on (Z_N)^k."""
    return coset_action(IntegerLattice.diagonal_lattice([N] * k))


def sample_lattices(n: int, k: int, seed: int) -> list[IntegerLattice]:
    """Random HNF lattices whose indices sum to exactly ``n``.

    Diagonal entries are geometric, each capped so the running index never
    exceeds the remaining degree; entries left of the diagonal are uniform
    residues of their row's diagonal entry.
    """
    if n < 1:
        raise ValueError("degree must be at least 1")
    rng = make_rng(seed, _STREAM_LATTICES)
    out = []
    remaining = n
    while remaining > 0:
        diag = []
        index = 1
        for _ in range(k):
            cap = remaining // index
            d = min(int(rng.geometric(GEOMETRIC_P)), cap)
            diag.append(d)
            index *= d
        basis = [[0] * k for _ in range(k)]
        for i in range(k):
            basis[i][i] = diag[i]
            for j in range(i):
                basis[i][j] = int(rng.integers(diag[i]))
        out.append(IntegerLattice(tuple(tuple(row) for row in basis)))
        remaining -= index
    return out


def random_commuting_tuple(n: int, k: int, seed: int) -> PermTuple:
    """Exactly commuting ``k``-tuple of degree ``n``: a glued sum of random coset actions."""
    return glue([coset_action(L) for L in sample_lattices(n, k, seed)])


def perturb(t: PermTuple, rate, seed: int) -> PermTuple:
    """Compose each generator with ``ceil(rate * n / 2)`` disjoint random transpositions."""
    rate = as_fraction(rate)
    if not 0 <= rate < 1:
        raise ValueError("perturbation rate must lie in [0, 1)")
    n = t.degree
    count = min(ceil(rate * n / 2), n // 2)
    if count == 0:
        return t
    out = []
    for i, p in enumerate(t):
        rng = make_rng(seed, _STREAM_PERTURB, i)
        pts = rng.permutation(n)[: 2 * count]
        swap = np.arange(n)
        a, b = pts[0::2], pts[1::2]
        swap[a], swap[b] = b, a
        out.append(compose(p, Permutation(swap, check=False)))
    return PermTuple(out)


def amplify(t: PermTuple, c: int, r: int) -> PermTuple:
    """Entrywise ``p (x) id_c (+) id_r``; maps solutions to solutions."""
    return PermTuple(tensor_then_pad(p, c, r) for p in t)


def amplify_even(t: PermTuple, target: int) -> PermTuple:
    """Amplify with the largest even ``c`` fitting into ``target``, padding the rest.

    With ``c`` even every amplified generator is an even permutation.
    """
    n = t.degree
    if target < 2 * n:
        raise ValueError(f"target degree {target} is smaller than 2 * {n}")
    c = (target // n) // 2 * 2
    return amplify(t, c, target - n * c)


def bs_exact(mexp: int, nexp: int, N: int) -> PermTuple:
    """Affine solution of ``t^-1 a^m t a^-n`` on Z_N: ``a(x) = x + 1``, ``t(x) = c x``, ``c = m/n mod N``."""
    if N < 1:
        raise ValueError("modulus must be positive")
    if gcd(mexp * nexp, N) != 1:
        raise ValueError(f"modulus {N} is not coprime to {mexp} * {nexp}")
    c = (mexp * pow(nexp, -1, N)) % N
    x = np.arange(N)
    return PermTuple([Permutation((x + 1) % N, check=False), Permutation((c * x) % N, check=False)])


def glue(parts: Sequence[PermTuple]) -> PermTuple:
    """Entrywise direct sum of tuples of equal rank."""
    if not parts:
        raise ValueError("glue needs at least one part")
    m = parts[0].rank
    if any(t.rank != m for t in parts):
        raise ValueError("all parts must have the same rank")
    if len(parts) == 1:
        return parts[0]
    return PermTuple(direct_sum([t[i] for t in parts]) for i in range(m))


GEN_KINDS = ("zk-action", "perturbed", "amplified", "bs-exact")


@dataclass
class GenSpec:
    """Declarative description of one generated instance.

    ``zk-action`` glues the coset actions of ``lattices`` (each a square matrix
    whose columns generate the lattice) or, without lattices, samples a random
    commuting tuple of ``degree`` and ``rank``. ``perturbed`` and ``amplified``
    transform the instance described by ``base``.
    """

    kind: str
    seed: int = 0
    degree: int | None = None
    rank: int | None = None
    lattices: list[list[list[int]]] = field(default_factory=list)
    rate: str = "0"
    c: int = 1
    r: int = 0
    modulus: int | None = None
    mexp: int | None = None
    nexp: int | None = None
    base: "GenSpec | None" = None

    def __post_init__(self):
        if self.kind not in GEN_KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if isinstance(self.base, dict):
            self.base = GenSpec.from_dict(self.base)
        rate = as_fraction(self.rate)
        if not 0 <= rate < 1:
            raise ValueError("rate must lie in [0, 1)")
        self.rate = str(rate)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["base"] = self.base.to_dict() if self.base is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GenSpec":
        d = dict(d)
        if "rate" in d:
            d["rate"] = str(as_fraction(d["rate"]))
        return cls(**d)


def generate(spec: GenSpec, base: PermTuple | None = None) -> PermTuple:
    """Build the instance described by ``spec``; ``base`` overrides ``spec.base``."""
    if spec.kind == "zk-action":
        if spec.lattices:
            return glue([coset_action(hnf(M)) for M in spec.lattices])
        if spec.degree is None or spec.rank is None:
            raise ValueError("zk-action needs lattices or degree and rank")
        return random_commuting_tuple(spec.degree, spec.rank, spec.seed)
    if spec.kind == "bs-exact":
        if None in (spec.mexp, spec.nexp, spec.modulus):
            raise ValueError("bs-exact needs mexp, nexp and modulus")
        return bs_exact(spec.mexp, spec.nexp, spec.modulus)
    if base is None:
        if spec.base is None:
            raise ValueError(f"{spec.kind} needs a base instance")
        base = generate(spec.base)
    if spec.kind == "perturbed":
        return perturb(base, spec.rate, spec.seed)
    return amplify(base, spec.c, spec.r)
