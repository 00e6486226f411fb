"""Repair of almost-commuting tuples into exactly commuting ones.

The engine works in three passes:

1. *Exact core.* Joint orbits (under all generators) that contain no defect
   point already carry an exact Z^k-action and are kept verbatim.
2. *Local charts.* On the remaining points, each point ``x`` is read through a
   window ``V_x(a) = p_1^{a_1} ... p_k^{a_k}(x)`` for ``a`` in the box
   ``|a_i| <= L``. A point is regular when every square commutes on the
   radius ``L - 1`` part of its window; its return vectors ``{a : V_x(a) = x}``
   span a candidate stabilizer lattice. Regular points connected by generator
   moves form components; a component whose members agree on a lattice ``H``
   with ``[Z^k : H] = |C|`` is rebuilt as the translation action on ``Z^k/H``.
3. *Leftover.* Every other point is fixed by every output generator.

The output always commutes exactly: each piece is an invariant set carrying a
commuting action, and identity on the leftover commutes with everything.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .instances import coset_action
from .lattice import IntegerLattice, span_hnf
from .perm import PartialAssignment, PermTuple, Permutation, sign

__all__ = [
    "DEFAULT_RADIUS",
    "WindowTable",
    "ComponentInfo",
    "RoundingReport",
    "ParityRepairExhausted",
    "defect_points",
    "commutator_defect",
    "window_evaluate",
    "is_regular",
    "infer_stabilizer",
    "cluster_components",
    "repair_component",
    "round_tuple",
    "round_tuple_even",
]

DEFAULT_RADIUS = 6

KEPT = "kept-exact"
REPAIRED = "repaired"
FAILED = "failed"


class ParityRepairExhausted(RuntimeError):
    """Not enough leftover points to make every generator even.

    The commuting (but not all-even) result is attached as ``rounded`` and ``report``.
    """

    def __init__(self, message: str, rounded: PermTuple, report: "RoundingReport"):
        super().__init__(message)
        self.rounded = rounded
        self.report = report


@dataclass(frozen=True)
class WindowTable:
    base: int
    radius: int
    values: dict[tuple[int, ...], int] = field(repr=False)

    def __getitem__(self, a: tuple[int, ...]) -> int:
        return self.values[tuple(a)]


@dataclass(frozen=True)
class ComponentInfo:
    points: frozenset[int]
    lattice: IntegerLattice | None
    base: int
    status: str

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class RoundingReport:
    displacement: tuple[Fraction, ...]
    residual_defect: Fraction
    leftover_fraction: Fraction
    components: dict[str, int]
    radius: int
    input_defect: Fraction
    displaced_points: int
    regular_fraction: Fraction
    parity_fixes: int = 0
    wall_time: float = 0.0

    @property
    def max_displacement(self) -> Fraction:
        return max(self.displacement)

    @property
    def sum_displacement(self) -> Fraction:
        return sum(self.displacement, Fraction(0))


def _require_rank(t: PermTuple) -> None:
    if t.rank < 2:
        raise ValueError("rounding needs at least two generators")


def _defect_mask(arr: np.ndarray) -> np.ndarray:
    k, n = arr.shape
    bad = np.zeros(n, dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            bad |= arr[i][arr[j]] != arr[j][arr[i]]
    return bad


def defect_points(t: PermTuple) -> frozenset[int]:
    """Points ``x`` with ``p_i(p_j(x)) != p_j(p_i(x))`` for some ``i < j``."""
    _require_rank(t)
    return frozenset(np.flatnonzero(_defect_mask(t.to_array())).tolist())


def commutator_defect(t: PermTuple) -> Fraction:
    """Largest fraction of points moved by a commutator ``[p_i, p_j]``.

    The points moved by ``[p_i, p_j]`` are the image under ``p_j p_i`` of the
    points where ``p_i p_j`` and ``p_j p_i`` disagree, so counting those suffices.
    """
    arr = t.to_array()
    k, n = arr.shape
    worst = 0
    for i in range(k):
        for j in range(i + 1, k):
            worst = max(worst, int(np.count_nonzero(arr[i][arr[j]] != arr[j][arr[i]])))
    return Fraction(worst, n)


def _power_tables(arr: np.ndarray, L: int) -> np.ndarray:
    """``P[i, L + e] = images of p_i^e`` for ``-L <= e <= L``."""
    k, n = arr.shape
    P = np.empty((k, 2 * L + 1, n), dtype=np.int64)
    for i in range(k):
        p = arr[i]
        inv = np.empty_like(p)
        inv[p] = np.arange(n)
        P[i, L] = np.arange(n)
        for e in range(1, L + 1):
            P[i, L + e] = p[P[i, L + e - 1]]
            P[i, L - e] = inv[P[i, L - e + 1]]
    return P


def _iter_window(P: np.ndarray, points: np.ndarray, L: int) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Yield ``(a, V_a(points))`` for every ``a`` in the box of radius ``L``.

    ``p_k^{a_k}`` is applied first and ``p_1^{a_1}`` last.
    """
    k = P.shape[0]

    def rec(i: int, arr: np.ndarray, suffix: tuple[int, ...]):
        for e in range(-L, L + 1):
            nxt = P[i, L + e][arr]
            a = (e,) + suffix
            if i == 0:
                yield a, nxt
            else:
                yield from rec(i - 1, nxt, a)

    yield from rec(k - 1, points, ())


def window_evaluate(t: PermTuple, x: int, L: int) -> WindowTable:
    if L < 1:
        raise ValueError("window radius must be at least 1")
    P = _power_tables(t.to_array(), L)
    values = {a: int(v[0]) for a, v in _iter_window(P, np.array([x]), L)}
    return WindowTable(x, L, values)


def is_regular(t: PermTuple, x: int, L: int) -> bool:
    """Whether all squares commute at every ``V_x(a)`` with ``|a_i| <= L - 1``."""
    if L < 1:
        return True
    bad = _defect_mask(t.to_array())
    table = window_evaluate(t, x, L)
    return not any(bad[v] for a, v in table.values.items() if max(map(abs, a)) <= L - 1)


def _window_size(k: int, L: int) -> int:
    return (2 * L + 1) ** k


def infer_stabilizer(table: WindowTable) -> IntegerLattice | None:
    """HNF of the span of the return vectors in the window, or ``None`` if undetermined."""
    returns = [a for a, v in table.values.items() if v == table.base and any(a)]
    if not returns:
        return None
    k = len(returns[0])
    lat = span_hnf(returns, k)
    if lat is None or lat.index > _window_size(k, table.radius):
        return None
    return lat


@dataclass
class _Analysis:
    """Per-point intermediate results shared by clustering and repair."""

    components: list[ComponentInfo]
    core: np.ndarray
    regular: np.ndarray
    defect: np.ndarray


_FP_WEIGHTS_SEED = 0x5EED


def _analyze(t: PermTuple, L: int) -> _Analysis:
    arr = t.to_array()
    k, n = arr.shape
    bad = _defect_mask(arr)

    # exact core: joint orbits free of defect points
    rows = np.concatenate([np.arange(n)] * k)
    cols = arr.reshape(-1)
    graph = coo_matrix((np.ones(k * n, dtype=np.int8), (rows, cols)), shape=(n, n)).tocsr()
    n_orb, orbit = connected_components(graph, directed=True, connection="weak")
    orbit_bad = np.zeros(n_orb, dtype=bool)
    np.logical_or.at(orbit_bad, orbit[bad], True)
    core = ~orbit_bad[orbit]

    comps: list[ComponentInfo] = []
    order = np.argsort(orbit[core], kind="stable")
    core_pts = np.flatnonzero(core)[order]
    if core_pts.size:
        labels = orbit[core_pts]
        cuts = np.flatnonzero(np.diff(labels)) + 1
        for grp in np.split(core_pts, cuts):
            comps.append(ComponentInfo(frozenset(grp.tolist()), None, int(grp.min()), KEPT))

    regular = core.copy()
    pts = np.flatnonzero(~core)
    if pts.size:
        P = _power_tables(arr, max(L, 1))
        irregular = bad[pts].copy()
        a_ids, p_ids = [], []
        vectors = []
        for idx, (a, v) in enumerate(_iter_window(P, pts, max(L, 1))):
            vectors.append(a)
            if max(map(abs, a)) <= L - 1:
                irregular |= bad[v]
            if any(a):
                hit = np.flatnonzero(v == pts)
                if hit.size:
                    a_ids.append(np.full(hit.size, idx, dtype=np.int64))
                    p_ids.append(hit)
        regular[pts] = ~irregular
        lattice_of = _lattices_for(pts, ~irregular, a_ids, p_ids, vectors, k, L)
        comps.extend(_cluster(arr, pts, ~irregular, lattice_of))

    comps.sort(key=lambda c: c.base)
    return _Analysis(comps, core, regular, bad)


def _lattices_for(pts, reg, a_ids, p_ids, vectors, k, L) -> dict[int, IntegerLattice | None]:
    """Infer the stabilizer lattice of every regular point, grouping equal return sets."""
    m = pts.size
    out: dict[int, IntegerLattice | None] = {}
    if not a_ids:
        return {int(pts[i]): None for i in np.flatnonzero(reg)}
    a_all = np.concatenate(a_ids)
    p_all = np.concatenate(p_ids)
    weights = np.random.Generator(np.random.Philox(_FP_WEIGHTS_SEED)).integers(
        0, 2**63, size=len(vectors), dtype=np.uint64
    )
    fp = np.zeros(m, dtype=np.uint64)
    np.add.at(fp, p_all, weights[a_all])
    cnt = np.bincount(p_all, minlength=m)
    order = np.argsort(p_all, kind="stable")
    starts = np.searchsorted(p_all[order], np.arange(m + 1))
    limit = _window_size(k, L)
    cache: dict[tuple[int, int], IntegerLattice | None] = {}
    for i in np.flatnonzero(reg):
        key = (int(fp[i]), int(cnt[i]))
        if key not in cache:
            if cnt[i] == 0:
                cache[key] = None
            else:
                own = a_all[order[starts[i] : starts[i + 1]]]
                lat = span_hnf((vectors[j] for j in own), k)
                cache[key] = lat if lat is not None and lat.index <= limit else None
        out[int(pts[i])] = cache[key]
    return out


def _cluster(arr, pts, reg, lattice_of) -> list[ComponentInfo]:
    k, n = arr.shape
    good = np.zeros(n, dtype=bool)
    good[pts[reg]] = True
    src = np.flatnonzero(good)
    if not src.size:
        return []
    rows, cols = [], []
    for i in range(k):
        dst = arr[i][src]
        keep = good[dst]
        rows.append(src[keep])
        cols.append(dst[keep])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n)).tocsr()
    _, label = connected_components(graph, directed=True, connection="weak")
    order = np.argsort(label[src], kind="stable")
    members = src[order]
    cuts = np.flatnonzero(np.diff(label[members])) + 1
    out = []
    for grp in np.split(members, cuts):
        lats = {lattice_of[int(x)] for x in grp}
        lat = lats.pop() if len(lats) == 1 else None
        ok = lat is not None and lat.index == grp.size
        out.append(ComponentInfo(frozenset(grp.tolist()), lat if ok else None, int(grp.min()), REPAIRED if ok else FAILED))
    return out


def cluster_components(t: PermTuple, L: int = DEFAULT_RADIUS) -> list[ComponentInfo]:
    """Exact-core orbits plus components of regular points, ordered by smallest point.

    Components whose members agree on a lattice of index ``|C|`` are marked
    ``repaired`` (a chart may still demote them during repair).
    """
    _require_rank(t)
    return _analyze(t, L).components


def _chart(arr: np.ndarray, comp: ComponentInfo) -> np.ndarray | None:
    """Points ``V_{x0}(r)`` for the canonical coset representatives ``r`` in lexicographic order.

    Returns ``None`` when the chart is not a bijection onto the component.
    """
    lat = comp.lattice
    k = lat.rank
    vals = np.array([comp.base], dtype=np.int64)
    for i in range(k - 1, -1, -1):
        layers = []
        cur = vals
        for _ in range(lat.diagonal[i]):
            layers.append(cur)
            cur = arr[i][cur]
        vals = np.concatenate(layers)
    if np.unique(vals).size != vals.size or not comp.points.issuperset(vals.tolist()):
        return None
    return vals


def repair_component(t: PermTuple, comp: ComponentInfo) -> list[PartialAssignment]:
    """Exact translation action on ``Z^k/H`` transported to the component by its chart."""
    if comp.status != REPAIRED or comp.lattice is None:
        raise ValueError("only components marked repaired can be charted")
    arr = t.to_array()
    phi = _chart(arr, comp)
    if phi is None:
        raise ValueError("chart is not a bijection onto the component")
    action = coset_action(comp.lattice)
    out = []
    for i in range(t.rank):
        img = phi[action[i].images]
        out.append(PartialAssignment(t.degree, dict(zip(phi.tolist(), img.tolist()))))
    return out


def round_tuple(t: PermTuple, L: int = DEFAULT_RADIUS) -> tuple[PermTuple, RoundingReport]:
    """Exactly commuting tuple near ``t`` together with a report of what changed."""
    rounded, report, _ = _round(t, L)
    return rounded, report


def _round(t: PermTuple, L: int) -> tuple[PermTuple, RoundingReport, np.ndarray]:
    _require_rank(t)
    if L < 1:
        raise ValueError("window radius must be at least 1")
    start = time.perf_counter()
    arr = t.to_array()
    k, n = arr.shape
    analysis = _analyze(t, L)

    out = np.tile(np.arange(n), (k, 1))
    covered = np.zeros(n, dtype=bool)
    comps = []
    actions: dict[IntegerLattice, PermTuple] = {}
    for comp in analysis.components:
        if comp.status == KEPT:
            idx = np.fromiter(comp.points, dtype=np.int64, count=len(comp.points))
            out[:, idx] = arr[:, idx]
            covered[idx] = True
        elif comp.status == REPAIRED:
            phi = _chart(arr, comp)
            if phi is None:
                comp = replace(comp, status=FAILED)
            else:
                if comp.lattice not in actions:
                    actions[comp.lattice] = coset_action(comp.lattice)
                action = actions[comp.lattice]
                for i in range(k):
                    out[i, phi] = phi[action[i].images]
                covered[phi] = True
        comps.append(comp)

    rounded = PermTuple(Permutation(row, check=False) for row in out)
    report = _report(arr, out, covered, comps, analysis, L, start)
    if report.residual_defect != 0:
        raise AssertionError("rounded tuple does not commute")
    return rounded, report, covered


def _report(arr, out, covered, comps, analysis, L, start) -> RoundingReport:
    k, n = arr.shape
    diff = arr != out
    counts = {KEPT: 0, REPAIRED: 0, FAILED: 0}
    for c in comps:
        counts[c.status] += 1
    in_bad = 0
    for i in range(k):
        for j in range(i + 1, k):
            in_bad = max(in_bad, int(np.count_nonzero(arr[i][arr[j]] != arr[j][arr[i]])))
    out_bad = int(np.count_nonzero(_defect_mask(out)))
    return RoundingReport(
        displacement=tuple(Fraction(int(c), n) for c in diff.sum(axis=1)),
        residual_defect=Fraction(out_bad, n),
        leftover_fraction=Fraction(int(n - covered.sum()), n),
        components=counts,
        radius=L,
        input_defect=Fraction(in_bad, n),
        displaced_points=int(np.count_nonzero(diff.any(axis=0))),
        regular_fraction=Fraction(int(analysis.regular.sum()), n),
        wall_time=time.perf_counter() - start,
    )


def round_tuple_even(t: PermTuple, L: int = DEFAULT_RADIUS) -> tuple[PermTuple, RoundingReport]:
    """Like :func:`round_tuple`, then fix odd generators with disjoint leftover transpositions.

    Raises :class:`ParityRepairExhausted` when the leftover set is too small.
    """
    start = time.perf_counter()
    rounded, report, covered = _round(t, L)
    arr = t.to_array()
    out = rounded.to_array().copy()
    k, n = out.shape
    odd = [i for i in range(k) if sign(rounded[i]) == -1]
    if not odd:
        return rounded, report
    # every leftover point is fixed by every output generator
    leftover = np.flatnonzero(~covered)
    if leftover.size < 2 * len(odd):
        raise ParityRepairExhausted(
            f"parity repair needs {2 * len(odd)} leftover points, only {leftover.size} available",
            rounded,
            report,
        )
    for slot, i in enumerate(odd):
        a, b = int(leftover[2 * slot]), int(leftover[2 * slot + 1])
        out[i, a], out[i, b] = b, a
    fixed = PermTuple(Permutation(row, check=False) for row in out)
    diff = arr != out
    report.displacement = tuple(Fraction(int(c), n) for c in diff.sum(axis=1))
    report.displaced_points = int(np.count_nonzero(diff.any(axis=0)))
    report.residual_defect = Fraction(int(np.count_nonzero(_defect_mask(out))), n)
    report.parity_fixes = len(odd)
    report.wall_time += time.perf_counter() - start
    if report.residual_defect != 0:
        raise AssertionError("parity repair broke commutation")
    return fixed, report

