"""Degree parity of ends: cut-parity certificates and strong/weak degree."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, TooLarge
from .flow import max_edge_disjoint_paths
from .multigraph import MultiGraph, cut, degree
from .prosys import CylinderSet, InverseSystem, VertexThread, fiber, require_valid, resolve_thread

ALL_EVEN = "AllEven"
ALL_ODD = "AllOdd"
MIXED = "Mixed"

EVEN_CERTIFIED = "EvenCertified"
ODD_CERTIFIED = "OddCertified"
NEITHER_CERTIFIED = "NeitherCertified"
UNDETERMINED = "Undetermined"


def oracle_bound() -> int:
    return int(os.environ.get("GLC_ORACLE_BOUND", "12"))


def parity_oracle(g: MultiGraph, fibre, v, bound: int | None = None) -> str:
    """Brute force over every C with v in C inside ``fibre``: are all the
    cuts even, all odd, or both?"""
    F = sorted(fibre)
    if v not in F:
        raise InvalidInput("v must lie in the fibre")
    limit = oracle_bound() if bound is None else bound
    if len(F) > limit:
        raise TooLarge(f"fibre has {len(F)} vertices, bound is {limit}")
    others = [x for x in F if x != v]
    pos = {x: i for i, x in enumerate(others)}
    masks = np.arange(2 ** len(others), dtype=np.int64)

    def member(x):
        if x == v:
            return np.ones_like(masks, dtype=bool)
        if x in pos:
            return ((masks >> pos[x]) & 1).astype(bool)
        return np.zeros_like(masks, dtype=bool)

    sizes = np.zeros_like(masks)
    for a, b in g.edges.values():
        sizes += member(a) != member(b)
    odd = sizes % 2 == 1
    if odd.all():
        return ALL_ODD
    if not odd.any():
        return ALL_EVEN
    return MIXED


def fibre_criterion(g: MultiGraph, fibre, v) -> str:
    """Same question answered from degrees: uniform iff every other vertex of
    the fibre is even, with the parity of v's own degree."""
    if v not in fibre:
        raise InvalidInput("v must lie in the fibre")
    if any(degree(g, x) % 2 for x in fibre if x != v):
        return MIXED
    return ALL_ODD if degree(g, v) % 2 else ALL_EVEN


@dataclass(frozen=True)
class Witness:
    first: CylinderSet
    first_cut: int
    second: CylinderSet
    second_cut: int

    def to_json(self) -> dict:
        return {
            "first": {"level": self.first.level, "cells": sorted(self.first.cells), "cut": self.first_cut},
            "second": {"level": self.second.level, "cells": sorted(self.second.cells), "cut": self.second_cut},
        }


@dataclass(frozen=True)
class ParityVerdict:
    status: str
    n: int | None
    thread: tuple
    per_neighbourhood: tuple  # status per probed n: AllEven / AllOdd / Mixed
    witnesses: tuple = ()

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "n": self.n,
            "thread": list(self.thread),
            "per_neighbourhood": list(self.per_neighbourhood),
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def _witness(sys: InverseSystem, t: VertexThread, n: int, d: int) -> Witness:
    sizes = [(k, cut(sys.levels[k], {t.at(k)}).size) for k in range(n + 1, d + 1)]
    for (k1, s1), (k2, s2) in zip(sizes, sizes[1:]):
        if (s1 - s2) % 2:
            return Witness(CylinderSet(k1, {t.at(k1)}), s1, CylinderSet(k2, {t.at(k2)}), s2)
    base = CylinderSet(n, {t.at(n)})
    for m in range(n, d + 1):
        g = sys.levels[m]
        v = t.at(m)
        odd = [x for x in sorted(fiber(sys, m, base)) if x != v and degree(g, x) % 2]
        if odd:
            one, two = {v}, {v, odd[0]}
            return Witness(CylinderSet(m, one), cut(g, one).size, CylinderSet(m, two), cut(g, two).size)
    raise AssertionError("mixed neighbourhood without an odd vertex")


def vertex_parity(sys: InverseSystem, thread, depth: int | None = None, min_refine: int = 1) -> ParityVerdict:
    """Decide the parity of the end picked out by ``thread``.

    For each neighbourhood n (the thread's class at level n, probed only
    when at least ``min_refine`` deeper levels exist), every cylinder
    between the thread and the neighbourhood has the thread's parity iff at
    every deeper level all other classes of the fibre are even.
    """
    require_valid(sys)
    d = sys.depth if depth is None else depth
    if not 0 <= d <= sys.depth:
        raise InvalidInput(f"depth {d} outside 0..{sys.depth}")
    t = resolve_thread(sys, thread, d)
    statuses = []
    for n in range(0, d - min_refine + 1):
        base = CylinderSet(n, {t.at(n)})
        status = None
        for m in range(n, d + 1):
            s = fibre_criterion(sys.levels[m], fiber(sys, m, base), t.at(m))
            if s == MIXED:
                status = MIXED
                break
            status = s
        statuses.append(status)
        if status == ALL_EVEN:
            return ParityVerdict(EVEN_CERTIFIED, n, t.vertices, tuple(statuses))
        if status == ALL_ODD:
            return ParityVerdict(ODD_CERTIFIED, n, t.vertices, tuple(statuses))
    if not statuses:
        return ParityVerdict(UNDETERMINED, None, t.vertices, ())
    witnesses = tuple(_witness(sys, t, n, d) for n in range(len(statuses)))
    return ParityVerdict(NEITHER_CERTIFIED, None, t.vertices, tuple(statuses), witnesses)


STRONGLY_EVEN = "StronglyEven"
STRONGLY_ODD = "StronglyOdd"
UNSTABLE = "Unstable"


@dataclass(frozen=True)
class StrongVerdict:
    status: str
    value: int | None
    d_values: tuple  # D(A_k) for k = 0..depth
    table: tuple  # table[k][m - k] = edge-disjoint arcs into the thread at level m
    window: int

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "value": self.value,
            "d_values": list(self.d_values),
            "window": self.window,
        }


def arcs_into_thread(sys: InverseSystem, t: VertexThread, k: int, m: int) -> int:
    """Edge-disjoint arcs at level m from outside the thread's level-k class
    to the thread's level-m vertex."""
    g = sys.levels[m]
    inside = fiber(sys, m, CylinderSet(k, {t.at(k)}))
    outside = g.vertices - inside
    if not outside:
        return 0
    return max_edge_disjoint_paths(g, outside, {t.at(m)}).k


def strong_degree(sys: InverseSystem, thread, depth: int | None = None, window: int = 3) -> StrongVerdict:
    """D(A_k) is the least arc count over all probed levels m >= k. The
    thread is strongly even or odd when the last ``window`` values of D
    share a parity; the value reported is the last one. D at the deepest
    level rests on a single probe, so the window ends one level above it."""
    require_valid(sys)
    d = sys.depth if depth is None else depth
    if not 0 <= d <= sys.depth:
        raise InvalidInput(f"depth {d} outside 0..{sys.depth}")
    t = resolve_thread(sys, thread, d)
    table = tuple(tuple(arcs_into_thread(sys, t, k, m) for m in range(k, d + 1)) for k in range(d + 1))
    D = tuple(min(row) for row in table)
    if d < window:
        return StrongVerdict(UNDETERMINED, None, D, table, window)
    tail = D[d - window:d]
    parities = {x % 2 for x in tail}
    if len(parities) > 1:
        return StrongVerdict(UNSTABLE, None, D, table, window)
    status = STRONGLY_ODD if parities == {1} else STRONGLY_EVEN
    return StrongVerdict(status, tail[-1], D, table, window)


WEAKLY_EVEN = "WeaklyEven"
WEAKLY_ODD = "WeaklyOdd"
BOTH = "Both"


def weak_degree(sys: InverseSystem, thread, depth: int | None = None, window: int = 3) -> str:
    """Weakly even means not strongly odd, weakly odd means not strongly even."""
    s = strong_degree(sys, thread, depth, window).status
    return {STRONGLY_EVEN: WEAKLY_EVEN, STRONGLY_ODD: WEAKLY_ODD, UNSTABLE: BOTH}.get(s, UNDETERMINED)
