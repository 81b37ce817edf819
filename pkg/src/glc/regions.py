"""Regions, minimal odd regions, the odd-region chase and the contraction
machine, all evaluated on a finite truncation of an inverse system."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import InvalidInput, InvalidPartition, NoOddCut, PreconditionViolated, TooLarge
from .multigraph import MultiGraph, components, contract, cut, induced, is_connected
from .prosys import (
    BondingMap,
    CylinderSet,
    InverseSystem,
    VertexThread,
    compose,
    fiber,
    image,
    require_valid,
    thread_from_vertex,
)

SEARCH_BOUND = 16


@dataclass(frozen=True)
class Region:
    level: int
    cells: frozenset
    boundary: int

    @property
    def is_odd(self) -> bool:
        return self.boundary % 2 == 1

    def key(self):
        return (self.boundary, tuple(sorted(self.cells)))

    def to_json(self) -> dict:
        return {"level": self.level, "cells": sorted(self.cells), "boundary": self.boundary}


def make_region(sys: InverseSystem, level: int, cells) -> Region:
    cells = frozenset(cells)
    return Region(level, cells, cut(sys.levels[level], cells).size)


class SubsetTable:
    """Every non-empty subset of a small cell set, with its cut size and
    whether it induces a connected graph. Subsets are bitmasks over the
    sorted cells."""

    def __init__(self, g: MultiGraph, cells, bound: int = SEARCH_BOUND):
        self.cells = sorted(cells)
        n = len(self.cells)
        if n > bound:
            raise TooLarge(f"{n} cells exceed the search bound {bound}")
        self.index = {c: i for i, c in enumerate(self.cells)}
        masks = np.arange(1, 2 ** n, dtype=np.int64)
        sizes = np.zeros_like(masks)
        adj = [0] * n
        for u, w in g.edges.values():
            if u == w:
                continue
            iu, iw = self.index.get(u), self.index.get(w)
            if iu is None and iw is None:
                continue
            bu = (masks >> iu) & 1 if iu is not None else 0
            bw = (masks >> iw) & 1 if iw is not None else 0
            sizes += bu != bw
            if iu is not None and iw is not None:
                adj[iu] |= 1 << iw
                adj[iw] |= 1 << iu
        seen = masks & -masks
        while True:
            grown = seen.copy()
            for i in range(n):
                grown |= np.where((seen >> i) & 1, adj[i], 0)
            grown &= masks
            if np.array_equal(grown, seen):
                break
            seen = grown
        self.masks = masks
        self.sizes = sizes
        self.connected = seen == masks

    def mask_of(self, cells) -> int:
        m = 0
        for c in cells:
            m |= 1 << self.index[c]
        return m

    def cells_of(self, mask: int) -> frozenset:
        return frozenset(c for i, c in enumerate(self.cells) if mask >> i & 1)

    def select(self, where) -> list:
        return [int(m) for m in self.masks[where]]


def regions_within(sys: InverseSystem, level: int, cells) -> list:
    """Connected components of the level graph restricted to ``cells``."""
    g = induced(sys.levels[level], cells)
    return [make_region(sys, level, c) for c in components(g)]


def minimal_odd_region(sys: InverseSystem, level: int, within=None, bound: int = SEARCH_BOUND) -> Region | None:
    """Odd region of least boundary strictly inside ``within`` (default:
    the whole level); ties go to the lexicographically least cell list.
    Beyond ``bound`` cells only singletons and components of one-cell
    deletions are tried; TooLarge is raised when none of those is odd."""
    g = sys.levels[level]
    cells = frozenset(g.vertices if within is None else getattr(within, "cells", within))
    try:
        table = SubsetTable(g, cells, bound)
    except TooLarge as exc:
        cands = []
        for c in sorted(cells):
            cands.append(frozenset([c]))
            for comp in components(induced(g, cells - {c})):
                cands.append(comp)
        odd = [make_region(sys, level, c) for c in cands if c != cells and cut(g, c).is_odd]
        if not odd:
            raise TooLarge(str(exc), None) from None
        return min(odd, key=Region.key)
    full = table.mask_of(cells)
    where = table.connected & (table.sizes % 2 == 1) & (table.masks != full)
    picks = [make_region(sys, level, table.cells_of(m)) for m in table.select(where)]
    return min(picks, key=Region.key) if picks else None


def edge_enumeration(sys: InverseSystem) -> list:
    """Edges of the deepest level, ordered by the level they first appear
    at and then by id."""
    d = sys.depth
    births = {}
    for m in range(d + 1):
        em = compose(sys, d, m).edge_map
        for e in em:
            births.setdefault(e, m)
    return sorted(births, key=lambda e: (births[e], e))


def _inside(sys: InverseSystem, level: int, cells, eid) -> bool:
    """Whether edge ``eid`` of the deepest level has both ends over ``cells``."""
    d = sys.depth
    over = fiber(sys, d, CylinderSet(level, frozenset(cells)))
    u, w = sys.levels[d].edges[eid]
    return u in over and w in over


@dataclass(frozen=True)
class ChaseStep:
    region: Region
    odd: bool
    nested: bool
    not_smaller: bool
    not_smaller_exhaustive: bool
    regions_checked: int
    edge: str | None
    avoids_edge: bool

    def to_json(self) -> dict:
        return {
            "region": self.region.to_json(),
            "odd": self.odd,
            "nested": self.nested,
            "not_smaller": self.not_smaller,
            "not_smaller_exhaustive": self.not_smaller_exhaustive,
            "regions_checked": self.regions_checked,
            "edge": self.edge,
            "avoids_edge": self.avoids_edge,
        }


@dataclass(frozen=True)
class ChaseResult:
    start: Region
    steps: tuple
    thread: VertexThread
    stalled_at: int | None = None

    @property
    def regions(self) -> list:
        return [self.start] + [s.region for s in self.steps]

    def conditions(self) -> dict:
        return {
            "odd": self.start.is_odd and all(s.odd for s in self.steps),
            "nested": all(s.nested for s in self.steps),
            "not_smaller": all(s.not_smaller for s in self.steps),
            "not_smaller_exhaustive": all(s.not_smaller_exhaustive for s in self.steps),
            "avoids_edges": all(s.avoids_edge for s in self.steps),
        }

    def to_json(self) -> dict:
        return {
            "start": self.start.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "thread": list(self.thread.vertices),
            "stalled_at": self.stalled_at,
            "conditions": self.conditions(),
        }


def odd_region_chase(sys: InverseSystem, depth: int | None = None, bound: int = SEARCH_BOUND) -> ChaseResult:
    """Nested odd regions, one per level from the first level with an odd
    class, each of least boundary inside the previous one's fibre and
    avoiding the next enumerated edge. The nested fibres single out a
    thread, the candidate weakly odd end."""
    require_valid(sys)
    d = sys.depth if depth is None else depth
    sys = sys.truncate(d)
    start_level = next((n for n in range(d + 1) if sys.levels[n].odd_vertices()), None)
    if start_level is None:
        raise NoOddCut("every level is even")
    start = minimal_odd_region(sys, start_level, bound=bound)
    edges = edge_enumeration(sys)
    current = start
    steps = []
    stalled = None
    for i, level in enumerate(range(start_level + 1, d + 1)):
        g = sys.levels[level]
        parent = fiber(sys, level, CylinderSet(current.level, current.cells))
        eid = edges[i] if i < len(edges) else None
        try:
            table = SubsetTable(g, parent, bound)
        except TooLarge:
            stalled = level
            break
        full = table.mask_of(parent)
        odd = table.connected & (table.sizes % 2 == 1)
        if len(parent) > 1:
            odd &= table.masks != full
        cands = [table.cells_of(m) for m in table.select(odd)]
        if not cands:
            stalled = level
            break
        good = [c for c in cands if eid is None or not _inside(sys, level, c, eid)]
        pool = good or cands
        pick = min((make_region(sys, level, c) for c in pool), key=Region.key)
        sub = table.mask_of(pick.cells)
        between = table.connected & ((table.masks & sub) == sub)
        boundaries = table.sizes[between]
        steps.append(ChaseStep(
            region=pick,
            odd=pick.is_odd and is_connected(induced(g, pick.cells)),
            nested=pick.cells <= parent and (pick.cells != parent or len(parent) == 1),
            not_smaller=bool((boundaries >= current.boundary).all()),
            not_smaller_exhaustive=True,
            regions_checked=int(between.sum()),
            edge=eid,
            avoids_edge=eid is None or not _inside(sys, level, pick.cells, eid),
        ))
        current = pick
    last = current
    thread = thread_from_vertex(sys, last.level, min(last.cells))
    return ChaseResult(start, tuple(steps), thread, stalled)


@dataclass(frozen=True)
class ContractedSystem:
    system: InverseSystem
    quotients: tuple  # per level: original vertex -> new vertex
    names: tuple  # per level: new vertex -> sorted original cells it replaces


def contract_regions(sys: InverseSystem, level: int, regions) -> ContractedSystem:
    """Collapse each region (a cell set at ``level``) to one vertex at every
    level. Deeper levels collapse its fibre; shallower levels collapse its
    image, merging regions whose images meet."""
    require_valid(sys)
    regs = [frozenset(getattr(r, "cells", r)) for r in regions]
    for r in regs:
        if not r or not r <= sys.levels[level].vertices:
            raise InvalidInput("regions must be non-empty cell sets of the given level")
    for i, r in enumerate(regs):
        for s in regs[i + 1:]:
            if r & s:
                raise InvalidPartition(f"regions overlap in {sorted(r & s)[0]}")
    all_names = set().union(*(g.vertices for g in sys.levels))
    prefix = "M"
    while any(str(v).startswith(prefix) for v in all_names):
        prefix += "'"
    levels, quotients, names = [], [], []
    for m, g in enumerate(sys.levels):
        groups = []
        for i, r in enumerate(regs):
            c = CylinderSet(level, r)
            cells = set(fiber(sys, m, c) if m >= level else image(sys, m, c))
            groups.append((i, cells))
        merged = []
        for i, cells in groups:
            hit = [grp for grp in merged if grp[1] & cells]
            for grp in hit:
                merged.remove(grp)
                i = min(i, grp[0])
                cells |= grp[1]
            merged.append((i, cells))
        merged.sort()
        covered = set().union(*(c for _, c in merged)) if merged else set()
        partition = [c for _, c in merged] + [{v} for v in sorted(g.vertices - covered)]
        labels = [f"{prefix}{i}" for i, _ in merged] + sorted(g.vertices - covered)
        h, prov = contract(g, partition, labels)
        levels.append(h)
        quotients.append(prov.vertex_map)
        names.append({labels[k]: sorted(partition[k]) for k in range(len(merged))})
    bonds = []
    for m, bond in enumerate(sys.bonds):
        upper, lower = levels[m + 1], levels[m]
        back = {}
        for x, y in quotients[m + 1].items():
            back.setdefault(y, x)
        vm = {y: quotients[m][bond.vertex_map[x]] for y, x in back.items()}
        em, ct = {}, {}
        for e, (u, _) in upper.edges.items():
            if e in lower.edges:
                em[e] = e
            else:
                ct[e] = vm[u]
        bonds.append(BondingMap(vm, em, ct))
    out = InverseSystem(tuple(levels), tuple(bonds), {"kind": "contracted"})
    require_valid(out)
    return ContractedSystem(out, tuple(quotients), tuple(names))


@dataclass(frozen=True)
class ComponentsReport:
    components: tuple
    count_ok: bool
    all_even: bool

    @property
    def ok(self) -> bool:
        return self.count_ok and self.all_even


def components_even_check(sys: InverseSystem, level: int, inner, outer) -> ComponentsReport:
    """For nested regions of equal even boundary m: the rest of the outer
    region should fall into at most m components, each with even boundary."""
    s, r = frozenset(getattr(inner, "cells", inner)), frozenset(getattr(outer, "cells", outer))
    if not s < r:
        raise InvalidInput("inner must be a proper subset of outer")
    g = sys.levels[level]
    m = cut(g, r).size
    comps = tuple(make_region(sys, level, c) for c in components(induced(g, r - s)))
    return ComponentsReport(comps, len(comps) <= m, all(c.boundary % 2 == 0 for c in comps))


def isolated_proxies(sys: InverseSystem) -> list:
    """Deepest-level vertices that did not split across the last bond."""
    d = sys.depth
    if d == 0:
        return sys.levels[0].sorted_vertices()
    vm = sys.bonds[d - 1].vertex_map
    count = {}
    for x, v in vm.items():
        count[v] = count.get(v, 0) + 1
    return sorted(x for x, v in vm.items() if count[v] == 1)


@dataclass
class MachineReport:
    level: int
    m: int
    threshold: int
    collapsed: list
    checks: dict
    chains: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)
    flagged: list = field(default_factory=list)
    regions_checked: int = 0
    result: ContractedSystem | None = None

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "m": self.m,
            "threshold": self.threshold,
            "collapsed": [sorted(c) for c in self.collapsed],
            "checks": dict(self.checks),
            "chains": self.chains,
            "anomalies": self.anomalies,
            "flagged": [sorted(c) for c in self.flagged],
            "regions_checked": self.regions_checked,
        }


def contraction_machine(
    sys: InverseSystem,
    u,
    m: int,
    depth: int | None = None,
    infinite_threshold: int = 8,
    bound: int = SEARCH_BOUND,
) -> MachineReport:
    """Collapse the infinite m-regions strictly inside the odd region ``u``.

    A region counts as infinite when its fibre at the probed depth has more
    than ``infinite_threshold`` cells, and an isolated vertex is a deepest
    vertex that did not split at the last bond. Regions are enumerated as
    connected cell sets at the deepest level where ``u`` has at most
    ``bound`` cells.
    """
    require_valid(sys)
    d = sys.depth if depth is None else depth
    sys = sys.truncate(d)
    if m <= 0 or m % 2:
        raise InvalidInput("m must be a positive even number")
    u_level, u_cells = u.level, frozenset(u.cells)
    g0 = sys.levels[u_level]
    if not (is_connected(induced(g0, u_cells)) and cut(g0, u_cells).is_odd):
        raise InvalidInput("u must be an odd region")

    odd_isolated = [x for x in isolated_proxies(sys) if sys.levels[d].odd_vertices().count(x)]
    if odd_isolated:
        raise PreconditionViolated("an isolated vertex has odd degree, so a finite odd region exists", odd_isolated[0])

    level = u_level
    while level < d and len(fiber(sys, level + 1, CylinderSet(u_level, u_cells))) <= bound:
        level += 1
    cells = fiber(sys, level, CylinderSet(u_level, u_cells))
    g = sys.levels[level]
    table = SubsetTable(g, cells, bound)
    full = table.mask_of(cells)
    weight = {c: len(fiber(sys, d, CylinderSet(level, {c}))) for c in table.cells}
    size = np.zeros_like(table.masks)
    prev = np.zeros_like(table.masks)
    prev_weight = {}
    if d > level:
        for c in table.cells:
            prev_weight[c] = len(fiber(sys, d - 1, CylinderSet(level, {c})))
    for c, i in table.index.items():
        bit = (table.masks >> i) & 1
        size += bit * weight[c]
        prev += bit * prev_weight.get(c, weight[c])
    infinite = size > infinite_threshold
    strict = table.connected & (table.masks != full)

    small = strict & infinite & (table.sizes < m)
    if small.any():
        witness = table.cells_of(table.select(small)[0])
        raise PreconditionViolated(f"an infinite region with boundary below {m} lies inside u", witness)

    report = MachineReport(level, m, infinite_threshold, [], {})
    report.flagged = [table.cells_of(x) for x in table.select(strict & ((prev > infinite_threshold) != infinite))]

    mask_size = {int(x): int(s) for x, s in zip(table.masks, size)}
    conn = {int(x): bool(c) for x, c in zip(table.masks, table.connected)}
    bsize = {int(x): int(s) for x, s in zip(table.masks, table.sizes)}

    def is_m_region(x):
        return x != 0 and conn[x] and bsize[x] == m

    def infinite_mask(x):
        return x != 0 and mask_size[x] > infinite_threshold

    targets = table.select(strict & infinite & (table.sizes == m))
    targets.sort(key=lambda x: (-mask_size[x], sorted(table.cells_of(x))))
    family, seen = [], []
    for r in targets:
        covered = 0
        for s in family:
            covered |= s
        if family and not infinite_mask(r & ~covered):
            continue
        rt = r
        while True:
            split = next((s for s in family if rt & s and s & ~rt), None)
            if split is None:
                break
            union, diff = rt | split, rt & ~split
            if is_m_region(union) and union != full:
                rt = union
            elif is_m_region(diff):
                rt = diff
            else:
                report.anomalies.append({"region": sorted(table.cells_of(r)), "split": sorted(table.cells_of(split))})
                rt = None
                break
        if rt is None:
            continue
        family = [rt] + [s for s in family if not s & rt]
        if rt not in seen:
            seen.append(rt)
    report.collapsed = [table.cells_of(x) for x in sorted(family, key=lambda x: sorted(table.cells_of(x)))]

    for a in seen:
        for b in seen:
            if a != b and a & b == a:
                chk = components_even_check(sys, level, table.cells_of(a), table.cells_of(b))
                report.chains.append({
                    "inner": sorted(table.cells_of(a)),
                    "outer": sorted(table.cells_of(b)),
                    "components": len(chk.components),
                    "ok": chk.ok,
                })

    result = contract_regions(sys, level, report.collapsed) if report.collapsed else None
    report.result = result
    new_sys = result.system if result else sys

    # (i) isolated vertices of the quotient stay even
    deepest = new_sys.levels[d]
    collapsed_names = set(result.names[d]) if result else set()
    iso = set(isolated_proxies(new_sys)) | collapsed_names
    check_i = all(deepest._degrees[x] % 2 == 0 for x in iso)

    # (ii) no infinite region of boundary <= m strictly inside the image of u
    if result:
        q = result.quotients[level]
        new_cells = frozenset(q[c] for c in cells)
        new_table = SubsetTable(new_sys.levels[level], new_cells, bound)
        new_full = new_table.mask_of(new_cells)
        new_size = np.zeros_like(new_table.masks)
        for c, i in new_table.index.items():
            w = len(fiber(new_sys, d, CylinderSet(level, {c})))
            new_size += ((new_table.masks >> i) & 1) * w
        bad = new_table.connected & (new_table.masks != new_full) & (new_table.sizes <= m) & (new_size > infinite_threshold)
    else:
        bad = strict & (table.sizes <= m) & infinite
    check_ii = not bad.any()

    # (iii) every region inside u becomes, up to finitely many cells, a region
    # of no larger boundary: try absorbing or dropping each collapsed region it meets
    collapsed_masks = [table.mask_of(c) for c in report.collapsed]
    check_iii = True
    regions = table.select(strict)
    report.regions_checked = len(regions)
    for x in regions:
        ell = bsize[x]
        if any(x & c == x for c in collapsed_masks):
            continue
        meets = [c for c in collapsed_masks if x & c and c & ~x]
        ok = False
        for choice in product((True, False), repeat=len(meets)):
            y = x
            for keep, c in zip(choice, meets):
                y = (y | c) if keep else (y & ~c)
            if y == 0 or (conn[y] and bsize[y] <= ell) or (y == full and cut(g, cells).size <= ell):
                ok = True
                break
        if not ok:
            check_iii = False
            report.anomalies.append({"region": sorted(table.cells_of(x)), "check": "iii"})
    report.checks = {"i": check_i, "ii": check_ii, "iii": check_iii}
    return report
