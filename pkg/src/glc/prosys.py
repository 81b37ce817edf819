"""Finite-depth inverse systems of multigraphs and their bonding maps."""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .errors import InvalidInput, InvalidSystem, InvalidThread, NotFound
from .multigraph import (
    Circuit,
    Cut,
    MultiGraph,
    cut,
    graph_from_json,
    graph_to_json,
    suppress_degree2,
)

__all__ = [
    "BondingMap", "InverseSystem", "VertexThread", "CylinderSet", "CircuitChain",
    "Violation", "ValidationReport", "validate", "require_valid", "compose", "fiber",
    "image", "cylinder_cut", "project_circuit", "level_degree_report",
    "suppress_degree2", "threads", "canonical_thread", "thread_from_vertex",
    "resolve_thread", "system_to_json", "system_from_json", "system_digest",
]


@dataclass(frozen=True, eq=False)
class BondingMap:
    """Map from level n+1 to level n.

    ``edge_map`` sends surviving edges to edges; ``contracted`` sends the
    remaining edges to the vertex they collapse onto.
    """

    vertex_map: Mapping
    edge_map: Mapping
    contracted: Mapping = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, BondingMap):
            return NotImplemented
        return (
            dict(self.vertex_map) == dict(other.vertex_map)
            and dict(self.edge_map) == dict(other.edge_map)
            and dict(self.contracted) == dict(other.contracted)
        )

    @classmethod
    def identity(cls, g: MultiGraph) -> "BondingMap":
        return cls({v: v for v in g.vertices}, {e: e for e in g.edges}, {})

    def edge_image(self, eid):
        """('edge', id) or ('vertex', v)."""
        if eid in self.edge_map:
            return ("edge", self.edge_map[eid])
        if eid in self.contracted:
            return ("vertex", self.contracted[eid])
        raise NotFound(eid)


@dataclass(frozen=True, eq=False)
class InverseSystem:
    levels: tuple
    bonds: tuple
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "bonds", tuple(self.bonds))
        if len(self.bonds) != len(self.levels) - 1:
            raise InvalidSystem("need exactly one bond between consecutive levels")

    def __eq__(self, other):
        if not isinstance(other, InverseSystem):
            return NotImplemented
        return self.levels == other.levels and self.bonds == other.bonds and dict(self.meta) == dict(other.meta)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def truncate(self, depth: int) -> "InverseSystem":
        if depth < 0 or depth > self.depth:
            raise InvalidInput(f"depth {depth} outside 0..{self.depth}")
        meta = dict(self.meta)
        if "threads" in meta:
            meta["threads"] = {k: list(v[: depth + 1]) for k, v in meta["threads"].items()}
        return InverseSystem(self.levels[: depth + 1], self.bonds[:depth], meta)


@dataclass(frozen=True)
class VertexThread:
    vertices: tuple

    def __len__(self):
        return len(self.vertices)

    def at(self, n: int):
        return self.vertices[n]


@dataclass(frozen=True)
class CylinderSet:
    level: int
    cells: frozenset

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset(self.cells))


@dataclass(frozen=True)
class CircuitChain:
    """Euler circuits per level, index = level."""

    circuits: tuple


@dataclass(frozen=True)
class Violation:
    check: str
    where: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    warnings: tuple

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def first(self):
        return self.violations[0] if self.violations else None

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "violations": [{"check": v.check, "where": v.where, "detail": v.detail} for v in self.violations],
            "warnings": list(self.warnings),
        }


def _fibre_connected(vertices: set, edges: list) -> bool:
    if not vertices:
        return False
    adj = {v: [] for v in vertices}
    for u, w in edges:
        adj[u].append(w)
        adj[w].append(u)
    start = min(vertices)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen == vertices


def validate(sys: InverseSystem, require_connected: bool = True) -> ValidationReport:
    """Check every bond is surjective, simplicial, monotone and has unique
    edge preimages. Each level must be connected unless told otherwise."""
    bad, warn = [], []
    for n, g in enumerate(sys.levels):
        if require_connected and len(g.vertices) > 0 and not _fibre_connected(set(g.vertices), list(g.edges.values())):
            bad.append(Violation("connected", f"level {n}", "level graph is disconnected"))
        if not g.vertices:
            bad.append(Violation("nonempty", f"level {n}", "level graph has no vertices"))
        loops = sorted(e for e, (u, w) in g.edges.items() if u == w)
        if loops:
            warn.append(f"level {n} has loops: {', '.join(loops)}")
    for n, bond in enumerate(sys.bonds):
        upper, lower = sys.levels[n + 1], sys.levels[n]
        where = f"bond {n + 1}->{n}"
        vm = dict(bond.vertex_map)
        if set(vm) != set(upper.vertices):
            bad.append(Violation("vertex-domain", where, "vertex map domain differs from the upper vertex set"))
            continue
        stray = sorted(set(vm.values()) - set(lower.vertices))
        if stray:
            bad.append(Violation("simplicial", where, f"vertex image {stray[0]} is not a lower vertex"))
            continue
        missing = sorted(set(lower.vertices) - set(vm.values()))
        if missing:
            bad.append(Violation("surjective", where, f"lower vertex {missing[0]} has no preimage"))
        em, ct = dict(bond.edge_map), dict(bond.contracted)
        overlap = set(em) & set(ct)
        if overlap or set(em) | set(ct) != set(upper.edges):
            bad.append(Violation("edge-domain", where, "edge map and contraction map must partition the upper edges"))
            continue
        images = list(em.values())
        stray_e = sorted(set(images) - set(lower.edges))
        if stray_e:
            bad.append(Violation("simplicial", where, f"edge image {stray_e[0]} is not a lower edge"))
            continue
        if len(set(images)) != len(images):
            bad.append(Violation("unique-preimage", where, "a lower edge has two edge preimages"))
        unhit = sorted(set(lower.edges) - set(images))
        if unhit:
            bad.append(Violation("unique-preimage", where, f"lower edge {unhit[0]} has no edge preimage"))
        renamed = sorted(e for e, f in em.items() if e != f)
        if renamed:
            warn.append(f"{where} renames edge {renamed[0]}")
        for e, f in sorted(em.items()):
            ends = sorted(vm[x] for x in upper.edges[e])
            if ends != list(lower.edges[f]):
                bad.append(Violation("endpoints", where, f"edge {e} does not map onto the ends of {f}"))
                break
        for e, v in sorted(ct.items()):
            if v not in lower.vertices:
                bad.append(Violation("simplicial", where, f"edge {e} collapses onto unknown vertex {v}"))
                break
            if any(vm[x] != v for x in upper.edges[e]):
                bad.append(Violation("endpoints", where, f"collapsed edge {e} has an end outside the fibre of {v}"))
                break
        fibres = {v: set() for v in lower.vertices}
        for x, v in vm.items():
            fibres[v].add(x)
        fibre_edges = {v: [] for v in lower.vertices}
        for e, v in ct.items():
            if v in fibre_edges and all(vm[x] == v for x in upper.edges[e]):
                fibre_edges[v].append(upper.edges[e])
        for v in sorted(lower.vertices):
            if fibres[v] and not _fibre_connected(fibres[v], fibre_edges[v]):
                bad.append(Violation("monotone", where, f"fibre of {v} is disconnected"))
                break
    return ValidationReport(tuple(bad), tuple(warn))


def require_valid(sys: InverseSystem, require_connected: bool = True) -> None:
    report = validate(sys, require_connected)
    if not report.valid:
        v = report.first
        raise InvalidSystem(f"{v.check} at {v.where}: {v.detail}", report)


def compose(sys: InverseSystem, m: int, n: int) -> BondingMap:
    """The composite bond from level m down to level n (m >= n)."""
    if not 0 <= n <= m <= sys.depth:
        raise InvalidInput(f"cannot compose from level {m} to level {n}")
    g = sys.levels[m]
    vmap = {v: v for v in g.vertices}
    emap = {e: e for e in g.edges}
    cmap = {}
    for k in range(m - 1, n - 1, -1):
        bond = sys.bonds[k]
        vmap = {v: bond.vertex_map[x] for v, x in vmap.items()}
        cmap = {e: bond.vertex_map[x] for e, x in cmap.items()}
        new_emap = {}
        for e, f in emap.items():
            if f in bond.edge_map:
                new_emap[e] = bond.edge_map[f]
            else:
                cmap[e] = bond.contracted[f]
        emap = new_emap
    return BondingMap(vmap, emap, cmap)


def _check_cylinder(sys: InverseSystem, c: CylinderSet) -> None:
    if not 0 <= c.level <= sys.depth:
        raise InvalidInput(f"level {c.level} outside 0..{sys.depth}")
    stray = c.cells - sys.levels[c.level].vertices
    if stray:
        raise NotFound(sorted(stray)[0])


def fiber(sys: InverseSystem, m: int, c: CylinderSet) -> frozenset:
    """Level-m vertices lying over the cells of ``c`` (m >= c.level)."""
    _check_cylinder(sys, c)
    if m < c.level:
        raise InvalidInput("fibres are taken at levels at or below the cylinder's own")
    vmap = compose(sys, m, c.level).vertex_map
    return frozenset(v for v, x in vmap.items() if x in c.cells)


def image(sys: InverseSystem, m: int, c: CylinderSet) -> frozenset:
    """Level-m image of the cells of ``c`` (m <= c.level)."""
    _check_cylinder(sys, c)
    vmap = compose(sys, c.level, m).vertex_map
    return frozenset(vmap[v] for v in c.cells)


def cylinder_cut(sys: InverseSystem, c: CylinderSet) -> Cut:
    _check_cylinder(sys, c)
    return cut(sys.levels[c.level], c.cells)


def project_circuit(bond: BondingMap, c: Circuit) -> Circuit:
    """Push a circuit one level down: collapsed edges disappear and the
    repeated vertex they leave behind is merged."""
    vm = bond.vertex_map
    verts = [vm[c.vertices[0]]]
    edges = []
    for i, e in enumerate(c.edges):
        if e in bond.edge_map:
            edges.append(bond.edge_map[e])
            verts.append(vm[c.vertices[i + 1]])
        elif e not in bond.contracted:
            raise NotFound(e)
    return Circuit(vm[c.root], tuple(verts), tuple(edges))


def level_degree_report(sys: InverseSystem) -> list:
    """Odd-degree vertices per level."""
    return [g.odd_vertices() for g in sys.levels]


def thread_from_vertex(sys: InverseSystem, level: int, v) -> VertexThread:
    """The unique thread through ``v`` from level 0 down to ``level``."""
    if v not in sys.levels[level].vertices:
        raise NotFound(v)
    out = [v]
    for k in range(level - 1, -1, -1):
        out.append(sys.bonds[k].vertex_map[out[-1]])
    return VertexThread(tuple(reversed(out)))


def threads(sys: InverseSystem, depth: int | None = None) -> list:
    """All threads through ``depth``; one per vertex at that level."""
    d = sys.depth if depth is None else depth
    return [thread_from_vertex(sys, d, v) for v in sys.levels[d].sorted_vertices()]


def canonical_thread(sys: InverseSystem, depth: int | None = None) -> VertexThread:
    """Lexicographically least thread: least vertex at level 0, then the
    least vertex of its fibre, and so on."""
    d = sys.depth if depth is None else depth
    current = min(sys.levels[0].vertices)
    out = [current]
    for n in range(d):
        vm = sys.bonds[n].vertex_map
        current = min(x for x, v in vm.items() if v == current)
        out.append(current)
    return VertexThread(tuple(out))


def check_thread(sys: InverseSystem, t: VertexThread) -> None:
    if len(t) == 0 or len(t) > sys.depth + 1:
        raise InvalidThread("thread length must be between 1 and depth + 1")
    for n, v in enumerate(t.vertices):
        if v not in sys.levels[n].vertices:
            raise InvalidThread(f"{v} is not a vertex at level {n}")
        if n and sys.bonds[n - 1].vertex_map[v] != t.vertices[n - 1]:
            raise InvalidThread(f"{v} at level {n} does not map to {t.vertices[n - 1]}")


def resolve_thread(sys: InverseSystem, spec, depth: int | None = None) -> VertexThread:
    """Accept a thread, a per-level vertex list, a level-d vertex, or a
    symbolic name recorded in the system's metadata."""
    d = sys.depth if depth is None else depth
    if isinstance(spec, VertexThread):
        t = spec
    elif isinstance(spec, str):
        named = dict(sys.meta.get("threads", {}))
        if spec in named:
            t = VertexThread(tuple(named[spec]))
        elif "," in spec:
            t = VertexThread(tuple(x.strip() for x in spec.split(",")))
        elif spec in sys.levels[d].vertices:
            t = thread_from_vertex(sys, d, spec)
        else:
            raise InvalidThread(f"unknown thread {spec!r}")
    else:
        t = VertexThread(tuple(spec))
    if len(t) < d + 1:
        raise InvalidThread(f"thread stops at level {len(t) - 1}, need {d}")
    t = VertexThread(t.vertices[: d + 1])
    check_thread(sys, t)
    return t


def bond_to_json(b: BondingMap) -> dict:
    em = {e: b.edge_map[e] for e in sorted(b.edge_map)}
    em.update({e: {"vertex": b.contracted[e]} for e in sorted(b.contracted)})
    return {
        "vertex_map": {v: b.vertex_map[v] for v in sorted(b.vertex_map)},
        "edge_map": {e: em[e] for e in sorted(em)},
    }


def bond_from_json(data: Mapping) -> BondingMap:
    try:
        vm = dict(data["vertex_map"])
        em, ct = {}, {}
        for e, target in data["edge_map"].items():
            if isinstance(target, Mapping):
                ct[e] = target["vertex"]
            else:
                em[e] = target
    except (KeyError, TypeError, AttributeError) as exc:
        raise InvalidSystem(f"malformed bond: {exc!r}") from exc
    return BondingMap(vm, em, ct)


def system_to_json(sys: InverseSystem) -> dict:
    out = {
        "levels": [graph_to_json(g) for g in sys.levels],
        "bonds": [bond_to_json(b) for b in sys.bonds],
    }
    if sys.meta:
        out["meta"] = json.loads(json.dumps(dict(sys.meta), sort_keys=True))
    return out


def system_from_json(data: Mapping) -> InverseSystem:
    if not isinstance(data, Mapping) or "levels" not in data:
        raise InvalidSystem("system JSON needs a 'levels' list")
    levels = [graph_from_json(g) for g in data["levels"]]
    bonds = [bond_from_json(b) for b in data.get("bonds", [])]
    return InverseSystem(tuple(levels), tuple(bonds), dict(data.get("meta", {})))


def system_digest(sys: InverseSystem) -> str:
    text = json.dumps(system_to_json(sys), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()
