"""Finite multigraphs with persistent edge ids, cuts and quotients."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import InvalidGraph, InvalidPartition, NotFound


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Loops and parallel edges allowed. Edge ends are stored sorted."""

    vertices: frozenset
    edges: Mapping[str, tuple]

    def __post_init__(self):
        vs = frozenset(self.vertices)
        es = {}
        for eid, (u, w) in self.edges.items():
            if u not in vs or w not in vs:
                raise InvalidGraph(f"edge {eid} has an endpoint outside the vertex set")
            es[eid] = (u, w) if u <= w else (w, u)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)

    def __eq__(self, other):
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __repr__(self):
        return f"MultiGraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    @cached_property
    def incidence(self) -> dict:
        """vertex -> sorted list of (edge id, other end); a loop appears once."""
        inc = {v: [] for v in self.vertices}
        for eid in sorted(self.edges):
            u, w = self.edges[eid]
            inc[u].append((eid, w))
            if u != w:
                inc[w].append((eid, u))
        return inc

    @cached_property
    def _degrees(self) -> dict:
        deg = dict.fromkeys(self.vertices, 0)
        for u, w in self.edges.values():
            deg[u] += 1
            deg[w] += 1
        return deg

    def sorted_vertices(self) -> list:
        return sorted(self.vertices)

    def other_end(self, eid, v):
        u, w = self.edges[eid]
        return w if v == u else u

    def is_loop(self, eid) -> bool:
        u, w = self.edges[eid]
        return u == w

    def odd_vertices(self) -> list:
        return sorted(v for v, d in self._degrees.items() if d % 2)


@dataclass(frozen=True)
class Cut:
    side: frozenset
    boundary: frozenset

    @property
    def size(self) -> int:
        return len(self.boundary)

    @property
    def is_odd(self) -> bool:
        return self.size % 2 == 1


@dataclass(frozen=True)
class Circuit:
    """A closed trail given by its vertex and edge sequences.

    ``vertices`` has one more entry than ``edges`` and starts and ends at
    ``root``. The empty circuit is ``Circuit(root, (root,), ())``.
    """

    root: str
    vertices: tuple
    edges: tuple

    @classmethod
    def empty(cls, root) -> "Circuit":
        return cls(root, (root,), ())

    def __len__(self):
        return len(self.edges)

    def is_walk_in(self, g: MultiGraph) -> bool:
        vs = self.vertices
        if len(vs) != len(self.edges) + 1 or vs[0] != self.root or vs[-1] != self.root:
            return False
        if len(set(self.edges)) != len(self.edges):
            return False
        for i, eid in enumerate(self.edges):
            if eid not in g.edges:
                return False
            if sorted((vs[i], vs[i + 1])) != list(g.edges[eid]):
                return False
        return True

    def is_euler_circuit_of(self, g: MultiGraph) -> bool:
        return (
            self.root in g.vertices
            and self.is_walk_in(g)
            and len(self.edges) == len(set(self.edges)) == len(g.edges)
        )


def degree(g: MultiGraph, v) -> int:
    """Number of edge ends at ``v``; a loop contributes two."""
    if v not in g.vertices:
        raise NotFound(v)
    return g._degrees[v]


def cut(g: MultiGraph, side: Iterable) -> Cut:
    """Edges with exactly one end in ``side``. Loops never cross."""
    s = frozenset(side)
    missing = s - g.vertices
    if missing:
        raise NotFound(sorted(missing)[0])
    boundary = frozenset(e for e, (u, w) in g.edges.items() if (u in s) != (w in s))
    return Cut(s, boundary)


def induced(g: MultiGraph, vs: Iterable) -> MultiGraph:
    keep = frozenset(vs)
    return MultiGraph(keep, {e: uw for e, uw in g.edges.items() if uw[0] in keep and uw[1] in keep})


def components(g: MultiGraph) -> list:
    """Vertex sets of connected components, sorted by least member."""
    seen = set()
    out = []
    for s in g.sorted_vertices():
        if s in seen:
            continue
        comp = {s}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for _, w in g.incidence[v]:
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def is_connected(g: MultiGraph) -> bool:
    """The empty graph is treated as disconnected."""
    return len(components(g)) == 1


def is_connected_subset(g: MultiGraph, vs: Iterable) -> bool:
    return is_connected(induced(g, vs))


@dataclass(frozen=True)
class Contraction:
    """Provenance of ``contract``: where each vertex went and which edges vanished."""

    vertex_map: dict = field(hash=False)
    dropped: dict = field(hash=False)


def contract(g: MultiGraph, partition, names=None) -> tuple[MultiGraph, Contraction]:
    """Collapse every cell of ``partition`` to one vertex.

    Intra-cell edges are dropped and recorded in the provenance; all other
    edges keep their ids. A cell is named by ``names[i]`` when given,
    otherwise by its least member.
    """
    cells = [frozenset(c) for c in partition]
    if any(not c for c in cells):
        raise InvalidPartition("empty cell")
    covered = set()
    for c in cells:
        if covered & c:
            raise InvalidPartition("cells overlap")
        covered |= c
    if covered != set(g.vertices):
        raise InvalidPartition("cells do not cover the vertex set")
    if names is None:
        names = [min(c) for c in cells]
    if len(set(names)) != len(names):
        raise InvalidPartition("cell names collide")
    vmap = {v: names[i] for i, c in enumerate(cells) for v in c}
    edges, dropped = {}, {}
    for eid, (u, w) in g.edges.items():
        a, b = vmap[u], vmap[w]
        if a == b and u != w:
            dropped[eid] = a
        elif a == b:
            edges[eid] = (a, a)
        else:
            edges[eid] = (a, b)
    return MultiGraph(frozenset(names), edges), Contraction(vmap, dropped)


def boundary_submodularity(g: MultiGraph, y: Iterable, z: Iterable) -> dict:
    """Both boundary inequalities for a pair of vertex sets, with all terms."""
    ys, zs = frozenset(y), frozenset(z)
    size = lambda s: cut(g, s).size
    lhs = size(ys) + size(zs)
    meet_join = size(ys & zs) + size(ys | zs)
    differences = size(ys - zs) + size(zs - ys)
    return {
        "lhs": lhs,
        "meet_join": meet_join,
        "differences": differences,
        "holds": lhs >= meet_join and lhs >= differences,
    }


def suppress_degree2(g: MultiGraph, keep: Iterable = ()) -> MultiGraph:
    """Smooth out degree-2 vertices outside ``keep``.

    Each suppressed vertex's two incident edges merge into one edge whose
    id joins the old ids with ``+``. Parallel edges through the vertex merge
    into a loop; a vertex carrying a single loop is left alone.
    """
    keep = set(keep)
    vertices = set(g.vertices)
    edges = dict(g.edges)
    while True:
        inc = defaultdict(list)
        for eid in sorted(edges):
            u, w = edges[eid]
            inc[u].append(eid)
            if u != w:
                inc[w].append(eid)
        target = None
        for v in sorted(vertices - keep):
            es = inc.get(v, [])
            if len(es) == 2 and all(edges[e][0] != edges[e][1] for e in es):
                target = v
                break
        if target is None:
            return MultiGraph(frozenset(vertices), edges)
        e1, e2 = inc[target]
        a = edges[e1][0] if edges[e1][1] == target else edges[e1][1]
        b = edges[e2][0] if edges[e2][1] == target else edges[e2][1]
        del edges[e1], edges[e2]
        vertices.discard(target)
        edges[f"{e1}+{e2}"] = (a, b)


def graph_to_json(g: MultiGraph) -> dict:
    return {
        "vertices": g.sorted_vertices(),
        "edges": [{"id": e, "ends": list(g.edges[e])} for e in sorted(g.edges)],
    }


def graph_from_json(data: Mapping) -> MultiGraph:
    try:
        vertices = list(data["vertices"])
        edges = {}
        for item in data["edges"]:
            eid = item["id"]
            if eid in edges:
                raise InvalidGraph(f"duplicate edge id {eid}")
            u, w = item["ends"]
            edges[eid] = (u, w)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidGraph):
            raise
        raise InvalidGraph(f"malformed graph: {exc!r}") from exc
    if len(set(vertices)) != len(vertices):
        raise InvalidGraph("duplicate vertex id")
    return MultiGraph(frozenset(vertices), edges)


def _dot_id(x) -> str:
    return '"' + str(x).replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(g: MultiGraph, name: str = "G", vertex_attrs=None, edge_attrs=None) -> str:
    vertex_attrs = vertex_attrs or {}
    edge_attrs = edge_attrs or {}
    lines = [f"graph {_dot_id(name)} {{"]
    for v in g.sorted_vertices():
        extra = "".join(f", {k}={_dot_id(val)}" for k, val in sorted(vertex_attrs.get(v, {}).items()))
        lines.append(f"  {_dot_id(v)} [label={_dot_id(v)}{extra}];")
    for e in sorted(g.edges):
        u, w = g.edges[e]
        extra = "".join(f", {k}={_dot_id(val)}" for k, val in sorted(edge_attrs.get(e, {}).items()))
        lines.append(f"  {_dot_id(u)} -- {_dot_id(w)} [label={_dot_id(e)}{extra}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
