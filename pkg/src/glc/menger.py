"""Edge-disjoint arcs between disjoint cylinders, level by level."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput, InvalidSeparation
from .flow import max_edge_disjoint_paths
from .multigraph import MultiGraph, is_connected
from .prosys import CylinderSet, InverseSystem, compose, fiber, require_valid


@dataclass(frozen=True)
class ProjectedArc:
    vertices: frozenset
    edges: frozenset


@dataclass(frozen=True)
class MengerWitness:
    k: int
    level: int  # shallowest probed level whose flow equals k
    flows: dict  # level -> max number of edge-disjoint trails
    trails: tuple  # trails at the deepest level
    projections: dict  # level -> tuple of ProjectedArc
    projections_ok: bool

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "level": self.level,
            "flows": {str(m): f for m, f in sorted(self.flows.items())},
            "trails": [{"vertices": list(t.vertices), "edges": list(t.edges)} for t in self.trails],
            "projections_ok": self.projections_ok,
        }


def _arc_ok(g: MultiGraph, arc: ProjectedArc, a: frozenset, b: frozenset) -> bool:
    h = MultiGraph(arc.vertices, {e: g.edges[e] for e in arc.edges})
    return is_connected(h) and bool(arc.vertices & a) and bool(arc.vertices & b)


def menger(sys: InverseSystem, a: CylinderSet, b: CylinderSet, depth: int | None = None) -> MengerWitness:
    """k is the least max-flow over the probed levels. The deepest level's
    trails are projected to every shallower level and checked to remain
    edge-disjoint connected pieces meeting both sides."""
    require_valid(sys)
    d = sys.depth if depth is None else depth
    s = max(a.level, b.level)
    if not s <= d <= sys.depth:
        raise InvalidInput(f"depth must lie in {s}..{sys.depth}")
    if fiber(sys, s, a) & fiber(sys, s, b):
        raise InvalidSeparation("the cylinders overlap")
    flows, results = {}, {}
    for m in range(s, d + 1):
        res = max_edge_disjoint_paths(sys.levels[m], fiber(sys, m, a), fiber(sys, m, b))
        flows[m] = res.k
        results[m] = res
    k = min(flows.values())
    at = min(m for m, f in flows.items() if f == k)
    deepest = results[d].trails
    projections = {d: tuple(ProjectedArc(frozenset(t.vertices), frozenset(t.edges)) for t in deepest)}
    ok = True
    for m in range(d - 1, s - 1, -1):
        bond = compose(sys, d, m)
        arcs = []
        for t in deepest:
            es = frozenset(bond.edge_map[e] for e in t.edges if e in bond.edge_map)
            vs = frozenset(bond.vertex_map[v] for v in t.vertices)
            arcs.append(ProjectedArc(vs, es))
        fa, fb = fiber(sys, m, a), fiber(sys, m, b)
        g = sys.levels[m]
        ok &= all(_arc_ok(g, arc, fa, fb) for arc in arcs)
        used = [e for arc in arcs for e in arc.edges]
        ok &= len(used) == len(set(used))
        projections[m] = tuple(arcs)
    return MengerWitness(k, at, flows, deepest, projections, ok)
