"""Unit-capacity edge-disjoint paths between two vertex sets."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidSeparation, NotFound
from .multigraph import MultiGraph


@dataclass(frozen=True)
class Trail:
    vertices: tuple
    edges: tuple


@dataclass(frozen=True)
class FlowResult:
    k: int
    trails: tuple
    source_side: frozenset  # residual-reachable side of a minimum cut


def max_edge_disjoint_paths(g: MultiGraph, a: Iterable, b: Iterable) -> FlowResult:
    """Maximum number of edge-disjoint A-B trails, via augmenting paths.

    Edges inside A, inside B, and loops carry no flow. The returned trails
    start in A, end in B and pass through neither set in between.
    """
    A, B = frozenset(a), frozenset(b)
    if not A or not B:
        raise InvalidSeparation("both sides must be non-empty")
    if A & B:
        raise InvalidSeparation("sides overlap")
    for v in A | B:
        if v not in g.vertices:
            raise NotFound(v)
    usable = {
        e for e, (u, w) in g.edges.items()
        if u != w and not ({u, w} <= A) and not ({u, w} <= B)
    }
    # flow[e] = +1 means e carries flow from ends[0] to ends[1]
    flow = dict.fromkeys(usable, 0)

    def can_push(e, frm):
        u, _ = g.edges[e]
        return flow[e] != (1 if frm == u else -1)

    def reach():
        parent = {v: None for v in A}
        queue = deque(sorted(A))
        while queue:
            v = queue.popleft()
            if v in B:
                return parent, v
            for e, w in g.incidence[v]:
                if e in flow and w not in parent and w not in A and can_push(e, v):
                    parent[w] = (e, v)
                    queue.append(w)
        return parent, None

    k = 0
    while True:
        parent, sink = reach()
        if sink is None:
            break
        v = sink
        while parent[v] is not None:
            e, prev = parent[v]
            flow[e] += 1 if prev == g.edges[e][0] else -1
            v = prev
        k += 1

    out = {}
    for e in sorted(flow):
        if flow[e]:
            u, w = g.edges[e]
            frm, to = (u, w) if flow[e] > 0 else (w, u)
            out.setdefault(frm, []).append((e, to))
    trails = []
    for s in sorted(A):
        for e, w in out.get(s, []):
            vs, es = [s, w], [e]
            v = w
            while v not in B:
                e2, w2 = out[v].pop(0)
                es.append(e2)
                vs.append(w2)
                v = w2
            trails.append(Trail(tuple(vs), tuple(es)))
    assert len(trails) == k
    return FlowResult(k, tuple(trails), frozenset(parent))
