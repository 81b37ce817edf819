"""Euler circuits: construction, enumeration, counting and cycle decomposition."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from math import factorial
import sys

from .errors import NotFound, OddCutPresent
from .multigraph import Circuit, MultiGraph


def has_euler_circuit(g: MultiGraph, root) -> bool:
    if root not in g.vertices:
        raise NotFound(root)
    if not g.edges:
        return True
    if g.odd_vertices():
        return False
    return _edges_reachable(g, root, set())


def _edges_reachable(g: MultiGraph, start, used: set) -> bool:
    """Whether every edge outside ``used`` can be reached from ``start``."""
    remaining = len(g.edges) - len(used)
    if remaining == 0:
        return True
    seen_v = {start}
    seen_e = set()
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for eid, w in g.incidence[v]:
            if eid in used or eid in seen_e:
                continue
            seen_e.add(eid)
            if w not in seen_v:
                seen_v.add(w)
                queue.append(w)
    return len(seen_e) == remaining


def euler_circuit(g: MultiGraph, root) -> Circuit | None:
    """Hierholzer's algorithm, always taking the least unused edge id.

    Returns None when ``g`` has no Euler circuit through ``root``.
    """
    if not has_euler_circuit(g, root):
        return None
    if not g.edges:
        return Circuit.empty(root)
    used = set()
    ptr = dict.fromkeys(g.vertices, 0)
    stack = [(root, None)]
    out = []
    while stack:
        v, via = stack[-1]
        inc = g.incidence[v]
        i = ptr[v]
        while i < len(inc) and inc[i][0] in used:
            i += 1
        ptr[v] = i
        if i < len(inc):
            eid, w = inc[i]
            used.add(eid)
            stack.append((w, eid))
        else:
            stack.pop()
            out.append((v, via))
    out.reverse()
    vertices = tuple(v for v, _ in out)
    edges = tuple(e for _, e in out[1:])
    return Circuit(root, vertices, edges)


@dataclass(frozen=True)
class Enumeration:
    circuits: tuple
    truncated: bool


def iter_euler_circuits(g: MultiGraph, root):
    """Yield every Euler circuit rooted at ``root`` in lexicographic order
    of the edge-id sequence. Moves that would strand unused edges are
    pruned, so the search never dead-ends."""
    if not has_euler_circuit(g, root):
        return
    if not g.edges:
        yield Circuit.empty(root)
        return
    total = len(g.edges)
    used = set()
    verts = [root]
    edges = []
    limit = sys.getrecursionlimit()
    if total + 100 > limit:
        sys.setrecursionlimit(total + 100)

    def extend(v):
        if len(edges) == total:
            if v == root:
                yield Circuit(root, tuple(verts), tuple(edges))
            return
        for eid, w in g.incidence[v]:
            if eid in used:
                continue
            used.add(eid)
            if _edges_reachable(g, w, used):
                verts.append(w)
                edges.append(eid)
                yield from extend(w)
                verts.pop()
                edges.pop()
            used.discard(eid)

    yield from extend(root)


def enumerate_euler_circuits(g: MultiGraph, root, cap: int = 10**6) -> Enumeration:
    found = []
    for c in iter_euler_circuits(g, root):
        if len(found) == cap:
            return Enumeration(tuple(found), True)
        found.append(c)
    return Enumeration(tuple(found), False)


def count_euler_circuits(g: MultiGraph, root) -> int:
    """Exact number of Euler circuits rooted at ``root``.

    Parallel edges are interchangeable, so this counts walks over edge
    classes (edges with the same ends) with memoisation and multiplies by
    the number of ways to assign ids within each class.
    """
    if not has_euler_circuit(g, root):
        return 0
    if not g.edges:
        return 1
    mult = Counter(g.edges.values())
    classes = sorted(mult)
    index = {c: i for i, c in enumerate(classes)}
    at = {v: [] for v in g.vertices}
    for c in classes:
        u, w = c
        at[u].append((index[c], w))
        if u != w:
            at[w].append((index[c], u))
    memo = {}

    def walks(v, rem):
        key = (v, rem)
        if key in memo:
            return memo[key]
        if not any(rem):
            result = 1 if v == root else 0
        else:
            result = 0
            for i, w in at[v]:
                if rem[i]:
                    nxt = rem[:i] + (rem[i] - 1,) + rem[i + 1:]
                    result += walks(w, nxt)
        memo[key] = result
        return result

    limit = sys.getrecursionlimit()
    if len(g.edges) + 100 > limit:
        sys.setrecursionlimit(len(g.edges) + 100)
    assignments = 1
    for m in mult.values():
        assignments *= factorial(m)
    return walks(root, tuple(mult[c] for c in classes)) * assignments


def cycle_decomposition(g: MultiGraph) -> list:
    """Split the edge set into cycles.

    Repeatedly takes the least remaining edge and closes it along a
    shortest path through the remaining edges. Each cycle is returned as a
    circuit rooted at the smaller end of its first edge.
    """
    odd = g.odd_vertices()
    if odd:
        raise OddCutPresent(odd)
    remaining = set(g.edges)
    cycles = []
    for first in sorted(g.edges):
        if first not in remaining:
            continue
        x, y = g.edges[first]
        remaining.discard(first)
        if x == y:
            cycles.append(Circuit(x, (x, x), (first,)))
            continue
        parent = {y: None}
        queue = deque([y])
        while queue and x not in parent:
            v = queue.popleft()
            for eid, w in g.incidence[v]:
                if eid in remaining and w not in parent:
                    parent[w] = (eid, v)
                    queue.append(w)
        path_v, path_e = [x], []
        v = x
        while parent[v] is not None:
            eid, prev = parent[v]
            path_e.append(eid)
            path_v.append(prev)
            v = prev
        # path_v runs x ... y; walk the cycle as x -first- y ... x
        path_v.reverse()
        path_e.reverse()
        for eid in path_e:
            remaining.discard(eid)
        cycles.append(Circuit(x, (x, *path_v), (first, *path_e)))
    return cycles
