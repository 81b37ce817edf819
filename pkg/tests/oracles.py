"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports the algorithmic parts of glc; only the MultiGraph
container is shared so results can be compared directly.
"""

from __future__ import annotations

from itertools import combinations, permutations
from math import factorial

from hypothesis import strategies as st

from glc.multigraph import MultiGraph


def deg(g: MultiGraph, v) -> int:
    total = 0
    for u, w in g.edges.values():
        total += (u == v) + (w == v)
    return total


def cut_size(g: MultiGraph, side) -> int:
    side = set(side)
    return sum(1 for u, w in g.edges.values() if (u in side) != (w in side))


def subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from combinations(items, r)


def connected(vertices, edges) -> bool:
    """Plain DFS over an explicit edge list."""
    vertices = set(vertices)
    if not vertices:
        return False
    start = min(vertices)
    seen, stack = {start}, [start]
    while stack:
        x = stack.pop()
        for u, w in edges:
            for a, b in ((u, w), (w, u)):
                if a == x and b in vertices and b not in seen:
                    seen.add(b)
                    stack.append(b)
    return seen == vertices


def induced_connected(g: MultiGraph, cells) -> bool:
    cells = set(cells)
    return connected(cells, [(u, w) for u, w in g.edges.values() if u in cells and w in cells])


def brute_min_cut(g: MultiGraph, a, b) -> int:
    """Least |boundary of S| over A <= S with S disjoint from B."""
    a, b = set(a), set(b)
    free = sorted(set(g.vertices) - a - b)
    return min(cut_size(g, a | set(extra)) for extra in subsets(free))


def brute_euler_circuits(g: MultiGraph, root) -> set:
    """Edge-id sequences of every Euler circuit from ``root``, by trying all
    edge orders."""
    out = set()
    for order in permutations(sorted(g.edges)):
        cur = root
        ok = True
        for e in order:
            u, w = g.edges[e]
            if cur == u:
                cur = w
            elif cur == w:
                cur = u
            else:
                ok = False
                break
        if ok and cur == root:
            out.add(order)
    return out


def brute_parity(g: MultiGraph, fibre, v) -> str:
    """Parities of every cut of a set C with v in C inside ``fibre``."""
    others = sorted(x for x in fibre if x != v)
    seen = set()
    for extra in subsets(others):
        seen.add(cut_size(g, {v, *extra}) % 2)
    if seen == {0}:
        return "AllEven"
    if seen == {1}:
        return "AllOdd"
    return "Mixed"


def doubled_tree_count(g: MultiGraph, root) -> int:
    """Euler circuits of a tree with every edge doubled: choose a direction
    for each pair, then order the departures at each vertex."""
    pairs = len(g.edges) // 2
    total = 2 ** pairs
    for v in g.vertices:
        half = deg(g, v) // 2
        total *= factorial(half) if v == root else factorial(half - 1) if half else 1
    return total


def odd_region_brute(g: MultiGraph, cells):
    """Least (boundary, sorted cells) over odd connected proper subsets."""
    cells = sorted(cells)
    best = None
    for r in range(1, len(cells)):
        for sub in combinations(cells, r):
            if not induced_connected(g, sub):
                continue
            k = cut_size(g, sub)
            if k % 2 and (best is None or (k, sorted(sub)) < best):
                best = (k, sorted(sub))
    return best


# strategies


@st.composite
def multigraphs(draw, min_vertices=1, max_vertices=7, max_edges=10, loops=True):
    n = draw(st.integers(min_vertices, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    k = draw(st.integers(0, max_edges))
    edges = {}
    for i in range(k):
        u = draw(st.sampled_from(vs))
        w = draw(st.sampled_from(vs))
        if u == w and not loops:
            continue
        edges[f"e{i}"] = (u, w)
    return MultiGraph(frozenset(vs), edges)


@st.composite
def eulerian_multigraphs(draw, max_vertices=5, max_walks=3, max_len=4):
    """Connected, all degrees even: a union of closed walks through v0."""
    n = draw(st.integers(1, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    edges = {}
    for _ in range(draw(st.integers(1, max_walks))):
        walk = ["v0"] + draw(st.lists(st.sampled_from(vs), min_size=1, max_size=max_len)) + ["v0"]
        for u, w in zip(walk, walk[1:]):
            edges[f"e{len(edges)}"] = (u, w)
    used = {x for e in edges.values() for x in e}
    return MultiGraph(frozenset(used), edges)
