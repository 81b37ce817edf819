"""Reproducible example systems and edits that preserve validity."""

from __future__ import annotations

import random as _random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import InvalidSpec, InvalidThread, WouldCreateLoop
from .multigraph import MultiGraph
from .prosys import BondingMap, InverseSystem, VertexThread, check_thread

KINDS = ("constant", "ladder", "cbs", "cbc", "xl_dyadic", "hawaiian", "tangent_chain", "random", "split_square")

NAMED_GRAPHS = {
    "triangle": (("a", "b", "c"), {"ab": ("a", "b"), "bc": ("b", "c"), "ca": ("c", "a")}),
    "path": (("a", "b"), {"ab": ("a", "b")}),
    "digon": (("a", "b"), {"ab1": ("a", "b"), "ab2": ("a", "b")}),
    "figure8": (("o",), {"l1": ("o", "o"), "l2": ("o", "o")}),
    "c4": (("x", "y", "z", "v"), {"xy": ("x", "y"), "xz": ("x", "z"), "zv": ("z", "v"), "yv": ("y", "v")}),
    "point": (("o",), {}),
}


def named_graph(name: str) -> MultiGraph:
    if name not in NAMED_GRAPHS:
        raise InvalidSpec(f"unknown graph {name!r}; choose from {', '.join(sorted(NAMED_GRAPHS))}")
    vs, es = NAMED_GRAPHS[name]
    return MultiGraph(frozenset(vs), dict(es))


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    depth: int
    pattern: str | None = None
    seed: int | None = None
    base: MultiGraph | None = None
    params: Mapping = field(default_factory=dict)


def generate(spec: GeneratorSpec) -> InverseSystem:
    if spec.kind not in KINDS:
        raise InvalidSpec(f"unknown kind {spec.kind!r}")
    if not isinstance(spec.depth, int) or spec.depth < 0:
        raise InvalidSpec("depth must be a non-negative integer")
    d = spec.depth
    if spec.kind == "constant":
        return constant(spec.base if spec.base is not None else named_graph("triangle"), d)
    if spec.kind == "ladder":
        return ladder(d)
    if spec.kind == "cbs":
        return cbs(d)
    if spec.kind == "cbc":
        return cbc(d)
    if spec.kind == "xl_dyadic":
        return xl_dyadic(d)
    if spec.kind == "hawaiian":
        return hawaiian(d, subdivided=not spec.params.get("raw", False))
    if spec.kind == "tangent_chain":
        if spec.pattern is None:
            raise InvalidSpec("tangent_chain needs a pattern")
        return tangent_chain(d, spec.pattern)
    if spec.kind == "random":
        if spec.seed is None:
            raise InvalidSpec("random needs a seed")
        return random_system(d, spec.seed)
    return split_square(d)


def _system(levels, bonds, kind, threads=None) -> InverseSystem:
    meta = {"kind": kind}
    if threads:
        meta["threads"] = {k: list(v) for k, v in threads.items()}
    return InverseSystem(tuple(levels), tuple(bonds), meta)


def _bond(upper: MultiGraph, lower: MultiGraph, vertex_map: dict) -> BondingMap:
    """Edges keep their ids; edges absent below collapse onto their fibre."""
    em, ct = {}, {}
    for e, (u, _) in upper.edges.items():
        if e in lower.edges:
            em[e] = e
        else:
            ct[e] = vertex_map[u]
    return BondingMap(dict(vertex_map), em, ct)


def constant(g: MultiGraph, depth: int) -> InverseSystem:
    levels = [g] * (depth + 1)
    bonds = [BondingMap.identity(g) for _ in range(depth)]
    names = {v: [v] * (depth + 1) for v in g.sorted_vertices()}
    return _system(levels, bonds, "constant", names)


def _binary_tree_level(n: int, copies: tuple) -> MultiGraph:
    """Classes are bit strings of length n; tree node t joins t0..0 and t1..1."""
    vertices = [format(i, f"0{n}b") if n else "" for i in range(2 ** n)]
    edges = {}
    for k in range(n):
        for i in range(2 ** k):
            t = format(i, f"0{k}b") if k else ""
            u = "v" + t + "0" * (n - k)
            w = "v" + t + "1" * (n - k)
            for suffix in copies:
                edges["e" + t + suffix] = (u, w)
    return MultiGraph(frozenset("v" + s for s in vertices), edges)


def _binary_tree_system(depth: int, copies: tuple, kind: str) -> InverseSystem:
    levels = [_binary_tree_level(n, copies) for n in range(depth + 1)]
    bonds = [_bond(levels[n + 1], levels[n], {v: v[:-1] for v in levels[n + 1].vertices}) for n in range(depth)]
    threads = {
        "0": ["v" + "0" * n for n in range(depth + 1)],
        "1": ["v" + "1" * n for n in range(depth + 1)],
    }
    return _system(levels, bonds, kind, threads)


def cbs(depth: int) -> InverseSystem:
    """Single-edge binary tree coding: the class s at level n is the closed
    dyadic interval labelled by s, and tree node t contributes one edge."""
    return _binary_tree_system(depth, ("",), "cbs")


def cbc(depth: int) -> InverseSystem:
    """As ``cbs`` with every edge doubled into a top and a bottom copy."""
    return _binary_tree_system(depth, ("+", "-"), "cbc")


def _ladder_vertex(kind: str, i: int, n: int) -> str:
    if i < -n:
        return "L"
    if i > n:
        return "R"
    return f"{kind}{i}"


def _ladder_level(n: int) -> MultiGraph:
    raw = {}
    for i in range(-n - 1, n + 1):
        raw[f"rt{i}"] = (("t", i), ("t", i + 1))
        raw[f"rb{i}"] = (("b", i), ("b", i + 1))
    for i in range(-n, n + 1):
        raw[f"r{i}"] = (("t", i), ("b", i))
    for i in range(-n, n + 2):
        raw[f"d{i}"] = (("b", i), ("t", i - 1))
    edges = {}
    for e, (x, y) in raw.items():
        u, w = _ladder_vertex(*x, n), _ladder_vertex(*y, n)
        if u != w:
            edges[e] = (u, w)
    vertices = {"L", "R"} | {f"{k}{i}" for k in "tb" for i in range(-n, n + 1)}
    return MultiGraph(frozenset(vertices), edges)


def ladder(depth: int) -> InverseSystem:
    """Two-ended ladder with one diagonal per square; both ends are dummy
    vertices of degree 3 and every interior vertex has degree 4."""
    levels = [_ladder_level(n) for n in range(depth + 1)]
    bonds = []
    for n in range(depth):
        vm = {}
        for v in levels[n + 1].vertices:
            if v in ("L", "R"):
                vm[v] = v
            else:
                i = int(v[1:])
                vm[v] = _ladder_vertex(v[0], i, n)
        bonds.append(_bond(levels[n + 1], levels[n], vm))
    threads = {"left-end": ["L"] * (depth + 1), "right-end": ["R"] * (depth + 1)}
    return _system(levels, bonds, "ladder", threads)


def xl_dyadic(depth: int) -> InverseSystem:
    """Unit interval with a circle at every dyadic rational; level n keeps
    the circles of denominator at most 2^n and collapses each gap between
    them to a class."""
    levels = []
    for n in range(depth + 1):
        vertices = {f"g{n}_{i}" for i in range(2 ** n)}
        edges = {}
        for j in range(1, n + 1):
            for k in range(1, 2 ** j, 2):
                i = k * 2 ** (n - j)
                for s in "+-":
                    edges[f"q{j}_{k}{s}"] = (f"g{n}_{i - 1}", f"g{n}_{i}")
        levels.append(MultiGraph(frozenset(vertices), edges))
    bonds = [
        _bond(levels[n + 1], levels[n], {f"g{n + 1}_{i}": f"g{n}_{i // 2}" for i in range(2 ** (n + 1))})
        for n in range(depth)
    ]
    threads = {
        "0": [f"g{n}_0" for n in range(depth + 1)],
        "1": [f"g{n}_{2 ** n - 1}" for n in range(depth + 1)],
    }
    return _system(levels, bonds, "xl_dyadic", threads)


def hawaiian(depth: int, subdivided: bool = True) -> InverseSystem:
    """Level n keeps the n largest loops at the base point."""
    levels = []
    for n in range(depth + 1):
        vertices = {"o"}
        edges = {}
        for k in range(1, n + 1):
            if subdivided:
                vertices.add(f"h{k}")
                edges[f"c{k}a"] = ("o", f"h{k}")
                edges[f"c{k}b"] = (f"h{k}", "o")
            else:
                edges[f"c{k}"] = ("o", "o")
        levels.append(MultiGraph(frozenset(vertices), edges))
    bonds = []
    for n in range(depth):
        vm = {v: v for v in levels[n].vertices}
        if subdivided:
            vm[f"h{n + 1}"] = "o"
        bonds.append(_bond(levels[n + 1], levels[n], vm))
    return _system(levels, bonds, "hawaiian", {"base": ["o"] * (depth + 1)})


def tangent_chain(depth: int, pattern: str) -> InverseSystem:
    """Chain of circles tangent in sequence and shrinking to a limit point.

    Circle k joins tangency points t{k-1} and t{k} with two parallel edges,
    plus a chord when ``pattern[k-1]`` is '1'. At level n the points beyond
    t{n-1} form the limit class ``z``.
    """
    if len(pattern) < depth or set(pattern) - {"0", "1"}:
        raise InvalidSpec("pattern must be a 0/1 string of length at least depth")

    def point(k, n):
        return f"t{k}" if k < n else "z"

    levels = []
    for n in range(depth + 1):
        vertices = {point(k, n) for k in range(n + 1)}
        edges = {}
        for k in range(1, n + 1):
            ends = (point(k - 1, n), point(k, n))
            edges[f"c{k}a"] = ends
            edges[f"c{k}b"] = ends
            if pattern[k - 1] == "1":
                edges[f"c{k}m"] = ends
        levels.append(MultiGraph(frozenset(vertices), edges))
    bonds = []
    for n in range(depth):
        vm = {v: v for v in levels[n].vertices if v != "z"}
        vm[f"t{n}"] = "z"
        vm["z"] = "z"
        bonds.append(_bond(levels[n + 1], levels[n], vm))
    return _system(levels, bonds, "tangent_chain", {"limit": ["z"] * (depth + 1)})


def split_square(depth: int) -> InverseSystem:
    """A 4-cycle whose vertex v splits into a triangle at level 1; deeper
    levels repeat level 1."""
    g0 = named_graph("c4")
    if depth == 0:
        return _system([g0], [], "split_square")
    vs = {"x", "y", "z", "v1", "v2", "v3"}
    es = {
        "xy": ("x", "y"), "xz": ("x", "z"), "zv": ("z", "v1"), "yv": ("y", "v2"),
        "v12": ("v1", "v2"), "v13": ("v1", "v3"), "v23": ("v2", "v3"),
    }
    g1 = MultiGraph(frozenset(vs), es)
    vm = {v: v for v in "xyz"}
    vm.update({"v1": "v", "v2": "v", "v3": "v"})
    levels = [g0, g1] + [g1] * (depth - 1)
    bonds = [_bond(g1, g0, vm)] + [BondingMap.identity(g1) for _ in range(depth - 1)]
    return _system(levels, bonds, "split_square")


def random_system(depth: int, seed: int, max_start: int = 3) -> InverseSystem:
    """Random valid system: a small loop-free connected start graph, then one
    vertex split per level with its incident edges shared out at random and
    one to three new edges holding the pieces together."""
    rng = _random.Random(seed)
    n0 = rng.randint(1, max_start)
    vertices = [f"r{i}" for i in range(n0)]
    edges = {}
    counter = 0

    def fresh():
        nonlocal counter
        counter += 1
        return f"x{counter}"

    for i in range(1, n0):
        edges[fresh()] = (vertices[rng.randrange(i)], vertices[i])
    if n0 > 1:
        for _ in range(rng.randint(0, 3)):
            u, w = rng.sample(vertices, 2)
            edges[fresh()] = (u, w)
    levels = [MultiGraph(frozenset(vertices), edges)]
    bonds = []
    for _ in range(depth):
        g = levels[-1]
        v = rng.choice(g.sorted_vertices())
        parts = rng.choice((2, 2, 3))
        pieces = [f"{v}.{j}" for j in range(parts)]
        new_edges = {}
        for e in sorted(g.edges):
            a, b = g.edges[e]
            a2 = rng.choice(pieces) if a == v else a
            b2 = rng.choice(pieces) if b == v else b
            new_edges[e] = (a2, b2)
        for j in range(1, parts):
            for _ in range(rng.randint(1, 3)):
                new_edges[fresh()] = (pieces[rng.randrange(j)], pieces[j])
        new_vertices = (set(g.vertices) - {v}) | set(pieces)
        upper = MultiGraph(frozenset(new_vertices), new_edges)
        vm = {x: x for x in g.vertices if x != v}
        vm.update({p: v for p in pieces})
        bonds.append(_bond(upper, g, vm))
        levels.append(upper)
    return _system(levels, bonds, "random")


def _fresh_edge_id(sys: InverseSystem, base: str) -> str:
    used = set()
    for g in sys.levels:
        used |= set(g.edges)
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def add_edge(sys: InverseSystem, a: VertexThread, b: VertexThread, eid: str = "aux") -> tuple[InverseSystem, str]:
    """Join two threads by one new persistent edge.

    The edge is present at every level where the threads have separated and
    collapsed onto their common vertex before that. Returns the new system
    and the id actually used.
    """
    for t in (a, b):
        if len(t) != sys.depth + 1:
            raise InvalidThread("threads must reach the full depth")
        check_thread(sys, t)
    if a.vertices == b.vertices:
        raise WouldCreateLoop("the two threads coincide")
    eid = _fresh_edge_id(sys, eid)
    levels = []
    for n, g in enumerate(sys.levels):
        edges = dict(g.edges)
        if a.at(n) != b.at(n):
            edges[eid] = (a.at(n), b.at(n))
        levels.append(MultiGraph(g.vertices, edges))
    bonds = []
    for n, bond in enumerate(sys.bonds):
        em, ct = dict(bond.edge_map), dict(bond.contracted)
        if eid in levels[n + 1].edges:
            if eid in levels[n].edges:
                em[eid] = eid
            else:
                ct[eid] = a.at(n)
        bonds.append(BondingMap(dict(bond.vertex_map), em, ct))
    return InverseSystem(tuple(levels), tuple(bonds), dict(sys.meta)), eid


def subdivide_loops(sys: InverseSystem) -> InverseSystem:
    """Subdivide every edge that is a loop at some level, at every level.

    The midpoint of edge e becomes vertex ``m:e``; its halves are ``e.a``
    and ``e.b``. Where e is collapsed, the midpoint and both halves collapse
    with it, so the result stays a valid system.
    """
    looped = set()
    for g in sys.levels:
        looped |= {e for e, (u, w) in g.edges.items() if u == w}
    if not looped:
        return sys
    levels = []
    for n, g in enumerate(sys.levels):
        vertices = set(g.vertices)
        edges = {}
        for e, (u, w) in g.edges.items():
            if e in looped:
                m = f"m:{e}"
                vertices.add(m)
                edges[f"{e}.a"] = (u, m)
                edges[f"{e}.b"] = (m, w)
            else:
                edges[e] = (u, w)
        levels.append(MultiGraph(frozenset(vertices), edges))
    bonds = []
    for n, bond in enumerate(sys.bonds):
        vm = dict(bond.vertex_map)
        em, ct = {}, {}
        for e, f in bond.edge_map.items():
            if e in looped:
                m = f"m:{e}"
                vm[m] = m
                ua = next(x for x in levels[n + 1].edges[f"{e}.a"] if x != m)
                # match halves by the lower image of their non-midpoint end
                lower_a = levels[n].edges[f"{f}.a"]
                if vm[ua] in lower_a:
                    em[f"{e}.a"], em[f"{e}.b"] = f"{f}.a", f"{f}.b"
                else:
                    em[f"{e}.a"], em[f"{e}.b"] = f"{f}.b", f"{f}.a"
            else:
                em[e] = f
        for e, v in bond.contracted.items():
            if e in looped:
                m = f"m:{e}"
                vm[m] = v
                ct[f"{e}.a"] = v
                ct[f"{e}.b"] = v
            else:
                ct[e] = v
        bonds.append(BondingMap(vm, em, ct))
    meta = dict(sys.meta)
    return InverseSystem(tuple(levels), tuple(bonds), meta)
