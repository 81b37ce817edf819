"""Embedding an inverse system into the end compactification of a locally
finite graph L, built as a direct limit F_0 -> F_1 -> ... of finite graphs.

Naming: the midpoint of a level edge e is ``m:e``; when a surviving edge
e gains a pendant piece at its end x one level down, that piece's midpoint
is ``q<n>:e:x`` and the connector joining it to the old path is
``k:q<n>:e:x``. Line edges are ``l:a|b`` for midpoints a < b, and the
dummy vertex standing for a level vertex v in a truncation is ``d:v``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

from .errors import ConstructionInvariantViolated, InvalidInput, SubdivideFirst
from .multigraph import MultiGraph, components, graph_to_dot, induced, is_connected, suppress_degree2
from .prosys import BondingMap, InverseSystem, require_valid, validate

ORIGINAL = "original"
MIDPOINT = "midpoint"


@dataclass(frozen=True)
class Starred:
    graph: MultiGraph
    tags: dict  # vertex -> ORIGINAL or MIDPOINT


def _line_edges(pairs) -> dict:
    """Simple line graph edges over (midpoint, ends) pairs."""
    at = {}
    for mid, ends in pairs:
        for x in set(ends):
            at.setdefault(x, []).append(mid)
    out = {}
    for x in sorted(at, key=str):
        for a, b in combinations(sorted(at[x]), 2):
            out[f"l:{a}|{b}"] = (a, b)
    return out


def star_operator(g: MultiGraph) -> Starred:
    """Subdivide every edge at a midpoint and join midpoints of edges that
    share an end."""
    if any(g.is_loop(e) for e in g.edges):
        raise SubdivideFirst("star operator needs a loop-free graph")
    vertices = set(g.vertices)
    edges = {}
    tags = {v: ORIGINAL for v in g.vertices}
    for e, (u, w) in g.edges.items():
        m = f"m:{e}"
        vertices.add(m)
        tags[m] = MIDPOINT
        edges[f"{e}/0"] = (u, m)
        edges[f"{e}/1"] = (m, w)
    edges.update(_line_edges((f"m:{e}", ends) for e, ends in g.edges.items()))
    return Starred(MultiGraph(frozenset(vertices), edges), tags)


@dataclass
class Step:
    n: int
    F: MultiGraph
    paths: dict  # level-n edge -> F vertices along it, from its first end to its second
    inside: dict  # F edge -> level-n edge containing it, or None when off the level graph
    born: dict  # F vertex -> step it first appears
    kind: dict  # F edge -> "line" or "connector"
    blocks: dict = field(default_factory=dict)  # level-(n-1) vertex -> vertices of its new line block
    connectors: dict = field(default_factory=dict)  # connector id -> (new vertex, old path end)
    checks: dict = field(default_factory=dict)

    @property
    def new_vertices(self) -> frozenset:
        return frozenset(v for v, b in self.born.items() if b == self.n)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "vertices": self.F.sorted_vertices(),
            "edges": {e: list(self.F.edges[e]) for e in sorted(self.F.edges)},
            "paths": {e: list(p) for e, p in sorted(self.paths.items())},
            "blocks": {str(v): sorted(b) for v, b in sorted(self.blocks.items(), key=lambda kv: str(kv[0]))},
            "checks": dict(sorted(self.checks.items())),
        }


@dataclass
class Truncation:
    n: int
    graph: MultiGraph  # L^n
    phi: dict  # level-n vertex -> dummy vertex
    T: MultiGraph
    checks: dict = field(default_factory=dict)


@dataclass
class EmbeddingTrace:
    system: InverseSystem
    steps: list
    truncations: list

    def checks(self) -> dict:
        out = {}
        for s in self.steps:
            for k, v in s.checks.items():
                out[f"F{s.n}:{k}"] = v
        for t in self.truncations:
            for k, v in t.checks.items():
                out[f"L{t.n}:{k}"] = v
        return out

    def to_json(self) -> dict:
        return {
            "steps": [s.to_json() for s in self.steps],
            "truncations": [
                {
                    "n": t.n,
                    "vertices": t.graph.sorted_vertices(),
                    "edges": {e: list(t.graph.edges[e]) for e in sorted(t.graph.edges)},
                    "phi": {str(k): v for k, v in sorted(t.phi.items(), key=lambda kv: str(kv[0]))},
                    "checks": dict(sorted(t.checks.items())),
                }
                for t in self.truncations
            ],
        }


def _fail(step, check, detail):
    raise ConstructionInvariantViolated(step, check, detail)


def _initial(g: MultiGraph) -> Step:
    mids = {f"m:{e}" for e in g.edges}
    line = _line_edges((f"m:{e}", ends) for e, ends in g.edges.items())
    return Step(
        n=0,
        F=MultiGraph(frozenset(mids), line),
        paths={e: (f"m:{e}",) for e in g.edges},
        inside={e: None for e in line},
        born={v: 0 for v in mids},
        kind={e: "line" for e in line},
    )


def _next(sys: InverseSystem, st: Step) -> Step:
    n = st.n
    g, h, bond = sys.levels[n], sys.levels[n + 1], sys.bonds[n]
    vm = bond.vertex_map
    vertices = set(st.F.vertices)
    edges = dict(st.F.edges)
    inside, born, kind = dict(st.inside), dict(st.born), dict(st.kind)
    paths, connectors = {}, {}
    pieces = {v: [] for v in g.vertices}  # v -> (midpoint, ends) of the edges of its closure graph
    for e, (u, _) in g.edges.items():
        a, b = h.edges[e]
        path = st.paths[e] if vm[a] == u else tuple(reversed(st.paths[e]))
        qa, qb = f"q{n + 1}:{e}:{a}", f"q{n + 1}:{e}:{b}"
        for q, x, end in ((qa, a, path[0]), (qb, b, path[-1])):
            vertices.add(q)
            born[q] = n + 1
            pieces[vm[x]].append((q, (x, ("leaf", e, x))))
            k = f"k:{q}"
            edges[k] = (q, end)
            inside[k] = e
            kind[k] = "connector"
            connectors[k] = (q, end)
        paths[e] = (qa,) + path + (qb,)
    for c, v in bond.contracted.items():
        m = f"m:{c}"
        vertices.add(m)
        born[m] = n + 1
        pieces[v].append((m, h.edges[c]))
        paths[c] = (m,)
    blocks = {}
    for v in g.sorted_vertices():
        blocks[v] = frozenset(m for m, _ in pieces[v])
        for lid, ends in _line_edges(pieces[v]).items():
            edges[lid] = ends
            inside[lid] = None
            kind[lid] = "line"
    F = MultiGraph(frozenset(vertices), edges)
    return Step(n + 1, F, paths, inside, born, kind, blocks, connectors)


def _check_step(g: MultiGraph, st: Step, prev: Step | None, prev2: Step | None) -> None:
    n = st.n
    F = st.F
    checks = st.checks
    checks["connected"] = is_connected(F) or (not F.vertices and not g.edges)
    if not checks["connected"]:
        _fail(n, "connected", f"F_{n} has {len(components(F))} components")
    checks["off_level"] = not (F.vertices & g.vertices)
    if not checks["off_level"]:
        _fail(n, "off_level", sorted(F.vertices & g.vertices)[0])
    on_paths = Counter(x for p in st.paths.values() for x in p)
    checks["on_level_edges"] = set(on_paths) == set(F.vertices) and all(c == 1 for c in on_paths.values())
    if not checks["on_level_edges"]:
        _fail(n, "on_level_edges", "F vertices and edge paths do not match one to one")
    consecutive = {}
    for e, p in st.paths.items():
        for x, y in zip(p, p[1:]):
            consecutive[frozenset((x, y))] = e
    ok = True
    used = Counter()
    for fe, (x, y) in F.edges.items():
        e = st.inside[fe]
        if e is not None:
            if consecutive.get(frozenset((x, y))) != e:
                ok = False
            used[frozenset((x, y))] += 1
    checks["edges_follow_paths"] = ok
    if not ok:
        _fail(n, "edges_follow_paths", "an F edge inside a level edge does not join consecutive path vertices")
    new = st.new_vertices
    ok = set(st.paths) == set(g.edges) and all(used[k] == 1 for k in consecutive)
    ok &= all(p and p[0] in new and p[-1] in new for p in st.paths.values())
    checks["paths_with_new_ends"] = ok
    if not ok:
        _fail(n, "paths_with_new_ends", "some level edge does not meet F in a path with new ends")
    if prev is not None and prev2 is not None:
        old = prev2.F.vertices
        bad = [x for x in new for _, y in F.incidence[x] if y in old]
        checks["new_avoid_old"] = not bad
        if bad:
            _fail(n, "new_avoid_old", bad[0])
        stable = all(F._degrees[x] == prev.F._degrees[x] for x in old)
        checks["degrees_settle"] = stable
        if not stable:
            _fail(n, "degrees_settle", "a vertex gained neighbours two steps after it appeared")


def ambient(sys: InverseSystem, st: Step) -> tuple[MultiGraph, dict, dict]:
    """H_n as a graph: level edges subdivided by their F paths plus the F
    edges lying off the level graph. Returns (graph, vertex tags, edge colours)."""
    g = sys.levels[st.n]
    vertices = set(g.vertices) | set(st.F.vertices)
    edges, colour = {}, {}
    for e, (u, w) in g.edges.items():
        p = st.paths[e]
        edges[f"{e}@{u}"] = (u, p[0])
        edges[f"{e}@{w}"] = (p[-1], w)
        colour[f"{e}@{u}"] = colour[f"{e}@{w}"] = "black"
    for fe, ends in st.F.edges.items():
        edges[fe] = ends
        if st.n > 0 and st.kind[fe] == "connector" and fe in st.connectors:
            colour[fe] = "green"
        elif st.n > 0 and st.kind[fe] == "line" and all(st.born[x] == st.n for x in ends):
            colour[fe] = "blue"
        else:
            colour[fe] = "red"
    tags = {v: ORIGINAL for v in g.vertices}
    tags.update({x: MIDPOINT for x in st.F.vertices})
    return MultiGraph(frozenset(vertices), edges), tags, colour


def _truncation(sys: InverseSystem, st: Step, nxt: Step) -> Truncation:
    """L^n = F_{n+1} with each new line block collapsed to a dummy vertex."""
    n = st.n
    g = sys.levels[n]
    phi = {v: f"d:{v}" for v in g.vertices}
    owner = {x: v for v, b in nxt.blocks.items() for x in b}
    vertices = set(st.F.vertices) | set(phi.values())
    edges = dict(st.F.edges)
    for k, (q, end) in nxt.connectors.items():
        edges[k] = (phi[owner[q]], end)
    L = MultiGraph(frozenset(vertices), edges)
    checks = {}
    comps = {frozenset(c) for c in components(induced(nxt.F, nxt.F.vertices - st.F.vertices))}
    checks["blocks_are_components"] = comps == {b for b in nxt.blocks.values() if b}
    if not checks["blocks_are_components"]:
        _fail(n, "blocks_are_components", "new vertices do not split into the line blocks")
    H, _, _ = ambient(sys, st)
    rename = lambda x: phi.get(x, x)  # noqa: E731
    lhs = Counter(frozenset(map(rename, ends)) for ends in H.edges.values())
    rhs = Counter(frozenset(ends) for ends in L.edges.values())
    checks["dummy_isomorphism"] = lhs == rhs
    if not checks["dummy_isomorphism"]:
        _fail(n, "dummy_isomorphism", "H_n and L^n differ under the dummy correspondence")
    t_edges = {e: ends for e, ends in L.edges.items() if st.inside.get(e) is not None or e in nxt.connectors}
    T = MultiGraph(frozenset(set(phi.values()) | set(st.F.vertices)), t_edges)
    smooth = suppress_degree2(T, phi.values())
    want = Counter(frozenset((phi[u], phi[w])) for u, w in g.edges.values())
    got = Counter(frozenset(ends) for ends in smooth.edges.values())
    checks["subdivides_level"] = want == got and set(smooth.vertices) == set(phi.values())
    if not checks["subdivides_level"]:
        _fail(n, "subdivides_level", "T_n is not a subdivision of the level graph")
    return Truncation(n, L, phi, T, checks)


def _projection(sys: InverseSystem, lo: Truncation, hi: Truncation, st: Step, nxt: Step, nxt2: Step) -> BondingMap:
    """The natural map L^{n+1} -> L^n."""
    owner = {x: v for v, b in nxt.blocks.items() for x in b}
    vm = {}
    for x in nxt.F.vertices:
        vm[x] = x if x in st.F.vertices else lo.phi[owner[x]]
    for v, d in hi.phi.items():
        targets = {vm[end] for q, end in nxt2.connectors.values() if q in nxt2.blocks.get(v, ())}
        if len(targets) > 1:
            _fail(nxt.n, "dummies_commute", f"block of {v} reaches several lower blocks")
        vm[d] = targets.pop() if targets else lo.phi[sys.bonds[hi.n - 1].vertex_map[v]]
    em, contracted = {}, {}
    for e, (a, b) in hi.graph.edges.items():
        if e in lo.graph.edges:
            em[e] = e
        else:
            contracted[e] = vm[a]
    return BondingMap(vm, em, contracted)


def build_embedding(sys: InverseSystem, depth: int | None = None) -> EmbeddingTrace:
    """Run the recursion through level ``depth``, checking each step.
    Truncations L^n exist for n < depth."""
    require_valid(sys)
    d = sys.depth if depth is None else depth
    if not 0 <= d <= sys.depth:
        raise InvalidInput(f"depth {d} outside 0..{sys.depth}")
    for n in range(d + 1):
        if any(sys.levels[n].is_loop(e) for e in sys.levels[n].edges):
            raise SubdivideFirst(f"level {n} has loops")
    steps = [_initial(sys.levels[0])]
    _check_step(sys.levels[0], steps[0], None, None)
    for n in range(d):
        st = _next(sys, steps[-1])
        _check_step(sys.levels[n + 1], st, steps[-1], steps[-2] if n >= 1 else None)
        steps.append(st)
    truncs = [_truncation(sys, steps[n], steps[n + 1]) for n in range(d)]
    for n in range(d - 1):
        bond = _projection(sys, truncs[n], truncs[n + 1], steps[n], steps[n + 1], steps[n + 2])
        f = sys.bonds[n].vertex_map
        ok = all(bond.vertex_map[truncs[n + 1].phi[v]] == truncs[n].phi[f[v]] for v in sys.levels[n + 1].vertices)
        truncs[n + 1].checks["dummies_commute"] = ok
        if not ok:
            _fail(n + 1, "dummies_commute", "dummy vertices do not commute with the bonds")
    return EmbeddingTrace(sys.truncate(d), steps, truncs)


def freudenthal_truncations(trace: EmbeddingTrace, depth: int | None = None) -> InverseSystem:
    """The system L^0 <- L^1 <- ... with its natural projections."""
    k = len(trace.truncations) if depth is None else depth + 1
    if not 0 < k <= len(trace.truncations):
        raise InvalidInput(f"truncations exist for levels 0..{len(trace.truncations) - 1}")
    sys, steps, truncs = trace.system, trace.steps, trace.truncations
    bonds = tuple(
        _projection(sys, truncs[n], truncs[n + 1], steps[n], steps[n + 1], steps[n + 2]) for n in range(k - 1)
    )
    out = InverseSystem(tuple(t.graph for t in truncs[:k]), bonds, {"kind": "truncations"})
    report = validate(out)
    if not report.valid:
        v = report.first
        _fail(v.where, v.check, v.detail)
    return out


def trace_to_dot(trace: EmbeddingTrace, n: int) -> str:
    """H_n with level edges in black, old F edges in red, new line blocks in
    blue and connectors in green."""
    H, tags, colour = ambient(trace.system, trace.steps[n])
    vattrs = {v: {"color": "black" if t == ORIGINAL else "red", "shape": "box" if t == ORIGINAL else "point"} for v, t in tags.items()}
    eattrs = {e: {"color": c} for e, c in colour.items()}
    return graph_to_dot(H, f"H{n}", vattrs, eattrs)
