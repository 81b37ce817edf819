"""Euler decisions, compatible circuit chains and circuit counting."""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuits import count_euler_circuits, euler_circuit, iter_euler_circuits
from .errors import InvalidInput, NotFound
from .generators import add_edge
from .prosys import (
    CircuitChain,
    CylinderSet,
    InverseSystem,
    canonical_thread,
    cylinder_cut,
    project_circuit,
    require_valid,
    thread_from_vertex,
)
from .multigraph import Circuit

CLOSED = "ClosedEulerianCertified"
OPEN = "OpenEulerianCertified"
NOT = "NotEulerian"
UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class EulerVerdict:
    status: str
    depth: int
    witness: CylinderSet | None = None
    cut_size: int | None = None
    pair: tuple | None = None
    reason: str = ""

    @property
    def certified(self) -> bool:
        return self.status in (CLOSED, OPEN)

    def to_json(self) -> dict:
        out = {"status": self.status, "depth": self.depth, "reason": self.reason}
        if self.witness is not None:
            out["witness"] = {"level": self.witness.level, "cells": sorted(self.witness.cells), "cut_size": self.cut_size}
        if self.pair is not None:
            out["pair"] = [list(t.vertices) for t in self.pair]
        return out


def _depth(sys: InverseSystem, depth) -> int:
    d = sys.depth if depth is None else depth
    if not 0 <= d <= sys.depth:
        raise InvalidInput(f"depth {d} outside 0..{sys.depth}")
    return d


def is_closed_eulerian(sys: InverseSystem, depth: int | None = None) -> EulerVerdict:
    """Certified through ``depth`` when every level up to it has only even
    vertices; otherwise the first odd class found is an odd cut."""
    require_valid(sys)
    d = _depth(sys, depth)
    for n in range(d + 1):
        odd = sys.levels[n].odd_vertices()
        if odd:
            c = CylinderSet(n, frozenset([odd[0]]))
            return EulerVerdict(NOT, d, c, cylinder_cut(sys, c).size, reason=f"odd class {odd[0]} at level {n}")
    return EulerVerdict(CLOSED, d, reason="every class has even degree")


def is_open_eulerian(sys: InverseSystem, depth: int | None = None) -> EulerVerdict:
    """Exactly two odd ends, visible as a pair of odd classes at every level
    once they have separated, each pair lying over the one before."""
    require_valid(sys)
    d = _depth(sys, depth)
    pair_level = None
    for n in range(d + 1):
        odd = sys.levels[n].odd_vertices()
        if len(odd) > 2:
            c = CylinderSet(n, frozenset(odd))
            return EulerVerdict(NOT, d, c, reason=f"{len(odd)} odd classes at level {n}")
        if len(odd) == 2:
            if pair_level is None:
                pair_level = n
            elif n > 0:
                vm = sys.bonds[n - 1].vertex_map
                below = sys.levels[n - 1].odd_vertices()
                if sorted(vm[x] for x in odd) != below:
                    c = CylinderSet(n - 1, frozenset(below))
                    return EulerVerdict(NOT, d, c, reason=f"odd classes at level {n - 1} are not the images of those at level {n}")
        elif pair_level is not None:
            c = CylinderSet(pair_level, frozenset(sys.levels[pair_level].odd_vertices()))
            return EulerVerdict(NOT, d, c, reason=f"odd classes vanish at level {n}")
    if pair_level is None:
        return EulerVerdict(NOT, d, reason="no odd classes: two odd ends are required")
    a, b = sys.levels[d].odd_vertices()
    pair = (thread_from_vertex(sys, d, a), thread_from_vertex(sys, d, b))
    return EulerVerdict(OPEN, d, pair=pair, reason=f"odd pair first separated at level {pair_level}")


def euler_chain(sys: InverseSystem, depth: int | None = None) -> CircuitChain:
    """Euler circuit at the deepest level rooted at the canonical thread,
    projected down level by level."""
    d = _depth(sys, depth)
    verdict = is_closed_eulerian(sys, d)
    if verdict.status != CLOSED:
        raise InvalidInput(f"not closed Eulerian: {verdict.reason}")
    root = canonical_thread(sys, d)
    c = euler_circuit(sys.levels[d], root.at(d))
    chain = [c]
    for n in range(d - 1, -1, -1):
        c = project_circuit(sys.bonds[n], c)
        chain.append(c)
    return CircuitChain(tuple(reversed(chain)))


def chain_is_compatible(sys: InverseSystem, chain: CircuitChain) -> bool:
    cs = chain.circuits
    return all(project_circuit(sys.bonds[n], cs[n + 1]) == cs[n] for n in range(len(cs) - 1))


def lift_circuit(sys: InverseSystem, n: int, c: Circuit, root=None) -> Circuit | None:
    """An Euler circuit one level deeper that projects onto ``c``.

    Backtracks over the deeper level: collapsed edges may be taken freely,
    surviving edges only in the order ``c`` prescribes. Roots are tried in
    sorted order over the fibre of ``c.root`` unless one is given.
    """
    if not 0 <= n < sys.depth:
        raise InvalidInput(f"no level below {n}")
    if not c.is_euler_circuit_of(sys.levels[n]):
        raise InvalidInput("circuit is not an Euler circuit of the given level")
    bond = sys.bonds[n]
    g = sys.levels[n + 1]
    fibre = sorted(x for x, v in bond.vertex_map.items() if v == c.root)
    if root is not None:
        if root not in fibre:
            raise NotFound(root)
        fibre = [root]
    pre = {f: e for e, f in bond.edge_map.items()}
    wanted = [pre[f] for f in c.edges]
    total = len(g.edges)

    for r in fibre:
        used = set()
        verts, edges = [r], []
        failed = set()

        def search(v, i):
            if len(edges) == total:
                return v == r and i == len(wanted)
            key = (v, i, frozenset(used))
            if key in failed:
                return False
            for eid, w in g.incidence[v]:
                if eid in used:
                    continue
                if eid in bond.contracted:
                    step = i
                elif i < len(wanted) and eid == wanted[i]:
                    step = i + 1
                else:
                    continue
                used.add(eid)
                verts.append(w)
                edges.append(eid)
                if search(w, step):
                    return True
                used.discard(eid)
                verts.pop()
                edges.pop()
            failed.add(key)
            return False

        if search(r, 0):
            return Circuit(r, tuple(verts), tuple(edges))
    return None


@dataclass(frozen=True)
class CountReport:
    counts: tuple
    roots: tuple
    maps: tuple = field(default=())  # per bond: None, or dict(surjective=, injective=)

    def to_json(self) -> dict:
        return {"counts": list(self.counts), "roots": list(self.roots), "maps": list(self.maps)}


def count_euler(sys: InverseSystem, depth: int | None = None, cap: int = 10**6, map_cap: int = 20000) -> CountReport:
    """Exact number of Euler circuits per level, rooted at the canonical
    thread. When both neighbouring levels have at most ``min(cap, map_cap)``
    circuits the projection between them is enumerated and checked for
    surjectivity and injectivity."""
    d = _depth(sys, depth)
    require_valid(sys)
    root = canonical_thread(sys, d)
    counts = tuple(count_euler_circuits(sys.levels[n], root.at(n)) for n in range(d + 1))
    limit = min(cap, map_cap)
    maps = []
    for n in range(d):
        if not (0 < counts[n] <= limit and 0 < counts[n + 1] <= limit):
            maps.append(None)
            continue
        lower = set(iter_euler_circuits(sys.levels[n], root.at(n)))
        images = [project_circuit(sys.bonds[n], c) for c in iter_euler_circuits(sys.levels[n + 1], root.at(n + 1))]
        maps.append({"surjective": set(images) == lower, "injective": len(set(images)) == len(images)})
    return CountReport(counts, root.vertices, tuple(maps))


STABILIZED = "StabilizedGraph"
GROWING = "GrowingEvidence"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ProbeResult:
    status: str
    k: int | None
    counts: tuple
    reason: str = ""

    def to_json(self) -> dict:
        return {"status": self.status, "k": self.k, "counts": list(self.counts), "reason": self.reason}


def _is_isomorphism(bond) -> bool:
    vm = bond.vertex_map
    return not bond.contracted and len(set(vm.values())) == len(vm)


def dichotomy_probe(sys: InverseSystem, depth: int | None = None, window: int = 2) -> ProbeResult:
    """Evidence for the finite-graph versus uncountable-circuits dichotomy.

    StabilizedGraph(k): every bond from level k on is a graph isomorphism
    and that tail covers at least ``window`` bonds (or the whole system).
    GrowingEvidence: the circuit count strictly increases across each of
    the last ``window`` bonds. Anything else is Inconclusive.
    """
    d = _depth(sys, depth)
    verdict = is_closed_eulerian(sys, d)
    if verdict.status != CLOSED:
        raise InvalidInput(f"not closed Eulerian: {verdict.reason}")
    counts = count_euler(sys, d, map_cap=0).counts
    k = d
    while k > 0 and _is_isomorphism(sys.bonds[k - 1]):
        k -= 1
    if d - k >= min(window, d):
        return ProbeResult(STABILIZED, k, counts, f"bonds from level {k} on are isomorphisms")
    if d >= window and all(counts[n] < counts[n + 1] for n in range(d - window, d)):
        return ProbeResult(GROWING, None, counts, f"counts strictly increase over the last {window} bonds")
    return ProbeResult(INCONCLUSIVE, None, counts, "neither a stable tail nor sustained growth")


@dataclass(frozen=True)
class OpenChain:
    chain: CircuitChain
    marked: str
    pair: tuple

    def trails(self) -> list:
        """Each level's circuit cut open at the marked edge: (vertices, edges).
        Levels where the marked edge has collapsed keep the closed circuit."""
        out = []
        for c in self.chain.circuits:
            if self.marked not in c.edges:
                out.append((c.vertices, c.edges))
                continue
            i = c.edges.index(self.marked)
            es = c.edges[i + 1:] + c.edges[:i]
            body = c.vertices[:-1]
            vs = body[i + 1:] + body[: i + 1]
            out.append((tuple(vs), tuple(es)))
        return out


def open_euler_chain(sys: InverseSystem, depth: int | None = None) -> OpenChain:
    """Close the system up with one auxiliary edge between the odd ends,
    build a compatible Euler chain and mark the auxiliary edge."""
    d = _depth(sys, depth)
    verdict = is_open_eulerian(sys, d)
    if verdict.status != OPEN:
        raise InvalidInput(f"not open Eulerian: {verdict.reason}")
    truncated = sys.truncate(d)
    a, b = verdict.pair
    closed, eid = add_edge(truncated, a, b)
    return OpenChain(euler_chain(closed, d), eid, verdict.pair)
