import pytest

from glc.circuits import euler_circuit, iter_euler_circuits
from glc.errors import InvalidInput
from glc.euler import (
    CLOSED,
    GROWING,
    INCONCLUSIVE,
    NOT,
    OPEN,
    STABILIZED,
    chain_is_compatible,
    count_euler,
    dichotomy_probe,
    euler_chain,
    is_closed_eulerian,
    is_open_eulerian,
    lift_circuit,
    open_euler_chain,
)
from glc.generators import GeneratorSpec, add_edge, generate, named_graph
from glc.multigraph import MultiGraph
from glc.prosys import BondingMap, InverseSystem, project_circuit

from oracles import brute_euler_circuits, doubled_tree_count


def test_closed_verdicts():
    assert is_closed_eulerian(generate(GeneratorSpec("cbc", 5))).status == CLOSED
    v = is_closed_eulerian(generate(GeneratorSpec("cbs", 5)))
    assert v.status == NOT and v.cut_size == 1 and v.witness.level == 1
    assert is_closed_eulerian(generate(GeneratorSpec("xl_dyadic", 4))).status == CLOSED
    assert is_closed_eulerian(generate(GeneratorSpec("hawaiian", 4))).status == CLOSED


def test_closed_depth_bounds():
    with pytest.raises(InvalidInput):
        is_closed_eulerian(generate(GeneratorSpec("cbc", 2)), 5)


def test_open_ladder():
    sys = generate(GeneratorSpec("ladder", 8))
    v = is_open_eulerian(sys)
    assert v.status == OPEN
    assert {t.vertices[0] for t in v.pair} == {"L", "R"}
    a, b = v.pair
    closed, _ = add_edge(sys, a, b)
    assert is_closed_eulerian(closed).status == CLOSED


def test_open_rejections():
    v = is_open_eulerian(generate(GeneratorSpec("cbs", 4)))
    assert v.status == NOT and "6 odd classes" in v.reason
    assert is_open_eulerian(generate(GeneratorSpec("cbc", 3))).status == NOT


@pytest.mark.parametrize("kind,depth", [("cbc", 6), ("xl_dyadic", 4), ("hawaiian", 4), ("split_square", 3)])
def test_euler_chain_compatible(kind, depth):
    sys = generate(GeneratorSpec(kind, depth))
    if kind == "split_square":
        with pytest.raises(InvalidInput):
            euler_chain(sys)
        return
    chain = euler_chain(sys)
    assert len(chain.circuits) == depth + 1
    assert chain_is_compatible(sys, chain)
    for n, c in enumerate(chain.circuits):
        assert c.is_euler_circuit_of(sys.levels[n])


def test_open_chain_trails_cover_everything_but_the_marked_edge():
    sys = generate(GeneratorSpec("ladder", 4))
    oc = open_euler_chain(sys)
    for n, (vs, es) in enumerate(oc.trails()):
        g = sys.levels[n]
        assert sorted(es) == sorted(g.edges)
        assert {vs[0], vs[-1]} == {"L", "R"}


@pytest.mark.parametrize("kind,depth", [("cbc", 3), ("xl_dyadic", 3)])
def test_every_circuit_lifts(kind, depth):
    sys = generate(GeneratorSpec(kind, depth))
    for n in range(depth):
        g = sys.levels[n]
        root = sorted(g.vertices)[0]
        for c in iter_euler_circuits(g, root):
            up = lift_circuit(sys, n, c)
            assert up is not None and up.is_euler_circuit_of(sys.levels[n + 1])
            assert project_circuit(sys.bonds[n], up) == c


def test_lift_can_fail():
    # one contracted bridge inside the fibre of b, but the circuit below
    # crosses between the two halves of that fibre on three separate visits
    lower = MultiGraph(frozenset({"a", "b"}), {e: ("a", "b") for e in "pqrstu"})
    ends = {e: ("a", "b1") for e in "pqr"}
    ends.update({e: ("a", "b2") for e in "stu"})
    ends["x"] = ("b1", "b2")
    upper = MultiGraph(frozenset({"a", "b1", "b2"}), ends)
    bond = BondingMap({"a": "a", "b1": "b", "b2": "b"}, {e: e for e in "pqrstu"}, {"x": "b"})
    sys = InverseSystem((lower, upper), (bond,))
    circuits = {c.edges: c for c in iter_euler_circuits(lower, "a")}
    assert lift_circuit(sys, 0, circuits[tuple("psqtru")]) is None
    up = lift_circuit(sys, 0, circuits[tuple("pqrstu")])
    assert up is not None and project_circuit(bond, up).edges == tuple("pqrstu")


def test_counts_constant_triangle():
    sys = generate(GeneratorSpec("constant", 4))
    r = count_euler(sys)
    assert r.counts == (2,) * 5
    assert all(m == {"surjective": True, "injective": True} for m in r.maps)


def test_counts_cbc():
    sys = generate(GeneratorSpec("cbc", 4))
    r = count_euler(sys)
    for n in range(5):
        g = sys.levels[n]
        assert r.counts[n] == doubled_tree_count(g, r.roots[n])
    for n in range(3):
        assert r.counts[n] == len(brute_euler_circuits(sys.levels[n], r.roots[n]))
    assert list(r.counts) == sorted(set(r.counts))
    assert r.maps[0] == {"surjective": True, "injective": False}


def test_probe():
    assert dichotomy_probe(generate(GeneratorSpec("constant", 4))).status == STABILIZED
    assert dichotomy_probe(generate(GeneratorSpec("constant", 4))).k == 0
    assert dichotomy_probe(generate(GeneratorSpec("cbc", 4))).status == GROWING
    with pytest.raises(InvalidInput):
        dichotomy_probe(generate(GeneratorSpec("cbs", 3)))


def test_probe_inconclusive_and_late_stabilisation():
    tri = named_graph("triangle")
    split = MultiGraph(frozenset({"a1", "a2", "b", "c"}), {"ab": ("a1", "b"), "bc": ("b", "c"), "ca": ("a2", "c"),
                                                          "x": ("a1", "a2")})
    bond = BondingMap({"a1": "a", "a2": "a", "b": "b", "c": "c"}, {"ab": "ab", "bc": "bc", "ca": "ca"},
                      {"x": "a"})
    ident = BondingMap.identity(split)
    late = InverseSystem((tri, tri, tri, split, split, split), (BondingMap.identity(tri),) * 2 + (bond, ident, ident))
    p = dichotomy_probe(late)
    assert p.status == STABILIZED and p.k == 3
    short = InverseSystem((tri, tri, split), (BondingMap.identity(tri), bond))
    assert dichotomy_probe(short).status == INCONCLUSIVE


def test_euler_circuit_matches_chain_root():
    sys = generate(GeneratorSpec("cbc", 3))
    chain = euler_chain(sys)
    assert chain.circuits[3] == euler_circuit(sys.levels[3], "v000")
