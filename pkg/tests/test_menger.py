import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from glc.errors import InvalidInput, InvalidSeparation
from glc.generators import GeneratorSpec, generate, named_graph
from glc.menger import menger
from glc.prosys import CylinderSet, fiber

from oracles import brute_min_cut


def test_ladder_three_trails():
    sys = generate(GeneratorSpec("ladder", 5))
    w = menger(sys, CylinderSet(0, {"L"}), CylinderSet(0, {"R"}))
    assert w.k == 3 and len(w.trails) == 3
    assert set(w.flows.values()) == {3}
    assert w.projections_ok and w.level == 0


def test_cbc_ends():
    sys = generate(GeneratorSpec("cbc", 4))
    w = menger(sys, CylinderSet(4, {"v0000"}), CylinderSet(4, {"v1111"}))
    assert w.k == 2 and w.level == 4
    assert menger(sys, CylinderSet(1, {"v0"}), CylinderSet(1, {"v1"})).flows == {1: 2, 2: 2, 3: 2, 4: 2}


def test_single_bridge():
    sys = generate(GeneratorSpec("constant", 3, base=named_graph("path")))
    w = menger(sys, CylinderSet(0, {"a"}), CylinderSet(0, {"b"}))
    assert w.k == 1 and w.projections_ok


def test_errors():
    sys = generate(GeneratorSpec("cbs", 3))
    with pytest.raises(InvalidSeparation):
        menger(sys, CylinderSet(1, {"v0"}), CylinderSet(2, {"v00"}))
    with pytest.raises(InvalidInput):
        menger(sys, CylinderSet(3, {"v000"}), CylinderSet(3, {"v111"}), depth=1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_random_systems_against_brute_force(seed, data):
    sys = generate(GeneratorSpec("random", 3, seed=seed))
    level = data.draw(st.integers(0, sys.depth))
    vs = sorted(sys.levels[level].vertices)
    assume(len(vs) >= 2)
    a = data.draw(st.sets(st.sampled_from(vs), min_size=1, max_size=len(vs) - 1))
    b = data.draw(st.sets(st.sampled_from([v for v in vs if v not in a]), min_size=1))
    w = menger(sys, CylinderSet(level, a), CylinderSet(level, b))
    for m, f in w.flows.items():
        g = sys.levels[m]
        if len(g.vertices) <= 12:
            fa = fiber(sys, m, CylinderSet(level, a))
            fb = fiber(sys, m, CylinderSet(level, b))
            assert f == brute_min_cut(g, fa, fb)
    ms = sorted(w.flows)
    assert all(w.flows[x] >= w.flows[y] for x, y in zip(ms, ms[1:]))
    assert w.k == w.flows[w.level] == min(w.flows.values())
    assert w.projections_ok


def test_projected_arcs_are_disjoint_and_meet_both_sides():
    sys = generate(GeneratorSpec("cbs", 4))
    a, b = CylinderSet(2, {"v00"}), CylinderSet(2, {"v11"})
    w = menger(sys, a, b)
    for m, arcs in w.projections.items():
        used = [e for arc in arcs for e in arc.edges]
        assert len(used) == len(set(used))
        for arc in arcs:
            assert arc.vertices & fiber(sys, m, a) and arc.vertices & fiber(sys, m, b)
