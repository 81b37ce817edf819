import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glc.errors import InvalidInput, InvalidThread, TooLarge
from glc.generators import GeneratorSpec, generate, named_graph
from glc.multigraph import cut
from glc.prosys import CylinderSet, fiber, resolve_thread
from glc.parity import (
    ALL_EVEN,
    ALL_ODD,
    BOTH,
    EVEN_CERTIFIED,
    NEITHER_CERTIFIED,
    ODD_CERTIFIED,
    STRONGLY_EVEN,
    STRONGLY_ODD,
    UNDETERMINED,
    UNSTABLE,
    WEAKLY_EVEN,
    WEAKLY_ODD,
    fibre_criterion,
    parity_oracle,
    strong_degree,
    vertex_parity,
    weak_degree,
)

from oracles import brute_min_cut, brute_parity, multigraphs


@settings(max_examples=250, deadline=None)
@given(multigraphs(min_vertices=1, max_vertices=10, max_edges=16), st.data())
def test_oracle_matches_brute_force_and_criterion(g, data):
    vs = sorted(g.vertices)
    fibre = data.draw(st.sets(st.sampled_from(vs), min_size=1))
    v = data.draw(st.sampled_from(sorted(fibre)))
    expected = brute_parity(g, fibre, v)
    assert parity_oracle(g, fibre, v) == expected
    assert fibre_criterion(g, fibre, v) == expected


def test_oracle_bound(monkeypatch):
    g = generate(GeneratorSpec("cbc", 4)).levels[4]
    with pytest.raises(TooLarge):
        parity_oracle(g, g.vertices, "v0000", bound=8)
    monkeypatch.setenv("GLC_ORACLE_BOUND", "4")
    with pytest.raises(TooLarge):
        parity_oracle(g, g.vertices, "v0000")
    with pytest.raises(InvalidInput):
        parity_oracle(g, {"v0001"}, "v0000")


def test_single_vertex_fibre_follows_degree():
    g = named_graph("path")
    assert fibre_criterion(g, {"a"}, "a") == ALL_ODD
    assert parity_oracle(named_graph("triangle"), {"a"}, "a") == ALL_EVEN


def test_cbs_zero_thread_never_certified():
    v = vertex_parity(generate(GeneratorSpec("cbs", 5)), "0")
    assert v.status == NEITHER_CERTIFIED
    assert set(v.per_neighbourhood) == {"Mixed"}
    assert len(v.witnesses) == 5
    for w in v.witnesses:
        assert (w.first_cut - w.second_cut) % 2 == 1


def test_witness_cuts_are_real():
    sys = generate(GeneratorSpec("cbs", 5))
    for w in vertex_parity(sys, "0").witnesses:
        for c, k in ((w.first, w.first_cut), (w.second, w.second_cut)):
            assert cut(sys.levels[c.level], c.cells).size == k


def test_ladder_end_is_odd_and_cbc_is_even():
    assert vertex_parity(generate(GeneratorSpec("ladder", 5)), "left-end").status == ODD_CERTIFIED
    assert vertex_parity(generate(GeneratorSpec("cbc", 5)), "0").status == EVEN_CERTIFIED


def test_depth_zero_undetermined():
    assert vertex_parity(generate(GeneratorSpec("cbc", 0)), "v").status == UNDETERMINED


def test_bad_thread_and_depth():
    sys = generate(GeneratorSpec("cbs", 3))
    with pytest.raises(InvalidThread):
        vertex_parity(sys, "v,v1,v00,v000")
    with pytest.raises(InvalidInput):
        vertex_parity(sys, "0", depth=9)


def test_strong_degree_tangent_chains():
    alt = strong_degree(generate(GeneratorSpec("tangent_chain", 8, pattern="10101010")), "z")
    assert (alt.status, alt.value) == (STRONGLY_EVEN, 2)
    full = strong_degree(generate(GeneratorSpec("tangent_chain", 8, pattern="11111111")), "z")
    assert (full.status, full.value) == (STRONGLY_ODD, 3)


def test_strong_degree_table_is_flow():
    sys = generate(GeneratorSpec("tangent_chain", 5, pattern="10101"))
    t = resolve_thread(sys, "z")
    s = strong_degree(sys, "z")
    for k, row in enumerate(s.table):
        for j, val in enumerate(row):
            m = k + j
            g = sys.levels[m]
            inside = fiber(sys, m, CylinderSet(k, {t.at(k)}))
            outside = g.vertices - inside
            assert val == (brute_min_cut(g, outside, {t.at(m)}) if outside else 0)
    assert s.d_values == tuple(min(r) for r in s.table)


def test_cbs_strong_degree_grows():
    s = strong_degree(generate(GeneratorSpec("cbs", 6)), "0")
    assert s.d_values == (0, 1, 2, 3, 4, 5, 6)
    assert s.status == UNSTABLE
    assert weak_degree(generate(GeneratorSpec("cbs", 6)), "0") == BOTH


def test_weak_degree():
    assert weak_degree(generate(GeneratorSpec("tangent_chain", 6, pattern="101010")), "z") == WEAKLY_EVEN
    assert weak_degree(generate(GeneratorSpec("tangent_chain", 6, pattern="111111")), "z") == WEAKLY_ODD
    assert weak_degree(generate(GeneratorSpec("tangent_chain", 1, pattern="1")), "z") == UNDETERMINED
