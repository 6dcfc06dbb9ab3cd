import random
from math import inf

import pytest

from ultrashift.ultragraph import (Affine, AffineAtom, ConstPart, EdgeFamily,
                                   EdgeId, RangeClause, UltragraphPresentation,
                                   grading_satisfied, search_grading)
from ultrashift.vertexsets import IndexSet, VertexId, VertexSet


def epsilon_by_scan(g, a, index_bound=100):
    """Independent oracle: scan every edge index up to the bound."""
    hits = {}
    for ef in g.edge_families:
        found = [k for k in ef.domain.members(index_bound + 1)
                 if g.source(EdgeId(ef.name, k)) in a]
        if found:
            hits[ef.name] = set(found)
    return hits


def test_sources_follow_affine_rule(ex38):
    assert g_source(ex38, "e", 3) == VertexId("u", 3)
    assert g_source(ex38, "f", 5) == VertexId("v", 5)


def g_source(g, fam, k):
    return g.source(EdgeId(fam, k))


def test_range_of_guarded_clauses(ex38):
    assert ex38.range_of(EdgeId("e", 0)) == VertexSet.of(
        {"u": IndexSet.progression(2, 2)})
    assert ex38.range_of(EdgeId("e", 3)) == VertexSet.singleton(VertexId("u", 4))
    assert ex38.range_of(EdgeId("f", 2)) == VertexSet.of_vertices(
        [VertexId("v", 5), VertexId("v", 6)])
    assert ex38.range_of(EdgeId("f", 0)) == VertexSet.of_vertices(
        [VertexId("v", 1), VertexId("v", 2), VertexId("u", 1)])


def test_range_outside_domain_raises(two_loops):
    with pytest.raises(KeyError):
        two_loops.range_of(EdgeId("a", 1))


def test_epsilon_of_range_e0(ex38):
    a = ex38.range_of(EdgeId("e", 0))
    eps = ex38.epsilon(a)
    assert eps.part("e") == IndexSet.progression(2, 2)
    assert eps.part("f").is_empty()
    scan = epsilon_by_scan(ex38, a)
    assert set(eps.part("e").members(101)) == scan["e"]


def test_epsilon_empty_and_singleton(ex38):
    assert ex38.epsilon(VertexSet.empty()).is_empty()
    eps = ex38.epsilon(VertexSet.singleton(VertexId("u", 1)))
    assert list(eps.iter_edges(5)) == [EdgeId("e", 1)]
    assert epsilon_by_scan(ex38, VertexSet.singleton(VertexId("u", 1))) == {"e": {1}}


def test_epsilon_monotone_on_random_pairs(ex38):
    rng = random.Random(11)

    def rand_vset():
        fams = {}
        for fam in ("u", "v"):
            if rng.random() < 0.8:
                fams[fam] = IndexSet.build(
                    rng.randrange(0, 8),
                    {rng.randrange(0, 8) for _ in range(rng.randrange(0, 3))},
                    rng.randrange(1, 5),
                    {rng.randrange(0, 4) for _ in range(rng.randrange(0, 3))})
        return VertexSet.of(fams)

    for _ in range(100):
        a = rand_vset()
        b = a.union(rand_vset())
        assert ex38.epsilon(a).subset_of(ex38.epsilon(b))


def test_infinite_emitter_judgments(ex38):
    assert ex38.is_infinite_emitter(ex38.range_of(EdgeId("e", 0)))
    assert not ex38.is_infinite_emitter(VertexSet.singleton(VertexId("u", 4)))
    assert not ex38.is_infinite_emitter(VertexSet.empty())


def test_minimal_emitters_of_r_e0(ex38):
    r0 = ex38.range_of(EdgeId("e", 0))
    search = ex38.minimal_infinite_emitters(r0, depth_bound=2)
    assert search.exhausted
    assert [m.vertices for m in search.emitters] == [r0]
    assert search.emitters[0].range_trace  # built as a range intersection


def test_minimal_emitters_finite_set_empty(ex38):
    r = VertexSet.of_vertices([VertexId("u", 3), VertexId("v", 2)])
    search = ex38.minimal_infinite_emitters(r)
    assert search.emitters == [] and search.exhausted


def test_minimal_emitters_singleton_loop_fan(loop_fan):
    w0 = VertexSet.singleton(VertexId("w", 0))
    search = loop_fan.minimal_infinite_emitters(w0)
    assert [m.vertices for m in search.emitters] == [w0]
    assert search.emitters[0].is_singleton_witness()


def test_minimal_emitter_dichotomy_structure(ex38, loop_fan):
    # every result is a singleton witness or a recorded range intersection
    for g, seed in ((ex38, ex38.range_of(EdgeId("e", 0))),
                    (loop_fan, VertexSet.singleton(VertexId("w", 0)))):
        for m in g.minimal_infinite_emitters(seed).emitters:
            if m.is_singleton_witness():
                assert m.vertices.cardinality() == 1
            else:
                assert m.vertices.cardinality() == inf
                rebuilt = seed
                for e in m.range_trace:
                    rebuilt = rebuilt.intersect(g.range_of(e))
                assert rebuilt == m.vertices


def test_results_pairwise_incomparable(ex38):
    r0 = ex38.range_of(EdgeId("e", 0))
    ms = ex38.minimal_infinite_emitters(r0).emitters
    for i, a in enumerate(ms):
        for j, b in enumerate(ms):
            if i != j:
                assert not a.vertices.subset_of(b.vertices)


def test_problems_clean_fixtures(ex38, two_loops, loop_fan, two_cycle):
    for g in (ex38, two_loops, loop_fan, two_cycle):
        assert g.problems() == []


def test_problems_detects_sink():
    # u[0] -> u[1] and u[1] emits nothing
    ef = EdgeFamily(name="e", domain=IndexSet.finite([0]),
                    source_family="u", source_map=Affine(0, 0),
                    clauses=(RangeClause(IndexSet.finite([0]),
                                         (ConstPart(VertexSet.singleton(VertexId("u", 1))),)),))
    g = UltragraphPresentation(("u",), (ef,))
    assert any(p.startswith("sink") for p in g.problems())


def test_problems_detects_guard_gap_and_overlap():
    base = dict(name="e", domain=IndexSet.naturals_from(0),
                source_family="u", source_map=Affine(1, 0))
    gap = EdgeFamily(clauses=(RangeClause(IndexSet.finite([0]),
                                          (AffineAtom("u", Affine(1, 1)),)),),
                     **base)
    g = UltragraphPresentation(("u",), (gap,))
    assert any(p.startswith("guard-gap") for p in g.problems())

    overlap = EdgeFamily(clauses=(
        RangeClause(IndexSet.naturals_from(0), (AffineAtom("u", Affine(1, 1)),)),
        RangeClause(IndexSet.finite([2]), (AffineAtom("u", Affine(1, 2)),))),
        **base)
    g2 = UltragraphPresentation(("u",), (overlap,))
    assert any(p.startswith("guard-overlap") for p in g2.problems())


def test_grading_of_example_fixture_is_valid(ex38):
    levels = ex38.grading_map()
    assert levels is not None
    assert grading_satisfied(ex38, levels)
    # constant levels cannot strictly increase along e[1]: u[1] -> u[2]
    assert not grading_satisfied(ex38, {"u": Affine(0, 0), "v": Affine(0, 0)})


def test_grading_search_finds_certificate(ex38, two_loops):
    found = search_grading(ex38, coefficient_bound=2)
    assert found is not None and grading_satisfied(ex38, found)
    assert search_grading(two_loops, coefficient_bound=2) is None


def test_finiteness_and_active_vertices(ex38, two_loops):
    assert not ex38.is_finite()
    assert two_loops.is_finite()
    assert two_loops.all_edges() == [EdgeId("a", 0), EdgeId("b", 0)]
    active = two_loops.active_vertices()
    assert active == VertexSet.singleton(VertexId("w", 0))
