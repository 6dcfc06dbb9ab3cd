import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrashift.vertexsets import IndexSet, VertexId, VertexSet


def brute(s: IndexSet, stop: int) -> set[int]:
    return {n for n in range(stop) if n in s}


index_sets = st.builds(
    IndexSet.build,
    st.integers(min_value=0, max_value=12),
    st.sets(st.integers(min_value=0, max_value=11), max_size=6),
    st.integers(min_value=1, max_value=8),
    st.sets(st.integers(min_value=0, max_value=7), max_size=4),
)


def test_union_identity():
    evens = IndexSet.progression(2, 2)
    assert evens.union(IndexSet.empty()) == evens


def test_union_explicit_plus_progression():
    # {1} union {2,4,6,...} checked by membership below 100
    a = IndexSet.finite([1])
    b = IndexSet.progression(2, 2)
    u = a.union(b)
    assert brute(u, 100) == {1} | set(range(2, 100, 2))


def test_intersect_progressions_crt():
    # evens >= 2 meet multiples of 3: brute force over [0, 100)
    a = IndexSet.progression(2, 2)
    b = IndexSet.progression(0, 3)
    got = a.intersect(b)
    assert brute(got, 100) == brute(a, 100) & brute(b, 100)
    assert got == IndexSet.progression(6, 6)


def test_intersect_idempotent():
    a = IndexSet.build(4, [1, 3], 3, [0])
    assert a.intersect(a) == a


def test_membership_and_cardinality():
    evens = IndexSet.progression(2, 2)
    assert 4 in evens and 3 not in evens
    assert IndexSet.finite([1, 5]).cardinality() == 2
    assert evens.cardinality() == float("inf")


def test_subset_progressions():
    assert IndexSet.progression(6, 6).subset_of(IndexSet.progression(2, 2))
    assert not IndexSet.progression(2, 2).subset_of(IndexSet.progression(6, 6))


def test_complement_roundtrip():
    a = IndexSet.build(5, [0, 2], 4, [1])
    c = a.complement()
    assert brute(c, 120) == set(range(120)) - brute(a, 120)
    assert c.complement() == a


@given(index_sets, index_sets)
@settings(max_examples=200)
def test_canonical_forms_agree_with_membership(a, b):
    # two encodings of the same set canonicalize identically
    horizon = 4 * a.period * b.period + a.threshold + b.threshold + 4
    if brute(a, horizon) == brute(b, horizon):
        assert a == b


@given(index_sets, index_sets)
@settings(max_examples=200)
def test_union_intersect_against_brute_force(a, b):
    horizon = 4 * a.period * b.period + a.threshold + b.threshold + 4
    assert brute(a.union(b), horizon) == brute(a, horizon) | brute(b, horizon)
    assert brute(a.intersect(b), horizon) == brute(a, horizon) & brute(b, horizon)
    assert brute(a.minus(b), horizon) == brute(a, horizon) - brute(b, horizon)


def test_boolean_laws_on_random_triples():
    rng = random.Random(7)

    def rand_set():
        return IndexSet.build(
            rng.randrange(0, 10),
            {rng.randrange(0, 10) for _ in range(rng.randrange(0, 4))},
            rng.randrange(1, 7),
            {rng.randrange(0, 6) for _ in range(rng.randrange(0, 3))},
        )

    for _ in range(300):
        a, b, c = rand_set(), rand_set(), rand_set()
        assert a.union(b) == b.union(a)
        assert a.intersect(b) == b.intersect(a)
        assert a.union(b.union(c)) == a.union(b).union(c)
        assert a.intersect(b.intersect(c)) == a.intersect(b).intersect(c)
        assert a.intersect(b.union(c)) == a.intersect(b).union(a.intersect(c))


def test_unbounded_growth_iff_infinite():
    for s in (IndexSet.progression(5, 3),
              IndexSet.finite([0, 7, 9]),
              IndexSet.build(6, [1], 4, [2, 3])):
        counts = [len(brute(s, n)) for n in (100, 1000)]
        if s.cardinality() == float("inf"):
            assert counts[1] > counts[0]
        else:
            assert counts[1] == counts[0] == s.cardinality()


def test_affine_preimage_matches_scan():
    s = IndexSet.build(7, [1, 4], 6, [0, 5])
    for a, b in [(1, 0), (2, 3), (3, 1), (0, 4), (0, 1), (4, 0)]:
        pre = s.affine_preimage(a, b)
        assert brute(pre, 200) == {k for k in range(200) if (a * k + b) in s}


def test_affine_image_matches_scan():
    s = IndexSet.build(5, [2], 3, [1])
    for a, b in [(1, 0), (2, 1), (3, 4), (0, 6)]:
        img = s.affine_image(a, b)
        want = {a * n + b for n in brute(s, 400)}
        assert brute(img, 400) == {m for m in want if m < 400}


def test_encode_is_stable():
    s = IndexSet.build(6, [0, 3], 4, [1, 2])
    assert s.encode() == IndexSet.build(6, [3, 0], 4, [2, 1]).encode()
    assert ";" in s.encode()


def test_min_element():
    assert IndexSet.progression(7, 5).min() == 7
    assert IndexSet.build(3, [2], 4, [1]).min() == 2
    assert IndexSet.empty().min() is None


def test_vertex_set_union_disjoint_families():
    a = VertexSet.of({"u": IndexSet.progression(2, 2)})
    b = VertexSet.of({"v": IndexSet.finite([1, 2])})
    u = a.union(b)
    assert u.families() == ("u", "v")
    assert VertexId("v", 2) in u and VertexId("u", 4) in u


def test_vertex_set_intersect_disjoint_families_empty():
    a = VertexSet.singleton(VertexId("u", 1))
    b = VertexSet.singleton(VertexId("v", 1))
    assert a.intersect(b).is_empty()


def test_vertex_set_subset_and_cardinality():
    small = VertexSet.of({"u": IndexSet.progression(6, 6)})
    big = VertexSet.of({"u": IndexSet.progression(2, 2)})
    assert small.subset_of(big) and not big.subset_of(small)
    assert VertexSet.of_vertices([VertexId("u", 1), VertexId("u", 5)]).cardinality() == 2


def test_vertex_set_encode_sorted_by_family():
    s = VertexSet.of({"v": IndexSet.finite([1]), "u": IndexSet.finite([0])})
    assert s.encode().startswith("u:")


def test_mixed_set_canonicalization_collapse():
    # evens>=2 together with odds>=3 is everything >= 2
    evens = IndexSet.progression(2, 2)
    odds = IndexSet.progression(3, 2)
    assert evens.union(odds) == IndexSet.naturals_from(2)
