import pytest

from ultrashift.ultragraph import (Affine, AffineAtom, ConstPart, EdgeFamily,
                                   RangeClause, UltragraphPresentation)
from ultrashift.vertexsets import IndexSet, VertexId, VertexSet


def build_scrambled_not_chaotic():
    """The two-family ultragraph with a scrambled pair but no chaos.

    Families u, v; edges e_k from u_k and f_k from v_k; r(e_0) is the even
    u-vertices from u_2 up, r(e_k) = {u_{k+1}} otherwise; r(f_0) =
    {v_1, v_2, u_1} and r(f_k) = {v_{2k+1}, v_{2k+2}} otherwise.
    """
    e = EdgeFamily(
        name="e",
        domain=IndexSet.naturals_from(0),
        source_family="u",
        source_map=Affine(1, 0),
        clauses=(
            RangeClause(IndexSet.finite([0]),
                        (ConstPart(VertexSet.of({"u": IndexSet.progression(2, 2)})),)),
            RangeClause(IndexSet.naturals_from(1),
                        (AffineAtom("u", Affine(1, 1)),)),
        ))
    f = EdgeFamily(
        name="f",
        domain=IndexSet.naturals_from(0),
        source_family="v",
        source_map=Affine(1, 0),
        clauses=(
            RangeClause(IndexSet.finite([0]),
                        (ConstPart(VertexSet.of_vertices(
                            [VertexId("v", 1), VertexId("v", 2),
                             VertexId("u", 1)])),)),
            RangeClause(IndexSet.naturals_from(1),
                        (AffineAtom("v", Affine(2, 1)),
                         AffineAtom("v", Affine(2, 2)))),
        ))
    return UltragraphPresentation(
        vertex_families=("u", "v"),
        edge_families=(e, f),
        gradings=(("u", Affine(1, 0)), ("v", Affine(1, 0))))


def build_two_loops():
    """One vertex w[0] carrying two distinct loops a[0] and b[0]."""
    loop_at_w = (RangeClause(IndexSet.finite([0]),
                             (ConstPart(VertexSet.singleton(VertexId("w", 0))),)),)
    mk = lambda name: EdgeFamily(name=name, domain=IndexSet.finite([0]),
                                 source_family="w", source_map=Affine(0, 0),
                                 clauses=loop_at_w)
    return UltragraphPresentation(("w",), (mk("a"), mk("b")))


def build_loop_fan():
    """One vertex w[0] with infinitely many loops g[0], g[1], ..."""
    g = EdgeFamily(
        name="g",
        domain=IndexSet.naturals_from(0),
        source_family="w",
        source_map=Affine(0, 0),
        clauses=(RangeClause(IndexSet.naturals_from(0),
                             (ConstPart(VertexSet.singleton(VertexId("w", 0))),)),))
    return UltragraphPresentation(("w",), (g,))


def build_two_cycle():
    """Two vertices w[0] <-> w[1], edges g[0]: 0->1 and h[0]: 1->0."""
    g = EdgeFamily(name="g", domain=IndexSet.finite([0]),
                   source_family="w", source_map=Affine(0, 0),
                   clauses=(RangeClause(IndexSet.finite([0]),
                                        (ConstPart(VertexSet.singleton(VertexId("w", 1))),)),))
    h = EdgeFamily(name="h", domain=IndexSet.finite([0]),
                   source_family="w", source_map=Affine(0, 1),
                   clauses=(RangeClause(IndexSet.finite([0]),
                                        (ConstPart(VertexSet.singleton(VertexId("w", 0))),)),))
    return UltragraphPresentation(("w",), (g, h))


def build_single_loop():
    """One vertex w[0] with a single loop a[0]."""
    a = EdgeFamily(name="a", domain=IndexSet.finite([0]),
                   source_family="w", source_map=Affine(0, 0),
                   clauses=(RangeClause(IndexSet.finite([0]),
                                        (ConstPart(VertexSet.singleton(VertexId("w", 0))),)),))
    return UltragraphPresentation(("w",), (a,))


@pytest.fixture(scope="session")
def ex38():
    return build_scrambled_not_chaotic()


@pytest.fixture(scope="session")
def two_loops():
    return build_two_loops()


@pytest.fixture(scope="session")
def loop_fan():
    return build_loop_fan()


@pytest.fixture(scope="session")
def two_cycle():
    return build_two_cycle()


@pytest.fixture(scope="session")
def single_loop():
    return build_single_loop()
