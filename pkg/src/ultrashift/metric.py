"""The embedding into product 0/1 space and the induced metric.

A point maps to the 0/1 vector of its initial segments over the fixed
listing p_1, p_2, ... of the path space; the distance between two points
is 2^(-i) for the first i where the vectors differ.  Distances are kept
as ranks (exact), never floats; rendering happens at the CLI edge.
Every scan is capped, and an exhausted cap reports UnknownBeyond rather
than pretending the points are equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .paths import (FinitePoint, ShiftPoint, Ultrapath, UltrapathEnumeration,
                    enumeration_for, entry_at, is_initial_segment,
                    point_source, points_equal, shift)
from .ultragraph import EdgeId, UltragraphPresentation


@dataclass(frozen=True)
class DistanceValue:
    """Zero, an exact rank i (value 2^-i), or unknown beyond a scanned cap."""

    kind: str
    rank: int | None = None
    cap: int | None = None

    @staticmethod
    def zero() -> "DistanceValue":
        return DistanceValue("zero")

    @staticmethod
    def of_rank(i: int) -> "DistanceValue":
        if i < 1:
            raise ValueError("ranks are 1-based")
        return DistanceValue("rank", rank=i)

    @staticmethod
    def unknown_beyond(cap: int) -> "DistanceValue":
        return DistanceValue("unknown", cap=cap)

    def is_zero(self) -> bool:
        return self.kind == "zero"

    def is_unknown(self) -> bool:
        return self.kind == "unknown"

    def value(self) -> Fraction:
        """Exact numeric value; unknown maps to its upper bound."""
        if self.kind == "zero":
            return Fraction(0)
        if self.kind == "rank":
            return Fraction(1, 2 ** self.rank)
        return Fraction(1, 2 ** self.cap)

    def rank_floor(self) -> int | None:
        """A lower bound on the rank: exact for ranks, cap for unknown."""
        if self.kind == "zero":
            return None
        return self.rank if self.kind == "rank" else self.cap

    def csv_rank(self) -> int:
        if self.kind == "zero":
            return -1
        if self.kind == "unknown":
            return 0
        return self.rank

    def __str__(self) -> str:
        if self.kind == "zero":
            return "0"
        if self.kind == "rank":
            return f"2^-{self.rank}"
        return f"<2^-{self.cap} (unknown beyond rank {self.cap})"


class _Matcher:
    """Initial-segment tests against one point, with a realized cache."""

    def __init__(self, g: UltragraphPresentation, x: ShiftPoint):
        self._g = g
        self._x = x
        self._edges: list[EdgeId] = []
        self._sources: list = []
        if isinstance(x, FinitePoint):
            self._edges = list(x.path.edges)
            self._sources = [g.source(e) for e in self._edges]
        self.source = point_source(g, x)

    def _grow(self, n: int) -> bool:
        if isinstance(self._x, FinitePoint):
            return n <= len(self._edges)
        while len(self._edges) < n:
            e = entry_at(self._x, len(self._edges) + 1)
            self._edges.append(e)
            self._sources.append(self._g.source(e))
        return True

    def hit(self, p: Ultrapath) -> bool:
        m = len(p.edges)
        x = self._x
        if m == 0:
            if isinstance(x, FinitePoint) and not x.path.edges:
                return x.path.terminal.subset_of(p.terminal)
            return self.source is not None and self.source in p.terminal
        if isinstance(x, FinitePoint):
            a = x.path.edges
            if len(a) < m or a[:m] != p.edges:
                return False
            if len(a) == m:
                return x.path.terminal.subset_of(p.terminal)
            return self._sources[m] in p.terminal
        self._grow(m + 1)
        if tuple(self._edges[:m]) != p.edges:
            return False
        return self._sources[m] in p.terminal


def alpha_row(g: UltragraphPresentation, x: ShiftPoint, p: Ultrapath) -> int:
    """The embedding coordinate of x at the listed path p."""
    return 1 if is_initial_segment(g, p, x) else 0


def distance(g: UltragraphPresentation, x: ShiftPoint, y: ShiftPoint, *,
             max_rank: int = 100_000,
             enumeration: UltrapathEnumeration | None = None) -> DistanceValue:
    """First listed path separating x from y, as a rank.

    Zero exactly when the points are equal (decided on presentations);
    UnknownBeyond(max_rank) when no separator is listed within the cap,
    which includes the undecidable-equality cases.
    """
    eq = points_equal(g, x, y)
    if eq is True:
        return DistanceValue.zero()
    en = enumeration or enumeration_for(g)
    mx, my = _Matcher(g, x), _Matcher(g, y)
    for i, p in enumerate(en):
        if i >= max_rank:
            break
        if mx.hit(p) != my.hit(p):
            return DistanceValue.of_rank(i + 1)
    return DistanceValue.unknown_beyond(max_rank)


def trajectory(g: UltragraphPresentation, x: ShiftPoint, y: ShiftPoint,
               n_max: int, *, max_rank: int = 2000,
               enumeration: UltrapathEnumeration | None = None) -> list[DistanceValue]:
    """d(sigma^n x, sigma^n y) for n = 0..n_max."""
    en = enumeration or enumeration_for(g)
    out = []
    for _ in range(n_max + 1):
        out.append(distance(g, x, y, max_rank=max_rank, enumeration=en))
        x, y = shift(g, x), shift(g, y)
    return out


@dataclass
class ConvergenceReport:
    case: str                      # "infinite-limit" or "finite-limit"
    converges: bool
    notes: list[str] = field(default_factory=list)
    agreement_depth_reached: dict[int, int] = field(default_factory=dict)
    continuation_counts: dict[EdgeId, int] = field(default_factory=dict)
    stuck_edges: list[EdgeId] = field(default_factory=list)
    distance_ranks: list[DistanceValue] = field(default_factory=list)
    ranks_nondecreasing_from: int | None = None


def _ranks_tail_index(values: list[DistanceValue]) -> int | None:
    """First index from which the rank sequence never decreases."""
    if not values:
        return None

    def level(v: DistanceValue) -> float:
        return float("inf") if v.is_zero() else float(v.rank_floor())

    start = len(values) - 1
    for i in range(len(values) - 2, -1, -1):
        if level(values[i]) <= level(values[i + 1]):
            start = i
        else:
            break
    return start


def check_convergence(g: UltragraphPresentation, sequence: list[ShiftPoint],
                      limit: ShiftPoint, *, max_rank: int = 2000,
                      enumeration: UltrapathEnumeration | None = None) -> ConvergenceReport:
    """Verify the combinatorial convergence conditions along the sequence.

    For an infinite limit: eventual entrywise agreement to every depth M
    (depth capped by the sequence length).  For a finite limit (gamma, A):
    eventually each term equals the limit or extends gamma by an edge
    emitted from A, and no single continuation edge persists (every fixed
    finite exclusion set must eventually be escaped).  Distances to the
    limit are reported alongside as a cross-check.
    """
    report = ConvergenceReport(case="", converges=True)
    en = enumeration or enumeration_for(g)
    report.distance_ranks = [
        distance(g, x, limit, max_rank=max_rank, enumeration=en)
        for x in sequence]
    report.ranks_nondecreasing_from = _ranks_tail_index(report.distance_ranks)

    if not isinstance(limit, FinitePoint):
        report.case = "infinite-limit"
        depth_cap = max(1, min(len(sequence), 40))
        from .paths import realized_prefix
        target = realized_prefix(limit, depth_cap)
        for m in range(1, depth_cap + 1):
            last_bad = -1
            for n, x in enumerate(sequence):
                if isinstance(x, FinitePoint):
                    edges = x.path.edges
                    ok = len(edges) >= m and edges[:m] == target[:m]
                else:
                    ok = realized_prefix(x, m) == target[:m]
                if not ok:
                    last_bad = n
            report.agreement_depth_reached[m] = last_bad + 1
            if last_bad >= len(sequence) - 1:
                report.converges = False
                report.notes.append(
                    f"no tail of the sequence matches the first {m} entries")
                break
        return report

    report.case = "finite-limit"
    gamma = limit.path.edges
    a = limit.path.terminal
    k = len(gamma)
    counts: dict[EdgeId, int] = {}
    last_structural_bad = -1
    last_seen: dict[EdgeId, int] = {}
    for n, x in enumerate(sequence):
        if points_equal(g, x, limit) is True:
            continue
        if isinstance(x, FinitePoint):
            edges = x.path.edges
            ok = len(edges) > k and edges[:k] == gamma
            nxt = edges[k] if ok else None
        else:
            from .paths import realized_prefix
            ok = realized_prefix(x, k) == gamma
            nxt = entry_at(x, k + 1) if ok else None
        if ok and nxt is not None and g.source(nxt) in a:
            counts[nxt] = counts.get(nxt, 0) + 1
            last_seen[nxt] = n
        else:
            last_structural_bad = n
    report.continuation_counts = counts
    if last_structural_bad == len(sequence) - 1:
        report.converges = False
        report.notes.append("structural condition still violated at the "
                            "end of the sequence")
    # a continuation edge that keeps recurring blocks case (b): the finite
    # set F = {edge} is then never escaped
    window = max(1, len(sequence) // 2)
    for e, cnt in counts.items():
        if cnt >= 2 and last_seen[e] >= len(sequence) - window:
            report.stuck_edges.append(e)
    if report.stuck_edges:
        report.converges = False
        report.notes.append("continuation edges recur into the tail: " +
                            ", ".join(map(str, sorted(report.stuck_edges,
                                                      key=str))))
    return report
