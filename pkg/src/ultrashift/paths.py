"""Ultrapaths, shift points, and the canonical listing of the path space.

Entry positions are 1-based.  Shift points are either a finite path
terminated by a minimal infinite emitter, or one of three closed-form
presentations of an infinite path: eventually periodic, a family tail
(fresh edges E[start], E[start+1], ... after a finite prefix), or a
binary block code over two closed walks based at a common vertex.
Presentations are normalized at construction so that structural equality
of same-kind values is path equality; cross-kind equality is decided by
`points_equal`, which may return None where the eventual forms genuinely
leave it open.
"""

from __future__ import annotations

import heapq
import itertools
from bisect import bisect_left
from dataclasses import dataclass, field
from functools import lru_cache
from math import inf
from typing import Iterator, Union

from .bitstreams import (Bitstream, DroppedBits, bits_equal, eventual_form,
                         realize_bits)
from .ultragraph import EdgeId, UltragraphPresentation
from .vertexsets import IndexSet, VertexId, VertexSet


# ---------------------------------------------------------------------------
# finite paths


@dataclass(frozen=True)
class Ultrapath:
    """A finite edge path with a terminal vertex set inside its range.

    Zero-length paths are bare vertex sets (the pair (A, A)).
    """

    edges: tuple[EdgeId, ...]
    terminal: VertexSet

    def __len__(self) -> int:
        return len(self.edges)

    def encode(self) -> str:
        if not self.edges:
            return self.terminal.encode()
        return ".".join(str(e) for e in self.edges) + ":" + self.terminal.encode()

    def __str__(self) -> str:
        return self.encode()


def path_of_edges(g: UltragraphPresentation,
                  edges: tuple[EdgeId, ...]) -> Ultrapath:
    """Embed a bare edge path as the pair (alpha, r(alpha))."""
    return Ultrapath(tuple(edges), g.range_of(edges[-1]))


def validate_ultrapath(g: UltragraphPresentation, p: Ultrapath) -> list[str]:
    out = []
    for e in p.edges:
        if not g.has_edge(e):
            out.append(f"unknown edge {e}")
            return out
    for prev, nxt in zip(p.edges, p.edges[1:]):
        if g.source(nxt) not in g.range_of(prev):
            out.append(f"broken path: s({nxt}) not in r({prev})")
    if p.terminal.is_empty():
        out.append("empty terminal set")
    if p.edges and not p.terminal.subset_of(g.range_of(p.edges[-1])):
        out.append("terminal set escapes the final range")
    return out


def concat(g: UltragraphPresentation, x: Ultrapath,
           y: Ultrapath) -> Ultrapath | None:
    """Path concatenation; None where the side conditions fail."""
    if len(x) >= 1 and len(y) >= 1:
        if g.source(y.edges[0]) not in x.terminal:
            return None
        return Ultrapath(x.edges + y.edges, y.terminal)
    if len(x) == 0 and len(y) == 0:
        meet = x.terminal.intersect(y.terminal)
        return None if meet.is_empty() else Ultrapath((), meet)
    if len(x) == 0:
        return y if g.source(y.edges[0]) in x.terminal else None
    meet = x.terminal.intersect(y.terminal)
    return None if meet.is_empty() else Ultrapath(x.edges, meet)


# ---------------------------------------------------------------------------
# shift points


@dataclass(frozen=True)
class FinitePoint:
    """An element of the finite part of the shift space.

    The terminal of ``path`` must be a minimal infinite emitter; callers
    constructing points from raw text go through the validation in
    `ultrashift.dsl`.
    """

    path: Ultrapath

    def __str__(self) -> str:
        if not self.path.edges:
            return f"({self.path.terminal}, itself)"
        return f"({'.'.join(map(str, self.path.edges))}, {self.path.terminal})"


@dataclass(frozen=True)
class EventuallyPeriodic:
    prefix: tuple[EdgeId, ...]
    cycle: tuple[EdgeId, ...]

    @staticmethod
    def make(prefix, cycle) -> "EventuallyPeriodic":
        prefix, cycle = tuple(prefix), tuple(cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")
        for d in range(1, len(cycle) + 1):
            if len(cycle) % d == 0 and cycle == cycle[:d] * (len(cycle) // d):
                cycle = cycle[:d]
                break
        prefix = list(prefix)
        while prefix and prefix[-1] == cycle[-1]:
            cycle = (cycle[-1],) + cycle[:-1]
            prefix.pop()
        return EventuallyPeriodic(tuple(prefix), cycle)

    def __str__(self) -> str:
        pfx = ".".join(map(str, self.prefix))
        return f"{pfx + '.' if pfx else ''}({'.'.join(map(str, self.cycle))})^inf"


@dataclass(frozen=True)
class FamilyTail:
    prefix: tuple[EdgeId, ...]
    family: str
    start: int

    @staticmethod
    def make(prefix, family: str, start: int) -> "FamilyTail":
        prefix = list(prefix)
        while prefix and start > 0 and prefix[-1] == EdgeId(family, start - 1):
            prefix.pop()
            start -= 1
        return FamilyTail(tuple(prefix), family, start)

    def __str__(self) -> str:
        pfx = ".".join(map(str, self.prefix))
        return f"{pfx + '.' if pfx else ''}{self.family}[{self.start}...]"


@dataclass(frozen=True)
class BinaryCoded:
    """Blocks c0 (bit 0) or c1 (bit 1) concatenated at a base vertex.

    Blocks must be distinct closed walks based at ``vertex`` and either
    both simple (no internal return to the base) or of equal length;
    both disciplines make block decoding unique, which the equality and
    certification logic relies on.  ``prefix`` holds edges in front of
    the coded part (the shift map peels blocks into it).
    """

    vertex: VertexId
    c0: tuple[EdgeId, ...]
    c1: tuple[EdgeId, ...]
    bits: Bitstream
    prefix: tuple[EdgeId, ...] = ()
    _cum: list[int] = field(default_factory=list, compare=False, repr=False,
                            hash=False)

    def block(self, value: int) -> tuple[EdgeId, ...]:
        return self.c1 if value else self.c0

    def equal_block_lengths(self) -> bool:
        return len(self.c0) == len(self.c1)

    def _extend_to(self, n: int) -> None:
        while not self._cum or self._cum[-1] < n:
            t = len(self._cum) + 1
            prev = self._cum[-1] if self._cum else 0
            self._cum.append(prev + len(self.block(self.bits.bit(t))))

    def coded_entry(self, j: int) -> EdgeId:
        """The j-th edge of the coded part (past the prefix)."""
        self._extend_to(j)
        t = bisect_left(self._cum, j)
        before = self._cum[t - 1] if t else 0
        return self.block(self.bits.bit(t + 1))[j - before - 1]

    def block_start_offsets(self, count: int) -> list[int]:
        """Edge offsets (1-based, past the prefix) of the first blocks."""
        out, total = [], 0
        for t in range(1, count + 1):
            out.append(total + 1)
            total += len(self.block(self.bits.bit(t)))
        return out

    def __str__(self) -> str:
        pfx = ".".join(map(str, self.prefix))
        c0 = ".".join(map(str, self.c0))
        c1 = ".".join(map(str, self.c1))
        return f"{pfx + '.' if pfx else ''}code[{c0} / {c1}]"


InfinitePath = Union[EventuallyPeriodic, FamilyTail, BinaryCoded]
ShiftPoint = Union[FinitePoint, InfinitePath]


def is_infinite(x: ShiftPoint) -> bool:
    return not isinstance(x, FinitePoint)


def entry_at(x: InfinitePath, i: int) -> EdgeId:
    """The i-th edge (1-based) of the realized path."""
    if i < 1:
        raise ValueError("entries are 1-based")
    if isinstance(x, EventuallyPeriodic):
        if i <= len(x.prefix):
            return x.prefix[i - 1]
        return x.cycle[(i - len(x.prefix) - 1) % len(x.cycle)]
    if isinstance(x, FamilyTail):
        if i <= len(x.prefix):
            return x.prefix[i - 1]
        return EdgeId(x.family, x.start + i - len(x.prefix) - 1)
    if i <= len(x.prefix):
        return x.prefix[i - 1]
    return x.coded_entry(i - len(x.prefix))


def realized_prefix(x: InfinitePath, n: int) -> tuple[EdgeId, ...]:
    return tuple(entry_at(x, i) for i in range(1, n + 1))


def point_source(g: UltragraphPresentation, x: ShiftPoint) -> VertexId | None:
    """Source vertex; None for a zero-length finite point."""
    if isinstance(x, FinitePoint):
        if not x.path.edges:
            return None
        return g.source(x.path.edges[0])
    return g.source(entry_at(x, 1))


def shift(g: UltragraphPresentation, x: ShiftPoint) -> ShiftPoint:
    """Drop the first edge; zero-length points are fixed."""
    if isinstance(x, FinitePoint):
        if len(x.path.edges) <= 1:
            return FinitePoint(Ultrapath((), x.path.terminal))
        return FinitePoint(Ultrapath(x.path.edges[1:], x.path.terminal))
    if isinstance(x, EventuallyPeriodic):
        if x.prefix:
            return EventuallyPeriodic.make(x.prefix[1:], x.cycle)
        return EventuallyPeriodic.make((), x.cycle[1:] + x.cycle[:1])
    if isinstance(x, FamilyTail):
        if x.prefix:
            return FamilyTail.make(x.prefix[1:], x.family, x.start)
        return FamilyTail.make((), x.family, x.start + 1)
    if x.prefix:
        return BinaryCoded(x.vertex, x.c0, x.c1, x.bits, x.prefix[1:])
    lead = x.block(x.bits.bit(1))
    return BinaryCoded(x.vertex, x.c0, x.c1, DroppedBits.make(x.bits, 1),
                       lead[1:])


def shift_iter(g: UltragraphPresentation, x: ShiftPoint,
               n: int) -> ShiftPoint:
    for _ in range(n):
        x = shift(g, x)
    return x


# -- occurrence metadata -----------------------------------------------------


def finite_alphabet(x: ShiftPoint) -> frozenset[EdgeId] | None:
    """Every edge the point can mention, when that set is finite."""
    if isinstance(x, FinitePoint):
        return frozenset(x.path.edges)
    if isinstance(x, EventuallyPeriodic):
        return frozenset(x.prefix + x.cycle)
    if isinstance(x, BinaryCoded):
        return frozenset(x.prefix + x.c0 + x.c1)
    return None


def _bit_value_infinite(bits: Bitstream, value: int) -> bool:
    form = eventual_form(bits)
    if form is not None:
        return value in form.cycle
    # block codes and aperiodic sparse-override streams alternate forever
    return True


def occurs_infinitely(x: InfinitePath, e: EdgeId) -> bool:
    if isinstance(x, EventuallyPeriodic):
        return e in x.cycle
    if isinstance(x, FamilyTail):
        return False
    hits0, hits1 = e in x.c0, e in x.c1
    return ((hits0 and _bit_value_infinite(x.bits, 0))
            or (hits1 and _bit_value_infinite(x.bits, 1)))


def occurrence_positions(x: InfinitePath, e: EdgeId) -> IndexSet | None:
    """Positions of e in the realized path, when eventually periodic."""
    if isinstance(x, EventuallyPeriodic):
        hits = {i + 1 for i, d in enumerate(x.prefix) if d == e}
        out = IndexSet.finite(hits)
        base = len(x.prefix)
        for i, d in enumerate(x.cycle):
            if d == e:
                out = out.union(IndexSet.progression(base + i + 1, len(x.cycle)))
        return out
    if isinstance(x, FamilyTail):
        hits = {i + 1 for i, d in enumerate(x.prefix) if d == e}
        if e.family == x.family and e.index >= x.start:
            hits.add(len(x.prefix) + e.index - x.start + 1)
        return IndexSet.finite(hits)
    form = eventual_form(x.bits)
    if form is None:
        return None
    hits = {i + 1 for i, d in enumerate(x.prefix) if d == e}
    out = IndexSet.finite(hits)
    base = len(x.prefix)
    # walk the prefix blocks, then one full bit cycle of blocks
    offset = 0
    for t in range(1, len(form.prefix) + 1):
        blk = x.block(form.bit(t))
        for i, d in enumerate(blk):
            if d == e:
                out = out.union(IndexSet.finite([base + offset + i + 1]))
        offset += len(blk)
    cyc_len = sum(len(x.block(b)) for b in form.cycle)
    for b in form.cycle:
        blk = x.block(b)
        for i, d in enumerate(blk):
            if d == e:
                out = out.union(IndexSet.progression(base + offset + i + 1,
                                                     cyc_len))
        offset += len(blk)
    return out


def tail_source_positions(g: UltragraphPresentation, x: FamilyTail,
                          a: VertexSet) -> tuple[IndexSet, IndexSet]:
    """Tail offsets t >= start whose edge source lies in / outside ``a``.

    Family-tail edges are pairwise distinct, so an infinite answer set
    witnesses infinitely many pairwise-different entries.
    """
    ef = g.edge_family(x.family)
    fam_part = a.part(ef.source_family)
    good = fam_part.affine_preimage(ef.source_map.a, ef.source_map.b)
    tail = IndexSet.naturals_from(x.start).intersect(ef.domain)
    inside = tail.intersect(good)
    outside = tail.minus(good)
    return inside, outside


# -- validation ---------------------------------------------------------------


def validate_point(g: UltragraphPresentation, x: ShiftPoint, *,
                   emitter_depth: int = 3,
                   emitter_index_bound: int = 64) -> list[str]:
    """Structural validity of a shift point against its presentation."""
    out: list[str] = []
    if isinstance(x, FinitePoint):
        out.extend(validate_ultrapath(g, x.path))
        if not out:
            search = g.minimal_infinite_emitters(
                x.path.terminal, depth_bound=emitter_depth,
                index_bound=emitter_index_bound)
            if not any(m.vertices == x.path.terminal for m in search.emitters):
                out.append("terminal is not a recognized minimal infinite "
                           "emitter")
        return out

    def chain_ok(edges: tuple[EdgeId, ...], what: str) -> None:
        for e in edges:
            if not g.has_edge(e):
                out.append(f"unknown edge {e} in {what}")
                return
        for prev, nxt in zip(edges, edges[1:]):
            if g.source(nxt) not in g.range_of(prev):
                out.append(f"broken {what}: s({nxt}) not in r({prev})")

    if isinstance(x, EventuallyPeriodic):
        chain_ok(x.prefix + x.cycle, "path")
        if not out:
            if g.source(x.cycle[0]) not in g.range_of(x.cycle[-1]):
                out.append("cycle does not close up")
        return out

    if isinstance(x, FamilyTail):
        chain_ok(x.prefix, "prefix")
        if out:
            return out
        try:
            ef = g.edge_family(x.family)
        except KeyError:
            return [f"unknown edge family {x.family!r}"]
        tail = IndexSet.naturals_from(x.start)
        if not tail.subset_of(ef.domain):
            return [f"family {x.family!r} has no edges from index "
                    f"{tail.minus(ef.domain).min()}"]
        if x.prefix:
            if g.source(EdgeId(x.family, x.start)) not in g.range_of(x.prefix[-1]):
                out.append("prefix does not continue into the tail")
        # every consecutive tail step must be valid, checked per clause
        src = ef.source_map
        next_src = src.compose(type(src)(1, 1))  # index of s(E[t+1]) in t
        for clause in ef.clauses:
            guard = clause.guard.intersect(ef.domain).intersect(tail)
            if guard.is_empty():
                continue
            good = IndexSet.empty()
            for part in clause.parts:
                from .ultragraph import AffineAtom
                if isinstance(part, AffineAtom):
                    if part.family != ef.source_family:
                        continue
                    if part.map.a == next_src.a and part.map.b == next_src.b:
                        good = IndexSet.naturals_from(0)
                    elif part.map.a != next_src.a:
                        num = next_src.b - part.map.b
                        den = part.map.a - next_src.a
                        if num % den == 0 and num // den >= 0:
                            good = good.union(IndexSet.finite([num // den]))
                else:
                    fam_part = part.value.part(ef.source_family)
                    good = good.union(
                        fam_part.affine_preimage(next_src.a, next_src.b))
            if not guard.subset_of(good):
                bad = guard.minus(good).min()
                out.append(f"tail breaks at index {bad}: "
                           f"s({x.family}[{bad + 1}]) not in r({x.family}[{bad}])")
        return out

    # binary coded
    for c, name in ((x.c0, "c0"), (x.c1, "c1")):
        chain_ok(c, name)
        if out:
            return out
        if g.source(c[0]) != x.vertex:
            out.append(f"{name} does not start at {x.vertex}")
        if x.vertex not in g.range_of(c[-1]):
            out.append(f"{name} does not return to {x.vertex}")
    if x.c0 == x.c1:
        out.append("blocks must be distinct")
    simple = all(g.source(e) != x.vertex for e in x.c0[1:]) and \
        all(g.source(e) != x.vertex for e in x.c1[1:])
    if not simple and len(x.c0) != len(x.c1):
        out.append("blocks must be simple closed paths or of equal length")
    chain_ok(x.prefix, "prefix")
    if x.prefix and not out:
        if x.vertex not in g.range_of(x.prefix[-1]):
            out.append("prefix does not continue into the coded part")
    return out


# -- equality -----------------------------------------------------------------


def to_eventually_periodic(x: InfinitePath) -> EventuallyPeriodic | None:
    """Exact conversion when the realized path is eventually periodic."""
    if isinstance(x, EventuallyPeriodic):
        return x
    if isinstance(x, FamilyTail):
        return None
    form = eventual_form(x.bits)
    if form is None:
        return None
    prefix = list(x.prefix)
    for t in range(1, len(form.prefix) + 1):
        prefix.extend(x.block(form.bit(t)))
    cycle: list[EdgeId] = []
    for b in form.cycle:
        cycle.extend(x.block(b))
    return EventuallyPeriodic.make(prefix, cycle)


def points_equal(g: UltragraphPresentation, x: ShiftPoint,
                 y: ShiftPoint) -> bool | None:
    """Exact point equality; None when the presentations leave it open."""
    if isinstance(x, FinitePoint) or isinstance(y, FinitePoint):
        if not (isinstance(x, FinitePoint) and isinstance(y, FinitePoint)):
            return False
        return x.path == y.path

    kinds = {type(x), type(y)}
    if kinds == {EventuallyPeriodic}:
        return x == y
    if kinds == {FamilyTail}:
        return x == y
    if FamilyTail in kinds:
        return False  # a fresh-edge tail shares no infinite alphabet

    ex, ey = to_eventually_periodic(x), to_eventually_periodic(y)
    if ex is not None and ey is not None:
        return ex == ey
    if (ex is None) != (ey is None):
        # block decoding is unique, so aperiodic bits give aperiodic paths
        return False
    if not (isinstance(x, BinaryCoded) and isinstance(y, BinaryCoded)):
        return None
    if (x.vertex, x.c0, x.c1) != (y.vertex, y.c0, y.c1):
        window = len(x.prefix) + len(y.prefix) + \
            2 * (len(x.c0) + len(x.c1) + len(y.c0) + len(y.c1)) + 8
        if realized_prefix(x, window) != realized_prefix(y, window):
            return False
        return None
    if len(x.prefix) == len(y.prefix):
        if x.prefix != y.prefix:
            return False
        return bits_equal(x.bits, y.bits)
    lo, hi = (x, y) if len(x.prefix) < len(y.prefix) else (y, x)
    excess = len(hi.prefix) - len(lo.prefix)
    window = len(hi.prefix) + max(len(x.c0), len(x.c1)) + 4
    if realized_prefix(x, window) != realized_prefix(y, window):
        return False
    # align lo's code blocks against hi's longer prefix
    total, t = 0, 0
    while total < excess:
        t += 1
        total += len(lo.block(lo.bits.bit(t)))
    if total != excess:
        simple = all(g.source(e) != lo.vertex for e in lo.c0[1:]) and \
            all(g.source(e) != lo.vertex for e in lo.c1[1:])
        return False if simple else None
    return bits_equal(DroppedBits.make(lo.bits, t), hi.bits)


# -- initial segments and cylinders -------------------------------------------


def is_initial_segment(g: UltragraphPresentation, y: Ultrapath,
                       x: ShiftPoint) -> bool:
    """Whether x factors as y . x' (spec'd case analysis, decided exactly)."""
    m = len(y.edges)
    if m == 0:
        if isinstance(x, FinitePoint) and not x.path.edges:
            return x.path.terminal.subset_of(y.terminal)
        src = point_source(g, x)
        return src is not None and src in y.terminal
    if isinstance(x, FinitePoint):
        a = x.path.edges
        if len(a) < m or a[:m] != y.edges:
            return False
        if len(a) == m:
            return x.path.terminal.subset_of(y.terminal)
        return g.source(a[m]) in y.terminal
    if realized_prefix(x, m) != y.edges:
        return False
    return g.source(entry_at(x, m + 1)) in y.terminal


def cylinder_contains(g: UltragraphPresentation, base: Ultrapath,
                      excluded: frozenset[EdgeId], x: ShiftPoint) -> bool:
    """Membership in the basic open set written D_{(beta,B),F}.

    ``excluded`` is the finite set F of banned continuation edges; it
    must consist of edges emitted by the terminal of ``base``.
    """
    b = base.terminal
    for e in excluded:
        if not g.has_edge(e) or g.source(e) not in b:
            raise ValueError(f"excluded edge {e} is not emitted by the base "
                             "terminal")
    m = len(base.edges)
    if isinstance(x, FinitePoint):
        a = x.path.edges
        if len(a) < m or a[:m] != base.edges:
            return False
        if len(a) == m:
            if excluded:
                return x.path == base
            return x.path.terminal.subset_of(b)
        nxt = a[m]
    else:
        if realized_prefix(x, m) != base.edges:
            return False
        nxt = entry_at(x, m + 1)
    if g.source(nxt) not in b:
        return False
    return nxt not in excluded


# ---------------------------------------------------------------------------
# canonical enumeration of the ultrapath space


def _combo_pool(g: UltragraphPresentation, depth: int,
                index_bound: int) -> list[VertexSet]:
    """Vertex sets built from <= depth generators under union/intersection.

    Generators are singletons of active vertices and ranges, with family
    index <= index_bound; depth-1 generators are streamed unboundedly
    elsewhere, this pool only feeds the composite (depth >= 2) layer.
    """
    gens: dict[str, VertexSet] = {}
    active = g.active_vertices()
    for fam, part in active.atoms:
        for i in itertools.islice(part.iter_members(), index_bound + 1):
            if i > 4 * index_bound:
                break
            v = VertexSet.singleton(VertexId(fam, i))
            gens[v.encode()] = v
    for ef in g.edge_families:
        for k in ef.domain.members(index_bound + 1):
            r = g.range_of(EdgeId(ef.name, k))
            gens[r.encode()] = r
    pool = dict(gens)
    base = list(gens.values())
    if depth >= 2:
        for a, b in itertools.combinations(base, 2):
            for v in (a.union(b), a.intersect(b)):
                if not v.is_empty():
                    pool[v.encode()] = v
    if depth >= 3:
        for a, b, c in itertools.combinations(base, 3):
            u = a.union(b)
            i = a.intersect(b)
            for v in (u.union(c), u.intersect(c), i.union(c), i.intersect(c)):
                if not v.is_empty():
                    pool[v.encode()] = v
    return list(pool.values())


class _Stream:
    """Iterator wrapper with a sorted lookahead to absorb local key jitter."""

    _BUFFER = 64

    def __init__(self, it: Iterator[tuple[tuple, object]]):
        self._it = it
        self._buf: list[tuple[tuple, int, object]] = []
        self._n = 0
        self._last = None
        self._fill()

    def _fill(self) -> None:
        while len(self._buf) < self._BUFFER:
            try:
                key, item = next(self._it)
            except StopIteration:
                return
            heapq.heappush(self._buf, (key, self._n, item))
            self._n += 1

    def peek(self):
        return self._buf[0][0] if self._buf else None

    def pop(self):
        key, _, item = heapq.heappop(self._buf)
        if self._last is not None and key < self._last:
            raise RuntimeError("enumeration stream emitted out of order")
        self._last = key
        self._fill()
        return key, item


class UltrapathEnumeration:
    """The fixed listing p_1, p_2, ... of the ultrapath space.

    Order is (byte length of canonical serialization, then lexicographic),
    realized as a best-first merge of monotone generators: per-family
    singleton streams, per-clause range streams, a finite composite pool
    (unions/intersections of up to ``combo_depth`` generators with family
    index <= ``combo_index_bound``), and a lazily expanded tree of edge
    paths with terminal choices.  Deterministic across runs; the
    ``alternative`` variant reverses the within-length tiebreak and exists
    so order-sensitivity can be tested.
    """

    def __init__(self, g: UltragraphPresentation, *, combo_depth: int = 3,
                 combo_index_bound: int = 8, variant: str = "canonical"):
        if variant not in ("canonical", "alternative"):
            raise ValueError("variant is 'canonical' or 'alternative'")
        self._g = g
        self._variant = variant
        self._items: list[Ultrapath] = []
        self._seen: set[str] = set()
        self._heap: list = []
        self._count = 0
        self._min_terminal = min(
            (len(f) for f in g.vertex_families), default=1) + 7
        self._combo_depth = combo_depth
        self._active = g.active_vertices()
        self._emitters_cache: dict[str, list[VertexSet]] = {}
        self._terminals_cache: dict[str, list[VertexSet]] = {}
        pool = sorted(_combo_pool(g, combo_depth, combo_index_bound),
                      key=lambda v: self._key(v.encode()))
        self._pool = pool
        self._push_stream(iter(
            (self._key(v.encode()), Ultrapath((), v)) for v in pool))
        for fam in g.vertex_families:
            self._push_stream(self._singleton_stream(fam))
        for ef in g.edge_families:
            for clause in ef.clauses:
                self._push_stream(self._range_stream(ef, clause))
            self._push_stream(self._edge_stub_stream(ef))

    # -- keys and heap plumbing --------------------------------------

    def _key(self, ser: str) -> tuple:
        if self._variant == "canonical":
            return (len(ser), ser)
        return (len(ser), ser[::-1])

    def _push(self, key, kind, payload) -> None:
        heapq.heappush(self._heap, (key, self._count, kind, payload))
        self._count += 1

    def _push_stream(self, it: Iterator) -> None:
        stream = _Stream(it)
        if stream.peek() is not None:
            self._push(stream.peek(), "stream", stream)

    # -- generators ----------------------------------------------------

    def _singleton_stream(self, fam: str):
        for i in self._active.part(fam).iter_members():
            v = VertexSet.singleton(VertexId(fam, i))
            yield self._key(v.encode()), Ultrapath((), v)

    def _range_stream(self, ef, clause):
        guard = clause.guard.intersect(ef.domain)
        if guard.is_empty():
            return
        ks = iter([guard.min()]) if clause.is_constant() else guard.iter_members()
        for k in ks:
            v = clause.value_at(k)
            yield self._key(v.encode()), Ultrapath((), v)

    def _edges_ser(self, edges: tuple[EdgeId, ...]) -> str:
        return ".".join(str(e) for e in edges)

    def _stub_key(self, edges: tuple[EdgeId, ...]) -> tuple:
        length = len(self._edges_ser(edges)) + 1 + self._min_terminal
        return (length, "") if self._variant == "canonical" else (length, "")

    def _edge_stub_stream(self, ef):
        for k in ef.domain.iter_members():
            edges = (EdgeId(ef.name, k),)
            yield self._stub_key(edges), ("stub", edges)

    def _successor_stub_stream(self, edges: tuple[EdgeId, ...], fam: str,
                               indices: IndexSet):
        for k in indices.iter_members():
            child = edges + (EdgeId(fam, k),)
            yield self._stub_key(child), ("stub", child)

    def _terminal_stream(self, edges: tuple[EdgeId, ...],
                         within: VertexSet, fam: str):
        part = within.part(fam)
        for i in part.iter_members():
            v = VertexSet.singleton(VertexId(fam, i))
            p = Ultrapath(edges, v)
            yield self._key(p.encode()), p

    def _minimal_emitters_of(self, within: VertexSet) -> list[VertexSet]:
        key = within.encode()
        if key not in self._emitters_cache:
            found = self._g.minimal_infinite_emitters(within, depth_bound=2,
                                                      index_bound=24)
            self._emitters_cache[key] = [m.vertices for m in found.emitters]
        return self._emitters_cache[key]

    def _terminal_choices(self, rng: VertexSet) -> list[VertexSet]:
        """Depth-capped terminal sets inside ``rng`` (besides rng itself)."""
        key = rng.encode()
        if key not in self._terminals_cache:
            found: dict[str, VertexSet] = {}
            for m in self._minimal_emitters_of(rng):
                found[m.encode()] = m
            if rng.cardinality() <= 12:
                members = list(rng.iter_vertices(12))
                for size in range(1, min(self._combo_depth, len(members)) + 1):
                    for combo in itertools.combinations(members, size):
                        v = VertexSet.of_vertices(combo)
                        found[v.encode()] = v
            else:
                for v in self._pool:
                    if v.subset_of(rng):
                        found[v.encode()] = v
            found.pop(key, None)
            self._terminals_cache[key] = list(found.values())
        return self._terminals_cache[key]

    def _expand_stub(self, edges: tuple[EdgeId, ...]) -> None:
        rng = self._g.range_of(edges[-1])
        fixed = [Ultrapath(edges, rng)]
        fixed.extend(Ultrapath(edges, v) for v in self._terminal_choices(rng))
        uniq = {p.encode(): p for p in fixed}
        items = sorted(uniq.values(), key=lambda p: self._key(p.encode()))
        self._push_stream(iter((self._key(p.encode()), p) for p in items))
        if rng.cardinality() > 12:
            for fam, _ in rng.atoms:
                self._push_stream(self._terminal_stream(edges, rng, fam))
        succ = self._g.epsilon(rng)
        for fam, indices in succ.parts:
            self._push_stream(self._successor_stub_stream(edges, fam, indices))

    # -- consumption ----------------------------------------------------

    def _advance(self) -> bool:
        while self._heap:
            key, _, kind, payload = heapq.heappop(self._heap)
            if kind == "stream":
                stream = payload
                _, item = stream.pop()
                if stream.peek() is not None:
                    self._push(stream.peek(), "stream", stream)
                if isinstance(item, tuple) and item and item[0] == "stub":
                    self._expand_stub(item[1])
                    continue
                ser = item.encode()
                if ser in self._seen:
                    continue
                self._seen.add(ser)
                self._items.append(item)
                return True
        return False

    def enumerate(self, n: int) -> list[Ultrapath]:
        """The first n elements of the listing."""
        while len(self._items) < n and self._advance():
            pass
        return self._items[:n]

    def __iter__(self) -> Iterator[Ultrapath]:
        i = 0
        while True:
            if i < len(self._items) or self._advance():
                yield self._items[i]
                i += 1
            else:
                return

    def rank_of(self, p: Ultrapath, max_rank: int) -> int | None:
        """1-based rank of p, or None if not found within max_rank."""
        target = p.encode()
        for i, q in enumerate(self):
            if i >= max_rank:
                return None
            if q.encode() == target:
                return i + 1
        return None


@lru_cache(maxsize=None)
def enumeration_for(g: UltragraphPresentation,
                    variant: str = "canonical") -> UltrapathEnumeration:
    return UltrapathEnumeration(g, variant=variant)
