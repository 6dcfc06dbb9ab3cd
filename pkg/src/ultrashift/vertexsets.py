"""Exact algebra of vertex sets.

A vertex set is a finite union of per-family index sets, where each index
set is an eventually periodic subset of the naturals: a finite explicit
part below a threshold, and a union of residue classes modulo a period at
and above it.  This class of sets is closed under union, intersection and
complement, membership and inclusion are decidable, and every set has a
unique canonical form (minimal period, then minimal threshold), so
set equality is literal equality of canonical forms.

Eventually periodic sets cover everything the constructions here produce:
singletons, ranges such as ``{u[2k] : k >= 1}``, and finite unions and
nonempty intersections of those.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from math import gcd, inf
from typing import Iterable, Iterator, NamedTuple


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


class VertexId(NamedTuple):
    family: str
    index: int

    def __str__(self) -> str:
        return f"{self.family}[{self.index}]"


@dataclass(frozen=True)
class IndexSet:
    """Eventually periodic subset of the naturals, in canonical form.

    Members below ``threshold`` are exactly those in ``explicit``; members
    at or above it are exactly the naturals congruent to an element of
    ``residues`` modulo ``period``.  Build values through the factory
    methods; the constructor is not canonicalizing.

    >>> evens = IndexSet.progression(2, 2)
    >>> 4 in evens, 5 in evens
    (True, False)
    >>> evens.intersect(IndexSet.progression(0, 3)) == IndexSet.progression(6, 6)
    True
    """

    threshold: int
    explicit: tuple[int, ...]
    period: int
    residues: tuple[int, ...]

    # -- construction -------------------------------------------------

    @staticmethod
    def _canonical(threshold: int, explicit: set[int], period: int,
                   residues: set[int]) -> "IndexSet":
        explicit = {n for n in explicit if 0 <= n < threshold}
        if not residues:
            top = max(explicit) + 1 if explicit else 0
            return IndexSet(top, tuple(sorted(explicit)), 1, ())
        for d in _divisors(period):
            if {(r + d) % period for r in residues} == residues:
                residues = {r % d for r in residues}
                period = d
                break
        t = threshold
        while t > 0:
            n = t - 1
            if (n in explicit) == ((n % period) in residues):
                explicit.discard(n)
                t = n
            else:
                break
        return IndexSet(t, tuple(sorted(explicit)), period,
                        tuple(sorted(residues)))

    @staticmethod
    def empty() -> "IndexSet":
        return IndexSet(0, (), 1, ())

    @staticmethod
    def finite(values: Iterable[int]) -> "IndexSet":
        vals = set(values)
        if any(v < 0 for v in vals):
            raise ValueError("index sets contain naturals only")
        top = max(vals) + 1 if vals else 0
        return IndexSet._canonical(top, vals, 1, set())

    @staticmethod
    def progression(start: int, step: int) -> "IndexSet":
        """The arithmetic progression ``{start + step*t : t >= 0}``."""
        if start < 0 or step < 1:
            raise ValueError("need start >= 0 and step >= 1")
        return IndexSet._canonical(start, set(), step, {start % step})

    @staticmethod
    def naturals_from(start: int) -> "IndexSet":
        return IndexSet.progression(start, 1)

    @staticmethod
    def build(threshold: int, explicit: Iterable[int], period: int,
              residues: Iterable[int]) -> "IndexSet":
        if period < 1:
            raise ValueError("period must be >= 1")
        return IndexSet._canonical(threshold, set(explicit), period,
                                   {r % period for r in residues})

    # -- queries -------------------------------------------------------

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        if n < self.threshold:
            return n in self.explicit
        return (n % self.period) in self.residues

    def is_empty(self) -> bool:
        return not self.explicit and not self.residues

    def is_finite(self) -> bool:
        return not self.residues

    def cardinality(self) -> int | float:
        """Number of members; ``math.inf`` when the tail is nonempty."""
        return inf if self.residues else len(self.explicit)

    def min(self) -> int | None:
        if self.explicit:
            return self.explicit[0]
        if self.residues:
            base = self.threshold
            return min(base + ((r - base) % self.period) for r in self.residues)
        return None

    def _tail_members(self) -> Iterator[int]:
        heap = sorted(self.threshold + ((r - self.threshold) % self.period)
                      for r in self.residues)
        heapify(heap)
        while heap:
            n = heappop(heap)
            yield n
            heappush(heap, n + self.period)

    def members(self, stop: int) -> Iterator[int]:
        """Members strictly below ``stop``, ascending."""
        for n in self.explicit:
            if n >= stop:
                return
            yield n
        for n in self._tail_members():
            if n >= stop:
                return
            yield n

    def iter_members(self) -> Iterator[int]:
        """All members, ascending (infinite when the tail is nonempty)."""
        yield from self.explicit
        yield from self._tail_members()

    # -- algebra -------------------------------------------------------

    def _count_below(self, stop: int) -> int:
        n = sum(1 for v in self.explicit if v < stop)
        if self.residues and stop > self.threshold:
            span = stop - self.threshold
            n += (span // self.period) * len(self.residues)
            n += sum(1 for r in range(span % self.period)
                     if ((self.threshold + r) % self.period) in self.residues)
        return n

    def _combine(self, other: "IndexSet", op, walk_other: bool) -> "IndexSet":
        # op(False, False) must be False, so explicit candidates below the
        # joint threshold are members of one side (or either, for union);
        # walking members keeps sparse sets with huge indices cheap
        p = self.period * other.period // gcd(self.period, other.period)
        t = max(self.threshold, other.threshold)
        residues = {r for r in range(p)
                    if op((r % self.period) in self.residues,
                          (r % other.period) in other.residues)}
        explicit = set()
        for n in self.members(t):
            if op(True, n in other):
                explicit.add(n)
        if walk_other:
            for n in other.members(t):
                if n not in explicit and op(n in self, True):
                    explicit.add(n)
        return IndexSet._canonical(t, explicit, p, residues)

    def union(self, other: "IndexSet") -> "IndexSet":
        return self._combine(other, lambda a, b: a or b, True)

    def intersect(self, other: "IndexSet") -> "IndexSet":
        t = max(self.threshold, other.threshold)
        a, b = self, other
        if a._count_below(t) > b._count_below(t):
            a, b = b, a
        return a._combine(b, lambda x, y: x and y, False)

    def minus(self, other: "IndexSet") -> "IndexSet":
        return self._combine(other, lambda a, b: a and not b, False)

    def complement(self) -> "IndexSet":
        """Complement within the naturals."""
        explicit = {n for n in range(self.threshold) if n not in self.explicit}
        residues = {r for r in range(self.period) if r not in self.residues}
        return IndexSet._canonical(self.threshold, explicit, self.period,
                                   residues)

    def subset_of(self, other: "IndexSet") -> bool:
        return self.minus(other).is_empty()

    # -- affine transport ---------------------------------------------

    def affine_preimage(self, a: int, b: int) -> "IndexSet":
        """``{k >= 0 : a*k + b in self}`` for a >= 0."""
        if a < 0:
            raise ValueError("affine rules require a >= 0")
        if a == 0:
            return IndexSet.naturals_from(0) if b in self else IndexSet.empty()
        k0 = max(0, -(-(self.threshold - b) // a))  # ceil division
        q = self.period // gcd(a, self.period)
        residues = {r for r in range(q)
                    if ((a * r + b) % self.period) in self.residues}
        # below k0 the image lands under the threshold, so only explicit
        # members can be hit
        explicit = {(x - b) // a for x in self.explicit
                    if x >= b and (x - b) % a == 0}
        return IndexSet._canonical(k0, explicit, q, residues)

    def affine_image(self, a: int, b: int) -> "IndexSet":
        """``{a*n + b : n in self}`` for a >= 0, b >= 0."""
        if a < 0 or b < 0:
            raise ValueError("affine rules require a, b >= 0")
        if self.is_empty():
            return IndexSet.empty()
        if a == 0:
            return IndexSet.finite([b])
        out = IndexSet.finite([a * n + b for n in self.explicit])
        for r in self.residues:
            first = self.threshold + ((r - self.threshold) % self.period)
            out = out.union(IndexSet.progression(a * first + b,
                                                 a * self.period))
        return out

    # -- serialization -------------------------------------------------

    def encode(self) -> str:
        """Byte-stable canonical form: ``T;explicit;p;residues``."""
        return "{};{};{};{}".format(
            self.threshold,
            ",".join(str(n) for n in self.explicit),
            self.period,
            ",".join(str(r) for r in self.residues))

    def __str__(self) -> str:
        return self.encode()


@dataclass(frozen=True)
class VertexSet:
    """Element of the vertex-set collection: per-family index sets.

    Empty families are dropped, index sets are canonical, and atoms are
    kept sorted by family name, so equality of values is set equality.
    """

    atoms: tuple[tuple[str, IndexSet], ...]

    @staticmethod
    def of(parts: dict[str, IndexSet] | Iterable[tuple[str, IndexSet]]) -> "VertexSet":
        items = dict(parts)
        return VertexSet(tuple(sorted((f, s) for f, s in items.items()
                                      if not s.is_empty())))

    @staticmethod
    def empty() -> "VertexSet":
        return VertexSet(())

    @staticmethod
    def singleton(v: VertexId) -> "VertexSet":
        return VertexSet.of({v.family: IndexSet.finite([v.index])})

    @staticmethod
    def of_vertices(vs: Iterable[VertexId]) -> "VertexSet":
        parts: dict[str, set[int]] = {}
        for v in vs:
            parts.setdefault(v.family, set()).add(v.index)
        return VertexSet.of({f: IndexSet.finite(ix) for f, ix in parts.items()})

    def part(self, family: str) -> IndexSet:
        for f, s in self.atoms:
            if f == family:
                return s
        return IndexSet.empty()

    def families(self) -> tuple[str, ...]:
        return tuple(f for f, _ in self.atoms)

    def __contains__(self, v: VertexId) -> bool:
        return v.index in self.part(v.family)

    def is_empty(self) -> bool:
        return not self.atoms

    def cardinality(self) -> int | float:
        total: int | float = 0
        for _, s in self.atoms:
            total += s.cardinality()
        return total

    def union(self, other: "VertexSet") -> "VertexSet":
        fams = {f for f, _ in self.atoms} | {f for f, _ in other.atoms}
        return VertexSet.of({f: self.part(f).union(other.part(f)) for f in fams})

    def intersect(self, other: "VertexSet") -> "VertexSet":
        fams = {f for f, _ in self.atoms} & {f for f, _ in other.atoms}
        return VertexSet.of({f: self.part(f).intersect(other.part(f))
                             for f in fams})

    def minus(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.of({f: s.minus(other.part(f)) for f, s in self.atoms})

    def subset_of(self, other: "VertexSet") -> bool:
        return all(s.subset_of(other.part(f)) for f, s in self.atoms)

    def iter_vertices(self, per_family: int) -> Iterator[VertexId]:
        """First ``per_family`` members of each family, family-sorted."""
        for f, s in self.atoms:
            for n, idx in enumerate(s.iter_members()):
                if n >= per_family:
                    break
                yield VertexId(f, idx)

    def encode(self) -> str:
        """Canonical serialization; atoms sorted by family name."""
        return "|".join(f"{f}:{s.encode()}" for f, s in self.atoms)

    def __str__(self) -> str:
        return self.encode() if self.atoms else "(empty)"
