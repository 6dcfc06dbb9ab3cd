"""Finitely presented ultragraphs.

A presentation declares vertex families (implicitly indexed by the
naturals) and edge families.  Each edge family carries an index domain,
an affine source rule ``s(E[k]) = F[a*k+b]``, and guarded range clauses
whose bodies are unions of affine singleton atoms (varying with the edge
index) and constant vertex-set literals.  Everything downstream --
epsilon pullbacks, emitter searches, grading certificates -- works
symbolically on this data, so infinite graphs stay exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import inf
from typing import Iterator, Union

from .vertexsets import IndexSet, VertexId, VertexSet


@dataclass(frozen=True)
class EdgeId:
    family: str
    index: int

    def __str__(self) -> str:
        return f"{self.family}[{self.index}]"


@dataclass(frozen=True)
class Affine:
    """The map k -> a*k + b."""

    a: int
    b: int

    def __call__(self, k: int) -> int:
        return self.a * k + self.b

    def compose(self, inner: "Affine") -> "Affine":
        return Affine(self.a * inner.a, self.a * inner.b + self.b)

    def __str__(self) -> str:
        if self.a == 0:
            return str(self.b)
        head = "k" if self.a == 1 else f"{self.a}*k"
        return head if self.b == 0 else f"{head}+{self.b}"


@dataclass(frozen=True)
class AffineAtom:
    """Range summand ``{family[a*k+b]}`` for edge index k."""

    family: str
    map: Affine


@dataclass(frozen=True)
class ConstPart:
    """Range summand that does not depend on the edge index."""

    value: VertexSet


RangePart = Union[AffineAtom, ConstPart]


@dataclass(frozen=True)
class RangeClause:
    guard: IndexSet
    parts: tuple[RangePart, ...]

    def value_at(self, k: int) -> VertexSet:
        out = VertexSet.empty()
        for part in self.parts:
            if isinstance(part, AffineAtom):
                out = out.union(VertexSet.singleton(
                    VertexId(part.family, part.map(k))))
            else:
                out = out.union(part.value)
        return out

    def can_be_infinite(self) -> bool:
        return any(isinstance(p, ConstPart) and p.value.cardinality() == inf
                   for p in self.parts)

    def is_constant(self) -> bool:
        return all(isinstance(p, ConstPart) for p in self.parts)


@dataclass(frozen=True)
class EdgeFamily:
    name: str
    domain: IndexSet
    source_family: str
    source_map: Affine
    clauses: tuple[RangeClause, ...]
    var: str = "k"

    def clause_for(self, k: int) -> RangeClause:
        for clause in self.clauses:
            if k in clause.guard:
                return clause
        raise KeyError(f"index {k} not covered by any range clause of "
                       f"{self.name}")


@dataclass(frozen=True)
class EdgeSetDescription:
    """A set of edges, as per-family index sets (the shape of epsilon(A))."""

    parts: tuple[tuple[str, IndexSet], ...]

    @staticmethod
    def of(parts: dict[str, IndexSet]) -> "EdgeSetDescription":
        return EdgeSetDescription(tuple(sorted(
            (f, s) for f, s in parts.items() if not s.is_empty())))

    def part(self, family: str) -> IndexSet:
        for f, s in self.parts:
            if f == family:
                return s
        return IndexSet.empty()

    def __contains__(self, e: EdgeId) -> bool:
        return e.index in self.part(e.family)

    def cardinality(self) -> int | float:
        total: int | float = 0
        for _, s in self.parts:
            total += s.cardinality()
        return total

    def is_empty(self) -> bool:
        return not self.parts

    def subset_of(self, other: "EdgeSetDescription") -> bool:
        return all(s.subset_of(other.part(f)) for f, s in self.parts)

    def iter_edges(self, per_family: int) -> Iterator[EdgeId]:
        for f, s in self.parts:
            for n, idx in enumerate(s.iter_members()):
                if n >= per_family:
                    break
                yield EdgeId(f, idx)

    def encode(self) -> str:
        return "|".join(f"{f}:{s.encode()}" for f, s in self.parts)


@dataclass(frozen=True)
class MinimalEmitter:
    """A minimal infinite emitter plus how it was built.

    ``range_trace`` lists the edges whose ranges were intersected (empty
    for singleton witnesses), recording the finite-intersection dichotomy.
    """

    vertices: VertexSet
    range_trace: tuple[EdgeId, ...] = ()

    def is_singleton_witness(self) -> bool:
        return not self.range_trace


@dataclass
class EmitterSearch:
    emitters: list[MinimalEmitter]
    exhausted: bool


@dataclass(frozen=True)
class UltragraphPresentation:
    vertex_families: tuple[str, ...]
    edge_families: tuple[EdgeFamily, ...]
    gradings: tuple[tuple[str, Affine], ...] = ()

    # -- basic structure ------------------------------------------------

    def edge_family(self, name: str) -> EdgeFamily:
        for ef in self.edge_families:
            if ef.name == name:
                return ef
        raise KeyError(f"unknown edge family {name!r}")

    def has_edge(self, e: EdgeId) -> bool:
        try:
            ef = self.edge_family(e.family)
        except KeyError:
            return False
        return e.index in ef.domain

    def source(self, e: EdgeId) -> VertexId:
        ef = self.edge_family(e.family)
        if e.index not in ef.domain:
            raise KeyError(f"edge index {e.index} outside domain of {e.family}")
        return VertexId(ef.source_family, ef.source_map(e.index))

    def range_of(self, e: EdgeId) -> VertexSet:
        ef = self.edge_family(e.family)
        if e.index not in ef.domain:
            raise KeyError(f"edge index {e.index} outside domain of {e.family}")
        return ef.clause_for(e.index).value_at(e.index)

    def grading_map(self) -> dict[str, Affine] | None:
        return dict(self.gradings) if self.gradings else None

    # -- epsilon and emitters --------------------------------------------

    def epsilon(self, a: VertexSet) -> EdgeSetDescription:
        """All edges whose source lies in ``a``, via affine pullback."""
        parts: dict[str, IndexSet] = {}
        for ef in self.edge_families:
            fam_part = a.part(ef.source_family)
            pre = fam_part.affine_preimage(ef.source_map.a, ef.source_map.b)
            pre = pre.intersect(ef.domain)
            if not pre.is_empty():
                parts[ef.name] = pre
        return EdgeSetDescription.of(parts)

    def is_infinite_emitter(self, a: VertexSet) -> bool:
        return self.epsilon(a).cardinality() == inf

    def out_edges(self, v: VertexId) -> EdgeSetDescription:
        return self.epsilon(VertexSet.singleton(v))

    def _singleton_infinite_emitters(self) -> list[VertexId]:
        # only a constant-source family with infinite domain can give one
        # vertex infinitely many edges; affine rules with a >= 1 hit each
        # index at most once
        out = []
        for ef in self.edge_families:
            if ef.source_map.a == 0 and ef.domain.cardinality() == inf:
                v = VertexId(ef.source_family, ef.source_map.b)
                if v not in set(out):
                    out.append(v)
        return sorted(set(out))

    def _infinite_ranges(self, index_bound: int) -> tuple[list[tuple[VertexSet, EdgeId]], bool]:
        """Distinct infinite range values with a witness edge each.

        Finite ranges cannot carry an infinite minimal emitter of infinite
        cardinality, so only infinite values matter for the intersection
        search.  The second component reports whether the scan was
        complete (clauses whose value varies with k and can be infinite
        are only scanned up to ``index_bound``).
        """
        seen: dict[str, tuple[VertexSet, EdgeId]] = {}
        complete = True
        for ef in self.edge_families:
            for clause in ef.clauses:
                if not clause.can_be_infinite():
                    continue
                guard = clause.guard.intersect(ef.domain)
                if guard.is_empty():
                    continue
                if clause.is_constant():
                    ks = [guard.min()]
                else:
                    ks = list(guard.members(index_bound + 1))
                    clipped = (guard.cardinality() == inf
                               or any(m > index_bound for m in guard.explicit))
                    if clipped:
                        complete = False
                for k in ks:
                    value = clause.value_at(k)
                    if value.cardinality() == inf:
                        seen.setdefault(value.encode(), (value, EdgeId(ef.name, k)))
        return list(seen.values()), complete

    def minimal_infinite_emitters(self, within: VertexSet, *,
                                  depth_bound: int = 3,
                                  index_bound: int = 64) -> EmitterSearch:
        """Minimal infinite emitters contained in ``within``.

        Searches singleton emitters (exactly) and intersections of up to
        ``depth_bound`` infinite ranges meeting ``within``; candidates are
        pruned to the pairwise-incomparable minimal ones.  ``exhausted``
        is False when the range scan was clipped by ``index_bound`` or a
        probe at depth ``depth_bound + 1`` still produced a strictly
        smaller emitter.
        """
        candidates: list[MinimalEmitter] = []
        for v in _singleton_emitters_cached(self):
            if v in within:
                candidates.append(MinimalEmitter(VertexSet.singleton(v)))

        if within.cardinality() != inf:
            # a finite set cannot contain an infinite-cardinality emitter,
            # and finite minimal emitters are singletons
            candidates.sort(key=lambda m: m.vertices.encode())
            return EmitterSearch(candidates, True)

        ranges, complete = _infinite_ranges_cached(self, index_bound)
        by_key: dict[str, MinimalEmitter] = {
            m.vertices.encode(): m for m in candidates}
        for depth in range(1, depth_bound + 1):
            for combo in itertools.combinations(ranges, depth):
                value = within
                for vs, _ in combo:
                    value = value.intersect(vs)
                if value.cardinality() != inf:
                    continue
                if not self.is_infinite_emitter(value):
                    continue
                key = value.encode()
                trace = tuple(e for _, e in combo)
                if key not in by_key or (by_key[key].range_trace and
                                         len(trace) < len(by_key[key].range_trace)):
                    by_key[key] = MinimalEmitter(value, trace)

        emitters = list(by_key.values())
        minimal = [m for m in emitters
                   if not any(o.vertices != m.vertices and
                              o.vertices.subset_of(m.vertices)
                              for o in emitters)]
        minimal.sort(key=lambda m: m.vertices.encode())

        exhausted = complete
        if exhausted and len(ranges) > depth_bound:
            known = {m.vertices.encode() for m in minimal}
            for combo in itertools.combinations(ranges, depth_bound + 1):
                value = within
                for vs, _ in combo:
                    value = value.intersect(vs)
                if (value.cardinality() == inf
                        and self.is_infinite_emitter(value)
                        and value.encode() not in known
                        and any(value.subset_of(m.vertices) for m in minimal)):
                    exhausted = False
                    break
        return EmitterSearch(minimal, exhausted)

    def is_minimal_infinite_emitter(self, a: VertexSet, *,
                                    depth_bound: int = 3,
                                    index_bound: int = 64) -> bool:
        if not self.is_infinite_emitter(a):
            return False
        found = self.minimal_infinite_emitters(
            a, depth_bound=depth_bound, index_bound=index_bound)
        return any(m.vertices == a for m in found.emitters)

    # -- global views ----------------------------------------------------

    def source_image(self) -> VertexSet:
        out = VertexSet.empty()
        for ef in self.edge_families:
            img = ef.domain.affine_image(ef.source_map.a, ef.source_map.b)
            out = out.union(VertexSet.of({ef.source_family: img}))
        return out

    def range_image(self) -> VertexSet:
        out = VertexSet.empty()
        for ef in self.edge_families:
            for clause in ef.clauses:
                guard = clause.guard.intersect(ef.domain)
                if guard.is_empty():
                    continue
                for part in clause.parts:
                    if isinstance(part, AffineAtom):
                        img = guard.affine_image(part.map.a, part.map.b)
                        out = out.union(VertexSet.of({part.family: img}))
                    else:
                        out = out.union(part.value)
        return out

    def active_vertices(self) -> VertexSet:
        return self.source_image().union(self.range_image())

    def is_finite(self) -> bool:
        return all(ef.domain.cardinality() != inf for ef in self.edge_families)

    def all_edges(self) -> list[EdgeId]:
        if not self.is_finite():
            raise ValueError("presentation has infinitely many edges")
        out = []
        for ef in self.edge_families:
            out.extend(EdgeId(ef.name, k) for k in ef.domain.iter_members())
        return out

    def iter_edges(self, index_bound: int) -> Iterator[EdgeId]:
        for ef in self.edge_families:
            for k in ef.domain.members(index_bound + 1):
                yield EdgeId(ef.name, k)

    # -- validation --------------------------------------------------------

    def problems(self) -> list[str]:
        """Structural defects (machine-checkable presentation invariants)."""
        out = []
        declared = set(self.vertex_families)
        for ef in self.edge_families:
            if ef.source_family not in declared:
                out.append(f"undeclared-family: source of {ef.name} uses "
                           f"{ef.source_family!r}")
            if ef.source_map.a < 0 or ef.source_map.b < 0:
                out.append(f"nonaffine: source rule of {ef.name}")
            covered = IndexSet.empty()
            for i, clause in enumerate(ef.clauses):
                inter = covered.intersect(clause.guard)
                if not inter.is_empty():
                    out.append(f"guard-overlap: clauses of {ef.name} overlap "
                               f"at index {inter.min()}")
                covered = covered.union(clause.guard)
                if not clause.parts:
                    out.append(f"empty-range: clause {i} of {ef.name}")
                elif clause.is_constant():
                    value = clause.value_at(0)
                    if value.is_empty() and not clause.guard.intersect(ef.domain).is_empty():
                        out.append(f"empty-range: clause {i} of {ef.name}")
                for part in clause.parts:
                    fam = part.family if isinstance(part, AffineAtom) else None
                    if fam is not None and fam not in declared:
                        out.append(f"undeclared-family: range of {ef.name} "
                                   f"uses {fam!r}")
                    if isinstance(part, AffineAtom) and (
                            part.map.a < 0 or part.map.b < 0):
                        out.append(f"nonaffine: range atom of {ef.name}")
                    if isinstance(part, ConstPart):
                        for fam2, _ in part.value.atoms:
                            if fam2 not in declared:
                                out.append("undeclared-family: range of "
                                           f"{ef.name} uses {fam2!r}")
            if not ef.domain.subset_of(covered):
                missing = ef.domain.minus(covered)
                out.append(f"guard-gap: index {missing.min()} of {ef.name} "
                           "not covered by any range clause")
        for fam, _ in self.gradings:
            if fam not in declared:
                out.append(f"undeclared-family: grading for {fam!r}")
        sinks = self.range_image().minus(self.source_image())
        if not sinks.is_empty():
            v = next(sinks.iter_vertices(1))
            out.append(f"sink: vertex {v} appears in a range but has no "
                       "outgoing edge")
        return out


@lru_cache(maxsize=None)
def _singleton_emitters_cached(g: "UltragraphPresentation") -> tuple[VertexId, ...]:
    return tuple(g._singleton_infinite_emitters())


@lru_cache(maxsize=None)
def _infinite_ranges_cached(g: "UltragraphPresentation", index_bound: int):
    return g._infinite_ranges(index_bound)


def affine_positive_on(a: int, b: int, over: IndexSet) -> bool:
    """Whether a*k + b > 0 for every k in ``over``."""
    if over.is_empty():
        return True
    if a == 0:
        return b > 0
    if a > 0:
        lo = over.min()
        return a * lo + b > 0
    if over.cardinality() == inf:
        return False
    hi = max(over.explicit)
    return a * hi + b > 0


def grading_satisfied(g: UltragraphPresentation,
                      levels: dict[str, Affine]) -> bool:
    """Check level(w) > level(s(e)) for every edge e and every w in r(e).

    Verified symbolically on the affine rules, so infinite families are
    covered exactly.  A valid grading forbids closed paths: levels rise
    strictly along every path, so no path can return to its base.
    """
    if any(f not in levels for f in g.vertex_families):
        return False
    for ef in g.edge_families:
        src = levels[ef.source_family].compose(ef.source_map)
        for clause in ef.clauses:
            guard = clause.guard.intersect(ef.domain)
            if guard.is_empty():
                continue
            for part in clause.parts:
                if isinstance(part, AffineAtom):
                    w = levels[part.family].compose(part.map)
                    if not affine_positive_on(w.a - src.a, w.b - src.b, guard):
                        return False
                else:
                    for fam, iset in part.value.atoms:
                        lv = levels[fam]
                        if lv.a < 0 and iset.cardinality() == inf:
                            return False
                        if lv.a >= 0:
                            m = lv(iset.min())
                        else:
                            m = min(lv(n) for n in iset.explicit)
                        if not affine_positive_on(-src.a, m - src.b, guard):
                            return False
    return True


def search_grading(g: UltragraphPresentation, *,
                   coefficient_bound: int = 4) -> dict[str, Affine] | None:
    """Search affine level functions with |a|, |b| <= coefficient_bound."""
    fams = g.vertex_families
    rng = range(-coefficient_bound, coefficient_bound + 1)
    choices = [Affine(a, b) for a in rng for b in rng]
    for combo in itertools.product(choices, repeat=len(fams)):
        levels = dict(zip(fams, combo))
        if grading_satisfied(g, levels):
            return levels
    return None
