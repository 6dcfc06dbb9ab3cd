"""Infinite 0/1 sequences and strictly increasing index sequences.

Bit positions are 1-based throughout, matching the sequence conventions
used everywhere else in the package.  Every stream answers ``bit(i)``
as a pure function and supports a closed-form ``drop``; the classifiers
at the bottom (`bits_equal`, `bits_differ_infinitely`) give exact
answers where the eventual forms allow one and ``None`` where they do
not, so callers can surface an honest "unknown" instead of sampling.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from math import isqrt
from typing import Union


# ---------------------------------------------------------------------------
# selector positions: a_n = sum_{i=1}^{n} (i+1), the sparse index set whose
# gaps grow by one each step


def selector_position(n: int) -> int:
    """The n-th free position a_n = n(n+3)/2 (a_1 = 2, a_2 = 5, ...)."""
    if n < 1:
        raise ValueError("positions are 1-based")
    return n * (n + 3) // 2


def selector_index(i: int) -> int | None:
    """Inverse of :func:`selector_position`; None when i is a kept position."""
    if i < 2:
        return None
    n = (isqrt(9 + 8 * i) - 3) // 2
    for cand in (n - 1, n, n + 1):
        if cand >= 1 and selector_position(cand) == i:
            return cand
    return None


# ---------------------------------------------------------------------------
# strictly increasing infinite index sequences (1-based values in N*)


@dataclass(frozen=True)
class ArithmeticTailJ:
    """j_n = prefix[n-1] while available, then n + offset."""

    offset: int
    prefix: tuple[int, ...] = ()

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("tail must stay in the positive naturals")
        vals = list(self.prefix)
        if any(v < 1 for v in vals):
            raise ValueError("index values are positive")
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise ValueError("index sequence must be strictly increasing")
        if vals and vals[-1] >= len(vals) + 1 + self.offset:
            raise ValueError("prefix does not splice into the tail rule")

    def j(self, n: int) -> int:
        if n < 1:
            raise ValueError("index sequences are 1-based")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return n + self.offset


@dataclass(frozen=True)
class SelectorJ:
    """j_n = 2n - 1 + bit_n: the sequences with j_n in {2n-1, 2n}."""

    selector: "Bitstream"

    def j(self, n: int) -> int:
        if n < 1:
            raise ValueError("index sequences are 1-based")
        return 2 * n - 1 + self.selector.bit(n)


@dataclass(frozen=True)
class BumpedTailJ:
    """Keep the first ``keep`` values, add one to every later value.

    Splices j_1..j_keep with the +1-shifted tail; stays strictly
    increasing because the base is.
    """

    base: "JPresentation"
    keep: int

    def j(self, n: int) -> int:
        if n < 1:
            raise ValueError("index sequences are 1-based")
        return self.base.j(n) + (1 if n > self.keep else 0)


JPresentation = Union[ArithmeticTailJ, SelectorJ, BumpedTailJ]


def arithmetic_tail(offset: int, prefix: tuple[int, ...] = ()) -> ArithmeticTailJ:
    """Canonicalizing constructor: trims prefix values the rule implies."""
    pfx = list(prefix)
    while pfx and pfx[-1] == len(pfx) + offset:
        pfx.pop()
    return ArithmeticTailJ(offset, tuple(pfx))


def bumped_tail(base: JPresentation, keep: int) -> JPresentation:
    """j'_n = j_n for n <= keep and j_n + 1 beyond (the non-isolation move)."""
    if isinstance(base, ArithmeticTailJ):
        realized = tuple(base.j(n) for n in range(1, keep + 1))
        return arithmetic_tail(base.offset + 1, realized)
    if isinstance(base, BumpedTailJ):
        raise ValueError("stack bumps by bumping the original sequence")
    return BumpedTailJ(base, keep)


def j_realize(j: JPresentation, n: int) -> list[int]:
    return [j.j(i) for i in range(1, n + 1)]


# ---------------------------------------------------------------------------
# bitstreams


@dataclass(frozen=True)
class PeriodicBits:
    """Explicit eventually periodic stream: prefix then repeating cycle."""

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    @staticmethod
    def make(prefix, cycle) -> "PeriodicBits":
        prefix, cycle = tuple(prefix), tuple(cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")
        if any(b not in (0, 1) for b in prefix + cycle):
            raise ValueError("bits are 0 or 1")
        # primitive cycle, then absorb matching prefix tail
        for d in range(1, len(cycle) + 1):
            if len(cycle) % d == 0 and cycle == cycle[:d] * (len(cycle) // d):
                cycle = cycle[:d]
                break
        prefix = list(prefix)
        while prefix and prefix[-1] == cycle[-1]:
            cycle = (cycle[-1],) + cycle[:-1]
            prefix.pop()
        return PeriodicBits(tuple(prefix), cycle)

    def bit(self, i: int) -> int:
        if i < 1:
            raise ValueError("bit positions are 1-based")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.cycle[(i - len(self.prefix) - 1) % len(self.cycle)]

    def drop(self, k: int) -> "PeriodicBits":
        if k <= len(self.prefix):
            return PeriodicBits.make(self.prefix[k:], self.cycle)
        r = (k - len(self.prefix)) % len(self.cycle)
        return PeriodicBits.make((), self.cycle[r:] + self.cycle[:r])


@dataclass(frozen=True)
class LiteralBits:
    """Finitely many explicit bits, then a constant default."""

    bits: tuple[int, ...]
    default: int

    def bit(self, i: int) -> int:
        if i < 1:
            raise ValueError("bit positions are 1-based")
        return self.bits[i - 1] if i <= len(self.bits) else self.default

    def drop(self, k: int) -> "LiteralBits":
        return LiteralBits(self.bits[k:], self.default)

    def as_periodic(self) -> PeriodicBits:
        return PeriodicBits.make(self.bits, (self.default,))


def _block_slot(m: int) -> tuple[int, int]:
    """Group and slot of block m: groups of sizes 1, 2, 3, ... of slots."""
    g = (isqrt(8 * m + 1) - 1) // 2
    while g * (g + 1) // 2 < m:
        g += 1
    while (g - 1) * g // 2 >= m:
        g -= 1
    return g, m - (g - 1) * g // 2


@dataclass(frozen=True)
class FCodeBits:
    """The block code of an increasing index sequence.

    Runs alternate between 0s and 1s starting with 0s, with lengths read
    off group by group: (j_1), (j_1, j_2), (j_1, j_2, j_3), ...  Distinct
    sequences yield streams differing in infinitely many positions, and
    a run of length exactly j bounded by opposite bits occurs iff j is
    one of the sequence values.
    """

    source: JPresentation
    _cum: list[int] = field(default_factory=list, compare=False, repr=False,
                            hash=False)

    def block_length(self, m: int) -> int:
        _, slot = _block_slot(m)
        return self.source.j(slot)

    def block_value(self, m: int) -> int:
        return (m - 1) % 2

    def _extend_to(self, i: int) -> None:
        while not self._cum or self._cum[-1] < i:
            m = len(self._cum) + 1
            prev = self._cum[-1] if self._cum else 0
            self._cum.append(prev + self.block_length(m))

    def block_at(self, i: int) -> int:
        """1-based block number containing bit position i."""
        self._extend_to(i)
        return bisect_left(self._cum, i) + 1

    def bit(self, i: int) -> int:
        if i < 1:
            raise ValueError("bit positions are 1-based")
        return self.block_value(self.block_at(i))

    def drop(self, k: int) -> "Bitstream":
        return DroppedBits.make(self, k)


@dataclass(frozen=True)
class BetaBits:
    """A background stream overridden at the sparse selector positions.

    bit(a_k) is the k-th selector bit; every other position shows the
    background.  Backgrounds must have a decidable eventual form
    (periodic or literal), which keeps equality and disagreement
    questions about these streams exact.
    """

    background: "Bitstream"
    selector: "Bitstream"

    def __post_init__(self):
        if eventual_form(self.background) is None:
            raise ValueError("background must be eventually periodic")

    def bit(self, i: int) -> int:
        if i < 1:
            raise ValueError("bit positions are 1-based")
        k = selector_index(i)
        return self.selector.bit(k) if k is not None else self.background.bit(i)

    def drop(self, k: int) -> "Bitstream":
        return DroppedBits.make(self, k)


@dataclass(frozen=True)
class DroppedBits:
    """A stream with its first ``offset`` bits removed (closed form)."""

    base: "Bitstream"
    offset: int

    @staticmethod
    def make(base: "Bitstream", offset: int) -> "Bitstream":
        if offset == 0:
            return base
        if isinstance(base, (PeriodicBits, LiteralBits)):
            return base.drop(offset)
        if isinstance(base, DroppedBits):
            return DroppedBits(base.base, base.offset + offset)
        return DroppedBits(base, offset)

    def bit(self, i: int) -> int:
        return self.base.bit(i + self.offset)

    def drop(self, k: int) -> "Bitstream":
        return DroppedBits.make(self.base, self.offset + k)


Bitstream = Union[PeriodicBits, LiteralBits, FCodeBits, BetaBits, DroppedBits]


def realize_bits(b: Bitstream, n: int, start: int = 1) -> list[int]:
    return [b.bit(i) for i in range(start, start + n)]


# ---------------------------------------------------------------------------
# exact classification


def _unwrap(b: Bitstream) -> tuple[Bitstream, int]:
    if isinstance(b, DroppedBits):
        return b.base, b.offset
    if isinstance(b, LiteralBits):
        return b.as_periodic(), 0
    return b, 0


def _sampled_background(bg: PeriodicBits, offset: int) -> PeriodicBits:
    """The stream k -> bg.bit(a_k - offset guard...), i.e. the background
    values seen at selector positions; exactly periodic because the
    quadratic a_k is periodic modulo the cycle length."""
    q = len(bg.cycle)
    # past the prefix, a_k mod q has period dividing 2q in k
    k0 = 1
    while selector_position(k0) + offset <= len(bg.prefix):
        k0 += 1
    head = [bg.bit(selector_position(k) + offset) for k in range(1, k0)]
    cyc = [bg.bit(selector_position(k) + offset) for k in range(k0, k0 + 2 * q)]
    return PeriodicBits.make(tuple(head), tuple(cyc))


def j_equal(j1: JPresentation, j2: JPresentation) -> bool | None:
    """Exact equality of index sequences; None when undecidable."""
    probe = 0
    if isinstance(j1, BumpedTailJ):
        probe = max(probe, j1.keep)
    if isinstance(j2, BumpedTailJ):
        probe = max(probe, j2.keep)
    t1, a1 = (j1.base, 1) if isinstance(j1, BumpedTailJ) else (j1, 0)
    t2, a2 = (j2.base, 1) if isinstance(j2, BumpedTailJ) else (j2, 0)
    if isinstance(t1, ArithmeticTailJ):
        probe = max(probe, len(t1.prefix))
    if isinstance(t2, ArithmeticTailJ):
        probe = max(probe, len(t2.prefix))
    probe += 2
    if j_realize(j1, probe) != j_realize(j2, probe):
        return False
    # realized prefixes agree; compare tail rules beyond the probe
    if isinstance(t1, ArithmeticTailJ) and isinstance(t2, ArithmeticTailJ):
        off1 = t1.offset + a1
        off2 = t2.offset + a2
        return off1 == off2
    if isinstance(t1, ArithmeticTailJ) or isinstance(t2, ArithmeticTailJ):
        # n + c meets 2n - 1 + b only at bounded n
        return False
    s1, s2 = t1.selector, t2.selector
    if a1 == a2:
        eq = bits_equal(DroppedBits.make(s1, probe), DroppedBits.make(s2, probe))
        return eq
    lo, hi = (s1, s2) if a1 < a2 else (s2, s1)
    # need lo-bit = 1 and hi-bit = 0 from the probe on
    lo_form = eventual_form(DroppedBits.make(lo, probe))
    hi_form = eventual_form(DroppedBits.make(hi, probe))
    if lo_form is None or hi_form is None:
        return None
    return (lo_form.cycle == (1,) and not any(b == 0 for b in lo_form.prefix)
            and hi_form.cycle == (0,) and not any(b == 1 for b in hi_form.prefix))


def in_p_family(j: JPresentation) -> bool | None:
    """Whether j_n lies in {2n-1, 2n} for every n."""
    if isinstance(j, SelectorJ):
        return True
    if isinstance(j, ArithmeticTailJ):
        return False  # a constant-offset tail leaves the window
    base, keep = j.base, j.keep
    head_ok = all(j.j(n) in (2 * n - 1, 2 * n) for n in range(1, keep + 1))
    if not head_ok:
        return False
    if isinstance(base, SelectorJ):
        form = eventual_form(DroppedBits.make(base.selector, keep))
        if form is None:
            return None
        return form.cycle == (0,) and not any(b == 1 for b in form.prefix)
    return False


def eventual_form(b: Bitstream) -> PeriodicBits | None:
    """The eventually periodic form of ``b``, or None.

    None means provably not eventually periodic for the supported
    stream kinds (block codes of infinite sequences have unbounded runs
    yet never stabilize, and a sparse-override stream is periodic only
    when the overrides eventually match the background).
    """
    base, off = _unwrap(b)
    if isinstance(base, PeriodicBits):
        return base.drop(off)
    if isinstance(base, FCodeBits):
        return None
    if isinstance(base, BetaBits):
        bg = eventual_form(base.background)
        sampled = _sampled_background(bg, 0)
        differs = bits_differ_infinitely(base.selector, sampled)
        if differs is None:
            return None
        if differs:
            return None
        # finitely many overrides survive: splice them into the background
        last_diff = 0
        sel_form = eventual_form(base.selector)
        if sel_form is None:
            return None
        horizon = max(len(sampled.prefix), len(sel_form.prefix)) + \
            2 * len(sampled.cycle) * len(sel_form.cycle) + 4
        for k in range(1, horizon + 1):
            if base.selector.bit(k) != sampled.bit(k):
                last_diff = k
        upto = selector_position(last_diff) if last_diff else 0
        upto = max(upto, len(bg.prefix))
        prefix = tuple(base.bit(i) for i in range(1, upto + 1))
        cyc_start = upto + 1 - len(bg.prefix) - 1
        cycle = tuple(bg.cycle[(cyc_start + t) % len(bg.cycle)]
                      for t in range(len(bg.cycle)))
        form = PeriodicBits.make(prefix, cycle)
        return form.drop(off) if off else form
    raise TypeError(f"unsupported bitstream {type(base).__name__}")


def bits_equal(x: Bitstream, y: Bitstream) -> bool | None:
    """Exact stream equality; None when the kinds leave it undecided."""
    bx, ox = _unwrap(x)
    by, oy = _unwrap(y)
    fx, fy = eventual_form(x), eventual_form(y)
    if fx is not None and fy is not None:
        return fx == fy  # forms cover the whole stream, not just the tail
    if (fx is None) != (fy is None):
        return False
    # both provably aperiodic
    if isinstance(bx, FCodeBits) and isinstance(by, FCodeBits):
        same = j_equal(bx.source, by.source)
        if same is None:
            return None
        return same and ox == oy if same else False
    if isinstance(bx, BetaBits) and isinstance(by, BetaBits) and ox == oy:
        dbg = bits_differ_infinitely(bx.background, by.background)
        if dbg is None:
            return None
        if dbg:
            return False
        sel_eq = bits_equal(bx.selector, by.selector)
        if sel_eq is None or not sel_eq:
            return sel_eq
        horizon = selector_position(4) + 8
        return all(x.bit(i) == y.bit(i) for i in range(1, horizon + 1))
    if isinstance(bx, BetaBits) and isinstance(by, FCodeBits):
        return False  # block code differs from any sparse-override stream
    if isinstance(bx, FCodeBits) and isinstance(by, BetaBits):
        return False
    window = 256
    if realize_bits(x, window) != realize_bits(y, window):
        return False
    return None


def bits_differ_infinitely(x: Bitstream, y: Bitstream) -> bool | None:
    """Whether the streams disagree at infinitely many positions."""
    bx, ox = _unwrap(x)
    by, oy = _unwrap(y)
    fx, fy = eventual_form(x), eventual_form(y)
    if fx is not None and fy is not None:
        # disagreement of two periodic tails is itself eventually periodic
        period = len(fx.cycle) * len(fy.cycle)
        start = max(len(fx.prefix), len(fy.prefix)) + 1
        return any(fx.bit(i) != fy.bit(i) for i in range(start, start + period))
    if (fx is None) != (fy is None):
        return True  # a provably aperiodic stream cannot tail-match a periodic one
    if isinstance(bx, FCodeBits) and isinstance(by, FCodeBits):
        same = j_equal(bx.source, by.source)
        if same is None:
            return None
        return not (same and ox == oy)
    if isinstance(bx, BetaBits) and isinstance(by, BetaBits) and ox == oy:
        dbg = bits_differ_infinitely(bx.background, by.background)
        if dbg is None or dbg:
            return dbg
        return bits_differ_infinitely(bx.selector, by.selector)
    if isinstance(bx, (BetaBits, FCodeBits)) and isinstance(by, (BetaBits, FCodeBits)):
        if isinstance(bx, BetaBits) != isinstance(by, BetaBits):
            return True  # off the sparse positions one shows a periodic face
    return None
