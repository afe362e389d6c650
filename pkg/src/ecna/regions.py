"""Event-clock regions and the interval pushdown alphabet.

A region assigns one canonical interval to every clock of a set C.  It is
stored as a sorted tuple of ``(clock, Interval)`` pairs, the same shape as
a guard, so a region can be used directly as a constraint.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .clocks import UNDEF, Clock, EventClock, Interval, canonical_guard, clock_key, parse_clock, parse_interval
from .errors import RegionClockMismatch, UnsortedConstants
from .words import NestedStructure, PushdownAlphabet, TimedWord, all_valuations, reference_position


def canonical_intervals(consts: Sequence[int]) -> list:
    """The canonical interval list Intv for a sorted constant set."""
    consts = list(consts)
    if any(a >= b for a, b in zip(consts, consts[1:])):
        raise UnsortedConstants(f"constants must be sorted and distinct: {consts}")
    if any(c < 0 for c in consts):
        raise UnsortedConstants("constants must be natural numbers")
    cs = [c for c in consts if c > 0]
    out = [UNDEF, Interval.point(0)]
    prev = 0
    for c in cs:
        out.append(Interval.open(prev, c))
        out.append(Interval.point(c))
        prev = c
    out.append(Interval.open(prev, None))
    return out


def interval_of(value, intervals: Sequence[Interval]) -> Interval:
    for iv in intervals:
        if iv.contains(value):
            return iv
    raise ValueError(f"value {value} not covered by the interval list")


def all_regions(clocks: Iterable[Clock], consts: Sequence[int]) -> list:
    clocks = sorted(set(clocks), key=clock_key)
    intv = canonical_intervals(sorted(set(consts)))
    return [tuple(zip(clocks, combo)) for combo in itertools.product(intv, repeat=len(clocks))]


def region_of(val: dict, clocks: Iterable[Clock], consts: Sequence[int]) -> tuple:
    """The unique region containing the valuation ``val``."""
    intv = canonical_intervals(sorted(set(consts)))
    return tuple((z, interval_of(val[z], intv)) for z in sorted(set(clocks), key=clock_key))


def region_within(region: tuple, guard: tuple) -> bool:
    """``[rg] ⊆ [θ]``, decided per atom by interval containment."""
    rg = dict(region)
    for clk, iv in guard:
        if clk not in rg:
            raise RegionClockMismatch(f"guard clock {clk} is not a region clock")
        if not rg[clk].subset_of(iv):
            return False
    return True


def region_disjoint(region: tuple, guard: tuple) -> bool:
    rg = dict(region)
    return any(rg[clk].intersect(iv) is None for clk, iv in guard)


def letter_name(symbol: str, region: tuple) -> str:
    return symbol + "@{" + ",".join(f"{clk}:{iv}" for clk, iv in region) + "}"


def parse_letter(name: str) -> tuple:
    """Inverse of :func:`letter_name`: ``(symbol, region)``."""
    from .formats import split_top

    symbol, sep, rest = name.partition("@")
    if not sep or not (rest.startswith("{") and rest.endswith("}")):
        raise ValueError(f"not an interval letter: {name!r}")
    atoms = []
    for part in split_top(rest[1:-1]):
        clk, _, iv = part.partition(":")
        atoms.append((parse_clock(clk), parse_interval(iv)))
    return symbol, canonical_guard(atoms)


def interval_alphabet(alphabet: PushdownAlphabet, clocks: Iterable[Clock], consts: Sequence[int]) -> PushdownAlphabet:
    regs = all_regions(clocks, consts)

    def lift(symbols):
        return frozenset(letter_name(s, rg) for s in symbols for rg in regs)

    return PushdownAlphabet(lift(alphabet.calls), lift(alphabet.returns), lift(alphabet.internals))


def symbolic_image(w: TimedWord, clocks: Iterable[Clock], consts: Sequence[int]) -> list:
    """The symbolic word λ with ``w ∈ tw(λ)``, as a list of letter names."""
    clocks = sorted(set(clocks), key=clock_key)
    vals = all_valuations(w, clocks)
    return [letter_name(s, region_of(v, clocks, consts)) for s, v in zip(w.symbols, vals)]


# --- realizability of symbolic words (difference-bound matrices) -------------------

_INF = None


def _add(a, b):
    if a is _INF or b is _INF:
        return _INF
    return (a[0] + b[0], a[1] or b[1])


def _less(a, b) -> bool:
    """Bound ``a`` is tighter than ``b``; bounds are ``(c, strict)`` or None."""
    if a is _INF:
        return False
    if b is _INF:
        return True
    return a[0] < b[0] or (a[0] == b[0] and a[1] and not b[1])


def _close(D) -> bool:
    n = len(D)
    for k in range(n):
        Dk = D[k]
        for i in range(n):
            dik = D[i][k]
            if dik is _INF:
                continue
            Di = D[i]
            for j in range(n):
                s = _add(dik, Dk[j])
                if _less(s, Di[j]):
                    Di[j] = s
    return all(not _less(D[i][i], (0, False)) for i in range(n))


def _tighten(D, i, j, bound) -> None:
    if _less(bound, D[i][j]):
        D[i][j] = bound


def concretize(alphabet: PushdownAlphabet, letters: Sequence[str]) -> Optional[TimedWord]:
    """A timed word in ``tw(λ)`` for the symbolic word λ, or None if λ is not realizable.

    Timestamps are variables ``t_0..t_{n-1}`` with an origin fixed at 0; each
    region atom becomes a difference constraint between the current position
    and the position its clock refers to.
    """
    parsed = [parse_letter(l) for l in letters]
    symbols = [s for s, _ in parsed]
    n = len(symbols)
    st = NestedStructure(alphabet, symbols)
    size = n + 1  # index 0 is the origin, position i is index i+1
    D = [[_INF] * size for _ in range(size)]
    for i in range(size):
        D[i][i] = (0, False)
    for i in range(n):
        prev = i  # origin for i == 0
        _tighten(D, prev, i + 1, (0, False))  # t_prev - t_i <= 0
    for i, (_, region) in enumerate(parsed):
        for clk, iv in region:
            if not isinstance(clk, EventClock):
                raise RegionClockMismatch(f"{clk} is not an event clock")
            j = reference_position(st, i, clk)
            if iv.undef or j is None:
                if iv.undef and j is None:
                    continue
                return None
            # value = t_late - t_early
            late, early = (i, j) if clk.is_recorder else (j, i)
            lb, ub = iv.lower_bound, iv.upper_bound
            _tighten(D, early + 1, late + 1, (-lb.value, lb.strict))
            if ub.value is not None:
                _tighten(D, late + 1, early + 1, (ub.value, ub.strict))
    if not _close(D):
        return None
    times = []
    for k in range(1, size):
        hi = D[k][0]
        lo = D[0][k]
        low = Fraction(-lo[0])
        if not lo[1]:
            v = low
        elif hi is _INF:
            v = low + 1
        else:
            v = (low + Fraction(hi[0])) / 2
        D[k][0] = (v, False)
        D[0][k] = (-v, False)
        if not _close(D):
            return None  # cannot happen for a consistent closed matrix
        times.append(v)
    w = TimedWord(alphabet, tuple(symbols), tuple(times))
    return w
