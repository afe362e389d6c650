"""Removal of the global recorder and predictor clocks ``xg(b)`` and ``yg(b)``."""

from __future__ import annotations

from ..automaton import NestedVPTA
from ..clocks import EventClock
from .common import (
    Builder,
    all_bounds,
    bound_token,
    bounds_of,
    check_atoms,
    drop_clock,
    fresh_clocks,
    prepare,
    split_guard,
)


def remove_global(A: NestedVPTA, z: EventClock) -> NestedVPTA:
    """Replace ``xg(b)`` or ``yg(b)`` by fresh standard clocks."""
    B = prepare(A, z, ("xg", "yg"))
    if B is None:
        return drop_clock(A, z)
    if z.kind == "xg":
        return _remove_recorder(B, z)
    return _remove_predictor(B, z)


def _remove_recorder(A: NestedVPTA, z: EventClock) -> NestedVPTA:
    # state (q, seen): seen tells whether b already occurred; every fresh
    # clock is reset on each b, so it holds the time since the last b.
    b = z.symbol
    lows, ups = bounds_of(A, z)
    clocks = fresh_clocks(z, lows + ups)
    every = frozenset(clocks.values())
    bld = Builder(A, lambda k: f"{k[0]}[{'seen' if k[1] else 'new'}]", lambda k: k[0])

    def expand(key):
        q, seen = key
        for sym in A.alphabet.symbols:
            for t in A.by_source.get((q, sym), ()):
                rest, iv = split_guard(t, z)
                if iv.undef == seen:
                    continue
                guard = rest + (() if iv.undef else check_atoms(clocks, all_bounds(iv)))
                isb = sym == b
                reset = t.reset | (every if isb else frozenset())
                bld.emit(t.kind, key, t, guard, reset, (t.target, seen or isb), t.stack)

    init = [(q, False) for q in sorted(A.initial)]
    for k in init:
        bld.state(k)
    bld.run(expand)
    family = [(lambda k, F=F: k[0] in F) for F in A.accepting]
    return bld.result(z, init, clocks.values(), family, lambda k: k[0] in A.finite_accepting,
                      A.stack_symbols)


def _remove_predictor(A: NestedVPTA, z: EventClock) -> NestedVPTA:
    # state (q, O, nob, lastb).  O holds the pending predictions (their
    # bounds); they are checked and cleared at the next b.  nob records a
    # prediction of ⊥, after which b may not occur.  Lower-bound clocks are
    # reset at every prediction (the latest one is the strongest), upper-bound
    # clocks only when no prediction on that bound is pending.
    b = z.symbol
    lows, ups = bounds_of(A, z)
    clocks = fresh_clocks(z, lows + ups)

    def name(k):
        q, O, nob, lastb = k
        obl = "+".join(sorted(bound_token(bd) for bd in O)) or "0"
        return f"{q}[{obl}|{'N' if nob else ''}{'b' if lastb else ''}]"

    bld = Builder(A, name, lambda k: k[0])

    def expand(key):
        q, O, nob, _ = key
        for sym in A.alphabet.symbols:
            isb = sym == b
            if isb and nob:
                continue
            checks = check_atoms(clocks, O) if isb else ()
            rest_O = frozenset() if isb else O
            for t in A.by_source.get((q, sym), ()):
                rest, iv = split_guard(t, z)
                if iv.undef:
                    if rest_O:
                        continue
                    tgt = (t.target, frozenset(), True, isb)
                    bld.emit(t.kind, key, t, rest + checks, t.reset, tgt, t.stack)
                    continue
                if nob:
                    continue
                lo, up = all_bounds(iv)
                res = {lo} | ({up} if up not in rest_O else set())
                reset = t.reset | {clocks[bd] for bd in res if bd in clocks}
                tgt = (t.target, rest_O | {lo, up}, False, isb)
                bld.emit(t.kind, key, t, rest + checks, reset, tgt, t.stack)

    init = [(q, frozenset(), False, False) for q in sorted(A.initial)]
    for k in init:
        bld.state(k)
    bld.run(expand)
    family = [(lambda k, F=F: k[0] in F) for F in A.accepting]
    family.append(lambda k: not k[1] or k[3])
    return bld.result(z, init, clocks.values(), family,
                      lambda k: k[0] in A.finite_accepting and not k[1], A.stack_symbols)
