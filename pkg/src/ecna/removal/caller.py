"""Removal of the caller clock ``xc(b)``.

The value of ``xc(b)`` at a position is measured from the innermost pending
call labelled b that encloses it.  Fresh clocks are reset only at b-calls,
on a guessed subset of the bounds.  The control state is a context
``(inb, V, T, S)``:

* ``inb``: some enclosing pending call is labelled b (the clock is defined);
* ``V``: lower bounds whose clock was reset at or after the reference call,
  so that ``z > l`` implies the real value exceeds l;
* ``T``: upper bounds whose clock was reset strictly after the reference
  call and therefore may no longer be used;
* ``S``: bounds reset inside the current call frame, merged into V and T of
  the caller context at the matching return.

At a call the context seen by the matching return is pushed with the stack
symbol.  Upper bounds not in T are checked against a clock reset no later
than the reference call, which over-approximates the real value.
"""

from __future__ import annotations

import itertools

from ..automaton import BOTTOM, INTERNAL, POP, PUSH, NestedVPTA
from ..clocks import EventClock, LowerBound
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

_TOP = (False, frozenset(), frozenset(), frozenset())


def _ctx(inb, V, T, S) -> tuple:
    if not inb:
        return _TOP  # no b-call encloses this context nor any enclosing one
    return (True, frozenset(V), frozenset(T), frozenset(S))


def _ctx_str(ctx) -> str:
    inb, V, T, S = ctx
    if not inb:
        return "n"

    def enc(xs):
        return "+".join(sorted(bound_token(x) for x in xs)) or "0"

    return f"b|V:{enc(V)}|T:{enc(T)}|S:{enc(S)}"


def _lower(xs) -> frozenset:
    return frozenset(x for x in xs if isinstance(x, LowerBound))


def _upper(xs) -> frozenset:
    return frozenset(x for x in xs if not isinstance(x, LowerBound))


def remove_caller(A: NestedVPTA, b: str) -> NestedVPTA:
    z = EventClock("xc", b)
    B = prepare(A, z, ("xc",))
    if B is None:
        return drop_clock(A, z)
    return _build(B, z)


def _build(A: NestedVPTA, z: EventClock) -> NestedVPTA:
    b = z.symbol
    lows, ups = bounds_of(A, z)
    clocks = fresh_clocks(z, lows + ups)
    nontrivial = sorted(clocks, key=bound_token)
    res_choices = [frozenset(c) for r in range(len(nontrivial) + 1)
                   for c in itertools.combinations(nontrivial, r)]
    frames: dict = {}  # stack symbol of A -> list of (frame name, context)
    listeners: dict = {}

    def add_frame(gamma, ctx) -> str:
        name = f"{gamma}[{_ctx_str(ctx)}]"
        entries = frames.setdefault(gamma, [])
        if all(n != name for n, _ in entries):
            entries.append((name, ctx))
            for cb in list(listeners.get(gamma, ())):
                cb(name, ctx)
        return name

    def on_frame(gamma, cb) -> None:
        listeners.setdefault(gamma, []).append(cb)
        for name, ctx in list(frames.get(gamma, ())):
            cb(name, ctx)

    def guard_for(rest, iv, ctx):
        """Guard in context ``ctx``, or None when the atom cannot hold there."""
        inb, V, T, _ = ctx
        if iv.undef:
            return None if inb else rest
        if not inb:
            return None
        lo, up = all_bounds(iv)
        if lo in clocks and lo not in V:
            return None
        if up in clocks and up in T:
            return None
        return rest + check_atoms(clocks, (lo, up))

    bld = Builder(A, lambda k: f"{k[0]}[{_ctx_str(k[1])}]", lambda k: k[0])

    def expand(key):
        q, ctx = key
        inb, V, T, S = ctx
        for sym in A.alphabet.symbols:
            for t in A.by_source.get((q, sym), ()):
                rest, iv = split_guard(t, z)
                if t.kind == POP and t.stack != BOTTOM:
                    def on_pop(name, outer, t=t, rest=rest, iv=iv, key=key, S_in=S):
                        o_inb, oV, oT, oS = outer
                        back = _ctx(o_inb, oV | _lower(S_in), oT | _upper(S_in), oS | S_in)
                        g = guard_for(rest, iv, back)
                        if g is not None:
                            bld.emit(POP, key, t, g, t.reset, (t.target, back), name)

                    on_frame(t.stack, on_pop)
                    continue
                if t.kind == POP:
                    g = guard_for(rest, iv, _TOP)
                    if g is not None:
                        bld.emit(POP, key, t, g, t.reset, (t.target, _TOP), BOTTOM)
                    continue
                g = guard_for(rest, iv, ctx)
                if g is None:
                    continue
                if t.kind == INTERNAL:
                    bld.emit(INTERNAL, key, t, g, t.reset, (t.target, ctx))
                elif sym == b:
                    for res in res_choices:
                        after = _ctx(inb, V | _lower(res), T | _upper(res), S | res)
                        fr = add_frame(t.stack, after)
                        inner = _ctx(True, _lower(res), (), ())
                        reset = t.reset | {clocks[bd] for bd in res}
                        bld.emit(PUSH, key, t, g, reset, (t.target, inner), fr)
                else:
                    fr = add_frame(t.stack, ctx)
                    bld.emit(PUSH, key, t, g, t.reset, (t.target, _ctx(inb, V, T, ())), fr)

    init = [(q, _TOP) for q in sorted(A.initial)]
    for k in init:
        bld.state(k)
    bld.run(expand)
    family = [(lambda k, F=F: k[0] in F) for F in A.accepting]
    return bld.result(z, init, clocks.values(), family, lambda k: k[0] in A.finite_accepting)
