"""Exhaustive simulation of nested VPTA over finite timed words.

This is the reference semantics every construction is tested against.
Stacks are tuples with the top first and ``BOTTOM`` last.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Optional

from .automaton import BOTTOM, INTERNAL, POP, PUSH, NestedVPTA, constraint_sat
from .errors import AlphabetMismatch
from .words import TimedWord, all_valuations


class Configuration(NamedTuple):
    state: str
    stack: tuple = (BOTTOM,)
    sval: tuple = ()  # sorted (clock, value) pairs

    def valuation(self) -> dict:
        return dict(self.sval)


def initial_configurations(A: NestedVPTA) -> set:
    zero = tuple((z, Fraction(0)) for z in sorted(A.standard_clocks))
    return {Configuration(q, (BOTTOM,), zero) for q in A.initial}


def successors(A: NestedVPTA, cfg: Configuration, symbol: str, delay: Fraction, event_val: dict):
    """Yield ``(transition, configuration)`` pairs for one letter."""
    advanced = tuple((z, v + delay) for z, v in cfg.sval)
    val = dict(event_val)
    val.update(advanced)
    top = cfg.stack[0]
    for t in A.by_source.get((cfg.state, symbol), ()):
        if t.kind == POP and t.stack != top:
            continue
        if not constraint_sat(val, t.guard):
            continue
        if t.reset:
            sval = tuple((z, Fraction(0) if z in t.reset else v) for z, v in advanced)
        else:
            sval = advanced
        if t.kind == PUSH:
            stack = (t.stack,) + cfg.stack
        elif t.kind == POP and top != BOTTOM:
            stack = cfg.stack[1:]
        else:
            stack = cfg.stack
        yield t, Configuration(t.target, stack, sval)


def step(A: NestedVPTA, cfg: Configuration, letter, prev_timestamp, event_val: dict) -> set:
    symbol, ts = letter
    delay = Fraction(ts) - Fraction(prev_timestamp)
    return {c for _, c in successors(A, cfg, symbol, delay, event_val)}


def _check_alphabet(A: NestedVPTA, w: TimedWord) -> None:
    if w.alphabet != A.alphabet:
        raise AlphabetMismatch("word and automaton use different pushdown alphabets")


def run_prefixes(A: NestedVPTA, w: TimedWord) -> set:
    _check_alphabet(A, w)
    current = initial_configurations(A)
    vals = all_valuations(w, A.event_clocks)
    prev = Fraction(0)
    for i, (sym, ts) in enumerate(w.letters):
        delay = ts - prev
        nxt = set()
        for cfg in current:
            nxt.update(c for _, c in successors(A, cfg, sym, delay, vals[i]))
        current, prev = nxt, ts
        if not current:
            break
    return current


def accepts_finite(A: NestedVPTA, w: TimedWord) -> bool:
    return any(c.state in A.finite_accepting for c in run_prefixes(A, w))


def _mask(A: NestedVPTA, q: str) -> int:
    m = 0
    for k, F in enumerate(A.accepting):
        if q in F:
            m |= 1 << k
    return m


def feasible_states(A: NestedVPTA, w: TimedWord) -> set:
    """Reachable ``(state, frozenset of hit component indices)`` after reading ``w``.

    A component index k is included when the run visited a state of the k-th
    Büchi set somewhere along the prefix, initial and last states included.
    """
    _check_alphabet(A, w)
    current = {(c, _mask(A, c.state)) for c in initial_configurations(A)}
    vals = all_valuations(w, A.event_clocks)
    prev = Fraction(0)
    for i, (sym, ts) in enumerate(w.letters):
        delay = ts - prev
        nxt = set()
        for cfg, m in current:
            for _, c in successors(A, cfg, sym, delay, vals[i]):
                nxt.add((c, m | _mask(A, c.state)))
        current, prev = nxt, ts
    out = set()
    for cfg, m in current:
        out.add((cfg.state, frozenset(k for k in range(len(A.accepting)) if m >> k & 1)))
    return out


def reachable_bases(A: NestedVPTA, w: TimedWord, final_only: bool = False) -> set:
    """Base states (via ``A.origin``) of configurations reachable after ``w``."""
    cfgs = run_prefixes(A, w)
    if final_only:
        cfgs = {c for c in cfgs if c.state in A.finite_accepting}
    return {A.base(c.state) for c in cfgs}


def accepts_untimed_finite(A: NestedVPTA, word: Iterable[str]) -> bool:
    """Finite-word membership for a clockless automaton on an untimed word."""
    current = {(q, (BOTTOM,)) for q in A.initial}
    for sym in word:
        if sym not in A.alphabet:
            raise AlphabetMismatch(f"symbol {sym!r} is not in the alphabet")
        nxt = set()
        for q, stack in current:
            top = stack[0]
            for t in A.by_source.get((q, sym), ()):
                if t.kind == PUSH:
                    nxt.add((t.target, (t.stack,) + stack))
                elif t.kind == INTERNAL:
                    nxt.add((t.target, stack))
                elif t.stack == top:
                    nxt.add((t.target, stack if top == BOTTOM else stack[1:]))
        current = nxt
        if not current:
            return False
    return any(q in A.finite_accepting for q, _ in current)


def accepting_run(A: NestedVPTA, w: TimedWord) -> Optional[list]:
    """One accepting run as a list of transitions, or None."""
    _check_alphabet(A, w)
    vals = all_valuations(w, A.event_clocks)
    layer = {c: None for c in initial_configurations(A)}
    history = [layer]
    prev = Fraction(0)
    for i, (sym, ts) in enumerate(w.letters):
        nxt: dict = {}
        for cfg in layer:
            for t, c in successors(A, cfg, sym, ts - prev, vals[i]):
                nxt.setdefault(c, (cfg, t))
        layer, prev = nxt, ts
        history.append(layer)
    finals = [c for c in layer if c.state in A.finite_accepting]
    if not finals:
        return None
    run, cfg = [], finals[0]
    for k in range(len(w), 0, -1):
        parent, t = history[k][cfg]
        run.append(t)
        cfg = parent
    return run[::-1]
