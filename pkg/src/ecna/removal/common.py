"""Shared plumbing for the event-clock removal constructions.

Every construction explores the translated automaton on the fly from its
initial states.  Bounds are the ``LowerBound``/``UpperBound`` tuples of
:mod:`ecna.clocks`; a fresh standard clock exists only for non-trivial
bounds, trivial ones (``>=0`` and ``<inf``) are always satisfied.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Optional

from ..automaton import (
    BOTTOM,
    INTERNAL,
    POP,
    PUSH,
    NestedVPTA,
    Transition,
    atoms_on,
    check_valid,
    greatest_constant,
    normalize_single_atom,
)
from ..clocks import EventClock, Interval, LowerBound
from ..errors import ClockNotPresent
from ..words import CALL, INT, RET

TYPES = (CALL, RET, INT)
_KIND = {PUSH: CALL, POP: RET, INTERNAL: INT}


def symbol_type(t: Transition) -> str:
    return _KIND[t.kind]


def bound_token(bd) -> str:
    if isinstance(bd, LowerBound):
        return ("gt" if bd.strict else "ge") + str(bd.value)
    return ("lt" if bd.strict else "le") + ("inf" if bd.value is None else str(bd.value))


def bound_interval(bd) -> Interval:
    """The set of values satisfying a single bound."""
    if isinstance(bd, LowerBound):
        return Interval(bd.value, None, bd.strict, True)
    return Interval(0, bd.value, False, bd.strict)


def all_bounds(iv: Interval) -> tuple:
    """Lower and upper bound of a defined interval, trivial ones included."""
    return (iv.lower_bound, iv.upper_bound)


def clock_name(z: EventClock, bd) -> str:
    return f"z.{z.kind}.{z.symbol}.{bound_token(bd)}"


def bounds_of(A: NestedVPTA, z: EventClock) -> tuple:
    """(lower bounds, upper bounds) used on ``z``, trivial ones included."""
    lows, ups = set(), set()
    for t in A.transitions:
        for iv in atoms_on(t.guard, z):
            if not iv.undef:
                lows.add(iv.lower_bound)
                ups.add(iv.upper_bound)
    key_l = lambda b: (b.value, b.strict)
    key_u = lambda b: (float("inf") if b.value is None else b.value, not b.strict)
    return tuple(sorted(lows, key=key_l)), tuple(sorted(ups, key=key_u))


def fresh_clocks(z: EventClock, bounds: Iterable) -> dict:
    """Map each non-trivial bound to its fresh clock name."""
    return {bd: clock_name(z, bd) for bd in bounds if not bd.trivial}


def check_atoms(clocks: dict, bounds: Iterable) -> tuple:
    """Guard atoms checking ``z_bd ⋈ bd`` for each bound with a clock."""
    return tuple((clocks[bd], bound_interval(bd)) for bd in bounds if bd in clocks)


def prepare(A: NestedVPTA, z: EventClock, kinds: tuple) -> Optional[NestedVPTA]:
    """Validate and normalize for the removal of ``z``.

    Returns None when no transition mentions ``z``; the caller then only
    drops the clock.
    """
    check_valid(A)
    if not isinstance(z, EventClock) or z not in A.event_clocks:
        raise ClockNotPresent(f"{z} is not an event clock of the automaton")
    if z.kind not in kinds:
        raise ClockNotPresent(f"{z} cannot be removed by this construction")
    if not any(atoms_on(t.guard, z) for t in A.transitions):
        return None
    return normalize_single_atom(A, z)


def split_guard(t: Transition, z: EventClock) -> tuple:
    """``(θ, I)``: the guard without ``z`` and the single interval on ``z``."""
    rest = tuple(a for a in t.guard if a[0] != z)
    (iv,) = atoms_on(t.guard, z)
    return rest, iv


def fresh_stack_name(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    name = base
    while name in taken:
        name += "'"
    return name


class Builder:
    """On-the-fly construction of a translated automaton.

    States are arbitrary hashable keys with a naming function; ``origin``
    maps every generated name to the base state of the source automaton.
    """

    def __init__(self, A: NestedVPTA, state_name: Callable, base_of: Callable):
        self.A = A
        self.state_name = state_name
        self.base_of = base_of
        self.names: dict = {}
        self.keys: list = []
        self.work: deque = deque()
        self.transitions: list = []
        self.stack: set = set()

    def state(self, key) -> str:
        name = self.names.get(key)
        if name is None:
            name = self.state_name(key)
            self.names[key] = name
            self.keys.append(key)
            self.work.append(key)
        return name

    def emit(self, kind, src_key, t: Transition, guard, reset, tgt_key, stack=None) -> None:
        src = self.names[src_key]
        tgt = self.state(tgt_key)
        if kind != INTERNAL and stack != BOTTOM:
            self.stack.add(stack)
        self.transitions.append(
            Transition(kind, src, t.symbol, tuple(guard), frozenset(reset), tgt, stack, t.tag))

    def run(self, expand: Callable) -> None:
        while self.work:
            expand(self.work.popleft())

    def result(self, z: EventClock, initial_keys, new_clocks, family, finite, stack_extra=()) -> NestedVPTA:
        A = self.A
        names = self.names
        base = {names[k]: A.base(self.base_of(k)) for k in self.keys}
        return NestedVPTA(
            alphabet=A.alphabet,
            states=frozenset(names.values()),
            initial=frozenset(names[k] for k in initial_keys),
            event_clocks=A.event_clocks - {z},
            standard_clocks=A.standard_clocks | frozenset(new_clocks),
            stack_symbols=frozenset(self.stack) | frozenset(stack_extra),
            transitions=tuple(self.transitions),
            accepting=tuple(frozenset(names[k] for k in self.keys if pred(k)) for pred in family),
            finite_accepting=frozenset(names[k] for k in self.keys if finite(k)),
            origin=base,
            constant_floor=greatest_constant(A),
        )


def drop_clock(A: NestedVPTA, z: EventClock) -> NestedVPTA:
    return A.with_(event_clocks=A.event_clocks - {z})
