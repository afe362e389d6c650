"""The nested VPTA representation, constraint evaluation and subclass checks."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Iterable, Mapping, NamedTuple, Optional

from .clocks import (
    ANY_DEFINED,
    UNDEF,
    Clock,
    EventClock,
    canonical_guard,
    clock_key,
    guard_str,
)
from .errors import InvalidAutomaton, UnknownClock
from .words import CALL, INT, RET, PushdownAlphabet

PUSH, POP, INTERNAL = "push", "pop", "int"
BOTTOM = "top"  # the stack-bottom symbol ⊤; a pop on it reads without removing

_KIND_OF = {PUSH: CALL, POP: RET, INTERNAL: INT}


@dataclass(frozen=True)
class Transition:
    """One push, pop or internal transition.

    ``stack`` is the pushed symbol for a push, the popped symbol (possibly
    ``BOTTOM``) for a pop, and None for an internal transition.  ``tag`` is
    free-form provenance that constructions carry along; it does not take
    part in equality.
    """

    kind: str
    source: str
    symbol: str
    guard: tuple
    reset: frozenset
    target: str
    stack: Optional[str] = None
    tag: Any = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "guard", canonical_guard(self.guard))
        object.__setattr__(self, "reset", frozenset(self.reset))

    def key(self) -> tuple:
        return (self.source, self.symbol, self.kind, self.stack or "", self.target,
                guard_str(self.guard), tuple(sorted(self.reset)))

    def __str__(self) -> str:
        reset = "{" + ", ".join(sorted(self.reset)) + "}"
        g = guard_str(self.guard)
        if self.kind == INTERNAL:
            if self.reset:
                return f"{self.source} --{self.symbol} / {g} / reset {reset}--> {self.target}"
            return f"{self.source} --{self.symbol} / {g} --> {self.target}"
        return f"{self.source} --{self.symbol} / {g} / reset {reset} / {self.kind} {self.stack}--> {self.target}"


def push(source, symbol, target, gamma, guard=(), reset=(), tag=None) -> Transition:
    return Transition(PUSH, source, symbol, guard, frozenset(reset), target, gamma, tag)


def pop(source, symbol, target, gamma, guard=(), reset=(), tag=None) -> Transition:
    return Transition(POP, source, symbol, guard, frozenset(reset), target, gamma, tag)


def internal(source, symbol, target, guard=(), reset=(), tag=None) -> Transition:
    return Transition(INTERNAL, source, symbol, guard, frozenset(reset), target, None, tag)


@dataclass(frozen=True)
class NestedVPTA:
    """A generalized Büchi nested VPTA with event clocks and standard clocks.

    ``accepting`` is the generalized Büchi family; ``finite_accepting`` holds
    the final states for finite words and defaults to the union of the family.
    ``origin`` optionally maps each state to the state of the automaton it was
    derived from.  ``constant_floor`` is a lower bound on the greatest
    constant; translations set it to the constant of their input because
    guards on transitions they never generate still count.
    """

    alphabet: PushdownAlphabet
    states: frozenset
    initial: frozenset
    event_clocks: frozenset
    standard_clocks: frozenset
    stack_symbols: frozenset
    transitions: tuple
    accepting: tuple = ()
    finite_accepting: Optional[frozenset] = None
    origin: Optional[Mapping] = field(default=None, compare=False, hash=False, repr=False)
    constant_floor: int = field(default=0, compare=False, hash=False, repr=False)

    def __post_init__(self):
        states = frozenset(self.states)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "event_clocks", frozenset(self.event_clocks))
        object.__setattr__(self, "standard_clocks", frozenset(self.standard_clocks))
        object.__setattr__(self, "stack_symbols", frozenset(self.stack_symbols) - {BOTTOM})
        trans = sorted(set(self.transitions), key=Transition.key)
        object.__setattr__(self, "transitions", tuple(trans))
        family = tuple(frozenset(f) for f in self.accepting) or (states,)
        object.__setattr__(self, "accepting", family)
        if self.finite_accepting is None:
            object.__setattr__(self, "finite_accepting", frozenset().union(*family))
        else:
            object.__setattr__(self, "finite_accepting", frozenset(self.finite_accepting))

    @cached_property
    def by_source(self) -> dict:
        out: dict = {}
        for t in self.transitions:
            out.setdefault((t.source, t.symbol), []).append(t)
        return out

    @cached_property
    def clocks(self) -> frozenset:
        return self.event_clocks | self.standard_clocks

    def base(self, state: str) -> str:
        if self.origin is None:
            return state
        return self.origin.get(state, state)

    def with_(self, **changes) -> "NestedVPTA":
        return replace(self, **changes)

    def summary(self) -> dict:
        return {
            "states": len(self.states),
            "initial": len(self.initial),
            "transitions": len(self.transitions),
            "stack_symbols": len(self.stack_symbols),
            "event_clocks": sorted(str(c) for c in self.event_clocks),
            "standard_clocks": sorted(self.standard_clocks),
            "buchi_components": len(self.accepting),
            "finite_accepting": len(self.finite_accepting),
            "greatest_constant": greatest_constant(self),
            "classes": sorted(classify(self)),
        }


class Violation(NamedTuple):
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def validate(A: NestedVPTA) -> list:
    """Return the list of invariant violations (empty when A is well formed)."""
    out = []
    Q = A.states
    for q in sorted(A.initial - Q):
        out.append(Violation("UnknownState", f"initial state {q!r} not in Q"))
    for i, F in enumerate(A.accepting, 1):
        for q in sorted(F - Q):
            out.append(Violation("UnknownState", f"state {q!r} of F{i} not in Q"))
    for q in sorted(A.finite_accepting - Q):
        out.append(Violation("UnknownState", f"finite-accepting state {q!r} not in Q"))
    for c in A.event_clocks:
        if not isinstance(c, EventClock) or c.symbol not in A.alphabet:
            out.append(Violation("UnknownClock", f"event clock {c} is not over the alphabet"))
    for c in A.standard_clocks:
        if isinstance(c, EventClock):
            out.append(Violation("ClockClash", f"standard clock {c} uses an event-clock name"))
    for t in A.transitions:
        where = str(t)
        for q in (t.source, t.target):
            if q not in Q:
                out.append(Violation("UnknownState", f"{where}: state {q!r} not in Q"))
        if t.symbol not in A.alphabet:
            out.append(Violation("UnknownSymbol", f"{where}: symbol not in alphabet"))
        elif A.alphabet.kind(t.symbol) != _KIND_OF[t.kind]:
            out.append(Violation("SymbolClassMismatch", f"{where}: {t.kind} on a {A.alphabet.kind(t.symbol)} symbol"))
        if t.kind == PUSH:
            if t.stack == BOTTOM:
                out.append(Violation("PushesBottom", f"{where}: pushes the bottom symbol"))
            elif t.stack not in A.stack_symbols:
                out.append(Violation("UnknownStackSymbol", f"{where}: {t.stack!r} not in the stack alphabet"))
        elif t.kind == POP:
            if t.stack != BOTTOM and t.stack not in A.stack_symbols:
                out.append(Violation("UnknownStackSymbol", f"{where}: {t.stack!r} not in the stack alphabet"))
        for clk, _ in t.guard:
            if clk not in A.event_clocks and clk not in A.standard_clocks:
                out.append(Violation("UnknownClock", f"{where}: clock {clk} not declared"))
            if not isinstance(clk, EventClock) and _.undef:
                out.append(Violation("UndefinedStandardClock", f"{where}: standard clock {clk} compared with bot"))
        for z in t.reset:
            if z not in A.standard_clocks:
                out.append(Violation("UnknownClock", f"{where}: reset of undeclared standard clock {z}"))
    return out


def check_valid(A: NestedVPTA) -> None:
    problems = validate(A)
    if problems:
        raise InvalidAutomaton("; ".join(str(p) for p in problems[:5]))


def classify(A: NestedVPTA) -> set:
    check_valid(A)
    kinds = {c.kind for c in A.event_clocks}
    tags = {"NestedVPTA"}
    if not A.event_clocks:
        tags.add("VPTA")
    if not A.standard_clocks:
        tags.add("ECNA")
        if kinds <= {"xg", "yg"}:
            tags.add("ECVPA")
        if not kinds & {"ya", "xc"}:
            tags.add("ARCNA")
        if not kinds & {"xa", "xc"}:
            tags.add("APCNA")
        if not kinds & {"xa", "ya"}:
            tags.add("CECNA")
        if not A.event_clocks:
            tags.add("VPA")
    return tags


def constraint_sat(val: Mapping, guard: Iterable) -> bool:
    """``val ⊨ θ``; ``val`` maps clocks to a Fraction or None (⊥)."""
    for clk, iv in guard:
        try:
            v = val[clk]
        except KeyError:
            raise UnknownClock(f"no value for clock {clk}") from None
        if not iv.contains(v):
            return False
    return True


def constants(A: NestedVPTA, clocks: Optional[Iterable[Clock]] = None) -> set:
    """All finite bounds used in atoms (restricted to ``clocks`` if given)."""
    wanted = None if clocks is None else set(clocks)
    out = set()
    for t in A.transitions:
        for clk, iv in t.guard:
            if iv.undef or (wanted is not None and clk not in wanted):
                continue
            out.add(iv.lower)
            if iv.upper is not None:
                out.add(iv.upper)
    return out


def greatest_constant(A: NestedVPTA) -> int:
    return max(max(constants(A), default=0), A.constant_floor)


def clock_constants(A: NestedVPTA) -> dict:
    """Greatest constant per clock (0 for clocks never compared)."""
    out = {c: 0 for c in A.clocks}
    for t in A.transitions:
        for clk, iv in t.guard:
            if iv.undef:
                continue
            m = iv.lower if iv.upper is None else max(iv.lower, iv.upper)
            out[clk] = max(out.get(clk, 0), m)
    return out


def atoms_on(guard: tuple, z: Clock) -> list:
    return [iv for clk, iv in guard if clk == z]


def is_normalized(A: NestedVPTA, z: Clock) -> bool:
    return all(len(atoms_on(t.guard, z)) == 1 for t in A.transitions)


def normalize_single_atom(A: NestedVPTA, z: Clock) -> NestedVPTA:
    """Make every transition carry exactly one atom on ``z``."""
    out = []
    for t in A.transitions:
        ivs = atoms_on(t.guard, z)
        rest = tuple(a for a in t.guard if a[0] != z)
        if not ivs:
            out.append(replace(t, guard=rest + ((z, UNDEF),)))
            out.append(replace(t, guard=rest + ((z, ANY_DEFINED),)))
            continue
        acc = ivs[0]
        for iv in ivs[1:]:
            acc = acc.intersect(iv)
            if acc is None:
                break
        if acc is not None:
            out.append(replace(t, guard=rest + ((z, acc),)))
    return A.with_(transitions=tuple(out))


def sorted_clocks(clocks: Iterable[Clock]) -> list:
    return sorted(clocks, key=clock_key)
