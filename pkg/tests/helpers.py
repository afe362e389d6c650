"""Random automata and words shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from ecna.automaton import BOTTOM, NestedVPTA, internal, pop, push
from ecna.clocks import UNDEF, EventClock, Interval
from ecna.words import PushdownAlphabet, TimedWord

AL = PushdownAlphabet(frozenset({"c", "d"}), frozenset({"r"}), frozenset({"a", "b"}))
SMALL = PushdownAlphabet(frozenset({"c"}), frozenset({"r"}), frozenset({"a"}))

INTERVALS = [
    Interval.point(1),
    Interval.open(0, 1),
    Interval(1, None, False, True),
    Interval(0, 2, False, False),
    Interval.open(1, None),
    Interval(0, None, False, True),
    Interval.point(0),
    Interval(1, 2, True, False),
]

DELAYS = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(1, 3)]


def random_automaton(rng: random.Random, clocks, alphabet=AL, n: int = 3, pool: int = 2,
                     guard_p: float = 0.6, accepting=None) -> NestedVPTA:
    """Random ECNA over ``alphabet``; each clock draws guards from ⊥ plus ``pool`` intervals."""
    clocks = list(clocks)
    pools = {z: [UNDEF] + rng.sample(INTERVALS, pool) for z in clocks}
    states = [f"s{i}" for i in range(n)]
    trans = []
    for q in states:
        for sym in alphabet.symbols:
            for _ in range(rng.choice([0, 1, 1, 2])):
                tgt = rng.choice(states)
                g = tuple((z, rng.choice(pools[z])) for z in clocks if rng.random() < guard_p)
                kind = alphabet.kind(sym)
                if kind == "call":
                    trans.append(push(q, sym, tgt, rng.choice("gh"), g))
                elif kind == "ret":
                    trans.append(pop(q, sym, tgt, rng.choice(["g", "h", BOTTOM]), g))
                else:
                    trans.append(internal(q, sym, tgt, g))
    if accepting is None:
        accepting = frozenset(rng.sample(states, rng.randint(1, n)))
    return NestedVPTA(
        alphabet=alphabet,
        states=frozenset(states),
        initial=frozenset({"s0"}),
        event_clocks=frozenset(clocks),
        standard_clocks=frozenset(),
        stack_symbols=frozenset("gh"),
        transitions=tuple(trans),
        accepting=(frozenset(accepting),),
        finite_accepting=frozenset(accepting),
    )


def random_clock(rng: random.Random, kind: str, alphabet=AL) -> EventClock:
    symbols = sorted(alphabet.calls) if kind == "xc" else list(alphabet.symbols)
    return EventClock(kind, rng.choice(symbols))


def random_word(rng: random.Random, n: int, alphabet=AL) -> TimedWord:
    t = Fraction(0)
    out = []
    for _ in range(n):
        t += rng.choice(DELAYS)
        out.append((rng.choice(alphabet.symbols), t))
    return TimedWord.of(alphabet, out)


def random_words(rng: random.Random, count: int, max_len: int = 7, alphabet=AL) -> list:
    return [random_word(rng, rng.randint(0, max_len), alphabet) for _ in range(count)]
