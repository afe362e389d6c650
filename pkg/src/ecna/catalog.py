"""The three motivating automata (recorder, predictor, caller) and their test words.

All three read calls ``c``, returns ``r`` and internals ``a``, ``b`` and
``i`` (the idle letter repeated forever after acceptance).
"""

from __future__ import annotations

from fractions import Fraction

from .automaton import NestedVPTA, internal, pop, push
from .clocks import EventClock, Interval
from .words import PushdownAlphabet, TimedWord

ALPHABET = PushdownAlphabet(frozenset({"c"}), frozenset({"r"}), frozenset({"a", "b", "i"}))
ONE = Interval.point(1)


def _automaton(states, trans, final, clocks) -> NestedVPTA:
    return NestedVPTA(
        alphabet=ALPHABET,
        states=frozenset(states),
        initial=frozenset({states[0]}),
        event_clocks=frozenset(clocks),
        standard_clocks=frozenset(),
        stack_symbols=frozenset({"c"}),
        transitions=tuple(trans),
        accepting=(frozenset({final}),),
        finite_accepting=frozenset({final}),
    )


def t_rec() -> NestedVPTA:
    """a c+ a+ r+ b+ with the abstract recorder of ``a`` equal to 1 at the last b."""
    x = EventClock("xa", "a")
    trans = [
        internal("q0", "a", "q1"),
        push("q1", "c", "q1", "c"),
        push("q1", "c", "q2", "c"),
        internal("q2", "a", "q2"),
        internal("q2", "a", "q3"),
        pop("q3", "r", "q3", "c"),
        pop("q3", "r", "q4", "c"),
        internal("q4", "b", "q4"),
        internal("q4", "b", "q5", guard=((x, ONE),)),
        internal("q5", "i", "q5"),
    ]
    return _automaton([f"q{k}" for k in range(6)], trans, "q5", [x])


def t_pred() -> NestedVPTA:
    """a+ c+ b+ r+ b with the abstract predictor of ``b`` equal to 1 at the first a."""
    y = EventClock("ya", "b")
    trans = [
        internal("p0", "a", "p1", guard=((y, ONE),)),
        internal("p1", "a", "p1"),
        push("p1", "c", "p2", "c"),
        push("p2", "c", "p2", "c"),
        internal("p2", "b", "p3"),
        internal("p3", "b", "p3"),
        pop("p3", "r", "p4", "c"),
        pop("p4", "r", "p4", "c"),
        internal("p4", "b", "p5"),
        internal("p5", "i", "p5"),
    ]
    return _automaton([f"p{k}" for k in range(6)], trans, "p5", [y])


def t_caller() -> NestedVPTA:
    """c · a c+ a+ r+ b+ with the caller clock of ``c`` equal to 1 at the last b."""
    x = EventClock("xc", "c")
    trans = [
        push("s0", "c", "s1", "c"),
        internal("s1", "a", "s2"),
        push("s2", "c", "s2", "c"),
        push("s2", "c", "s3", "c"),
        internal("s3", "a", "s3"),
        internal("s3", "a", "s4"),
        pop("s4", "r", "s4", "c"),
        pop("s4", "r", "s5", "c"),
        internal("s5", "b", "s5"),
        internal("s5", "b", "s6", guard=((x, ONE),)),
        internal("s6", "i", "s6"),
    ]
    return _automaton([f"s{k}" for k in range(7)], trans, "s6", [x])


def _word(letters) -> TimedWord:
    return TimedWord.of(ALPHABET, [(s, Fraction(t)) for s, t in letters])


def v1() -> TimedWord:
    return _word([("a", "0"), ("c", "0.1"), ("a", "0.1"), ("r", "0.1"), ("b", "0.1"), ("b", "0.9")])


def v2() -> TimedWord:
    return _word([("a", "0"), ("c", "0.1"), ("a", "0.1"), ("r", "0.1"), ("b", "0.1"), ("b", "1")])


def u1() -> TimedWord:
    return _word([("a", "0"), ("a", "0.1"), ("c", "0.1"), ("b", "0.1"), ("r", "0.1"), ("b", "0.9")])


def u2() -> TimedWord:
    return _word([("a", "0"), ("a", "0.1"), ("c", "0.1"), ("b", "0.1"), ("r", "0.1"), ("b", "1")])


def caller_words() -> tuple:
    """A word accepted by :func:`t_caller` and one rejected by a timing shift."""
    good = _word([("c", "0"), ("a", "0.2"), ("c", "0.3"), ("a", "0.4"), ("r", "0.5"), ("b", "0.6"), ("b", "1")])
    bad = _word([("c", "0"), ("a", "0.2"), ("c", "0.3"), ("a", "0.4"), ("r", "0.5"), ("b", "0.6"), ("b", "1.1")])
    return good, bad
