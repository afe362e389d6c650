"""Elimination of event clocks, one clock at a time.

Each construction replaces an event clock by fresh standard clocks plus
bookkeeping in the control states and on the stack.  Translated states map
back to the states of the input through ``origin``.
"""

from __future__ import annotations

from ..automaton import NestedVPTA, check_valid
from ..clocks import KINDS, EventClock, clock_key
from ..errors import ClockNotPresent
from .abstract import remove_abstract_predictor, remove_abstract_recorder
from .caller import remove_caller
from .global_clocks import remove_global

# globals first, then abstract recorders, abstract predictors and callers
ORDER = ("xg", "yg", "xa", "ya", "xc")


def remove_clock(A: NestedVPTA, z: EventClock) -> NestedVPTA:
    if not isinstance(z, EventClock) or z.kind not in KINDS:
        raise ClockNotPresent(f"{z} is not an event clock")
    if z.kind in ("xg", "yg"):
        return remove_global(A, z)
    if z.kind == "xa":
        return remove_abstract_recorder(A, z.symbol)
    if z.kind == "ya":
        return remove_abstract_predictor(A, z.symbol)
    return remove_caller(A, z.symbol)


def removal_order(clocks) -> list:
    return sorted(clocks, key=lambda z: (ORDER.index(z.kind), clock_key(z)))


def remove_all_event_clocks(A: NestedVPTA) -> NestedVPTA:
    """An equivalent automaton without event clocks."""
    check_valid(A)
    for z in removal_order(A.event_clocks):
        A = remove_clock(A, z)
    return A


__all__ = [
    "ORDER",
    "remove_abstract_predictor",
    "remove_abstract_recorder",
    "remove_all_event_clocks",
    "remove_caller",
    "remove_clock",
    "remove_global",
    "removal_order",
]
