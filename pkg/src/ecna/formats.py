"""Sectioned text format for automata.

Example::

    [alphabet]
    calls=c returns=r internals=a,b
    [states]
    q0, q1
    [initial]
    q0
    [accepting]
    F1 = q1
    [finite-accepting]
    q1
    [event-clocks]
    xa(a)
    [standard-clocks]
    [stack]
    g
    [transitions]
    q0 --a / true --> q0
    q0 --c / true / reset {} / push g--> q1
    q1 --r / xa(a) in [1,1] / reset {} / pop g--> q1
"""

from __future__ import annotations

import re
from pathlib import Path

from .automaton import BOTTOM, INTERNAL, POP, PUSH, NestedVPTA, Transition, sorted_clocks
from .clocks import EventClock, parse_clock, parse_guard
from .errors import ParseError
from .words import PushdownAlphabet, TimedWord, parse_timed_word

SECTIONS = ("alphabet", "states", "initial", "accepting", "finite-accepting",
            "event-clocks", "standard-clocks", "stack", "transitions")

_TRANS_RE = re.compile(r"^(\S+)\s+--(.*)-->\s*(\S+)$")
_OPEN, _CLOSE = "([{", ")]}"


def split_top(text: str, sep: str = ",") -> list:
    """Split on ``sep`` outside any bracket nesting; empty pieces dropped."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in _OPEN:
            depth += 1
        elif ch in _CLOSE:
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _names(lines) -> list:
    out = []
    for _, line in lines:
        out.extend(split_top(line))
    return out


def _parse_alphabet(lines, source) -> PushdownAlphabet:
    if not lines:
        raise ParseError("missing [alphabet] section", source, 0)
    lineno = lines[0][0]
    text = " ".join(l for _, l in lines)
    parts = {"calls": [], "returns": [], "internals": []}
    for m in re.finditer(r"(calls|returns|internals)\s*=\s*", text):
        start = m.end()
        nxt = re.compile(r"\s(calls|returns|internals)\s*=").search(text, start)
        chunk = text[start: nxt.start() if nxt else len(text)]
        parts[m.group(1)] = split_top(chunk)
    try:
        return PushdownAlphabet(frozenset(parts["calls"]), frozenset(parts["returns"]), frozenset(parts["internals"]))
    except Exception as exc:
        raise ParseError(str(exc), source, lineno) from None


def _parse_transition(line: str, source: str, lineno: int) -> Transition:
    m = _TRANS_RE.match(line)
    if not m:
        raise ParseError(f"malformed transition {line!r}", source, lineno)
    src, body, tgt = m.group(1), m.group(2), m.group(3)
    parts = [p.strip() for p in body.split("/")]
    if len(parts) < 2:
        raise ParseError(f"transition needs 'symbol / guard': {line!r}", source, lineno)
    symbol, guard = parts[0], parse_guard(parts[1], source, lineno)
    reset, kind, stack = frozenset(), INTERNAL, None
    for extra in parts[2:]:
        if extra.startswith("reset"):
            inner = extra[len("reset"):].strip()
            if not (inner.startswith("{") and inner.endswith("}")):
                raise ParseError(f"malformed reset set {extra!r}", source, lineno)
            reset = frozenset(split_top(inner[1:-1]))
        elif extra.startswith("push ") or extra.startswith("pop "):
            kind, _, stack = extra.partition(" ")
            stack = stack.strip()
            kind = PUSH if kind == "push" else POP
        else:
            raise ParseError(f"unexpected transition part {extra!r}", source, lineno)
    return Transition(kind, src, symbol, guard, reset, tgt, stack)


def parse_automaton(text: str, source: str = "<string>") -> NestedVPTA:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]") and line[1:-1].strip() in SECTIONS:
            current = line[1:-1].strip()
            if current in sections:
                raise ParseError(f"duplicate section [{current}]", source, lineno)
            sections[current] = []
            continue
        if current is None:
            raise ParseError(f"content before first section: {line!r}", source, lineno)
        sections[current].append((lineno, line))
    for req in ("alphabet", "states", "initial"):
        if req not in sections:
            raise ParseError(f"missing [{req}] section", source, 0)
    alphabet = _parse_alphabet(sections["alphabet"], source)
    accepting = []
    for lineno, line in sections.get("accepting", []):
        name, sep, rest = line.partition("=")
        if not sep:
            raise ParseError(f"expected 'F = q1,q2', got {line!r}", source, lineno)
        accepting.append(frozenset(split_top(rest)))
    finite = None
    if "finite-accepting" in sections:
        finite = frozenset(_names(sections["finite-accepting"]))
    ev = []
    for lineno, line in sections.get("event-clocks", []):
        for name in split_top(line):
            clk = parse_clock(name)
            if not isinstance(clk, EventClock):
                raise ParseError(f"{name!r} is not an event clock", source, lineno)
            ev.append(clk)
    std = []
    for lineno, line in sections.get("standard-clocks", []):
        for name in split_top(line):
            if isinstance(parse_clock(name), EventClock):
                raise ParseError(f"standard clock {name!r} clashes with event-clock syntax", source, lineno)
            std.append(name)
    trans = [_parse_transition(line, source, lineno) for lineno, line in sections.get("transitions", [])]
    return NestedVPTA(
        alphabet=alphabet,
        states=frozenset(_names(sections["states"])),
        initial=frozenset(_names(sections["initial"])),
        event_clocks=frozenset(ev),
        standard_clocks=frozenset(std),
        stack_symbols=frozenset(_names(sections.get("stack", []))) - {BOTTOM},
        transitions=tuple(trans),
        accepting=tuple(accepting),
        finite_accepting=finite,
    )


def serialize_automaton(A: NestedVPTA) -> str:
    lines = ["[alphabet]", A.alphabet.header(), "[states]"]
    lines += sorted(A.states)
    lines += ["[initial]"] + sorted(A.initial)
    lines.append("[accepting]")
    lines += [f"F{i} = " + ", ".join(sorted(F)) for i, F in enumerate(A.accepting, 1)]
    lines += ["[finite-accepting]"] + sorted(A.finite_accepting)
    lines += ["[event-clocks]"] + [str(c) for c in sorted_clocks(A.event_clocks)]
    lines += ["[standard-clocks]"] + sorted(A.standard_clocks)
    lines += ["[stack]"] + sorted(A.stack_symbols)
    lines += ["[transitions]"] + [str(t) for t in A.transitions]
    return "\n".join(lines) + "\n"


def load_automaton(path) -> NestedVPTA:
    p = Path(path)
    return parse_automaton(p.read_text(encoding="utf-8"), str(p))


def save_automaton(A: NestedVPTA, path) -> None:
    Path(path).write_text(serialize_automaton(A), encoding="utf-8")


def load_word(path) -> TimedWord:
    p = Path(path)
    return parse_timed_word(p.read_text(encoding="utf-8"), str(p))
