"""Pushdown alphabets, timed words and the structural functions over nested words.

The functions here take an alphabet and an untimed word (a sequence of
symbols). ``None`` is returned where a position is undefined (⊥).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .clocks import KINDS, Clock, EventClock, Value, format_time, parse_time
from .errors import AlphabetMismatch, OutOfBounds, ParseError, PositionNotACall

CALL, RET, INT = "call", "ret", "int"


@dataclass(frozen=True)
class PushdownAlphabet:
    calls: frozenset
    returns: frozenset
    internals: frozenset

    def __post_init__(self):
        for name in ("calls", "returns", "internals"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.calls & self.returns or self.calls & self.internals or self.returns & self.internals:
            raise AlphabetMismatch("call, return and internal symbols must be pairwise disjoint")
        if not (self.calls or self.returns or self.internals):
            raise AlphabetMismatch("alphabet must be non-empty")

    @cached_property
    def symbols(self) -> tuple:
        return tuple(sorted(self.calls | self.returns | self.internals))

    def kind(self, symbol: str) -> str:
        if symbol in self.calls:
            return CALL
        if symbol in self.returns:
            return RET
        if symbol in self.internals:
            return INT
        raise AlphabetMismatch(f"symbol {symbol!r} is not in the alphabet")

    def __contains__(self, symbol) -> bool:
        return symbol in self.calls or symbol in self.returns or symbol in self.internals

    def event_clocks(self) -> tuple:
        """All event clocks over the alphabet, five per symbol."""
        return tuple(EventClock(k, s) for s in self.symbols for k in KINDS)

    def header(self) -> str:
        return "calls={} returns={} internals={}".format(
            ",".join(sorted(self.calls)), ",".join(sorted(self.returns)), ",".join(sorted(self.internals)))

    @classmethod
    def parse(cls, text: str, source: str = "<string>", line: int = 0) -> "PushdownAlphabet":
        parts = {"calls": [], "returns": [], "internals": []}
        for field in text.split():
            key, sep, value = field.partition("=")
            if not sep or key not in parts:
                raise ParseError(f"bad alphabet field {field!r}", source, line)
            parts[key] = [v.strip() for v in value.split(",") if v.strip()]
        try:
            return cls(frozenset(parts["calls"]), frozenset(parts["returns"]), frozenset(parts["internals"]))
        except AlphabetMismatch as exc:
            raise ParseError(str(exc), source, line) from None


class NestedStructure:
    """Matching relation of a finite word, computed once in linear time."""

    def __init__(self, alphabet: PushdownAlphabet, word: Sequence[str]):
        self.alphabet = alphabet
        self.word = tuple(word)
        n = len(self.word)
        self.kinds = tuple(alphabet.kind(s) for s in self.word)
        self.match: list = [None] * n  # call -> return and return -> call
        # pending[i]: calls pending just before position i, innermost last
        self.pending: list = []
        stack: list = []
        for i, k in enumerate(self.kinds):
            self.pending.append(tuple(stack))
            if k == CALL:
                stack.append(i)
            elif k == RET and stack:
                j = stack.pop()
                self.match[j] = i
                self.match[i] = j

    def __len__(self) -> int:
        return len(self.word)

    def _check(self, i: int) -> None:
        if not 0 <= i < len(self.word):
            raise OutOfBounds(f"position {i} outside word of length {len(self.word)}")

    def matching_return(self, i: int) -> Optional[int]:
        self._check(i)
        if self.kinds[i] != CALL:
            raise PositionNotACall(f"position {i} holds {self.word[i]!r}, not a call")
        return self.match[i]

    def abstract_successor(self, i: int) -> Optional[int]:
        self._check(i)
        if self.kinds[i] == CALL:
            return self.match[i]
        if i + 1 < len(self.word) and self.kinds[i + 1] != RET:
            return i + 1
        return None

    def abstract_predecessor(self, i: int) -> Optional[int]:
        self._check(i)
        if self.kinds[i] == RET:
            return self.match[i]
        if i > 0 and self.kinds[i - 1] != CALL:
            return i - 1
        return None

    def caller(self, i: int) -> Optional[int]:
        self._check(i)
        pend = self.pending[i]
        if self.kinds[i] == RET and self.match[i] is not None:
            pend = pend[:-1]
        return pend[-1] if pend else None

    def map_of(self, i: int) -> list:
        self._check(i)
        start = i
        while (p := self.abstract_predecessor(start)) is not None:
            start = p
        path = [start]
        while (s := self.abstract_successor(path[-1])) is not None:
            path.append(s)
        return path

    def caller_path(self, i: int) -> list:
        self._check(i)
        path = [i]
        while (c := self.caller(path[-1])) is not None:
            path.append(c)
        return path

    def is_well_matched(self) -> bool:
        return all(m is not None for i, m in enumerate(self.match) if self.kinds[i] != INT)


def matching_return(alphabet: PushdownAlphabet, word: Sequence[str], i: int) -> Optional[int]:
    return NestedStructure(alphabet, word).matching_return(i)


def abstract_successor(alphabet: PushdownAlphabet, word: Sequence[str], i: int) -> Optional[int]:
    return NestedStructure(alphabet, word).abstract_successor(i)


def caller(alphabet: PushdownAlphabet, word: Sequence[str], i: int) -> Optional[int]:
    return NestedStructure(alphabet, word).caller(i)


def map_of(alphabet: PushdownAlphabet, word: Sequence[str], i: int) -> list:
    return NestedStructure(alphabet, word).map_of(i)


def caller_path(alphabet: PushdownAlphabet, word: Sequence[str], i: int) -> list:
    return NestedStructure(alphabet, word).caller_path(i)


def is_well_matched(alphabet: PushdownAlphabet, word: Sequence[str]) -> bool:
    return NestedStructure(alphabet, word).is_well_matched()


@dataclass(frozen=True)
class TimedWord:
    alphabet: PushdownAlphabet
    symbols: tuple
    times: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "times", tuple(Fraction(t) for t in self.times))
        if len(self.symbols) != len(self.times):
            raise ValueError("symbols and timestamps differ in length")
        for s in self.symbols:
            if s not in self.alphabet:
                raise AlphabetMismatch(f"symbol {s!r} is not in the alphabet")
        prev = Fraction(0)
        for t in self.times:
            if t < prev:
                raise ValueError("timestamps must be non-negative and non-decreasing")
            prev = t

    @classmethod
    def of(cls, alphabet: PushdownAlphabet, letters: Iterable) -> "TimedWord":
        letters = list(letters)
        return cls(alphabet, tuple(s for s, _ in letters), tuple(Fraction(t) for _, t in letters))

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def letters(self) -> list:
        return list(zip(self.symbols, self.times))

    @cached_property
    def structure(self) -> NestedStructure:
        return NestedStructure(self.alphabet, self.symbols)

    def __str__(self) -> str:
        return "".join(f"({s},{format_time(t)})" for s, t in self.letters)

    def to_text(self) -> str:
        lines = [f"alphabet: {self.alphabet.header()}"]
        lines += [f"{s} {format_time(t)}" for s, t in self.letters]
        return "\n".join(lines) + "\n"


def parse_timed_word(text: str, source: str = "<string>") -> TimedWord:
    alphabet = None
    letters = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if alphabet is None:
            key, sep, rest = line.partition(":")
            if not sep or key.strip() != "alphabet":
                raise ParseError("expected 'alphabet:' header", source, lineno)
            alphabet = PushdownAlphabet.parse(rest, source, lineno)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'symbol timestamp', got {line!r}", source, lineno)
        sym, ts = parts
        if sym not in alphabet:
            raise ParseError(f"symbol {sym!r} is not in the alphabet", source, lineno)
        try:
            t = parse_time(ts)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad timestamp {ts!r}: {exc}", source, lineno) from None
        if letters and t < letters[-1][1]:
            raise ParseError("timestamps must be non-decreasing", source, lineno)
        letters.append((sym, t))
    if alphabet is None:
        raise ParseError("missing 'alphabet:' header", source, 1)
    return TimedWord.of(alphabet, letters)


def clock_valuation(w: TimedWord, i: int, clocks: Optional[Iterable[Clock]] = None) -> dict:
    """Values of the event clocks at position ``i`` of ``w``, by direct evaluation."""
    st = w.structure
    st._check(i)
    if clocks is None:
        clocks = w.alphabet.event_clocks()
    positions = {"g": None, "a": None, "c": None}
    out = {}
    for clk in clocks:
        d = clk.kind[1]
        if positions[d] is None:
            if d == "g":
                positions[d] = range(len(w))
            elif d == "a":
                positions[d] = st.map_of(i)
            else:
                positions[d] = st.caller_path(i)
        out[clk] = _evaluate(w, i, clk, positions[d])
    return out


def reference_position(st: NestedStructure, i: int, clk: EventClock) -> Optional[int]:
    """Position whose timestamp the clock measures against at ``i`` (None for ⊥)."""
    d = clk.kind[1]
    if d == "g":
        positions = range(len(st))
    elif d == "a":
        positions = st.map_of(i)
    else:
        positions = st.caller_path(i)
    sym = st.word
    if clk.is_recorder:
        js = [j for j in positions if j < i and sym[j] == clk.symbol]
        return max(js) if js else None
    js = [j for j in positions if j > i and sym[j] == clk.symbol]
    return min(js) if js else None


def _evaluate(w: TimedWord, i: int, clk: EventClock, positions) -> Value:
    sym, times = w.symbols, w.times
    if clk.is_recorder:
        js = [j for j in positions if j < i and sym[j] == clk.symbol]
        return times[i] - times[max(js)] if js else None
    js = [j for j in positions if j > i and sym[j] == clk.symbol]
    return times[min(js)] - times[i] if js else None


def all_valuations(w: TimedWord, clocks: Iterable[Clock]) -> list:
    clocks = tuple(clocks)
    return [clock_valuation(w, i, clocks) for i in range(len(w))]
