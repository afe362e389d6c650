"""Event clocks, intervals and atomic clock constraints.

Clock values are exact ``Fraction`` instances; ``None`` stands for the
undefined value ⊥.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from .errors import ParseError

Value = Optional[Fraction]
BOT: Value = None

KINDS = ("xg", "yg", "xa", "ya", "xc")
RECORDERS = frozenset({"xg", "xa", "xc"})
PREDICTORS = frozenset({"yg", "ya"})


class EventClock(NamedTuple):
    """An event clock such as ``xa(b)``: kind prefix plus the symbol it tracks."""

    kind: str
    symbol: str

    def __str__(self) -> str:
        return f"{self.kind}({self.symbol})"

    @property
    def is_recorder(self) -> bool:
        return self.kind in RECORDERS

    @property
    def is_predictor(self) -> bool:
        return self.kind in PREDICTORS

    @property
    def direction(self) -> str:
        return {"g": "global", "a": "abstract", "c": "caller"}[self.kind[1]]


Clock = Union[EventClock, str]

_CLOCK_RE = re.compile(r"^(xg|yg|xa|ya|xc)\(([^()\s]+)\)$")


def parse_clock(text: str) -> Clock:
    """Parse ``xa(b)`` into an EventClock; anything else is a standard clock name."""
    text = text.strip()
    m = _CLOCK_RE.match(text)
    if m:
        return EventClock(m.group(1), m.group(2))
    return text


def clock_key(c: Clock) -> tuple:
    if isinstance(c, EventClock):
        return (0, KINDS.index(c.kind), c.symbol)
    return (1, 0, c)


class LowerBound(NamedTuple):
    """``z > value`` (strict) or ``z >= value``."""

    value: int
    strict: bool

    @property
    def trivial(self) -> bool:
        return self.value == 0 and not self.strict

    def holds(self, v: Fraction) -> bool:
        return v > self.value if self.strict else v >= self.value

    # a lower and an upper bound with equal fields must stay distinct
    def __eq__(self, other) -> bool:
        return type(other) is LowerBound and tuple.__eq__(self, other)

    def __ne__(self, other) -> bool:
        return not self == other

    def __hash__(self) -> int:
        return hash(("lower",) + tuple(self))

    def __str__(self) -> str:
        return (">" if self.strict else ">=") + str(self.value)


class UpperBound(NamedTuple):
    """``z < value`` (strict) or ``z <= value``; ``value`` None means infinity."""

    value: Optional[int]
    strict: bool

    @property
    def trivial(self) -> bool:
        return self.value is None

    def holds(self, v: Fraction) -> bool:
        if self.value is None:
            return True
        return v < self.value if self.strict else v <= self.value

    def __eq__(self, other) -> bool:
        return type(other) is UpperBound and tuple.__eq__(self, other)

    def __ne__(self, other) -> bool:
        return not self == other

    def __hash__(self) -> int:
        return hash(("upper",) + tuple(self))

    def __str__(self) -> str:
        if self.value is None:
            return "<inf"
        return ("<" if self.strict else "<=") + str(self.value)


def bound_key(b) -> tuple:
    if isinstance(b, LowerBound):
        return (0, b.value, b.strict)
    return (1, float("inf") if b.value is None else b.value, not b.strict)


@dataclass(frozen=True)
class Interval:
    """An interval of non-negative reals with natural bounds, or the singleton {⊥}."""

    lower: int = 0
    upper: Optional[int] = None
    lower_strict: bool = False
    upper_strict: bool = True
    undef: bool = False

    def __post_init__(self):
        if self.undef:
            # canonical field values so equality only depends on undef
            object.__setattr__(self, "lower", 0)
            object.__setattr__(self, "upper", None)
            object.__setattr__(self, "lower_strict", False)
            object.__setattr__(self, "upper_strict", True)
            return
        if self.upper is None:
            object.__setattr__(self, "upper_strict", True)
        if self.lower < 0:
            raise ValueError("interval lower bound must be non-negative")
        if self.is_empty_bounds(self.lower, self.upper, self.lower_strict, self.upper_strict):
            raise ValueError(f"empty interval {self._render()}")

    @staticmethod
    def is_empty_bounds(lo, hi, lo_strict, hi_strict) -> bool:
        if hi is None:
            return False
        if lo > hi:
            return True
        return lo == hi and (lo_strict or hi_strict)

    @classmethod
    def point(cls, c: int) -> "Interval":
        return cls(c, c, False, False)

    @classmethod
    def open(cls, lo: int, hi: Optional[int]) -> "Interval":
        return cls(lo, hi, True, True)

    @property
    def lower_bound(self) -> LowerBound:
        return LowerBound(self.lower, self.lower_strict)

    @property
    def upper_bound(self) -> UpperBound:
        return UpperBound(self.upper, self.upper_strict)

    def bounds(self) -> tuple:
        """Non-trivial atomic bounds of this interval (empty for {⊥})."""
        if self.undef:
            return ()
        return tuple(b for b in (self.lower_bound, self.upper_bound) if not b.trivial)

    def contains(self, v: Value) -> bool:
        if v is None:
            return self.undef
        if self.undef:
            return False
        return self.lower_bound.holds(v) and self.upper_bound.holds(v)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        if self.undef or other.undef:
            return self if (self.undef and other.undef) else None
        if self.lower > other.lower:
            lo, lo_s = self.lower, self.lower_strict
        elif other.lower > self.lower:
            lo, lo_s = other.lower, other.lower_strict
        else:
            lo, lo_s = self.lower, self.lower_strict or other.lower_strict
        if self.upper is None:
            hi, hi_s = other.upper, other.upper_strict
        elif other.upper is None or self.upper < other.upper:
            hi, hi_s = self.upper, self.upper_strict
        elif other.upper < self.upper:
            hi, hi_s = other.upper, other.upper_strict
        else:
            hi, hi_s = self.upper, self.upper_strict or other.upper_strict
        if self.is_empty_bounds(lo, hi, lo_s, hi_s):
            return None
        return Interval(lo, hi, lo_s, hi_s)

    def subset_of(self, other: "Interval") -> bool:
        if self.undef or other.undef:
            return self.undef and other.undef
        return self.intersect(other) == self

    def key(self) -> tuple:
        if self.undef:
            return (-1,)
        return (0, self.lower, self.lower_strict,
                float("inf") if self.upper is None else self.upper, not self.upper_strict)

    def _render(self) -> str:
        if self.undef:
            return "[bot,bot]"
        hi = "inf" if self.upper is None else str(self.upper)
        return ("(" if self.lower_strict else "[") + f"{self.lower},{hi}" + (")" if self.upper_strict else "]")

    def __str__(self) -> str:
        return self._render()


UNDEF = Interval(undef=True)
ANY_DEFINED = Interval(0, None, False, True)

_INTERVAL_RE = re.compile(r"^\s*([\[(])\s*(\w+)\s*[,;]\s*(\w+)\s*([\])])\s*$")


def parse_interval(text: str, source: str = "<string>", line: int = 0) -> Interval:
    """Parse ``[1,2)``, ``(0,inf)`` or ``[bot,bot]``."""
    m = _INTERVAL_RE.match(text)
    if not m:
        raise ParseError(f"malformed interval {text!r}", source, line)
    lb, lo, hi, rb = m.groups()
    if lo == "bot" or hi == "bot":
        if lo != hi:
            raise ParseError(f"malformed undefined interval {text!r}", source, line)
        return UNDEF
    try:
        lo_v = int(lo)
        hi_v = None if hi in ("inf", "oo") else int(hi)
        return Interval(lo_v, hi_v, lb == "(", rb == ")" or hi_v is None)
    except ValueError as exc:
        raise ParseError(f"bad interval {text!r}: {exc}", source, line) from None


Atom = tuple  # (Clock, Interval)


def atom_str(atom: Atom) -> str:
    return f"{atom[0]} in {atom[1]}"


def canonical_guard(atoms) -> tuple:
    """Sort atoms into a canonical tuple (duplicates removed)."""
    return tuple(sorted(set(atoms), key=lambda a: (clock_key(a[0]), a[1].key())))


def guard_str(guard) -> str:
    return ", ".join(atom_str(a) for a in guard) if guard else "true"


_ATOM_RE = re.compile(r"\s*(\S+)\s+in\s+([\[(][^\])]*[\])])\s*(,|$)")


def parse_guard(text: str, source: str = "<string>", line: int = 0) -> tuple:
    text = text.strip()
    if text in ("", "true"):
        return ()
    atoms = []
    pos = 0
    while pos < len(text):
        m = _ATOM_RE.match(text, pos)
        if not m:
            raise ParseError(f"malformed constraint near {text[pos:]!r}", source, line)
        atoms.append((parse_clock(m.group(1)), parse_interval(m.group(2), source, line)))
        pos = m.end()
    return canonical_guard(atoms)


def parse_time(text: str) -> Fraction:
    """Exact rational from a decimal or ``p/q`` literal."""
    value = Fraction(text.strip())
    if value < 0:
        raise ValueError("timestamps must be non-negative")
    return value


def format_time(t: Fraction) -> str:
    if t.denominator == 1:
        return str(t.numerator)
    # print decimals when exact, else p/q
    d = t.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        from decimal import Decimal, localcontext

        with localcontext() as ctx:
            ctx.prec = 60
            return format(Decimal(t.numerator) / Decimal(t.denominator), "f")
    return f"{t.numerator}/{t.denominator}"
