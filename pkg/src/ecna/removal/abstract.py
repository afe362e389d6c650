"""Removal of the abstract predictor ``ya(b)`` and abstract recorder ``xa(b)``.

Both constructions track, per maximal abstract path (MAP), an obligation set
O and a check set H in the control state; at a call the pair belonging to
the matching return is pushed together with the original stack symbol.

Obligations are ``("lo", bound)`` and ``("up", flag, bound)`` with flag
``"live"`` (inherited from a calling MAP) or ``"first"`` (raised on the
current MAP).  Check sets are tuples:

* predictor: ``(type, is_b, eventually_b, p_inf)``
* recorder:  ``(type, is_b, interval, p_inf)``

where ``type`` is the guessed kind of the symbol read next.  A state whose
type is ``ret`` sits at the last position of its MAP; the pair it carries
must equal the one pushed by the matching call, or be empty with p_inf
when the return pops the bottom.  Such guesses are drawn from those pairs
(:class:`_Pool`), which leaves out only states that could never pop.
"""

from __future__ import annotations

import itertools

from ..automaton import BOTTOM, INTERNAL, POP, PUSH, NestedVPTA, atoms_on
from ..clocks import UNDEF, EventClock
from .common import (
    TYPES,
    Builder,
    all_bounds,
    bound_token,
    bounds_of,
    check_atoms,
    drop_clock,
    fresh_clocks,
    fresh_stack_name,
    prepare,
    split_guard,
    symbol_type,
)
from ..words import CALL, INT, RET

LIVE, FIRST = "live", "first"
_TYPE_CHAR = {CALL: "c", RET: "r", INT: "i"}


def live(O: frozenset) -> frozenset:
    return frozenset(x for x in O if x[0] == "up" and x[1] == LIVE)


def uppers(O: frozenset) -> set:
    return {x[2] for x in O if x[0] == "up"}


def obligation_bounds(O: frozenset) -> list:
    return [x[-1] for x in O]


def encode_obligations(O: frozenset) -> str:
    parts = []
    for x in O:
        if x[0] == "lo":
            parts.append(bound_token(x[1]))
        else:
            parts.append(("L" if x[1] == LIVE else "F") + bound_token(x[2]))
    return "+".join(sorted(parts)) or "0"


def well_formed(O: frozenset) -> bool:
    """At most one freshness flag per upper bound."""
    ups = [x[2] for x in O if x[0] == "up"]
    return len(ups) == len(set(ups))


class _Pool:
    """Pairs (O, H) pushed for matching returns, with listeners for new ones."""

    def __init__(self):
        self.items: list = []
        self.seen: set = set()
        self.listeners: list = []

    def add(self, O, H) -> None:
        if (O, H) in self.seen:
            return
        self.seen.add((O, H))
        self.items.append((O, H))
        for cb in list(self.listeners):
            cb(O, H)

    def on(self, cb) -> None:
        self.listeners.append(cb)
        for O, H in list(self.items):
            cb(O, H)


def _b_type(A: NestedVPTA, b: str) -> str:
    return A.alphabet.kind(b)


def _types_for(is_b: bool, b_type: str, exclude=()):
    for typ in TYPES:
        if typ in exclude or (is_b and typ != b_type):
            continue
        yield typ


# --- abstract predictor --------------------------------------------------------------------


def remove_abstract_predictor(A: NestedVPTA, b: str) -> NestedVPTA:
    z = EventClock("ya", b)
    B = prepare(A, z, ("ya",))
    if B is None:
        return drop_clock(A, z)
    return _Predictor(B, z).build()


class _Predictor:
    def __init__(self, A: NestedVPTA, z: EventClock):
        self.A, self.z, self.b = A, z, z.symbol
        self.b_type = _b_type(A, self.b)
        lows, ups = bounds_of(A, z)
        self.clocks = fresh_clocks(z, lows + ups)
        self.bad = fresh_stack_name("bad", A.stack_symbols)
        self.pool = _Pool()

    def name(self, key) -> str:
        q, O, H = key
        return f"{q}[{encode_obligations(O)}|{self.h_str(H)}]"

    @staticmethod
    def h_str(H) -> str:
        typ, isb, eb, pinf = H
        return _TYPE_CHAR[typ] + ("b" if isb else "") + ("E" if eb else "") + ("P" if pinf else "")

    def frame(self, gamma, O, H) -> str:
        return f"{gamma}[{encode_obligations(O)}|{self.h_str(H)}]"

    def check_sets(self, pinf, exclude=(), eb_values=(False, True)):
        for isb in (False, True):
            for typ in _types_for(isb, self.b_type, exclude):
                for eb in eb_values:
                    yield (typ, isb, eb, pinf)

    def abs_(self, O, H, a_isb, iv, exclude=()):
        """Solutions ``(Res, O', H')`` of the local update predicate."""
        _, _, eb, pinf = H
        eb2 = not iv.undef
        if eb != (a_isb or eb2):
            return []
        if iv.undef:
            if not a_isb and O != live(O):
                return []
            O2, res = live(O), frozenset()
        else:
            O1 = live(O) if a_isb else O
            lo, up = all_bounds(iv)
            flag = LIVE if ("up", LIVE, up) in O1 else FIRST
            O2 = frozenset(x for x in O1 if not (x[0] == "up" and x[2] == up)) | {("lo", lo), ("up", flag, up)}
            res = {lo}
            if up not in uppers(O) or (a_isb and ("up", FIRST, up) in O):
                res.add(up)
            res = frozenset(res)
        return [(res, O2, H2) for H2 in self.check_sets(pinf, exclude, (eb2,))]

    def resets(self, t, res) -> frozenset:
        return t.reset | {self.clocks[bd] for bd in res if bd in self.clocks}

    def expand(self, key) -> None:
        q, O, H = key
        typ, isb_h, eb, pinf = H
        A, bld = self.A, self.bld
        for sym in A.alphabet.symbols:
            a_isb = sym == self.b
            if a_isb != isb_h:
                continue
            for t in A.by_source.get((q, sym), ()):
                if symbol_type(t) != typ:
                    continue
                rest, iv = split_guard(t, self.z)
                guard = rest + (check_atoms(self.clocks, obligation_bounds(O)) if a_isb else ())
                if t.kind == PUSH:
                    self._push(key, t, guard, iv, a_isb)
                elif t.kind == INTERNAL:
                    for res, O2, H2 in self.abs_(O, H, a_isb, iv, exclude=(RET,)):
                        bld.emit(INTERNAL, key, t, guard, self.resets(t, res), (t.target, O2, H2))
                    if iv.undef and eb == a_isb and (a_isb or O == live(O)):
                        self.pool.on(lambda Oc, Hc, t=t, g=guard, k=key:
                                     bld.emit(INTERNAL, k, t, g, t.reset, (t.target, Oc, Hc)))
                elif t.stack != BOTTOM:
                    fr = self.frame(t.stack, O, H)
                    for res, O2, H2 in self.abs_(O, H, a_isb, iv, exclude=(RET,)):
                        bld.emit(POP, key, t, guard, self.resets(t, res), (t.target, O2, H2), fr)
                    if iv.undef and eb == a_isb and (a_isb or O == live(O)):
                        self.pool.on(lambda Oc, Hc, t=t, g=guard, k=key, fr=fr:
                                     bld.emit(POP, k, t, g, t.reset, (t.target, Oc, Hc), fr))
                else:
                    if O or not pinf:
                        continue
                    for res, O2, H2 in self.abs_(O, H, a_isb, iv, exclude=(RET,)):
                        bld.emit(POP, key, t, guard, self.resets(t, res), (t.target, O2, H2), BOTTOM)
                    if iv.undef and eb == a_isb:
                        for isb2 in (False, True):
                            if isb2 and self.b_type != RET:
                                continue
                            for eb2 in (False, True):
                                bld.emit(POP, key, t, guard, t.reset,
                                         (t.target, frozenset(), (RET, isb2, eb2, True)), BOTTOM)

    def _push(self, key, t, guard, iv, a_isb) -> None:
        q, O, H = key
        _, _, eb, pinf = H
        bld = self.bld
        for res, Or, Hr in self.abs_(O, H, a_isb, iv):
            if Hr[0] != RET:
                continue  # the matching return must read a return symbol
            fr = self.frame(t.stack, Or, Hr)
            reset = self.resets(t, res)
            self.pool.add(Or, Hr)
            bld.emit(PUSH, key, t, guard, reset, (t.target, Or, Hr), fr)
            O_in = frozenset(("up", LIVE, u) for u in uppers(Or))
            for H2 in self.check_sets(False, exclude=(RET,)):
                bld.emit(PUSH, key, t, guard, reset, (t.target, O_in, H2), fr)
        if iv.undef and eb == a_isb and pinf and (a_isb or not O):
            for H2 in self.check_sets(True, exclude=(RET,)):
                bld.emit(PUSH, key, t, guard, t.reset, (t.target, frozenset(), H2), self.bad)

    def build(self) -> NestedVPTA:
        A = self.A
        self.bld = Builder(A, self.name, lambda k: k[0])
        for H in self.check_sets(True):
            if H[0] == RET:
                self.pool.add(frozenset(), H)  # a return that pops the bottom
        init = [(q, frozenset(), H) for q in sorted(A.initial) for H in self.check_sets(True)]
        for k in init:
            self.bld.state(k)
        self.bld.run(self.expand)
        family = [(lambda k, F=F: k[0] in F) for F in A.accepting]
        family.append(lambda k: k[2][3] and (not k[2][2] or k[2][1]))

        def finite(k):
            q, O, (typ, _, eb, pinf) = k
            return q in A.finite_accepting and pinf and typ != RET and not eb and O == live(O)

        return self.bld.result(self.z, init, self.clocks.values(), family, finite, [self.bad])


# --- abstract recorder ---------------------------------------------------------------------


def remove_abstract_recorder(A: NestedVPTA, b: str) -> NestedVPTA:
    z = EventClock("xa", b)
    B = prepare(A, z, ("xa",))
    if B is None:
        return drop_clock(A, z)
    return _Recorder(B, z).build()


def consistent(O: frozenset, iv) -> bool:
    if iv.undef:
        return O == live(O)
    lo, up = all_bounds(iv)
    return ("lo", lo) in O and up in uppers(O)


def terminal(O: frozenset, iv) -> bool:
    if iv.undef:
        return O == live(O)
    lo, up = all_bounds(iv)
    return O - {("lo", lo), ("up", FIRST, up)} == live(O)


def _interval_str(iv) -> str:
    return str(iv).replace(",", ";")


class _Recorder:
    def __init__(self, A: NestedVPTA, z: EventClock):
        self.A, self.z, self.b = A, z, z.symbol
        self.b_type = _b_type(A, self.b)
        self.lows, self.ups = bounds_of(A, z)
        self.clocks = fresh_clocks(z, self.lows + self.ups)
        self.phi = sorted({iv for t in A.transitions for iv in atoms_on(t.guard, z)}, key=lambda iv: iv.key())
        self.defined = [iv for iv in self.phi if not iv.undef]
        self.bad = fresh_stack_name("bad", A.stack_symbols)
        self.pool = _Pool()
        bounds = [("lo", lo) for lo in self.lows] + [("up", up) for up in self.ups]
        self.res_choices = [frozenset(c) for r in range(len(bounds) + 1) for c in itertools.combinations(bounds, r)]

    @staticmethod
    def h_str(H) -> str:
        typ, isb, iv, pinf = H
        return _TYPE_CHAR[typ] + ("b" if isb else "") + ("P" if pinf else "") + _interval_str(iv)

    def name(self, key) -> str:
        q, O, H = key
        return f"{q}[{encode_obligations(O)}|{self.h_str(H)}]"

    def frame(self, gamma, O, H) -> str:
        return f"{gamma}[{encode_obligations(O)}|{self.h_str(H)}]"

    def check_sets(self, O, pinf, intervals, exclude=()):
        for iv in intervals:
            if not consistent(O, iv):
                continue
            for isb in (False, True):
                for typ in _types_for(isb, self.b_type, exclude):
                    yield (typ, isb, iv, pinf)

    def absp(self, O, H, a_isb, iv, exclude=()):
        """Solutions ``(Res, O', H')`` of the local update predicate."""
        pinf = H[3]
        out = []
        if a_isb:
            for res in self.res_choices:
                if any(k == "up" and ("up", LIVE, bd) in O for k, bd in res):
                    continue
                O2 = live(O) | {("lo", bd) if k == "lo" else ("up", FIRST, bd) for k, bd in res}
                if not well_formed(O2):
                    continue
                bounds = frozenset(bd for _, bd in res)
                out += [(bounds, O2, H2) for H2 in self.check_sets(O2, pinf, self.defined, exclude)]
            return out
        if iv.undef:
            if O != live(O):
                return []
            return [(frozenset(), O, H2) for H2 in self.check_sets(O, pinf, [UNDEF], exclude)]
        lo, up = all_bounds(iv)
        options = {O, O - {("lo", lo)}}
        if ("up", FIRST, up) in O:
            options |= {o - {("up", FIRST, up)} for o in list(options)}
        for O2 in sorted(options, key=encode_obligations):
            out += [(frozenset(), O2, H2) for H2 in self.check_sets(O2, pinf, self.defined, exclude)]
        return out

    def resets(self, t, res) -> frozenset:
        return t.reset | {self.clocks[bd] for bd in res if bd in self.clocks}

    def expand(self, key) -> None:
        q, O, H = key
        typ, isb_h, iv_h, pinf = H
        A, bld = self.A, self.bld
        for sym in A.alphabet.symbols:
            a_isb = sym == self.b
            if a_isb != isb_h:
                continue
            for t in A.by_source.get((q, sym), ()):
                if symbol_type(t) != typ:
                    continue
                rest, iv = split_guard(t, self.z)
                if iv != iv_h:
                    continue
                guard = rest + (() if iv.undef else check_atoms(self.clocks, all_bounds(iv)))
                is_terminal = terminal(O, iv)
                if t.kind == PUSH:
                    for res, Or, Hr in self.absp(O, H, a_isb, iv):
                        if Hr[0] != RET:
                            continue
                        fr = self.frame(t.stack, Or, Hr)
                        reset = self.resets(t, res)
                        self.pool.add(Or, Hr)
                        bld.emit(PUSH, key, t, guard, reset, (t.target, Or, Hr), fr)
                        O_in = frozenset(("up", LIVE, u) for u in uppers(Or))
                        for H2 in self.check_sets(O_in, False, self.phi, exclude=(RET,)):
                            bld.emit(PUSH, key, t, guard, reset, (t.target, O_in, H2), fr)
                    if is_terminal and pinf:
                        for H2 in self.check_sets(frozenset(), True, self.phi, exclude=(RET,)):
                            bld.emit(PUSH, key, t, guard, t.reset, (t.target, frozenset(), H2), self.bad)
                elif t.kind == INTERNAL:
                    for res, O2, H2 in self.absp(O, H, a_isb, iv, exclude=(RET,)):
                        bld.emit(INTERNAL, key, t, guard, self.resets(t, res), (t.target, O2, H2))
                    if is_terminal:
                        self.pool.on(lambda Oc, Hc, t=t, g=guard, k=key:
                                     bld.emit(INTERNAL, k, t, g, t.reset, (t.target, Oc, Hc)))
                elif t.stack != BOTTOM:
                    fr = self.frame(t.stack, O, H)
                    for res, O2, H2 in self.absp(O, H, a_isb, iv, exclude=(RET,)):
                        bld.emit(POP, key, t, guard, self.resets(t, res), (t.target, O2, H2), fr)
                    if is_terminal:
                        self.pool.on(lambda Oc, Hc, t=t, g=guard, k=key, fr=fr:
                                     bld.emit(POP, k, t, g, t.reset, (t.target, Oc, Hc), fr))
                else:
                    if not iv.undef or not pinf or O:
                        continue
                    for res, O2, H2 in self.absp(O, H, a_isb, iv, exclude=(RET,)):
                        bld.emit(POP, key, t, guard, self.resets(t, res), (t.target, O2, H2), BOTTOM)
                    for H2 in self.check_sets(frozenset(), True, [UNDEF]):
                        if H2[0] == RET:
                            bld.emit(POP, key, t, guard, t.reset, (t.target, frozenset(), H2), BOTTOM)

    def build(self) -> NestedVPTA:
        A = self.A
        self.bld = Builder(A, self.name, lambda k: k[0])
        for H in self.check_sets(frozenset(), True, [UNDEF]):
            if H[0] == RET:
                self.pool.add(frozenset(), H)  # a return that pops the bottom
        init = [(q, frozenset(), H) for q in sorted(A.initial)
                for H in self.check_sets(frozenset(), True, [UNDEF])]
        for k in init:
            self.bld.state(k)
        self.bld.run(self.expand)
        family = [(lambda k, F=F: k[0] in F) for F in A.accepting]
        family.append(lambda k: k[2][3])
        for lo in self.lows:
            family.append(lambda k, lo=lo: k[2][3] and (
                k[2][1] or (not k[2][2].undef and k[2][2].lower_bound == lo) or ("lo", lo) not in k[1]))
        for up in self.ups:
            family.append(lambda k, up=up: k[2][3] and (
                k[2][1] or (not k[2][2].undef and k[2][2].upper_bound == up) or ("up", FIRST, up) not in k[1]))

        def finite(k):
            q, _, (typ, _, _, pinf) = k
            return q in A.finite_accepting and pinf and typ != RET

        return self.bld.result(self.z, init, self.clocks.values(), family, finite, [self.bad])
