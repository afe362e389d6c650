"""Union, intersection, the untimed/timed homomorphisms, finite-word
determinization, complementation and inclusion."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .automaton import BOTTOM, INTERNAL, POP, PUSH, NestedVPTA, Transition, check_valid, constants
from .clocks import ANY_DEFINED, clock_key
from .errors import AlphabetMismatch, NotECNA, RegionClockMismatch
from .regions import (
    all_regions,
    canonical_intervals,
    concretize,
    letter_name,
    parse_letter,
)
from .words import PushdownAlphabet, TimedWord


def _same_alphabet(A: NestedVPTA, B: NestedVPTA) -> None:
    if A.alphabet != B.alphabet:
        raise AlphabetMismatch("automata use different pushdown alphabets")


def _tag(prefix: str, name: str) -> str:
    return f"{prefix}.{name}"


def union(A: NestedVPTA, B: NestedVPTA) -> NestedVPTA:
    """Disjoint sum; states and stack symbols are prefixed with ``1.`` and ``2.``."""
    _same_alphabet(A, B)

    def lift(X: NestedVPTA, p: str):
        out = []
        for t in X.transitions:
            g = t.stack if t.stack in (None, BOTTOM) else _tag(p, t.stack)
            out.append(replace(t, source=_tag(p, t.source), target=_tag(p, t.target), stack=g))
        return out

    k = max(len(A.accepting), len(B.accepting))
    family = []
    for j in range(k):
        fa = A.accepting[j] if j < len(A.accepting) else A.states
        fb = B.accepting[j] if j < len(B.accepting) else B.states
        family.append(frozenset(_tag("1", q) for q in fa) | frozenset(_tag("2", q) for q in fb))
    origin = {_tag("1", q): A.base(q) for q in A.states}
    origin.update({_tag("2", q): B.base(q) for q in B.states})
    return NestedVPTA(
        alphabet=A.alphabet,
        states=frozenset(_tag("1", q) for q in A.states) | frozenset(_tag("2", q) for q in B.states),
        initial=frozenset(_tag("1", q) for q in A.initial) | frozenset(_tag("2", q) for q in B.initial),
        event_clocks=A.event_clocks | B.event_clocks,
        standard_clocks=A.standard_clocks | B.standard_clocks,
        stack_symbols=frozenset(_tag("1", g) for g in A.stack_symbols) | frozenset(_tag("2", g) for g in B.stack_symbols),
        transitions=tuple(lift(A, "1") + lift(B, "2")),
        accepting=tuple(family),
        finite_accepting=frozenset(_tag("1", q) for q in A.finite_accepting)
        | frozenset(_tag("2", q) for q in B.finite_accepting),
        origin=origin,
        constant_floor=max(A.constant_floor, B.constant_floor),
    )


def pair_name(*parts) -> str:
    return "(" + ";".join(str(p) for p in parts) + ")"


def intersection(A: NestedVPTA, B: NestedVPTA) -> NestedVPTA:
    """Synchronized product restricted to reachable states.

    States are ``(q;q';f)``.  The flag switches from 0 to 1 after a state of
    A's first Büchi set and back after one of B's first set; the first result
    component is ``Q × F'_1 × {1}``, and any further components of either
    side are lifted unchanged.  Standard clocks of B that clash with A's are
    renamed with a ``2.`` prefix.
    """
    _same_alphabet(A, B)
    clash = A.standard_clocks & B.standard_clocks
    ren = {z: _tag("2", z) for z in clash}
    F1, G1 = A.accepting[0], B.accepting[0]

    def flag_next(q, q2, f):
        if f == 0 and q in F1:
            return 1
        if f == 1 and q2 in G1:
            return 0
        return f

    states, trans, stack_syms = {}, [], set()
    work = deque()
    for q in sorted(A.initial):
        for q2 in sorted(B.initial):
            key = (q, q2, 0)
            states[key] = pair_name(*key)
            work.append(key)
    while work:
        q, q2, f = key = work.popleft()
        nf = flag_next(q, q2, f)
        for sym in A.alphabet.symbols:
            for t in A.by_source.get((q, sym), ()):
                for u in B.by_source.get((q2, sym), ()):
                    if t.kind == POP and (t.stack == BOTTOM) != (u.stack == BOTTOM):
                        continue
                    tgt = (t.target, u.target, nf)
                    if tgt not in states:
                        states[tgt] = pair_name(*tgt)
                        work.append(tgt)
                    if t.kind == INTERNAL:
                        g = None
                    elif t.kind == POP and t.stack == BOTTOM:
                        g = BOTTOM
                    else:
                        g = pair_name(t.stack, u.stack)
                        if t.kind == PUSH:
                            stack_syms.add(g)
                    guard = t.guard + tuple((ren.get(z, z), iv) for z, iv in u.guard)
                    reset = t.reset | {ren.get(z, z) for z in u.reset}
                    trans.append(Transition(t.kind, states[key], sym, guard, reset, states[tgt], g, (t.tag, u.tag)))
    # pops of pairs never pushed are harmless but useless; drop them
    trans = [t for t in trans if t.kind != POP or t.stack == BOTTOM or t.stack in stack_syms]
    family = [frozenset(n for (q, q2, f), n in states.items() if q2 in G1 and f == 1)]
    family += [frozenset(n for (q, q2, f), n in states.items() if q in F) for F in A.accepting[1:]]
    family += [frozenset(n for (q, q2, f), n in states.items() if q2 in G) for G in B.accepting[1:]]
    origin = {n: pair_name(A.base(q), B.base(q2)) for (q, q2, f), n in states.items()}
    return NestedVPTA(
        alphabet=A.alphabet,
        states=frozenset(states.values()),
        initial=frozenset(n for (q, q2, f), n in states.items() if q in A.initial and q2 in B.initial and f == 0),
        event_clocks=A.event_clocks | B.event_clocks,
        standard_clocks=A.standard_clocks | {ren.get(z, z) for z in B.standard_clocks},
        stack_symbols=frozenset(stack_syms),
        transitions=tuple(trans),
        accepting=tuple(family),
        finite_accepting=frozenset(
            n for (q, q2, f), n in states.items() if q in A.finite_accepting and q2 in B.finite_accepting),
        origin=origin,
    )


# --- homomorphisms ---------------------------------------------------------------


def _require_ecna(A: NestedVPTA) -> None:
    if A.standard_clocks:
        raise NotECNA("automaton has standard clocks")


def untimed_hom(A: NestedVPTA, clocks: Optional[Iterable] = None,
                consts: Optional[Iterable[int]] = None) -> NestedVPTA:
    """VPA over the interval alphabet: one transition per region inside each guard.

    ``clocks`` and ``consts`` default to A's event clocks and guard constants;
    passing supersets gives a common alphabet for two automata.
    """
    _require_ecna(A)
    check_valid(A)
    clocks = sorted(set(A.event_clocks if clocks is None else clocks), key=clock_key)
    consts = sorted(set(constants(A) if consts is None else consts))
    missing = set(A.event_clocks) - set(clocks)
    if missing:
        raise RegionClockMismatch(f"region clocks miss {sorted(map(str, missing))}")
    intv = canonical_intervals(consts)
    alphabet = _interval_alphabet(A.alphabet, clocks, consts)
    out = []
    for t in A.transitions:
        per_clock = []
        for z in clocks:
            ivs = [iv for iv in intv if all(iv.subset_of(g) for c, g in t.guard if c == z)]
            per_clock.append([(z, iv) for iv in ivs])
        for region in _product(per_clock):
            out.append(replace(t, symbol=letter_name(t.symbol, region), guard=()))
    return replace(A, alphabet=alphabet, event_clocks=frozenset(), transitions=tuple(out))


def _product(lists):
    if not lists:
        yield ()
        return
    import itertools

    for combo in itertools.product(*lists):
        yield tuple(combo)


def _interval_alphabet(alphabet: PushdownAlphabet, clocks, consts) -> PushdownAlphabet:
    regs = all_regions(clocks, consts)

    def lift(symbols):
        return frozenset(letter_name(s, rg) for s in symbols for rg in regs)

    return PushdownAlphabet(lift(alphabet.calls), lift(alphabet.returns), lift(alphabet.internals))


def timed_hom(B: NestedVPTA, clocks: Iterable, alphabet: Optional[PushdownAlphabet] = None) -> NestedVPTA:
    """ECNA reading the base symbols, guarded by the region of each letter.

    Each produced transition carries its interval letter as ``tag``.
    """
    clocks = frozenset(clocks)
    out = []
    classes = {"call": set(), "ret": set(), "int": set()}
    for letter in B.alphabet.symbols:
        sym, region = parse_letter(letter)
        if {z for z, _ in region} != clocks:
            raise RegionClockMismatch(f"letter {letter} does not range over the given clocks")
        classes[B.alphabet.kind(letter)].add(sym)
    for t in B.transitions:
        sym, region = parse_letter(t.symbol)
        out.append(replace(t, symbol=sym, guard=t.guard + region, tag=t.symbol))
    if alphabet is None:
        alphabet = PushdownAlphabet(frozenset(classes["call"]), frozenset(classes["ret"]), frozenset(classes["int"]))
    return replace(B, alphabet=alphabet, event_clocks=clocks, transitions=tuple(out))


# --- finite-word determinization ---------------------------------------------------


def determinize_vpa_finite(B: NestedVPTA) -> NestedVPTA:
    """Complete deterministic VPA with the same finite-word language.

    A state is a pair ``(S, R)``: S relates each state at the start of the
    current nesting level to the states reachable from it, R is the set of
    currently reachable states.  A call pushes ``(S, R, call letter)`` and
    restarts S with the identity.
    """
    if B.event_clocks or B.standard_clocks:
        raise NotECNA("determinization expects a clockless automaton")
    symbols = B.alphabet.symbols
    post: dict = {}
    for t in B.transitions:
        post.setdefault((t.source, t.symbol, t.kind), []).append(t)
    push_targets: dict = {}
    for t in B.transitions:
        if t.kind == PUSH:
            push_targets.setdefault(t.symbol, set()).add(t.target)

    def internal_step(S, R, a):
        S2 = frozenset((p, t.target) for p, q in S for t in post.get((q, a, INTERNAL), ()))
        R2 = frozenset(t.target for q in R for t in post.get((q, a, INTERNAL), ()))
        return S2, R2

    def call_step(S, R, c):
        ident = frozenset((q, q) for q in push_targets.get(c, ()))
        R2 = frozenset(t.target for q in R for t in post.get((q, c, PUSH), ()))
        return ident, R2

    def bottom_return(S, R, r):
        S2 = frozenset((p, t.target) for p, q in S for t in post.get((q, r, POP), ()) if t.stack == BOTTOM)
        R2 = frozenset(t.target for q in R for t in post.get((q, r, POP), ()) if t.stack == BOTTOM)
        return S2, R2

    def matched_return(Sp, Rp, c, S, r):
        # summaries of the inner level: q1 (push target) ~> q2
        inner: dict = {}
        for q1, q2 in S:
            inner.setdefault(q1, set()).add(q2)
        pops: dict = {}
        for q2s in inner.values():
            for q2 in q2s:
                if q2 not in pops:
                    pops[q2] = [t for t in post.get((q2, r, POP), ()) if t.stack != BOTTOM]

        def through(q):
            out = set()
            for tc in post.get((q, c, PUSH), ()):
                for q2 in inner.get(tc.target, ()):
                    for tr in pops[q2]:
                        if tr.stack == tc.stack:
                            out.add(tr.target)
            return out

        cache: dict = {}

        def thr(q):
            if q not in cache:
                cache[q] = through(q)
            return cache[q]

        S2 = frozenset((p, q3) for p, q in Sp for q3 in thr(q))
        R2 = frozenset(q3 for q in Rp for q3 in thr(q))
        return S2, R2

    ids: dict = {}
    gids: dict = {}
    frames: list = []
    work: deque = deque()
    pairs: deque = deque()
    trans = []

    def add_state(state):
        if state not in ids:
            ids[state] = f"d{len(ids)}"
            work.append(state)
            pairs.extend((state, f) for f in frames)
        return ids[state]

    def add_frame(frame):
        if frame not in gids:
            gids[frame] = f"g{len(gids)}"
            frames.append(frame)
            pairs.extend((s, frame) for s in list(ids))
        return gids[frame]

    start = (frozenset((q, q) for q in B.states), frozenset(B.initial))
    add_state(start)
    rets = sorted(B.alphabet.returns)
    while work or pairs:
        if work:
            st = work.popleft()
            S, R = st
            src = ids[st]
            for a in symbols:
                kind = B.alphabet.kind(a)
                if kind == "int":
                    tgt = add_state(internal_step(S, R, a))
                    trans.append(Transition(INTERNAL, src, a, (), frozenset(), tgt))
                elif kind == "call":
                    g = add_frame((S, R, a))
                    tgt = add_state(call_step(S, R, a))
                    trans.append(Transition(PUSH, src, a, (), frozenset(), tgt, g))
                else:
                    tgt = add_state(bottom_return(S, R, a))
                    trans.append(Transition(POP, src, a, (), frozenset(), tgt, BOTTOM))
        else:
            st, frame = pairs.popleft()
            Sp, Rp, c = frame
            for r in rets:
                tgt = add_state(matched_return(Sp, Rp, c, st[0], r))
                trans.append(Transition(POP, ids[st], r, (), frozenset(), tgt, gids[frame]))
    finals = frozenset(n for (S, R), n in ids.items() if R & B.finite_accepting)
    return NestedVPTA(
        alphabet=B.alphabet,
        states=frozenset(ids.values()),
        initial=frozenset({ids[start]}),
        event_clocks=frozenset(),
        standard_clocks=frozenset(),
        stack_symbols=frozenset(gids.values()),
        transitions=tuple(trans),
        accepting=(finals,),
        finite_accepting=finals,
    )


def complement_vpa_finite(B: NestedVPTA) -> NestedVPTA:
    """Finite-word complement of a clockless VPA (determinize, then flip finals)."""
    D = determinize_vpa_finite(B)
    finals = D.states - D.finite_accepting
    return replace(D, accepting=(finals,), finite_accepting=finals)


def complement_finite(A: NestedVPTA, clocks: Optional[Iterable] = None,
                      consts: Optional[Iterable[int]] = None) -> NestedVPTA:
    """ECNA accepting exactly the finite timed words A rejects.

    Only the finite-word acceptance is meaningful: the Büchi family of the
    result is set to its finite-accepting states.
    """
    _require_ecna(A)
    clocks = sorted(set(A.event_clocks if clocks is None else clocks), key=clock_key)
    U = untimed_hom(A, clocks, consts)
    return timed_hom(complement_vpa_finite(U), clocks, A.alphabet)


@dataclass(frozen=True)
class InclusionResult:
    included: bool
    counterexample: Optional[tuple] = None  # interval letters
    witness: Optional[TimedWord] = None  # a timed word in tw(counterexample), if realizable

    def __bool__(self) -> bool:
        return self.included


def joint_domain(A1: NestedVPTA, A2: NestedVPTA) -> tuple:
    clocks = sorted(A1.event_clocks | A2.event_clocks, key=clock_key)
    consts = sorted(constants(A1) | constants(A2))
    return clocks, consts


def _defined_only(E: NestedVPTA) -> NestedVPTA:
    """Coarsen every guard to "undefined" or "defined"."""
    out = [replace(t, guard=tuple((z, iv if iv.undef else ANY_DEFINED) for z, iv in t.guard))
           for t in E.transitions]
    return replace(E, transitions=tuple(out))


def include_finite(A1: NestedVPTA, A2: NestedVPTA) -> InclusionResult:
    """Finite-word inclusion of the timed languages.

    Both automata are mapped to VPAs over the same interval alphabet and the
    product of the first with the complement of the second is searched.  A
    symbolic counterexample may denote no timed word at all, so the search
    is refined in two steps: first by the pattern of defined clocks (cheap,
    the removal constructions then need no fresh clocks), then, only if the
    witness is still not realizable, exactly through clock removal.
    """
    from .emptiness import finite_emptiness, finite_vpa_witness

    _same_alphabet(A1, A2)
    _require_ecna(A1)
    _require_ecna(A2)
    clocks, consts = joint_domain(A1, A2)
    U1 = untimed_hom(A1, clocks, consts)
    N2 = complement_vpa_finite(untimed_hom(A2, clocks, consts))
    C = intersection(U1, N2)
    path = finite_vpa_witness(C)
    if path is None:
        return InclusionResult(True)
    letters = tuple(t.symbol for t in path)
    w = concretize(A1.alphabet, letters)
    if w is not None:
        return InclusionResult(False, letters, w)
    E = timed_hom(C, clocks, A1.alphabet)
    for candidate in (_defined_only(E), E):
        run = finite_emptiness(candidate)
        if run is None:
            return InclusionResult(True)
        letters = tuple(t.tag[0] for t in run)  # region abstraction tags are (letter, region)
        w = concretize(A1.alphabet, letters)
        if w is not None:
            return InclusionResult(False, letters, w)
    raise AssertionError("clock removal produced an unrealizable witness")
