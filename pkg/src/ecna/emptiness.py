"""Emptiness of nested VPTA: clock regions, degeneralization and summary saturation."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .automaton import (
    BOTTOM,
    INTERNAL,
    POP,
    PUSH,
    NestedVPTA,
    Transition,
    check_valid,
    clock_constants,
)
from .errors import HasEventClocks

TICK = "_tick"

# --- classical clock regions ----------------------------------------------------------


@dataclass(frozen=True)
class ClockRegion:
    """Region over clocks ``0..n-1``.

    ``ints[k]`` is the integer part of clock k, or -1 when the clock is above
    its maximal constant.  ``blocks[0]`` lists the clocks with zero fractional
    part; the following blocks are non-empty and ordered by increasing
    fractional part.  Clocks above their constant appear in no block.
    """

    ints: tuple
    blocks: tuple

    def render(self, names: list) -> str:
        parts = []
        zero = set(self.blocks[0])
        for k, name in enumerate(names):
            n = self.ints[k]
            if n < 0:
                parts.append(f"{name}>max")
            elif k in zero:
                parts.append(f"{name}={n}")
            else:
                parts.append(f"{name}~{n}+")
        order = "<".join("{" + ",".join(names[k] for k in b) + "}" for b in self.blocks[1:])
        return "|".join(parts) + (f"|frac:{order}" if len(self.blocks) > 2 else "")


def _canon(ints, blocks) -> ClockRegion:
    zero = tuple(sorted(blocks[0]))
    rest = tuple(tuple(sorted(b)) for b in blocks[1:] if b)
    return ClockRegion(tuple(ints), (zero,) + rest)


def initial_region(n: int) -> ClockRegion:
    return ClockRegion((0,) * n, (tuple(range(n)),))


def time_successor(rg: ClockRegion, maxc: tuple) -> Optional[ClockRegion]:
    """The next region reached by letting time elapse, or None if rg is unbounded."""
    ints = list(rg.ints)
    zero = rg.blocks[0]
    if zero:
        stay = []
        for k in zero:
            if ints[k] == maxc[k]:
                ints[k] = -1
            else:
                stay.append(k)
        return _canon(ints, ((), tuple(stay)) + rg.blocks[1:])
    if len(rg.blocks) == 1:
        return None
    last = rg.blocks[-1]
    for k in last:
        ints[k] += 1
    return _canon(ints, (last,) + rg.blocks[1:-1])


def time_closure(rg: ClockRegion, maxc: tuple) -> list:
    out = [rg]
    while True:
        nxt = time_successor(out[-1], maxc)
        if nxt is None or nxt == out[-1]:
            return out
        out.append(nxt)


def region_satisfies(rg: ClockRegion, k: int, iv, maxc: tuple) -> bool:
    n = rg.ints[k]
    if n < 0:
        return iv.upper is None
    if k in rg.blocks[0]:
        return iv.contains(n)
    return iv.lower <= n and (iv.upper is None or iv.upper >= n + 1)


def reset_region(rg: ClockRegion, ks: Iterable[int]) -> ClockRegion:
    ks = set(ks)
    if not ks:
        return rg
    ints = [0 if k in ks else v for k, v in enumerate(rg.ints)]
    blocks = [tuple(k for k in b if k not in ks) for b in rg.blocks]
    blocks[0] = tuple(blocks[0]) + tuple(ks)
    return _canon(ints, blocks)


def all_clock_regions(maxc: tuple) -> list:
    """Every region reachable from the zero valuation by time elapse and resets."""
    n = len(maxc)
    start = initial_region(n)
    seen = {start}
    work = [start]
    subsets = [frozenset(k for k in range(n) if m >> k & 1) for m in range(1 << n)]
    while work:
        rg = work.pop()
        for nxt in [time_successor(rg, maxc)] + [reset_region(rg, s) for s in subsets]:
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                work.append(nxt)
    return sorted(seen, key=lambda r: (r.ints, r.blocks))


def region_abstraction(A: NestedVPTA, divergence: bool = False) -> NestedVPTA:
    """Clockless VPA over (state, region) pairs, built from the initial states.

    With ``divergence`` an extra clock with constant 1 is reset whenever it
    reaches 1; the states entered by such a reset form an additional Büchi
    component, so accepting runs of the result let time diverge.
    """
    if A.event_clocks:
        raise HasEventClocks("remove event clocks before building regions")
    check_valid(A)
    names = sorted(A.standard_clocks)
    consts = clock_constants(A)
    maxc = [consts.get(z, 0) for z in names]
    if divergence:
        names.append(TICK)
        maxc.append(1)
    maxc = tuple(maxc)
    index = {z: k for k, z in enumerate(names)}
    tick = index.get(TICK) if divergence else None
    guards = {}
    for t in A.transitions:
        guards[t] = [(index[z], iv) for z, iv in t.guard]
    start_rg = initial_region(len(names))
    states: dict = {}
    regions_of: dict = {}
    work = deque()

    def name(key):
        if key not in states:
            q, rg, bit = key
            states[key] = f"({q};{rg.render(names)}" + (";T)" if bit else ")")
            regions_of[states[key]] = rg
            work.append(key)
        return states[key]

    for q in sorted(A.initial):
        name((q, start_rg, 0))
    trans = []
    closure_cache: dict = {}
    while work:
        key = work.popleft()
        q, rg, _ = key
        src = states[key]
        if rg not in closure_cache:
            closure_cache[rg] = time_closure(rg, maxc)
        for rg2 in closure_cache[rg]:
            bit = 0
            extra = []
            if tick is not None and rg2.ints[tick] != 0:  # at least one time unit since the last mark
                bit = 1
                extra = [tick]
            for sym in A.alphabet.symbols:
                for t in A.by_source.get((q, sym), ()):
                    if all(region_satisfies(rg2, k, iv, maxc) for k, iv in guards[t]):
                        rg3 = reset_region(rg2, [index[z] for z in t.reset] + extra)
                        tgt = name((t.target, rg3, bit))
                        trans.append(Transition(t.kind, src, sym, (), frozenset(), tgt, t.stack,
                                                (t.tag, rg2.render(names))))
    family = [frozenset(n for (q, rg, b), n in states.items() if q in F) for F in A.accepting]
    if divergence:
        family.append(frozenset(n for (q, rg, b), n in states.items() if b))
    origin = {n: A.base(q) for (q, rg, b), n in states.items()}
    return NestedVPTA(
        alphabet=A.alphabet,
        states=frozenset(states.values()),
        initial=frozenset(states[(q, start_rg, 0)] for q in A.initial),
        event_clocks=frozenset(),
        standard_clocks=frozenset(),
        stack_symbols=A.stack_symbols,
        transitions=tuple(trans),
        accepting=tuple(family),
        finite_accepting=frozenset(n for (q, rg, b), n in states.items() if q in A.finite_accepting),
        origin=origin,
    )


def degeneralize(B: NestedVPTA) -> NestedVPTA:
    """Single Büchi set via a round-robin counter over the components.

    The counter advances when the current state belongs to the component it
    waits for; accepting states are those of the first component with
    counter 0.  Only states reachable in the control graph are built.
    """
    if B.event_clocks or B.standard_clocks:
        raise HasEventClocks("degeneralization expects a clockless automaton")
    comps = B.accepting
    k = len(comps)
    states: dict = {}
    work = deque()

    def name(key):
        if key not in states:
            states[key] = f"({key[0]};{key[1]})"
            work.append(key)
        return states[key]

    for q in sorted(B.initial):
        name((q, 0))
    trans = []
    while work:
        q, c = key = work.popleft()
        nc = (c + 1) % k if q in comps[c] else c
        for sym in B.alphabet.symbols:
            for t in B.by_source.get((q, sym), ()):
                trans.append(replace(t, source=states[key], target=name((t.target, nc))))
    acc = frozenset(n for (q, c), n in states.items() if c == 0 and q in comps[0])
    return NestedVPTA(
        alphabet=B.alphabet,
        states=frozenset(states.values()),
        initial=frozenset(states[(q, 0)] for q in B.initial),
        event_clocks=frozenset(),
        standard_clocks=frozenset(),
        stack_symbols=B.stack_symbols,
        transitions=tuple(trans),
        accepting=(acc,),
        finite_accepting=frozenset(n for (q, c), n in states.items() if q in B.finite_accepting),
        origin={n: B.base(q) for (q, c), n in states.items()},
    )


# --- summary saturation ------------------------------------------------------------------


class _Graph:
    """Integer-indexed view of a clockless automaton."""

    def __init__(self, B: NestedVPTA, accepting: Optional[frozenset] = None):
        self.B = B
        self.names = sorted(B.states)
        idx = {q: k for k, q in enumerate(self.names)}
        n = len(self.names)
        self.trans = list(B.transitions)
        self.internal = [[] for _ in range(n)]
        self.push = [[] for _ in range(n)]
        self.pop = [dict() for _ in range(n)]  # gamma -> [(t, target)]
        self.pop_bottom = [[] for _ in range(n)]
        for ti, t in enumerate(self.trans):
            s, d = idx[t.source], idx[t.target]
            if t.kind == INTERNAL:
                self.internal[s].append((ti, d))
            elif t.kind == PUSH:
                self.push[s].append((ti, t.stack, d))
            elif t.stack == BOTTOM:
                self.pop_bottom[s].append((ti, d))
            else:
                self.pop[s].setdefault(t.stack, []).append((ti, d))
        acc = B.accepting[0] if accepting is None else accepting
        self.acc = [1 if q in acc else 0 for q in self.names]
        self.final = [q in B.finite_accepting for q in self.names]
        self.initial = sorted(idx[q] for q in B.initial)
        self.n = n


class _Saturation:
    """Well-matched reachability facts ``(entry, state, mask)`` and summaries.

    A fact states that ``state`` is reachable from ``entry`` by a well-matched
    path; ``mask`` is 1 when the path (endpoints included) visits an accepting
    state.  A summary ``(call_state, return_state, mask)`` stands for a push,
    a well-matched segment and the matching pop; its mask covers the states
    strictly between the push and the pop.
    """

    def __init__(self, g: _Graph, seed: Optional[int] = None):
        self.g = g
        self.rng = random.Random(seed) if seed is not None else None
        self.facts: dict = {}  # (e, s, m) -> derivation
        self.by_state: dict = {}  # s -> set of (e, m)
        self.by_entry: dict = {}  # e -> set of (s, m)
        self.callers: dict = {}  # e -> set of (call_state, gamma, push_ti)
        self.summaries: dict = {}  # (sc, sr, m) -> (push_ti, inner_fact, pop_ti)
        self.sum_from: dict = {}  # sc -> list of (sr, m)
        self.work: list = []

    # worklist -------------------------------------------------------------
    def _take(self):
        if self.rng is None:
            return self.work.pop()
        k = self.rng.randrange(len(self.work))
        self.work[k], self.work[-1] = self.work[-1], self.work[k]
        return self.work.pop()

    def _fact(self, e, s, m, why):
        key = (e, s, m)
        if key in self.facts:
            return
        self.facts[key] = why
        self.by_state.setdefault(s, set()).add((e, m))
        self.by_entry.setdefault(e, set()).add((s, m))
        self.work.append(("fact", key))

    def _summary(self, sc, sr, m, why):
        key = (sc, sr, m)
        if key in self.summaries:
            return
        self.summaries[key] = why
        self.sum_from.setdefault(sc, []).append((sr, m))
        self.work.append(("sum", key))

    def enter(self, e):
        self._fact(e, e, self.g.acc[e], ("start",))

    def run(self, sources):
        """Saturate for the pushes leaving ``sources`` (the control-reachable states)."""
        g = self.g
        for s in sources:
            for ti, gamma, d in g.push[s]:
                self.callers.setdefault(d, set()).add((s, gamma, ti))
        entries = sorted(self.callers)
        if self.rng is not None:
            self.rng.shuffle(entries)
        for e in entries:
            self.enter(e)
        while self.work:
            kind, key = self._take()
            if kind == "fact":
                e, s, m = key
                for ti, d in g.internal[s]:
                    self._fact(e, d, m | g.acc[d], ("int", key, ti))
                for sr, m2 in list(self.sum_from.get(s, ())):
                    self._fact(e, sr, m | m2 | g.acc[sr], ("sum", key, (s, sr, m2)))
                for gamma in g.pop[s]:
                    for reg in list(self.callers.get(e, ())):
                        if reg[1] == gamma:
                            self._close_call(reg, e, s, m)
            else:
                sc, sr, m2 = key
                for e, m in list(self.by_state.get(sc, ())):
                    self._fact(e, sr, m | m2 | self.g.acc[sr], ("sum", (e, sc, m), key))

    def _close_call(self, reg, e, s, m):
        sc, gamma, push_ti = reg
        for pop_ti, d in self.g.pop[s].get(gamma, ()):
            self._summary(sc, d, m, (push_ti, (e, s, m), pop_ti))

    # witness expansion -------------------------------------------------------
    def expand_fact(self, key) -> list:
        """Transition indices along the derivation of a fact."""
        out: list = []
        stack = [("fact", key)]
        while stack:
            kind, item = stack.pop()
            if kind == "t":
                out.append(item)
                continue
            if kind == "sum":
                push_ti, inner, pop_ti = self.summaries[item]
                stack.append(("t", pop_ti))
                stack.append(("fact", inner))
                stack.append(("t", push_ti))
                continue
            why = self.facts[item]
            if why[0] == "start":
                continue
            if why[0] == "int":
                stack.append(("t", why[2]))
                stack.append(("fact", why[1]))
            else:
                stack.append(("sum", why[2]))
                stack.append(("fact", why[1]))
        return out

    def expand_summary(self, key) -> list:
        push_ti, inner, pop_ti = self.summaries[key]
        return [push_ti] + self.expand_fact(inner) + [pop_ti]


def _control_reachable(g: _Graph) -> set:
    seen = set(g.initial)
    work = list(g.initial)
    while work:
        s = work.pop()
        nxt = [d for _, d in g.internal[s]] + [d for _, _, d in g.push[s]] + [d for _, d in g.pop_bottom[s]]
        nxt += [d for lst in g.pop[s].values() for _, d in lst]
        for d in nxt:
            if d not in seen:
                seen.add(d)
                work.append(d)
    return seen


def _top_graph(g: _Graph, sat: _Saturation, finite: bool):
    """Edges of the summarized graph over nodes ``(state, mode)``.

    Mode 0: the stack holds only the bottom; mode 1: unmatched calls are
    pending, so pops of the bottom are no longer possible.  Each edge is
    ``(target, accepting, step)`` where step describes how to expand it.
    """

    def edges(node):
        s, mode = node
        out = []
        for ti, d in g.internal[s]:
            out.append(((d, mode), g.acc[d], ("t", ti)))
        for sr, m2 in sat.sum_from.get(s, ()):
            out.append(((sr, mode), m2 | g.acc[sr], ("sum", (s, sr, m2))))
        for ti, _, d in g.push[s]:
            out.append(((d, 1), g.acc[d], ("t", ti)))
        if mode == 0:
            for ti, d in g.pop_bottom[s]:
                out.append(((d, 0), g.acc[d], ("t", ti)))
        return out

    return edges


def _steps_to_transitions(sat: _Saturation, steps) -> list:
    out = []
    for kind, item in steps:
        if kind == "t":
            out.append(item)
        else:
            out.extend(sat.expand_summary(item))
    return [sat.g.trans[ti] for ti in out]


def _saturate(B: NestedVPTA, seed: Optional[int]) -> tuple:
    g = _Graph(B)
    sat = _Saturation(g, seed)
    sat.run(sorted(_control_reachable(g)))
    return g, sat


def _bfs(start_nodes, edges, goal, allowed=None):
    """Shortest path (list of steps) from any start node to a node satisfying ``goal``."""
    parent = {n: None for n in start_nodes}
    queue = deque(start_nodes)
    while queue:
        node = queue.popleft()
        if goal(node):
            steps = []
            while parent[node] is not None:
                prev, step = parent[node]
                steps.append(step)
                node = prev
            return steps[::-1], node
        for tgt, _, step in edges(node):
            if allowed is not None and tgt not in allowed:
                continue
            if tgt not in parent:
                parent[tgt] = (node, step)
                queue.append(tgt)
    return None


def finite_vpa_witness(B: NestedVPTA, seed: Optional[int] = None) -> Optional[list]:
    """Transitions of a finite run ending in a finite-accepting state, or None."""
    g, sat = _saturate(B, seed)
    edges = _top_graph(g, sat, finite=True)
    found = _bfs([(s, 0) for s in g.initial], edges, lambda node: g.final[node[0]])
    if found is None:
        return None
    return _steps_to_transitions(sat, found[0])


@dataclass
class Lasso:
    stem: list  # transitions
    cycle: list

    def render(self, letter=None) -> str:
        letter = letter or _default_letter
        return ("STEM: " + " ".join(letter(t) for t in self.stem) + "\n"
                + "CYCLE: " + " ".join(letter(t) for t in self.cycle))


def _default_letter(t: Transition) -> str:
    tag = t.tag
    region = tag[1] if isinstance(tag, tuple) and len(tag) == 2 and isinstance(tag[1], str) else None
    return f"{t.symbol}@[{region}]" if region else t.symbol


@dataclass
class EmptinessResult:
    empty: bool
    lasso: Optional[Lasso] = None
    automaton: Optional[NestedVPTA] = field(default=None, repr=False)  # the Büchi VPA the lasso lives in
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.empty


def _sccs(nodes, edges):
    """Tarjan's algorithm, iterative; returns a list of node sets."""
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter([e[0] for e in edges(root)]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on.add(nxt)
                    work.append((nxt, iter([e[0] for e in edges(nxt)])))
                    advanced = True
                    break
                if nxt in on:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    x = stack.pop()
                    on.discard(x)
                    comp.add(x)
                    if x == node:
                        break
                out.append(comp)
    return out


def buchi_vpa_emptiness(B: NestedVPTA, seed: Optional[int] = None) -> EmptinessResult:
    """Büchi emptiness of a clockless VPA (first component of the family).

    ``seed`` shuffles the saturation worklist; the verdict does not depend on it.
    """
    if B.event_clocks or B.standard_clocks:
        raise HasEventClocks("Büchi VPA emptiness expects a clockless automaton")
    g, sat = _saturate(B, seed)
    edges_of = _top_graph(g, sat, finite=False)
    cache: dict = {}

    def edges(node):
        if node not in cache:
            cache[node] = edges_of(node)
        return cache[node]

    start = [(s, 0) for s in g.initial]
    seen = set(start)
    order = list(start)
    queue = deque(start)
    while queue:
        node = queue.popleft()
        for tgt, _, _ in edges(node):
            if tgt not in seen:
                seen.add(tgt)
                order.append(tgt)
                queue.append(tgt)
    stats = {"nodes": len(seen), "facts": len(sat.facts), "summaries": len(sat.summaries)}
    for comp in _sccs(order, edges):
        for u in sorted(comp):
            for tgt, acc, step in edges(u):
                if acc and tgt in comp:
                    stem_found = _bfs(start, edges, lambda n, u=u: n == u)
                    back = _bfs([tgt], edges, lambda n, u=u: n == u, allowed=comp)
                    stem = _steps_to_transitions(sat, stem_found[0])
                    cycle = _steps_to_transitions(sat, [step] + back[0])
                    return EmptinessResult(False, Lasso(stem, cycle), B, stats)
    return EmptinessResult(True, None, B, stats)


def replay_lasso(B: NestedVPTA, lasso: Lasso) -> bool:
    """Check that ``stem · cycle^ω`` is an accepting run shape of the clockless VPA ``B``.

    The stem must start in an initial state, consecutive transitions must
    chain, stack operations must be legal, the cycle must return to its
    first state, visit an accepting state and never pop below its own
    starting depth.
    """
    if not lasso.cycle:
        return False
    path = list(lasso.stem) + list(lasso.cycle)
    if path[0].source not in B.initial:
        return False
    if any(t.target != u.source for t, u in zip(path, path[1:])):
        return False
    if lasso.cycle[-1].target != lasso.cycle[0].source:
        return False
    if not any(t.target in B.accepting[0] for t in lasso.cycle):
        return False
    known = set(B.transitions)
    if any(t not in known for t in path):
        return False
    stack: list = []
    base = None
    for rep in range(3):
        seq = lasso.stem if rep == 0 else lasso.cycle
        if rep:
            base = len(stack) if base is None else base
            floor = len(stack)
        for t in seq:
            if t.kind == PUSH:
                stack.append(t.stack)
            elif t.kind == POP:
                if t.stack == BOTTOM:
                    if stack:
                        return False
                elif not stack or stack[-1] != t.stack or (rep and len(stack) <= floor):
                    return False
                else:
                    stack.pop()
    return True


def ecna_emptiness(A: NestedVPTA, seed: Optional[int] = None) -> EmptinessResult:
    """Emptiness of the timed ω-language of ``A`` (time-divergent runs)."""
    from .removal import remove_all_event_clocks

    check_valid(A)
    V = remove_all_event_clocks(A)
    R = region_abstraction(V, divergence=True)
    D = degeneralize(R)
    res = buchi_vpa_emptiness(D, seed)
    res.stats.update(translated_states=len(V.states), region_states=len(R.states), buchi_states=len(D.states))
    return res


def finite_emptiness(A: NestedVPTA, seed: Optional[int] = None) -> Optional[list]:
    """Emptiness of the finite-word timed language: None, or a run of the region automaton."""
    from .removal import remove_all_event_clocks

    check_valid(A)
    R = region_abstraction(remove_all_event_clocks(A))
    return finite_vpa_witness(R, seed)


def visibly_model_check_finite(S: NestedVPTA, A: NestedVPTA):
    """Does every finite word of ``S`` belong to ``A``?  Returns an inclusion result."""
    from .boolean import include_finite
    from .errors import AlphabetMismatch

    if S.alphabet != A.alphabet:
        raise AlphabetMismatch("system and specification use different alphabets")
    return include_finite(S, A)
