"""Acceptance criteria 1-9, one pass/fail line each.

Run ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.
"""

import random
import time
from fractions import Fraction
from functools import lru_cache

from ecna.automaton import BOTTOM, NestedVPTA, constants, greatest_constant, internal, pop, push
from ecna.boolean import complement_finite, include_finite, intersection, joint_domain, timed_hom, union, untimed_hom
from ecna.catalog import ALPHABET, t_caller, t_pred, t_rec, u1, u2, v1, v2
from ecna.clocks import UNDEF, EventClock, Interval
from ecna.emptiness import (
    buchi_vpa_emptiness,
    degeneralize,
    ecna_emptiness,
    region_abstraction,
    replay_lasso,
)
from ecna.regions import (
    all_regions,
    concretize,
    interval_alphabet,
    letter_name,
    parse_letter,
    region_disjoint,
    region_of,
    region_within,
    symbolic_image,
)
from ecna.removal import remove_all_event_clocks, remove_clock
from ecna.removal.common import bounds_of
from ecna.runs import accepts_finite, reachable_bases, run_prefixes
from ecna.words import NestedStructure, reference_position

import conftest
from helpers import AL, SMALL, random_automaton, random_clock, random_words
from test_regions import _in_tw, _sample_points

KINDS = ("xg", "yg", "xa", "ya", "xc")
XG = EventClock("xg", "a")


def _report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    conftest.ACCEPTANCE_LINES[n] = line
    print(line)


def _reaches(A, w, state) -> bool:
    return any(c.state == state for c in run_prefixes(A, w))


def test_criterion_1_word_suite():
    start = time.perf_counter()
    got = (_reaches(t_rec(), v2(), "q5"), _reaches(t_rec(), v1(), "q5"),
           _reaches(t_pred(), u2(), "p5"), _reaches(t_pred(), u1(), "p5"))
    elapsed = time.perf_counter() - start
    ok = got == (True, False, True, False) and elapsed < 1
    _report(1, ok, f"verdicts v2/v1/u2/u1 = {got}, {elapsed:.3f}s")
    assert ok


def test_criterion_2_structural_bounds():
    rng = random.Random(2)
    bad = []
    for k in range(12):
        clocks = [random_clock(rng, z) for z in rng.sample(KINDS, 2)]
        A = random_automaton(rng, clocks, n=rng.randint(2, 6))
        B = random_automaton(rng, clocks, n=rng.randint(2, 6))
        U, P = union(A, B), intersection(A, B)
        k_max = max(greatest_constant(A), greatest_constant(B))
        checks = [
            len(U.states) == len(A.states) + len(B.states),
            len(U.stack_symbols) + 1 == len(A.stack_symbols) + len(B.stack_symbols) + 1,
            greatest_constant(U) == k_max,
            len(P.states) <= 2 * len(A.states) * len(B.states),
            len(P.stack_symbols) <= len(A.stack_symbols) * len(B.stack_symbols),
            greatest_constant(P) <= k_max,
        ]
        if not all(checks):
            bad.append((k, checks))
    _report(2, not bad, f"12 pairs, {len(bad)} violations")
    assert not bad


def test_criterion_3_region_laws():
    rng = random.Random(3)
    partition = saturation = disjoint = 0
    for _ in range(5):
        clocks = [random_clock(rng, z) for z in rng.sample(KINDS, 2)]
        A = random_automaton(rng, clocks)
        consts = sorted(constants(A))
        regs = all_regions(clocks, consts)
        for _ in range(1000):
            val = {z: (None if rng.random() < 0.2 else Fraction(rng.randint(0, 40), rng.choice([1, 2, 4])))
                   for z in clocks}
            hits = [rg for rg in regs if all(iv.contains(val[z]) for z, iv in rg)]
            partition += len(hits) != 1 or hits[0] != region_of(val, clocks, consts)
        for t in A.transitions:
            for rg in regs:
                inside = region_within(rg, t.guard)
                if inside == region_disjoint(rg, t.guard):
                    saturation += 1
                    continue
                pts = {z: _sample_points(iv, rng) for z, iv in rg}
                for _ in range(3):
                    val = {z: rng.choice(p) for z, p in pts.items()}
                    saturation += all(iv.contains(val[z]) for z, iv in t.guard) != inside
    clocks = [EventClock("xg", "a"), EventClock("xa", "b"), EventClock("ya", "a")]
    images = [symbolic_image(w, clocks, [1, 2]) for w in random_words(rng, 400, max_len=5)]
    pairs = 0
    while pairs < 200:
        lam, lam2 = rng.sample(images, 2)
        if lam == lam2:
            continue
        pairs += 1
        w = concretize(AL, lam)
        disjoint += w is None or not _in_tw(w, lam) or _in_tw(w, lam2)
    ok = partition == saturation == disjoint == 0
    _report(3, ok, f"violations: partition {partition}, saturation {saturation}, tw-disjointness {disjoint}")
    assert ok


def test_criterion_4_hom_round_trip():
    rng = random.Random(4)
    mismatches = accepted = 0
    for _ in range(10):
        clocks = [random_clock(rng, z) for z in rng.sample(KINDS, 2)]
        A = random_automaton(rng, clocks)
        T = timed_hom(untimed_hom(A), A.event_clocks, A.alphabet)
        for w in random_words(rng, 50):
            a = accepts_finite(A, w)
            accepted += a
            mismatches += accepts_finite(T, w) != a
    _report(4, mismatches == 0, f"10 ECNA x 50 words, {mismatches} mismatches ({accepted} accepted)")
    assert mismatches == 0


def test_criterion_5_complement():
    rng = random.Random(5)
    flips = restores = 0
    for _ in range(5):
        A = random_automaton(rng, [random_clock(rng, rng.choice(KINDS), SMALL)], SMALL, n=3, pool=1)
        C = complement_finite(A)
        CC = complement_finite(C)
        for w in random_words(rng, 50, alphabet=SMALL):
            a = accepts_finite(A, w)
            flips += accepts_finite(C, w) == a
            restores += accepts_finite(CC, w) != a
    ok = flips == restores == 0
    _report(5, ok, f"5 ECNA x 50 words, {flips} non-flips, {restores} double-complement mismatches")
    assert ok


def test_criterion_6_removal_differential():
    start = time.perf_counter()
    mismatches = k_bad = clock_bad = nonempty = 0
    for kind in KINDS:
        for k in range(10):
            rng = random.Random(5000 + 100 * KINDS.index(kind) + k)
            z = random_clock(rng, kind)
            A = random_automaton(rng, [z])
            A = A.with_(finite_accepting=A.states)
            B = remove_clock(A, z)
            lows, ups = bounds_of(A, z)
            k_bad += greatest_constant(B) != greatest_constant(A)
            clock_bad += len(B.standard_clocks) != sum(not b.trivial for b in lows + ups)
            for w in random_words(rng, 50):
                x = reachable_bases(A, w)
                nonempty += bool(x)
                mismatches += x != reachable_bases(B, w, final_only=True)
    elapsed = time.perf_counter() - start
    ok = mismatches == k_bad == clock_bad == 0 and elapsed < 60
    _report(6, ok, f"5 kinds x 10 automata x 50 words: {mismatches} mismatches, K changed {k_bad}, "
                   f"fresh-clock count off {clock_bad}, {nonempty} non-empty runs, {elapsed:.1f}s")
    assert ok


def _contradictory_ecvpa() -> NestedVPTA:
    """Universal over the example alphabet except that every b needs xg(a) > 1."""
    trans = [internal("u", s, "u", guard=((XG, Interval.open(1, None)),) if s == "b" else ())
             for s in sorted(ALPHABET.internals)]
    trans += [push("u", "c", "u", "g"), pop("u", "r", "u", "g"), pop("u", "r", "u", BOTTOM)]
    return NestedVPTA(ALPHABET, frozenset({"u"}), frozenset({"u"}), frozenset({XG}), frozenset(), frozenset({"g"}),
                      tuple(trans), (frozenset({"u"}),))


def _trivially_empty() -> list:
    x = "x"
    s = SMALL
    return [
        # contradictory conjunction on the only way into the accepting state
        NestedVPTA(ALPHABET, {"p", "q"}, {"p"}, {XG}, (), (),
                   (internal("p", "a", "p"),
                    internal("p", "b", "q", guard=((XG, Interval.point(0)), (XG, Interval.open(1, 2)))),
                    internal("q", "b", "q")), ({"q"},)),
        # no accepting state
        NestedVPTA(s, {"p"}, {"p"}, (), (), (), (internal("p", "a", "p"),), (set(),)),
        # accepting part only reachable by popping a symbol that is never pushed
        NestedVPTA(s, {"p", "q"}, {"p"}, (), (), {"g"},
                   (internal("p", "a", "p"), pop("p", "r", "q", "g"), internal("q", "a", "q")), ({"q"},)),
        # x must exceed 1 and then equal 1 without a reset
        NestedVPTA(s, {"p", "q", "r"}, {"p"}, (), {x}, (),
                   (internal("p", "a", "r", guard=((x, Interval.open(1, None)),)),
                    internal("r", "a", "q", guard=((x, Interval.point(1)),)), internal("q", "a", "q")), ({"q"},)),
        # recorder of a must be undefined after an a was read
        NestedVPTA(s, {"p", "q"}, {"p"}, {EventClock("xg", "a")}, (), (),
                   (internal("p", "a", "q"), internal("q", "a", "q", guard=((EventClock("xg", "a"), UNDEF),))),
                   ({"q"},)),
    ]


def test_criterion_7_end_to_end_emptiness():
    notes, ok = [], True
    for name, make in (("T_rec", t_rec), ("T_pred", t_pred), ("T_caller", t_caller)):
        res = ecna_emptiness(make())
        good = not res.empty and replay_lasso(res.automaton, res.lasso)
        ok &= good
        notes.append(f"{name} {'NONEMPTY+replay' if good else 'BAD'}")
    contra = ecna_emptiness(intersection(t_rec(), _contradictory_ecvpa())).empty
    ok &= contra
    notes.append(f"T_rec x contradictory {'EMPTY' if contra else 'NONEMPTY'}")
    empties = sum(ecna_emptiness(A).empty for A in _trivially_empty())
    ok &= empties == 5
    notes.append(f"{empties}/5 trivial automata EMPTY")
    _report(7, ok, ", ".join(notes))
    assert ok


def test_criterion_8_saturation_determinism():
    instances = []
    for make in (t_rec, t_pred, t_caller):
        instances.append(degeneralize(region_abstraction(remove_all_event_clocks(make()), divergence=True)))
    rng = random.Random(8)
    for _ in range(4):
        instances.append(random_automaton(rng, [], SMALL, n=4))
    unstable = 0
    for B in instances:
        runs = [buchi_vpa_emptiness(B, seed) for seed in range(10)]
        verdicts = {r.empty for r in runs}
        valid = all(r.empty or replay_lasso(B, r.lasso) for r in runs)
        unstable += len(verdicts) != 1 or not valid
    _report(8, unstable == 0, f"{len(instances)} instances x 10 worklist orders, {unstable} unstable")
    assert unstable == 0


# --- criterion 9: explicit enumeration of symbolic words --------------------------------

_parse = lru_cache(maxsize=None)(parse_letter)


def _symbolic_step(A, cfgs, sym, region):
    """Configurations after one letter; regions are exact, so a guard holds iff the region lies inside it."""
    out = set()
    for q, stack in cfgs:
        for t in A.by_source.get((q, sym), ()):
            if not region_within(region, t.guard):
                continue
            if t.kind == "push":
                out.add((t.target, (t.stack,) + stack))
            elif t.kind == "int":
                out.add((t.target, stack))
            elif t.stack == stack[0]:
                out.add((t.target, stack if stack[0] == BOTTOM else stack[1:]))
    return frozenset(out)


def _prefix_realizable(alphabet, letters) -> bool:
    """Necessary condition for extending ``letters``: predictor atoms pointing past the prefix are dropped."""
    parsed = [_parse(name) for name in letters]
    ns = NestedStructure(alphabet, [s for s, _ in parsed])
    kept = []
    for i, (s, rg) in enumerate(parsed):
        atoms = tuple((z, iv) for z, iv in rg if z.is_recorder or reference_position(ns, i, z) is not None)
        kept.append(letter_name(s, atoms))
    return concretize(alphabet, kept) is not None


def _enumerate_counterexample(A1, A2, max_len=6):
    """Shortest realizable symbolic word of length <= max_len in L(A1) minus L(A2), or None."""
    clocks, consts = joint_domain(A1, A2)
    letters = sorted(interval_alphabet(A1.alphabet, clocks, consts).symbols)
    start = lambda A: frozenset((q, (BOTTOM,)) for q in A.initial)
    layer = [((), start(A1), start(A2))]
    for n in range(max_len + 1):
        nxt = []
        for prefix, c1, c2 in layer:
            if any(q in A1.finite_accepting for q, _ in c1) and not any(q in A2.finite_accepting for q, _ in c2):
                if concretize(A1.alphabet, prefix) is not None:
                    return prefix
            if n == max_len:
                continue
            for name in letters:
                sym, rg = _parse(name)
                n1 = _symbolic_step(A1, c1, sym, rg)
                if n1 and _prefix_realizable(A1.alphabet, prefix + (name,)):
                    nxt.append((prefix + (name,), n1, _symbolic_step(A2, c2, sym, rg)))
        layer = nxt
    return None


def test_criterion_9_inclusion_brute_force():
    rng = random.Random(0)
    disagreements = included = 0
    for k in range(12):
        z = random_clock(rng, rng.choice(KINDS), SMALL)
        A1 = random_automaton(rng, [z], SMALL, n=2, pool=1)
        A2 = random_automaton(rng, [z], SMALL, n=2, pool=1)
        if k % 3 == 0:
            A2 = union(A1, A2)
        res = include_finite(A1, A2)
        found = _enumerate_counterexample(A1, A2)
        included += res.included
        agree = res.included == (found is None)
        if not res.included:
            agree &= len(res.counterexample) <= 6
            agree &= accepts_finite(A1, res.witness) and not accepts_finite(A2, res.witness)
        if found is not None:
            w = concretize(SMALL, found)
            agree &= accepts_finite(A1, w) and not accepts_finite(A2, w)
        disagreements += not agree
    _report(9, disagreements == 0, f"12 pairs over a 3-letter alphabet ({included} included), "
                                   f"{disagreements} disagreements")
    assert disagreements == 0
