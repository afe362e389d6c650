import itertools
import random

import pytest

from ecna.automaton import BOTTOM, NestedVPTA, greatest_constant, internal, pop, push
from ecna.boolean import (
    complement_finite,
    determinize_vpa_finite,
    include_finite,
    intersection,
    timed_hom,
    union,
    untimed_hom,
)
from ecna.catalog import ALPHABET, t_rec, v1, v2
from ecna.clocks import UNDEF, EventClock, Interval
from ecna.errors import AlphabetMismatch, NotECNA, RegionClockMismatch
from ecna.regions import letter_name
from ecna.runs import accepts_finite, accepts_untimed_finite
from ecna.words import PushdownAlphabet, TimedWord

from helpers import AL, SMALL, random_automaton, random_clock, random_words

KINDS = ("xg", "yg", "xa", "ya", "xc")
XA = EventClock("xa", "a")


def _universal(alphabet, accepting=True) -> NestedVPTA:
    trans = []
    for s in alphabet.symbols:
        k = alphabet.kind(s)
        if k == "call":
            trans.append(push("u", s, "u", "g"))
        elif k == "ret":
            trans += [pop("u", s, "u", "g"), pop("u", s, "u", BOTTOM)]
        else:
            trans.append(internal("u", s, "u"))
    fin = frozenset({"u"}) if accepting else frozenset()
    return NestedVPTA(alphabet, frozenset({"u"}), frozenset({"u"}), frozenset(), frozenset(), frozenset({"g"}),
                      tuple(trans), (fin,), fin)


def _first_a() -> NestedVPTA:
    """ECVPA-style automaton over the example alphabet: the first symbol is a."""
    U = _universal(ALPHABET)
    trans = [internal("s", "a", "u")] + list(U.transitions)
    return U.with_(states=frozenset({"s", "u"}), initial=frozenset({"s"}), transitions=tuple(trans))


def _pairs(seed, count=10):
    rng = random.Random(seed)
    for _ in range(count):
        clocks = [random_clock(rng, k) for k in rng.sample(KINDS, 2)]
        yield rng, random_automaton(rng, clocks, n=rng.randint(2, 6)), random_automaton(rng, clocks, n=rng.randint(2, 4))


class TestUnion:
    def test_bounds(self):
        for _, A, B in _pairs(1):
            U = union(A, B)
            assert len(U.states) == len(A.states) + len(B.states)
            assert len(U.stack_symbols) + 1 == len(A.stack_symbols) + len(B.stack_symbols) + 1
            assert greatest_constant(U) == max(greatest_constant(A), greatest_constant(B))

    def test_six_plus_four(self):
        rng = random.Random(0)
        A = random_automaton(rng, [XA], n=6)
        B = random_automaton(rng, [XA], n=4)
        assert len(union(A, B).states) == 10

    def test_language(self):
        for rng, A, B in _pairs(2, 5):
            U = union(A, B)
            for w in random_words(rng, 30):
                assert accepts_finite(U, w) == (accepts_finite(A, w) or accepts_finite(B, w))
                assert accepts_finite(union(A, A), w) == accepts_finite(A, w)

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            union(_universal(AL), _universal(SMALL))


class TestIntersection:
    def test_bounds(self):
        for _, A, B in _pairs(3):
            P = intersection(A, B)
            assert len(P.states) <= 2 * len(A.states) * len(B.states)
            assert len(P.stack_symbols) <= len(A.stack_symbols) * len(B.stack_symbols)
            assert greatest_constant(P) <= max(greatest_constant(A), greatest_constant(B))

    def test_language(self):
        for rng, A, B in _pairs(4, 5):
            P = intersection(A, B)
            for w in random_words(rng, 30):
                assert accepts_finite(P, w) == (accepts_finite(A, w) and accepts_finite(B, w))

    def test_universal_identity(self):
        for rng, A, _ in _pairs(5, 5):
            P = intersection(A, _universal(AL))
            for w in random_words(rng, 30):
                assert accepts_finite(P, w) == accepts_finite(A, w)


class TestHomomorphisms:
    def test_recorder_guard_regions(self):
        U = untimed_hom(t_rec())
        guarded = [t for t in U.transitions if t.source == "q4" and t.target == "q5"]
        assert [t.symbol for t in guarded] == [letter_name("b", ((XA, Interval.point(1)),))]

    def test_true_guard_all_regions(self):
        U = untimed_hom(t_rec())
        loops = [t for t in U.transitions if t.source == "q5"]
        assert len(loops) == 5

    def test_contradictory_guard(self):
        A = _universal(SMALL).with_(
            event_clocks=frozenset({EventClock("xg", "a")}),
            transitions=(internal("u", "a", "u", guard=((EventClock("xg", "a"), Interval.point(0)),
                                                        (EventClock("xg", "a"), Interval.point(1)))),))
        assert untimed_hom(A).transitions == ()

    def test_round_trip(self):
        for rng, A, _ in _pairs(6, 10):
            T = timed_hom(untimed_hom(A), A.event_clocks, A.alphabet)
            for w in random_words(rng, 50):
                assert accepts_finite(T, w) == accepts_finite(A, w)

    def test_position_zero_recorder(self):
        x = EventClock("xg", "a")
        lam = PushdownAlphabet(frozenset(), frozenset(), frozenset({letter_name("a", ((x, Interval.point(0)),))}))
        name = next(iter(lam.internals))
        B = NestedVPTA(lam, frozenset({"p", "q"}), frozenset({"p"}), frozenset(), frozenset(), frozenset(),
                       (internal("p", name, "q"),), (frozenset({"q"}),))
        T = timed_hom(B, [x])
        one = PushdownAlphabet(frozenset(), frozenset(), frozenset({"a"}))
        assert T.alphabet == one
        assert not accepts_finite(T, TimedWord.of(one, [("a", 0)]))

    def test_region_clock_mismatch(self):
        B = untimed_hom(t_rec())
        with pytest.raises(RegionClockMismatch):
            timed_hom(B, [EventClock("xg", "a")])

    def test_not_ecna(self):
        A = _universal(SMALL).with_(standard_clocks=frozenset({"x"}))
        with pytest.raises(NotECNA):
            untimed_hom(A)


def _untimed_words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet.symbols, repeat=n)


class TestDeterminize:
    def test_nondeterministic_two_state(self):
        B = NestedVPTA(SMALL, frozenset({"p", "q"}), frozenset({"p"}), frozenset(), frozenset(), frozenset({"g", "h"}),
                       (push("p", "c", "p", "g"), push("p", "c", "q", "h"), internal("q", "a", "q"),
                        pop("q", "r", "p", "h"), pop("p", "r", "p", "g"), internal("p", "a", "p"),
                        pop("q", "r", "q", BOTTOM)),
                       (frozenset({"q"}),))
        D = determinize_vpa_finite(B)
        assert all(len({t.target for t in D.by_source.get((q, s), ()) if t.kind != "pop"}) <= 1
                   for q in D.states for s in SMALL.symbols)
        for word in _untimed_words(SMALL, 6):
            assert accepts_untimed_finite(D, word) == accepts_untimed_finite(B, word)

    def test_random_vpas(self):
        rng = random.Random(8)
        for _ in range(5):
            A = random_automaton(rng, [], alphabet=SMALL, n=3)
            D = determinize_vpa_finite(A)
            for word in _untimed_words(SMALL, 5):
                assert accepts_untimed_finite(D, word) == accepts_untimed_finite(A, word)

    def test_empty_language(self):
        A = _universal(SMALL, accepting=False)
        D = determinize_vpa_finite(A)
        assert not any(accepts_untimed_finite(D, w) for w in _untimed_words(SMALL, 4))


class TestComplement:
    def test_flips_membership(self):
        rng = random.Random(9)
        for _ in range(5):
            A = random_automaton(rng, [random_clock(rng, rng.choice(KINDS), SMALL)], SMALL, n=3, pool=1)
            C = complement_finite(A)
            CC = complement_finite(C)
            for w in random_words(rng, 50, alphabet=SMALL):
                assert accepts_finite(C, w) != accepts_finite(A, w)
                assert accepts_finite(CC, w) == accepts_finite(A, w)

    def test_empty_language(self):
        rng = random.Random(10)
        C = complement_finite(_universal(AL, accepting=False))
        assert all(accepts_finite(C, w) for w in random_words(rng, 30))


class TestInclusion:
    def test_reflexive(self):
        rng = random.Random(11)
        for _ in range(4):
            z = random_clock(rng, rng.choice(KINDS), SMALL)
            A = random_automaton(rng, [z], SMALL, n=3, pool=1)
            B = random_automaton(rng, [z], SMALL, n=2, pool=1)
            assert include_finite(A, A)
            assert include_finite(A, union(A, B))

    def test_recorder_example(self):
        assert include_finite(t_rec(), _first_a())
        res = include_finite(_first_a(), t_rec())
        assert not res
        assert accepts_finite(_first_a(), res.witness) and not accepts_finite(t_rec(), res.witness)

    def test_unrealizable_symbolic_counterexample_is_refined(self):
        # the only symbolic difference needs xa(a) defined at position 0
        x = EventClock("xa", "a")
        A1 = _universal(SMALL).with_(
            event_clocks=frozenset({x}), states=frozenset({"u", "v"}), finite_accepting=frozenset({"v"}),
            transitions=(internal("u", "a", "v", guard=((x, Interval.open(0, 1)),)),))
        A2 = A1.with_(transitions=())
        assert include_finite(A1, A2)

    def test_counterexample_is_genuine(self):
        rng = random.Random(12)
        for _ in range(5):
            z = random_clock(rng, rng.choice(KINDS), SMALL)
            A1 = random_automaton(rng, [z], SMALL, n=2, pool=1)
            A2 = random_automaton(rng, [z], SMALL, n=2, pool=1)
            res = include_finite(A1, A2)
            if not res:
                assert accepts_finite(A1, res.witness) and not accepts_finite(A2, res.witness)

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            include_finite(_universal(AL), _universal(SMALL))


def test_v_words_through_round_trip():
    A = t_rec()
    T = timed_hom(untimed_hom(A), A.event_clocks, A.alphabet)
    assert accepts_finite(T, v2()) and not accepts_finite(T, v1())
