import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecna.automaton import (
    BOTTOM,
    NestedVPTA,
    classify,
    constraint_sat,
    greatest_constant,
    internal,
    is_normalized,
    normalize_single_atom,
    pop,
    push,
    validate,
)
from ecna.catalog import ALPHABET, t_caller, t_pred, t_rec
from ecna.clocks import UNDEF, EventClock, Interval, parse_guard, parse_interval
from ecna.errors import InvalidAutomaton, ParseError, UnknownClock
from ecna.formats import parse_automaton, serialize_automaton
from ecna.runs import accepts_finite

from helpers import AL, random_automaton, random_clock, random_words

XA = EventClock("xa", "a")


def _bare(trans, clocks=(), std=(), stack=("g",)):
    return NestedVPTA(ALPHABET, frozenset({"p", "q"}), frozenset({"p"}), frozenset(clocks), frozenset(std),
                      frozenset(stack), tuple(trans), (frozenset({"q"}),))


class TestValidate:
    def test_example_automata_valid(self):
        for A in (t_rec(), t_pred(), t_caller()):
            assert validate(A) == []

    def test_push_on_internal_symbol(self):
        A = _bare([push("p", "a", "q", "g")])
        assert [v.code for v in validate(A)] == ["SymbolClassMismatch"]

    def test_pushes_bottom(self):
        A = _bare([push("p", "c", "q", BOTTOM)])
        assert [v.code for v in validate(A)] == ["PushesBottom"]

    def test_unknown_state_and_clock(self):
        A = _bare([internal("p", "a", "zz", guard=((XA, UNDEF),))])
        codes = sorted(v.code for v in validate(A))
        assert codes == ["UnknownClock", "UnknownState"]

    def test_check_valid_raises(self):
        with pytest.raises(InvalidAutomaton):
            classify(_bare([push("p", "c", "q", BOTTOM)]))


class TestClassify:
    def test_example_recorder(self):
        assert classify(t_rec()) == {"ECNA", "ARCNA", "NestedVPTA"}

    def test_clockless(self):
        assert classify(_bare([internal("p", "a", "q")])) == {
            "VPA", "VPTA", "ECNA", "ECVPA", "ARCNA", "APCNA", "CECNA", "NestedVPTA"}

    def test_caller_only(self):
        tags = classify(t_caller())
        assert "CECNA" in tags and not tags & {"ARCNA", "APCNA"}

    def test_standard_clocks(self):
        A = _bare([internal("p", "a", "q", reset={"x"})], std=("x",))
        assert classify(A) == {"VPTA", "NestedVPTA"}

    def test_monotone_under_clock_shrinking(self):
        rng = random.Random(3)
        for _ in range(10):
            clocks = [random_clock(rng, k) for k in ("xg", "ya", "xc")]
            A = random_automaton(rng, clocks)
            for z in clocks:
                trans = tuple(replace(t, guard=tuple(x for x in t.guard if x[0] != z)) for t in A.transitions)
                B = A.with_(event_clocks=A.event_clocks - {z}, transitions=trans)
                assert "ECNA" in classify(B)
                assert classify(A) <= classify(B)


class TestConstraints:
    def test_examples(self):
        assert constraint_sat({XA: Fraction(1)}, ((XA, Interval.point(1)),))
        assert not constraint_sat({XA: None}, ((XA, Interval(0, None, False, True)),))
        assert constraint_sat({XA: None}, ((XA, UNDEF),))

    def test_unknown_clock(self):
        with pytest.raises(UnknownClock):
            constraint_sat({}, ((XA, UNDEF),))

    @settings(max_examples=100, deadline=None)
    @given(st.one_of(st.none(), st.fractions(min_value=0, max_value=5)))
    def test_true_constraint(self, v):
        assert constraint_sat({XA: v}, ())

    def test_greatest_constant(self):
        assert greatest_constant(t_rec()) == 1
        assert greatest_constant(_bare([internal("p", "a", "q")])) == 0
        y = EventClock("yg", "b")
        A = _bare([internal("p", "a", "q", guard=((XA, Interval(2, 5, True, False)), (y, UNDEF)))],
                  clocks=(XA, y))
        assert greatest_constant(A) == 5


class TestNormalize:
    def test_split_missing_atom(self):
        A = _bare([internal("p", "a", "q")], clocks=(XA,))
        N = normalize_single_atom(A, XA)
        assert sorted(str(t.guard[0][1]) for t in N.transitions) == ["[0,inf)", "[bot,bot]"]

    def test_intersect_atoms(self):
        A = _bare([internal("p", "a", "q", guard=((XA, parse_interval("[1,3]")), (XA, parse_interval("[2,5]"))))],
                  clocks=(XA,))
        (t,) = normalize_single_atom(A, XA).transitions
        assert t.guard == ((XA, parse_interval("[2,3]")),)

    def test_empty_intersection_dropped(self):
        A = _bare([internal("p", "a", "q", guard=((XA, Interval.point(0)), (XA, Interval.point(1))))],
                  clocks=(XA,))
        assert normalize_single_atom(A, XA).transitions == ()

    def test_identity_when_normalized(self):
        A = t_rec()
        N = normalize_single_atom(normalize_single_atom(A, XA), XA)
        assert N.transitions == normalize_single_atom(A, XA).transitions

    def test_language_and_constant_preserved(self):
        rng = random.Random(11)
        for _ in range(10):
            z = random_clock(rng, rng.choice(["xg", "yg", "xa", "ya", "xc"]))
            A = random_automaton(rng, [z])
            N = normalize_single_atom(A, z)
            assert is_normalized(N, z)
            assert greatest_constant(N) == greatest_constant(A)
            for w in random_words(rng, 30):
                assert accepts_finite(A, w) == accepts_finite(N, w)


class TestFormat:
    def test_round_trip_examples(self):
        for A in (t_rec(), t_pred(), t_caller()):
            text = serialize_automaton(A)
            B = parse_automaton(text)
            assert B == A
            assert serialize_automaton(B) == text

    def test_round_trip_random(self):
        rng = random.Random(5)
        for _ in range(10):
            A = random_automaton(rng, [random_clock(rng, k) for k in ("xg", "xa")], alphabet=AL)
            assert parse_automaton(serialize_automaton(A)) == A

    def test_guard_syntax(self):
        g = parse_guard("xg(a) in [0,1), xa(a) in [1,1], xc(b) in [bot,bot]")
        assert [str(c) for c, _ in g] == ["xg(a)", "xa(a)", "xc(b)"]

    @pytest.mark.parametrize("text,line", [
        ("[alphabet]\ncalls=c returns=r internals=a\n[states]\np\n[initial]\np\n[transitions]\np --a / nonsense --> p\n", 8),
        ("[alphabet]\ncalls=c returns=r internals=a\n[states]\np\n[initial]\np\n[transitions]\np a p\n", 8),
        ("[alphabet]\ncalls=c returns=r internals=a\n[states]\np\n[initial]\np\n[accepting]\nq1\n", 8),
        ("garbage\n", 1),
    ])
    def test_parse_errors_have_lines(self, text, line):
        with pytest.raises(ParseError) as exc:
            parse_automaton(text, "x.aut")
        assert exc.value.line == line
