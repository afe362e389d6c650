"""Command-line front end.

Exit codes: 0 for success or a positive verdict, 1 for a negative verdict
(non-member, non-empty, inclusion fails, invalid automaton), 2 for usage
and parse errors.  With ``--json`` every invocation prints exactly one JSON
object ``{"verb", "verdict", "details"}`` on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import boolean
from .automaton import classify, constants, validate
from .clocks import parse_clock
from .emptiness import ecna_emptiness
from .errors import ECNAError, ParseError
from .formats import load_automaton, save_automaton
from .regions import canonical_intervals
from .removal import remove_all_event_clocks, remove_clock
from .runs import accepts_finite, run_prefixes


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ecna", description="Event-clock nested automata toolkit.")
    p.add_argument("--json", action="store_true", help="print one JSON object per invocation")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check the structural invariants of an automaton")
    s.add_argument("automaton")
    s = sub.add_parser("info", help="print sizes, clocks and subclasses")
    s.add_argument("automaton")
    s = sub.add_parser("member", help="finite-word membership of a timed word")
    s.add_argument("automaton")
    s.add_argument("word")
    s = sub.add_parser("empty", help="emptiness of the timed omega-language")
    s.add_argument("automaton")
    s.add_argument("--witness", action="store_true", help="print a lasso when non-empty")
    s.add_argument("--seed", type=int, default=None, help="shuffle the saturation worklist")
    s = sub.add_parser("product", help="union or intersection of two automata")
    s.add_argument("--op", choices=("union", "inter"), required=True)
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("-o", "--output", required=True)
    s = sub.add_parser("complement-finite", help="finite-word complement of an ECNA")
    s.add_argument("a")
    s.add_argument("-o", "--output", required=True)
    s = sub.add_parser("include-finite", help="finite-word inclusion L(a) in L(b)")
    s.add_argument("a")
    s.add_argument("b")
    s = sub.add_parser("translate", help="replace event clocks by standard clocks")
    s.add_argument("a")
    s.add_argument("--remove", action="append", default=[], metavar="KIND:SYMBOL")
    s.add_argument("--remove-all", action="store_true")
    s.add_argument("-o", "--output", required=True)
    s = sub.add_parser("regions", help="print the interval set and the number of regions")
    s.add_argument("automaton")
    s = sub.add_parser("witness", help="print a lasso if the language is non-empty")
    s.add_argument("automaton")
    s.add_argument("--seed", type=int, default=None)
    return p


def _validate(args):
    A = load_automaton(args.automaton)
    problems = [str(v) for v in validate(A)]
    if problems:
        return False, "INVALID", {"violations": problems}
    return True, "VALID", {}


def _info(args):
    A = load_automaton(args.automaton)
    return True, "OK", A.summary()


def _member(args):
    from .formats import load_word

    A = load_automaton(args.automaton)
    w = load_word(args.word)
    ok = accepts_finite(A, w)
    reached = sorted({c.state for c in run_prefixes(A, w)})
    return ok, "MEMBER (finite)" if ok else "NON-MEMBER (finite)", {"reached": reached, "length": len(w)}


def _lasso_details(res, witness: bool) -> dict:
    details = dict(res.stats)
    if witness and res.lasso is not None:
        details["stem"] = res.lasso.render().splitlines()[0][len("STEM: "):].split()
        details["cycle"] = res.lasso.render().splitlines()[1][len("CYCLE: "):].split()
    return details


def _empty(args):
    A = load_automaton(args.automaton)
    res = ecna_emptiness(A, args.seed)
    if res.empty:
        return True, "EMPTY", dict(res.stats)
    # a non-empty language is the negative answer to "is it empty?"
    return False, "NONEMPTY", _lasso_details(res, args.witness)


def _witness(args):
    A = load_automaton(args.automaton)
    res = ecna_emptiness(A, args.seed)
    if res.empty:
        return False, "EMPTY", dict(res.stats)
    return True, "NONEMPTY", _lasso_details(res, True)


def _product(args):
    A, B = load_automaton(args.a), load_automaton(args.b)
    P = boolean.union(A, B) if args.op == "union" else boolean.intersection(A, B)
    save_automaton(P, args.output)
    return True, "WRITTEN", {"output": args.output, "states": len(P.states)}


def _complement(args):
    A = load_automaton(args.a)
    C = boolean.complement_finite(A)
    save_automaton(C, args.output)
    return True, "WRITTEN", {"output": args.output, "states": len(C.states)}


def _include(args):
    A, B = load_automaton(args.a), load_automaton(args.b)
    res = boolean.include_finite(A, B)
    if res.included:
        return True, "INCLUDED", {}
    details = {"counterexample": list(res.counterexample or ())}
    if res.witness is not None:
        details["timed_word"] = str(res.witness)
    return False, "NOT-INCLUDED", details


def _translate(args):
    A = load_automaton(args.a)
    if args.remove_all:
        A = remove_all_event_clocks(A)
    for item in args.remove:
        kind, sep, sym = item.partition(":")
        if not sep:
            raise _Usage(f"--remove expects KIND:SYMBOL, got {item!r}")
        A = remove_clock(A, parse_clock(f"{kind}({sym})"))
    save_automaton(A, args.output)
    return True, "WRITTEN", {"output": args.output, "states": len(A.states),
                             "standard_clocks": sorted(A.standard_clocks)}


def _regions(args):
    A = load_automaton(args.automaton)
    consts = sorted(constants(A, A.event_clocks))
    intv = canonical_intervals(consts)
    n = len(A.event_clocks)
    return True, "OK", {"constants": consts, "intervals": [str(iv) for iv in intv],
                        "intv_size": len(intv), "event_clocks": n, "reg_size": len(intv) ** n,
                        "classes": sorted(classify(A))}


_VERBS = {
    "validate": _validate,
    "info": _info,
    "member": _member,
    "empty": _empty,
    "witness": _witness,
    "product": _product,
    "complement-finite": _complement,
    "include-finite": _include,
    "translate": _translate,
    "regions": _regions,
}


def _print_text(verdict: str, details: dict) -> None:
    print(verdict)
    for key in ("stem", "cycle"):
        if key in details:
            print(f"{key.upper()}: " + " ".join(details[key]))
    for key, value in details.items():
        if key in ("stem", "cycle"):
            continue
        if isinstance(value, list):
            value = ", ".join(map(str, value))
        print(f"  {key}: {value}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parser().parse_args(argv)
    except _Usage as exc:
        print(f"ecna: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        ok, verdict, details = _VERBS[args.verb](args)
    except _Usage as exc:
        print(f"ecna: usage error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"ecna: parse error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ecna: {exc}", file=sys.stderr)
        return 2
    except ECNAError as exc:
        print(f"ecna: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps({"verb": args.verb, "verdict": verdict, "details": details}, sort_keys=True))
    else:
        _print_text(verdict, details)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
