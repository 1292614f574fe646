"""Command line driver.

Exit codes: 0 proved/verified/agreement, 1 not found with the search space
exhausted, 2 gave up on a budget (verdict unknown), 3 usage or configuration
problem, 4 a checker or comparison found a violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import dsl, encodings, oracle, proofs, synth
from .core import Atom, ConfigError
from .dsl import GoalSpec, ParseError
from .engine import Proved, SearchLimits, prove
from .proofs import FProof, ProofError


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: tuple
    verdict: str
    exit_code: int
    stats: object = None
    artifacts: tuple = ()
    data: dict = field(default_factory=dict)


class _ArgParser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; route through our table
    def error(self, message):
        raise UsageError(message)


def _bias_overrides(pairs):
    out = {}
    for p in pairs or ():
        tag, eq, val = p.partition("=")
        if not eq:
            raise UsageError(f"--bias expects tag=value, got {p!r}")
        try:
            out[tag] = int(val)
        except ValueError:
            raise UsageError(f"bias value {val!r} is not an integer")
    return out


def _load_rules(spec: str, bias=None):
    if spec.startswith("builtin:"):
        rs = encodings.builtin(spec[len("builtin:"):])
    else:
        with open(spec) as fh:
            rs = dsl.parse_rules(fh.read(), name=os.path.basename(spec))
    if bias:
        rs = encodings.with_bias(rs, bias)
    return rs


def _stats_line(st) -> str:
    return (f"nodes={st.nodes} decides={st.decides} "
            f"backtracks={st.backtracks} borders={st.borders} "
            f"iterations={st.iterations} seconds={st.seconds:.3f}")


def _stats_dict(st) -> dict:
    return {"nodes": st.nodes, "decides": st.decides,
            "backtracks": st.backtracks, "borders": st.borders,
            "iterations": st.iterations, "seconds": st.seconds}


def _search_outcome(res):
    if isinstance(res, Proved):
        return "proved", 0
    if res.exhausted:
        return "exhausted", 1
    return "bounded", 2


def _cmd_prove(args) -> RunReport:
    rs = _load_rules(args.rules, _bias_overrides(args.bias))
    goal = dsl.parse_goal(args.goal, rs)
    limits = SearchLimits(max_depth=args.depth)
    trace = (lambda line: print(line)) if args.trace else None
    res = prove(rs, goal, limits, trace=trace,
                no_debit=args.no_debit, no_loop_check=args.no_loop_check)
    verdict, code = _search_outcome(res)
    arts = []
    if isinstance(res, Proved) and args.proof_out:
        with open(args.proof_out, "w") as fh:
            fh.write(proofs.proof_to_json(res.proof))
        arts.append(args.proof_out)
    print(f"{verdict}: {args.goal}")
    if args.stats:
        print(_stats_line(res.stats))
    data = {"goal": args.goal, "verdict": verdict,
            "stats": _stats_dict(res.stats)}
    if arts:
        data["proof_out"] = arts[0]
    return RunReport(("prove",), verdict, code, res.stats, tuple(arts), data)


def _cmd_check(args) -> RunReport:
    with open(args.proof) as fh:
        p = proofs.proof_from_json(fh.read())
    rs = _load_rules(args.rules, _bias_overrides(args.bias))
    goal = dsl.parse_goal(args.goal, rs) if args.goal else None
    checker = proofs.check_f if isinstance(p, FProof) else proofs.check_b
    kind = "focused" if isinstance(p, FProof) else "basic"
    try:
        checker(p, rs, goal)
    except ProofError as ex:
        print(f"violation: {ex}")
        return RunReport(("check",), "violation", 4,
                         data={"kind": kind, "error": str(ex)})
    print(f"verified: {kind} proof, {proofs.proof_size(p)} nodes")
    return RunReport(("check",), "verified", 0,
                     data={"kind": kind, "nodes": proofs.proof_size(p)})


def _cmd_synth(args) -> RunReport:
    rs = _load_rules(args.rules, _bias_overrides(args.bias))
    try:
        rd = rs.rule_named(args.rule)
    except KeyError:
        raise ConfigError(f"no rule named {args.rule!r} in {rs.name}")
    alts = synth.synthesize(rd, rs.bias)
    fmt = "latex" if args.latex else "text"
    out = synth.render_synthetic(alts, format=fmt)
    print(out)
    return RunReport(("synth",), "ok", 0,
                     data={"rule": args.rule, "format": fmt,
                           "alternatives": len(alts)})


_ORACLES = {
    "classical": lambda f: oracle.classical_taut(f),
    "intuitionistic": lambda f: oracle.g3ip_prove((), f),
}


def _cmd_compare(args) -> RunReport:
    rs = _load_rules(args.rules, _bias_overrides(args.bias))
    if args.oracle == "ll":
        judge = lambda f: oracle.ll_bounded((), (), f) == "proved"
    else:
        judge = _ORACLES[args.oracle]
    forms = oracle.gen_formulas(args.count, args.size, args.seed)
    limits = SearchLimits(max_depth=args.depth)
    rows = []
    n_disagree = n_bounded = 0
    for f in forms:
        res = prove(rs, GoalSpec((), (Atom("rght", (f,)),)), limits)
        verdict, _ = _search_outcome(res)
        want = judge(f)
        if verdict == "bounded":
            mark = "bounded"
            n_bounded += 1
        elif (verdict == "proved") == want:
            mark = "agree"
        else:
            mark = "DISAGREE"
            n_disagree += 1
        text = dsl.render_term(f)
        rows.append({"formula": text, "engine": verdict, "oracle": want})
        print(f"{mark:9} engine={verdict:9} oracle={str(want):5} {text}")
    print(f"{len(forms)} formulas, {n_disagree} disagreements, "
          f"{n_bounded} bounded")
    code = 4 if n_disagree else (2 if n_bounded else 0)
    verdict = "disagree" if n_disagree else ("bounded" if n_bounded else "ok")
    return RunReport(("compare",), verdict, code,
                     data={"rows": rows, "disagreements": n_disagree,
                           "bounded": n_bounded})


def _cmd_fib(args) -> RunReport:
    rs = encodings.fib_rules(args.variant, args.n)
    goal = encodings.fib_goal(args.variant, args.n)
    depth = args.depth if args.depth is not None else max(12, args.n + 4)
    trace = (lambda line: print(line)) if args.trace else None
    res = prove(rs, goal, SearchLimits(max_depth=depth), trace=trace)
    verdict, code = _search_outcome(res)
    data = {"variant": args.variant, "n": args.n, "verdict": verdict}
    if isinstance(res, Proved):
        size = proofs.proof_size(res.proof)
        ndec = proofs.count_rule(res.proof, "decide")
        print(f"proved: {args.variant} n={args.n}, proof has {size} nodes, "
              f"{ndec} decide steps")
        data.update(proof_nodes=size, proof_decides=ndec)
    else:
        print(f"{verdict}: {args.variant} n={args.n}")
    if args.stats:
        print(_stats_line(res.stats))
    data["stats"] = _stats_dict(res.stats)
    return RunReport(("fib",), verdict, code, res.stats, (), data)


def _cmd_export(args) -> RunReport:
    os.makedirs(args.dir, exist_ok=True)
    paths = []
    for name in encodings.BUILTIN_NAMES:
        path = os.path.join(args.dir, f"{name}.psf")
        with open(path, "w") as fh:
            fh.write(encodings.builtin_text(name))
        paths.append(path)
        print(path)
    return RunReport(("export-encodings",), "ok", 0, artifacts=tuple(paths),
                     data={"written": paths})


def _build_parser() -> _ArgParser:
    ap = _ArgParser(prog="psf", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, bias=True):
        p.add_argument("--json", action="store_true",
                       help="emit a machine-readable report as the last line")
        if bias:
            p.add_argument("--bias", action="append", metavar="TAG=VAL",
                           help="override a bias declaration")

    p = sub.add_parser("prove", help="search for a proof of a goal")
    p.add_argument("rules", help="rule file path or builtin:NAME")
    p.add_argument("--goal", required=True, help="goal text")
    p.add_argument("--depth", type=int, default=12,
                   help="decide steps per branch (default 12)")
    p.add_argument("--no-debit", action="store_true")
    p.add_argument("--no-loop-check", action="store_true")
    p.add_argument("--proof-out", metavar="PATH")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--trace", action="store_true",
                   help="stream decide/backtrack/border events")
    common(p)
    p.set_defaults(fn=_cmd_prove)

    p = sub.add_parser("check", help="re-verify a stored proof")
    p.add_argument("proof", help="proof JSON path")
    p.add_argument("--rules", required=True)
    p.add_argument("--goal", help="also check the end sequent against a goal")
    common(p)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("synth", help="display the synthetic rules of a rule")
    p.add_argument("rules")
    p.add_argument("--rule", required=True, help="rule name")
    p.add_argument("--latex", action="store_true")
    common(p)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("compare", help="compare engine verdicts to an oracle")
    p.add_argument("rules")
    p.add_argument("--oracle", required=True,
                   choices=("classical", "intuitionistic", "ll"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--depth", type=int, default=10)
    common(p)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("fib", help="run a Fibonacci bias experiment")
    p.add_argument("--variant", required=True,
                   choices=("topdown", "plus1", "plus2", "pair"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--stats", action="store_true")
    p.add_argument("--trace", action="store_true")
    common(p, bias=False)
    p.set_defaults(fn=_cmd_fib)

    p = sub.add_parser("export-encodings",
                       help="write every builtin rule set to a directory")
    p.add_argument("dir")
    common(p, bias=False)
    p.set_defaults(fn=_cmd_export)
    return ap


def run(argv) -> RunReport:
    argv = list(argv)
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as ex:  # --help lands here
        return RunReport(tuple(argv), "help", int(ex.code or 0))
    except UsageError as ex:
        print(f"usage error: {ex}", file=sys.stderr)
        return RunReport(tuple(argv), "error", 3, data={"error": str(ex)})
    try:
        report = args.fn(args)
    except (UsageError, ParseError, ConfigError, OSError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return RunReport(tuple(argv), "error", 3, data={"error": str(ex)})
    report = RunReport(tuple(argv), report.verdict, report.exit_code,
                       report.stats, report.artifacts, report.data)
    if getattr(args, "json", False):
        print(json.dumps({"command": list(argv), "verdict": report.verdict,
                          "exit_code": report.exit_code, **report.data},
                         sort_keys=True))
    return report


def main():
    sys.exit(run(sys.argv[1:]).exit_code)


if __name__ == "__main__":
    main()
