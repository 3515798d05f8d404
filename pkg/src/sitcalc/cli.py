"""Command-line front end: ``sitcalc run|verify|check|kalman``.

Exit codes: 0 success, 1 theory/scenario/usage error, 2 runtime belief
error (impossible observation, undefined belief, evaluation failure),
3 failed scenario assertion or engine/oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from fractions import Fraction
from pathlib import Path

from .core import SitCalcError, format_value
from .engine import program_signatures
from .gaussian import GaussianBelief, kalman_correct, kalman_predict
from .oracle import oracle_bel, oracle_know
from .parser import parse_theory
from .printer import expr_str
from .scenario import Exec, Observe, Query, ScenarioError, parse_scenario, run_scenario
from .theory import TheoryError, validate_theory

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME, EXIT_CHECK = 0, 1, 2, 3

_COLORS = {"error": "31", "warning": "33", "info": "36", "ok": "32"}


def _color_enabled(stream) -> bool:
    if os.environ.get("SITCALC_COLOR") == "0":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, kind: str, stream) -> str:
    if not _color_enabled(stream):
        return text
    return f"\x1b[{_COLORS[kind]}m{text}\x1b[0m"


def _err(msg: str, kind: str = "error") -> None:
    print(_paint(msg, kind, sys.stderr), file=sys.stderr)


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _err(f"{self.prog}: error: {message}")
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="sitcalc", description="Belief progression for noisy action theories.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    def common(sp, scenario=True):
        sp.add_argument("--theory", required=True, type=Path, help="theory file")
        if scenario:
            sp.add_argument("--scenario", required=True, type=Path, help="scenario file")

    run = sub.add_parser("run", help="execute a scenario and write its trace")
    common(run)
    run.add_argument("--mode", choices=("belief", "simulate"), default="belief")
    num = run.add_mutually_exclusive_group()
    num.add_argument("--exact", dest="numeric", action="store_const", const="exact")
    num.add_argument("--float", dest="numeric", action="store_const", const="float")
    run.set_defaults(numeric="exact")
    run.add_argument("--seed", type=int, default=0, help="simulate-mode RNG seed")
    run.add_argument("--output", type=Path, help="write the trace here instead of stdout")
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--prune-epsilon", type=float, help="float mode: drop members below this normalized weight")
    run.add_argument("--history", type=int, help="keep only this many past steps per member")

    ver = sub.add_parser("verify", help="compare engine queries against the brute-force oracle")
    common(ver)

    chk = sub.add_parser("check", help="print theory diagnostics")
    common(chk, scenario=False)

    kal = sub.add_parser("kalman", help="closed-form Gaussian predict/correct, as CSV")
    kal.add_argument("--mean", type=float, default=0.0)
    kal.add_argument("--var", type=float, default=1.0)
    kal.add_argument("--effector-var", type=float, default=1.0)
    kal.add_argument("--sensor-var", type=float, default=1.0)
    kal.add_argument(
        "ops", nargs="*", metavar="OP",
        help="predict=X (move by X) or correct=Z (reading Z), applied in order",
    )
    return p


def _load(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e.strerror}") from None


def _inputs(args, scenario=True):
    try:
        theory = parse_theory(_load(args.theory))
    except TheoryError as e:
        e.path = args.theory
        raise
    if not scenario:
        return theory
    try:
        return theory, parse_scenario(_load(args.scenario), theory)
    except TheoryError as e:
        e.path = args.scenario
        raise


def _report_diagnostics(diags, path) -> None:
    for d in diags:
        where = f"{path}:{d.pos}" if d.pos else str(path)
        _err(f"{where}: {d.severity}: {d.message}", d.severity)


def cmd_run(args) -> int:
    theory, scenario = _inputs(args)
    trace = run_scenario(
        theory, scenario, args.mode, args.numeric, args.seed, args.prune_epsilon, args.history
    )
    text = trace.to_json() if args.format == "json" else trace.to_csv()
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for f in trace.failures:
        _err(f)
    return EXIT_CHECK if trace.failures else EXIT_OK


def cmd_verify(args) -> int:
    theory, scenario = _inputs(args)
    trace = run_scenario(theory, scenario)
    # rebuild the signature prefix seen by each query
    sigs, mismatches, checked = [], 0, 0
    belief_at = {s.step: s for s in trace.steps}
    step = 0
    for st in scenario.steps:
        if isinstance(st, Observe):
            sigs.append(st.signature)
            step += 1
        elif isinstance(st, Exec):
            seq = next(iter(program_signatures(theory, st.program)))
            sigs.extend(seq)
            step += len(seq)
        elif isinstance(st, Query):
            text = expr_str(st.formula)
            got = next(q["result"] for q in belief_at[step].queries if q["formula"] == text and q["kind"] == st.kind)
            want = oracle_bel(theory, sigs, st.formula) if st.kind == "bel" else oracle_know(theory, sigs, st.formula)
            want_s = want if isinstance(want, bool) else format_value(Fraction(want))
            ok = got == want_s
            checked += 1
            mismatches += not ok
            line = f"step {step}: {st.kind} {text}: engine {_show(got)} oracle {_show(want_s)}"
            print(_paint(("ok   " if ok else "FAIL ") + line, "ok" if ok else "error", sys.stdout))
    print(f"{checked} queries checked, {mismatches} mismatches")
    return EXIT_CHECK if mismatches else EXIT_OK


def _show(v) -> str:
    return format_value(v) if isinstance(v, bool) else str(v)


def cmd_check(args) -> int:
    theory = _inputs(args, scenario=False)
    diags = validate_theory(theory)
    _report_diagnostics(diags, args.theory)
    n_err = sum(d.severity == "error" for d in diags)
    n_warn = sum(d.severity == "warning" for d in diags)
    print(f"{len(theory.actions)} action schemas, {len(theory.fluents)} fluents, "
          f"{len(theory.init)} initial worlds; {n_err} errors, {n_warn} warnings")
    return EXIT_INPUT if n_err else EXIT_OK


def cmd_kalman(args) -> int:
    b = GaussianBelief(args.mean, args.var)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "op", "value", "mean", "var"])
    w.writerow([0, "init", "", repr(b.mean), repr(b.var)])
    for i, op in enumerate(args.ops, 1):
        kind, _, val = op.partition("=")
        try:
            x = float(val)
        except ValueError:
            raise ScenarioError(f"bad kalman step {op!r}; use predict=X or correct=Z") from None
        if kind == "predict":
            b = kalman_predict(b, x, args.effector_var)
        elif kind == "correct":
            b = kalman_correct(b, x, args.sensor_var)
        else:
            raise ScenarioError(f"bad kalman step {op!r}; use predict=X or correct=Z")
        w.writerow([i, kind, repr(x), repr(b.mean), repr(b.var)])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


COMMANDS = {"run": cmd_run, "verify": cmd_verify, "check": cmd_check, "kalman": cmd_kalman}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except TheoryError as e:
        _report_diagnostics(e.diagnostics, getattr(e, "path", args.theory))
        return EXIT_INPUT
    except (ScenarioError, ValueError) as e:
        _err(f"error: {e}")
        return EXIT_INPUT
    except SitCalcError as e:
        _err(f"error: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
