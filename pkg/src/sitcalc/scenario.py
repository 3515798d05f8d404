"""Scenario scripts: parsing, execution against a theory, and trace output."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    BeliefState,
    Node,
    ObservationSignature,
    Pos,
    SitCalcError,
    Trajectory,
    WorldState,
    format_value,
    json_value,
    kind_of,
    norm_num,
)
from .engine import (
    bel,
    initial_belief,
    know,
    program_signatures,
    progress,
    simulate_observation,
    simulate_program,
)
from .parser import ParseError, Parser
from .printer import expr_str, program_str
from .programs import Program
from .theory import ActionTheory, TypeChecker


@dataclass(frozen=True)
class Observe:
    signature: ObservationSignature
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Exec:
    program: Program
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Query:
    kind: str  # bel | know
    formula: Node
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Assert:
    """Check on the most recent query result.

    ``op`` is a comparison operator, ``approx`` (with ``tol``) or ``is`` for
    a truth value.
    """

    op: str
    value: object
    tol: object = None
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Scenario:
    steps: tuple
    actual: WorldState | None = None


class ScenarioError(SitCalcError):
    pass


# ---------------------------------------------------------------------------
# parsing


_CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


def parse_scenario(text: str, theory: ActionTheory) -> Scenario:
    p = Parser(text, theory)
    steps = []
    actual = None
    while p.tok.kind != "eof":
        if p.accept(";"):
            continue
        t = p.tok
        if p.accept("actual"):
            if actual is not None:
                p.fail("duplicate actual block", t.pos)
            actual = p.world_block()
        elif p.accept("observe"):
            steps.append(Observe(_signature(p, theory), t.pos))
        elif p.accept("exec"):
            prog = p.program(frozenset(), stop_at_steps=True)
            diags: list = []
            p._check_program(prog, {}, diags)
            if diags:
                raise ParseError(diags)
            steps.append(Exec(prog, t.pos))
        elif p.accept("query"):
            if p.accept("bel"):
                kind = "bel"
            elif p.accept("know"):
                kind = "know"
            else:
                p.fail("syntax error: expected 'bel' or 'know' after query")
            f = p.expr(frozenset())
            diags = []
            TypeChecker(theory, diags).check(f, {}, "bool", "query")
            if diags:
                raise ParseError(diags)
            steps.append(Query(kind, f, t.pos))
        elif p.accept("assert"):
            steps.append(_assert(p, t.pos))
        else:
            p.fail(f"malformed step: expected observe, exec, query, assert or actual, found '{t.text}'")
        if p.tok.kind != "eof" and not p.at(";") and p.tok.text not in ("observe", "exec", "query", "assert", "actual"):
            p.fail(f"syntax error: unexpected '{p.tok.text}' after step")
    return Scenario(tuple(steps), actual)


def _signature(p: Parser, theory: ActionTheory) -> ObservationSignature:
    nt = p.ident("action schema")
    group = theory.group_keys.get(nt.text)
    if not group:
        p.fail(f"unknown action schema {nt.text}", nt.pos)
    args = []
    if p.accept("("):
        while not p.at(")"):
            args.append(norm_num(p.constant()))
            if not p.accept(","):
                break
        p.expect(")")
    schema = group[0]
    if len(args) != len(schema.observe_params):
        p.fail(f"observation {nt.text} carries {len(schema.observe_params)} values, got {len(args)}", nt.pos)
    for name, v in zip(schema.observe_params, args):
        dom = theory.domain(schema.param(name).domain)
        if v not in dom:
            p.fail(f"observed value {format_value(v)} for {name} is outside domain {dom.name}", nt.pos)
    return ObservationSignature(nt.text, tuple(args))


def _assert(p: Parser, pos) -> Assert:
    if p.accept("approx"):
        v = p.constant()
        tol = Fraction(1, 10**9)
        if p.accept("tol"):
            tol = p.constant()
        return Assert("approx", v, tol, pos)
    if p.at("true", "false"):
        return Assert("is", p.constant(), None, pos)
    for op in _CMP_OPS:
        if p.accept(op):
            return Assert(op, p.constant(), None, pos)
    p.fail("syntax error: expected a comparison, 'approx', 'true' or 'false' after assert")


# ---------------------------------------------------------------------------
# execution


@dataclass
class TraceStep:
    step: int
    signature: str | None
    belief: list  # [(WorldState, weight)]
    action: str | None = None  # simulate mode: the executed ground action
    actual: WorldState | None = None
    queries: list = field(default_factory=list)


@dataclass
class Trace:
    mode: str
    numeric: str
    steps: list
    final: BeliefState
    failures: list = field(default_factory=list)  # failed asserts, as messages

    def to_json(self) -> str:
        out = []
        for s in self.steps:
            d = {"step": s.step, "signature": s.signature}
            if self.mode == "simulate":
                d["action"] = s.action
                d["actual"] = _world_json(s.actual) if s.actual is not None else None
            d["belief"] = [{"world": _world_json(w), "weight": _weight_json(x)} for w, x in s.belief]
            d["queries"] = s.queries
            out.append(d)
        doc = {"mode": self.mode, "numeric": self.numeric, "steps": out}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        """Single-fluent marginals, one row per (step, ground fluent, value)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "fluent", "value", "bel"])
        for s in self.steps:
            acc: dict = {}
            for world, x in s.belief:
                for label, v in world.as_dict().items():
                    per = acc.setdefault(label, {})
                    per[v] = per.get(v, 0) + x
            for label, per in acc.items():
                for v in sorted(per, key=_value_key):
                    w.writerow([s.step, label, format_value(v), _weight_text(per[v])])
        return buf.getvalue()


def _value_key(v):
    return (kind_of(v), str(v) if isinstance(v, str) else v)


def _world_json(world: WorldState) -> dict:
    return {k: json_value(v) for k, v in world.as_dict().items()}


def _weight_json(x):
    if isinstance(x, float):
        return x
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _weight_text(x) -> str:
    return repr(x) if isinstance(x, float) else _weight_json(x)


def _result_json(v):
    if isinstance(v, bool) or isinstance(v, float):
        return v
    return _weight_json(v)


def run_scenario(
    theory: ActionTheory,
    scenario: Scenario,
    mode: str = "belief",
    numeric: str = "exact",
    seed: int | None = 0,
    prune_epsilon: float | None = None,
    history: int | None = None,
) -> Trace:
    """Execute every step in order, threading the belief state.

    Simulate mode also threads the actual trajectory, sampling outcomes with
    a ``random.Random(seed)``.  Runtime errors carry the 1-based step index.
    """
    if mode not in ("belief", "simulate"):
        raise ValueError(f"unknown mode {mode!r}")
    if prune_epsilon is not None and numeric != "float":
        raise ScenarioError("--prune-epsilon requires float mode")
    if mode == "simulate" and scenario.actual is None:
        raise ScenarioError("simulate mode requires an actual { ... } block in the scenario")
    rng = random.Random(seed)
    belief = initial_belief(theory, numeric)
    actual = Trajectory.initial(-1, scenario.actual) if mode == "simulate" else None
    steps = [TraceStep(0, None, belief.table(), actual=scenario.actual)]
    failures = []
    last = None

    def advance(sig, action=None, world=None):
        nonlocal belief
        belief = progress(theory, belief, sig, history)
        if prune_epsilon is not None:
            belief = belief.prune(prune_epsilon)
        steps.append(TraceStep(belief.step, str(sig), belief.table(), action, world))

    for n, st in enumerate(scenario.steps, 1):
        try:
            if isinstance(st, Observe):
                if actual is not None:
                    out = simulate_observation(theory, actual, st.signature, rng)
                    actual = actual.extend(out.action, out.world)
                    advance(st.signature, str(out.action), out.world)
                else:
                    advance(st.signature)
            elif isinstance(st, Exec):
                if actual is not None:
                    for out in simulate_program(theory, actual, st.program, rng):
                        actual = actual.extend(out.action, out.world)
                        advance(out.signature, str(out.action), out.world)
                else:
                    seqs = program_signatures(theory, st.program)
                    if len(seqs) != 1:
                        raise ScenarioError(
                            f"exec {program_str(st.program)} can produce {len(seqs)} different observations; "
                            "use simulate mode or observe"
                        )
                    for sig in next(iter(seqs)):
                        advance(sig)
            elif isinstance(st, Query):
                f = bel if st.kind == "bel" else know
                last = f(theory, belief, st.formula)
                steps[-1].queries.append(
                    {"kind": st.kind, "formula": expr_str(st.formula), "result": _result_json(last)}
                )
            elif isinstance(st, Assert):
                if last is None:
                    raise ScenarioError("assert without a preceding query", st.pos)
                ok = check_assert(st, last)
                steps[-1].queries[-1].setdefault("asserts", []).append(
                    {"expect": _assert_text(st), "ok": ok}
                )
                if not ok:
                    failures.append(
                        f"step {n} (S{belief.step}): assertion {_assert_text(st)} failed, got {format_value(last)}"
                    )
        except SitCalcError as e:
            if getattr(e, "step", None) is not None:
                raise
            raise _at_step(e, n) from e
    return Trace(mode, numeric, steps, belief, failures)


def _at_step(e: SitCalcError, n: int) -> SitCalcError:
    if isinstance(e, ParseError):
        return e
    out = type(e)(f"{e.message} at step {n}", e.pos)
    out.step = n
    return out


def check_assert(a: Assert, value) -> bool:
    if a.op == "is":
        return isinstance(value, bool) and value == a.value
    if isinstance(value, bool):
        return a.op in ("=", "!=") and (value == a.value) == (a.op == "=")
    if a.op == "approx":
        return abs(value - a.value) <= a.tol
    return {
        "=": value == a.value,
        "!=": value != a.value,
        "<": value < a.value,
        "<=": value <= a.value,
        ">": value > a.value,
        ">=": value >= a.value,
    }[a.op]


def _assert_text(a: Assert) -> str:
    if a.op == "is":
        return format_value(a.value)
    if a.op == "approx":
        return f"approx {format_value(a.value)} tol {format_value(a.tol)}"
    return f"{a.op} {format_value(a.value)}"


__all__ = [
    "Assert",
    "Exec",
    "Observe",
    "Query",
    "Scenario",
    "ScenarioError",
    "Trace",
    "TraceStep",
    "parse_scenario",
    "run_scenario",
]
