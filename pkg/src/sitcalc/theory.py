"""Action theories: declarations, successor-state rules, effect compilation, validation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping, Sequence

from .core import (
    BUILTIN_DOMAINS,
    BUILTIN_FUNCTIONS,
    BinOp,
    BoolOp,
    Call,
    Cmp,
    Compiler,
    Domain,
    Env,
    EvaluationError,
    FluentIndex,
    FluentRef,
    GroundAction,
    IfThenElse,
    InRange,
    Lit,
    Neg,
    Node,
    Not,
    ObservationSignature,
    Pos,
    Quant,
    SitCalcError,
    Trajectory,
    Value,
    Var,
    WorldState,
    format_value,
    kind_of,
    prev_depth,
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # error | warning | info
    message: str
    pos: Pos | None = None

    def __str__(self) -> str:
        loc = f"{self.pos}: " if self.pos else ""
        return f"{loc}{self.severity}: {self.message}"


class TheoryError(SitCalcError):
    """Parse or validation failure carrying every diagnostic found."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else Diagnostic("error", "invalid theory")
        super().__init__(
            "; ".join(f"{d.message}" for d in self.diagnostics if d.severity == "error") or first.message,
            first.pos,
        )


# ---------------------------------------------------------------------------
# declarations


@dataclass(frozen=True)
class Param:
    name: str
    domain: str
    mode: str = "nominal"  # nominal | actual


@dataclass(frozen=True)
class FluentDecl:
    name: str
    params: tuple = ()  # ((name, domain name), ...)
    domain: str = "bool"
    default: Value | None = None
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple  # (Param, ...)
    poss: Node = Lit(True)
    observe_key: str = ""
    observe_params: tuple = ()
    likelihood: Node = Lit(1)
    pos: Pos | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.observe_key:
            object.__setattr__(self, "observe_key", self.name)
            object.__setattr__(
                self, "observe_params", tuple(p.name for p in self.params if p.mode == "nominal")
            )

    @property
    def nominal(self) -> tuple:
        return tuple(p for p in self.params if p.mode == "nominal")

    @property
    def actual(self) -> tuple:
        return tuple(p for p in self.params if p.mode == "actual")

    def param(self, name: str) -> Param:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def bindings(self, action: GroundAction) -> dict:
        return {p.name: v for p, v in zip(self.params, action.args)}


@dataclass(frozen=True)
class Pattern:
    """Action pattern in a rule: schema name plus Var/Lit arguments (``_`` matches anything)."""

    schema: str
    args: tuple

    def __str__(self) -> str:
        from .printer import expr_str

        return f"{self.schema}({', '.join(expr_str(a) for a in self.args)})"


@dataclass(frozen=True)
class Case:
    pattern: Pattern
    guard: Node | None
    value: Node


@dataclass(frozen=True)
class SuccessorStateRule:
    """First matching case wins; no match leaves the fluent unchanged."""

    fluent: str
    params: tuple = ()  # names bound to the ground fluent's arguments
    cases: tuple = ()

    def axiom_text(self, relational: bool | None = None) -> str:
        """Human-readable successor-state axiom."""
        from .printer import expr_str

        head = self.fluent + (f"({', '.join(self.params)})" if self.params else "")

        def cond(c: Case) -> str:
            fresh = sorted(
                {a.name for a in c.pattern.args if isinstance(a, Var)} - set(self.params) - {"_"}
            )
            q = f"∃{','.join(fresh)}. " if fresh else ""
            eq = f"a = {c.pattern}"
            body = f"{eq} ∧ {expr_str(c.guard)}" if c.guard is not None else eq
            return f"({q}{body})" if q else body

        is_rel = relational
        if is_rel is None:
            is_rel = all(isinstance(c.value, Lit) and isinstance(c.value.value, bool) for c in self.cases)
        if is_rel:
            pos = [cond(c) for c in self.cases if c.value == Lit(True)]
            neg = [cond(c) for c in self.cases if c.value == Lit(False)]
            gone = neg[0] if len(neg) == 1 and neg[0].startswith("(") else f"({' ∨ '.join(neg)})"
            keep = head if not neg else f"{head} ∧ ¬{gone}"
            return f"{head}' ≡ " + " ∨ ".join(pos + [f"({keep})" if neg else keep])
        parts = [f"if {cond(c)} then {expr_str(c.value)}" for c in self.cases]
        return f"{head}' = " + " else ".join(parts + [head])


@dataclass(frozen=True)
class EffectClause:
    """One causal law.  ``polarity`` is '+'/'-' for relational fluents,
    None for a functional clause carrying ``value``."""

    fluent: str
    pattern: Pattern
    polarity: str | None = None
    value: Node | None = None
    context: Node | None = None
    params: tuple = ()


def compile_effect_axioms(
    clauses: Sequence[EffectClause], fluent: str | None = None, params: tuple = ()
) -> SuccessorStateRule:
    """Close a set of effect clauses under the completeness assumption.

    Relational: F' iff some positive context holds, or F held and no negative
    context holds (positive cases come first, so they win on conflict).
    Functional: the value clauses in order, unchanged otherwise.
    """
    targets = {c.fluent for c in clauses}
    if fluent is not None:
        targets.add(fluent)
    if len(targets) > 1:
        raise TheoryError([Diagnostic("error", f"effect clauses mix target fluents {sorted(targets)}")])
    if not targets:
        raise TheoryError([Diagnostic("error", "no target fluent for an empty clause list")])
    name = targets.pop()
    if clauses:
        params = clauses[0].params
        if any(c.params != params for c in clauses):
            raise TheoryError([Diagnostic("error", f"effect clauses for {name} disagree on parameter names")])
    relational = {c.polarity is not None for c in clauses}
    if len(relational) > 1:
        raise TheoryError([Diagnostic("error", f"relational and functional effect clauses mixed for {name}")])
    if relational == {True}:
        cases = [Case(c.pattern, c.context, Lit(True)) for c in clauses if c.polarity == "+"]
        cases += [Case(c.pattern, c.context, Lit(False)) for c in clauses if c.polarity == "-"]
    else:
        cases = [Case(c.pattern, c.context, c.value) for c in clauses]
    return SuccessorStateRule(name, tuple(params), tuple(cases))


# ---------------------------------------------------------------------------
# the theory


@dataclass(frozen=True)
class InitWorld:
    world: WorldState
    weight: Fraction


@dataclass
class ActionTheory:
    domains: dict = field(default_factory=dict)  # name -> Domain (user-declared)
    fluents: dict = field(default_factory=dict)  # name -> FluentDecl
    actions: dict = field(default_factory=dict)  # name -> ActionSchema
    rules: dict = field(default_factory=dict)  # fluent name -> SuccessorStateRule
    effects: dict = field(default_factory=dict)  # fluent name -> tuple of EffectClause
    init: tuple = ()  # (InitWorld, ...)
    programs: dict = field(default_factory=dict)  # name -> ProgramDef
    warnings: list = field(default_factory=list, compare=False, repr=False)

    # -- lookup ------------------------------------------------------------

    def domain(self, name: str) -> Domain:
        if name in self.domains:
            return self.domains[name]
        if name in BUILTIN_DOMAINS:
            return BUILTIN_DOMAINS[name]
        raise KeyError(name)

    @cached_property
    def all_domains(self) -> dict:
        return {**BUILTIN_DOMAINS, **self.domains}

    def schema(self, name: str) -> ActionSchema:
        try:
            return self.actions[name]
        except KeyError:
            raise SitCalcError(f"unknown action schema {name}") from None

    def rule(self, fluent: str) -> SuccessorStateRule:
        if fluent in self.rules:
            return self.rules[fluent]
        decl = self.fluents[fluent]
        return SuccessorStateRule(fluent, tuple(p for p, _ in decl.params))

    @cached_property
    def group_keys(self) -> dict:
        """observe key -> schemas sharing it, in declaration order."""
        out: dict[str, list] = {}
        for s in self.actions.values():
            out.setdefault(s.observe_key, []).append(s)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def symbols(self) -> dict:
        """symbol -> domain name, for every symbolic domain element."""
        out = {}
        for d in self.domains.values():
            if d.kind == "sym":
                for v in d.values:
                    out.setdefault(v, d.name)
        return out

    @cached_property
    def index(self) -> FluentIndex:
        ground, doms = [], []
        for f in self.fluents.values():
            arg_domains = [self.domain(d) for _, d in f.params]
            for args in itertools.product(*[list(d) for d in arg_domains]):
                ground.append((f.name, tuple(args)))
                doms.append(self.domain(f.domain))
        return FluentIndex(ground, doms)

    @cached_property
    def compiler(self) -> Compiler:
        return Compiler(self.index, self.all_domains, {n: len(f.params) for n, f in self.fluents.items()})

    def world(self, mapping: Mapping) -> WorldState:
        """Build a world from ``{name or (name, args): value}`` plus declared defaults."""
        full = {}
        for f in self.fluents.values():
            if f.default is not None:
                for g in self.index.ground:
                    if g[0] == f.name:
                        full[g] = f.default
        for k, v in mapping.items():
            full[k if isinstance(k, tuple) else (k, ())] = v
        return WorldState.from_mapping(self.index, full)

    def signature_of(self, action: GroundAction) -> ObservationSignature:
        s = self.schema(action.schema)
        b = s.bindings(action)
        return ObservationSignature(s.observe_key, tuple(b[p] for p in s.observe_params))

    def check_action(self, action: GroundAction) -> None:
        s = self.schema(action.schema)
        if len(action.args) != len(s.params):
            raise SitCalcError(f"{s.name} takes {len(s.params)} arguments, got {len(action.args)}")
        for p, v in zip(s.params, action.args):
            if v not in self.domain(p.domain):
                raise SitCalcError(f"argument {p.name}={format_value(v)} of {s.name} outside domain {p.domain}")

    def enumerate_actions(self, schema: ActionSchema, fixed: Mapping[str, Value]) -> Iterator[GroundAction]:
        """All ground instances of ``schema`` agreeing with ``fixed``, in domain order."""
        pools = []
        for p in schema.params:
            if p.name in fixed:
                pools.append((fixed[p.name],))
            else:
                pools.append(self.domain(p.domain))
        for args in itertools.product(*pools):
            yield GroundAction(schema.name, tuple(args))

    @cached_property
    def history_depth(self) -> int:
        """Deepest ``prev`` used by any axiom of the theory."""
        depth = 0
        for s in self.actions.values():
            depth = max(depth, prev_depth(s.poss), prev_depth(s.likelihood))
        for r in self.rules.values():
            for c in r.cases:
                depth = max(depth, prev_depth(c.value))
                if c.guard is not None:
                    depth = max(depth, prev_depth(c.guard))
        return depth

    def initial_trajectories(self) -> list:
        return [(Trajectory.initial(i, iw.world), iw.weight) for i, iw in enumerate(self.init)]

    # -- compiled axioms -----------------------------------------------------

    @cached_property
    def compiled(self) -> "CompiledTheory":
        return CompiledTheory(self)


class CompiledTheory:
    """Closures for every axiom body, keyed for fast engine access."""

    def __init__(self, theory: ActionTheory):
        comp = theory.compiler
        self.poss = {n: comp(s.poss) for n, s in theory.actions.items()}
        self.likelihood = {n: comp(s.likelihood) for n, s in theory.actions.items()}
        self.param_names = {n: tuple(p.name for p in s.params) for n, s in theory.actions.items()}
        # schema -> [(fluent slot, fluent-param bindings, [(pattern, guard, value)])]
        self.effects: dict[str, list] = {n: [] for n in theory.actions}
        index = theory.index
        for fname in theory.fluents:
            rule = theory.rule(fname)
            if not rule.cases:
                continue
            by_schema: dict[str, list] = {}
            for c in rule.cases:
                by_schema.setdefault(c.pattern.schema, []).append(
                    (c.pattern, comp(c.guard) if c.guard is not None else None, comp(c.value))
                )
            for slot, (gname, gargs) in enumerate(index.ground):
                if gname != fname:
                    continue
                fb = dict(zip(rule.params, gargs))
                for schema, cases in by_schema.items():
                    if schema in self.effects:
                        self.effects[schema].append((slot, fb, cases))


def match_pattern(pattern: Pattern, action: GroundAction, fixed: Mapping[str, Value]) -> dict | None:
    """Bindings if ``action`` matches ``pattern`` given the fluent's own parameters."""
    if pattern.schema != action.schema or len(pattern.args) != len(action.args):
        return None
    b = dict(fixed)
    for pa, v in zip(pattern.args, action.args):
        if isinstance(pa, Lit):
            if kind_of(pa.value) != kind_of(v) or pa.value != v:
                return None
        elif pa.name == "_":
            continue
        elif pa.name in b:
            if kind_of(b[pa.name]) != kind_of(v) or b[pa.name] != v:
                return None
        else:
            b[pa.name] = v
    return b


# ---------------------------------------------------------------------------
# static checks


class TypeChecker:
    """Infers bool/num/sym kinds and reports mismatches as diagnostics."""

    def __init__(self, theory: ActionTheory, diagnostics: list):
        self.t = theory
        self.diags = diagnostics

    def err(self, msg, pos):
        self.diags.append(Diagnostic("error", msg, pos))

    def check(self, node: Node, scope: Mapping[str, str], want: str | None = None, what: str = "expression") -> str | None:
        k = self.kind(node, dict(scope))
        if want and k and k != want:
            self.err(f"type mismatch: {what} must be {want}, found {k}", getattr(node, "pos", None))
        return k

    def kind(self, n: Node, scope: dict) -> str | None:
        if isinstance(n, Lit):
            return kind_of(n.value)
        if isinstance(n, Var):
            if n.name not in scope:
                self.err(f"unknown identifier {n.name}", n.pos)
                return None
            return scope[n.name]
        if isinstance(n, FluentRef):
            decl = self.t.fluents.get(n.name)
            if decl is None:
                self.err(f"unknown fluent {n.name}", n.pos)
                return None
            if len(n.args) != len(decl.params):
                self.err(f"fluent {n.name} takes {len(decl.params)} arguments", n.pos)
            for a, (_, d) in zip(n.args, decl.params):
                ak = self.kind(a, scope)
                dk = self.t.domain(d).kind
                if ak and ak != dk:
                    self.err(f"type mismatch: argument of {n.name} must be {dk}, found {ak}", a.pos)
            return self.t.domain(decl.domain).kind
        if isinstance(n, (BinOp, Neg)):
            for c in ((n.left, n.right) if isinstance(n, BinOp) else (n.operand,)):
                k = self.kind(c, scope)
                if k and k != "num":
                    self.err(f"type mismatch: arithmetic on {k}", c.pos)
            return "num"
        if isinstance(n, Call):
            if n.fn not in BUILTIN_FUNCTIONS:
                self.err(f"unknown function {n.fn}", n.pos)
            for c in n.args:
                k = self.kind(c, scope)
                if k and k != "num":
                    self.err(f"type mismatch: {n.fn}() needs numbers, found {k}", c.pos)
            return "num"
        if isinstance(n, IfThenElse):
            k = self.kind(n.cond, scope)
            if k and k != "bool":
                self.err(f"type mismatch: condition must be bool, found {k}", n.cond.pos)
            a, b = self.kind(n.then, scope), self.kind(n.other, scope)
            if a and b and a != b:
                self.err(f"type mismatch: if-branches are {a} and {b}", n.pos)
            return a or b
        if isinstance(n, Cmp):
            a, b = self.kind(n.left, scope), self.kind(n.right, scope)
            if a and b and a != b:
                self.err(f"type mismatch: cannot compare {a} {n.op} {b}", n.pos)
            if n.op not in ("=", "!=") and ((a and a != "num") or (b and b != "num")):
                self.err(f"type mismatch: {n.op} needs numbers", n.pos)
            return "bool"
        if isinstance(n, InRange):
            for c in (n.expr, n.lo, n.hi):
                k = self.kind(c, scope)
                if k and k != "num":
                    self.err("type mismatch: interval membership needs numbers", c.pos)
            return "bool"
        if isinstance(n, (Not, BoolOp)):
            for c in ((n.operand,) if isinstance(n, Not) else (n.left, n.right)):
                k = self.kind(c, scope)
                if k and k != "bool":
                    self.err(f"type mismatch: logical operand must be bool, found {k}", c.pos)
            return "bool"
        if isinstance(n, Quant):
            try:
                d = self.t.domain(n.domain)
            except KeyError:
                self.err(f"unknown domain {n.domain}", n.pos)
                return "bool"
            if not d.finite:
                self.err(f"cannot quantify over unbounded domain {n.domain}", n.pos)
            inner = dict(scope)
            inner[n.var] = d.kind
            k = self.kind(n.body, inner)
            if k and k != "bool":
                self.err("type mismatch: quantifier body must be bool", n.body.pos)
            return "bool"
        raise TypeError(n)


def action_scope(theory: ActionTheory, schema: ActionSchema) -> dict:
    return {p.name: theory.domain(p.domain).kind for p in schema.params}


def rule_scope(theory: ActionTheory, rule: SuccessorStateRule, pattern: Pattern, diags: list) -> dict:
    decl = theory.fluents[rule.fluent]
    scope = {p: theory.domain(d).kind for p, (_, d) in zip(rule.params, decl.params)}
    schema = theory.actions.get(pattern.schema)
    if schema is None:
        diags.append(Diagnostic("error", f"unknown action schema {pattern.schema}"))
        return scope
    if len(pattern.args) != len(schema.params):
        diags.append(
            Diagnostic("error", f"pattern {pattern} must have {len(schema.params)} arguments")
        )
        return scope
    for a, p in zip(pattern.args, schema.params):
        k = theory.domain(p.domain).kind
        if isinstance(a, Var) and a.name != "_":
            if a.name in scope and scope[a.name] != k:
                diags.append(Diagnostic("error", f"type mismatch: pattern variable {a.name} is {scope[a.name]} and {k}", a.pos))
            scope[a.name] = k
        elif isinstance(a, Lit) and kind_of(a.value) != k:
            diags.append(Diagnostic("error", f"type mismatch: pattern constant {format_value(a.value)} for {p.name}", a.pos))
    return scope


def _covers(a: Pattern, b: Pattern) -> bool:
    """True when every action matching ``b`` also matches ``a`` (a has only variables)."""
    if a.schema != b.schema or len(a.args) != len(b.args):
        return False
    names = [x.name for x in a.args if isinstance(x, Var) and x.name != "_"]
    return all(isinstance(x, Var) for x in a.args) and len(names) == len(set(names))


def validate_theory(theory: ActionTheory, normalization_budget: int = 200_000) -> list:
    """Static and semantic checks; returns diagnostics, never raises."""
    diags: list[Diagnostic] = []
    tc = TypeChecker(theory, diags)

    for s in theory.actions.values():
        scope = action_scope(theory, s)
        for p in s.params:
            if p.domain not in theory.all_domains:
                diags.append(Diagnostic("error", f"unknown domain {p.domain} for parameter {p.name} of {s.name}", s.pos))
            elif p.mode == "actual" and not theory.domain(p.domain).finite:
                diags.append(
                    Diagnostic("error", f"actual parameter domain must be finite ({s.name}.{p.name}: {p.domain})", s.pos)
                )
        tc.check(s.poss, scope, "bool", f"precondition of {s.name}")
        tc.check(s.likelihood, scope, "num", f"likelihood of {s.name}")
        for v in s.observe_params:
            if v not in scope:
                diags.append(Diagnostic("error", f"observe clause of {s.name} names unknown parameter {v}", s.pos))
            elif s.param(v).mode == "actual":
                diags.append(Diagnostic("warning", f"{s.name} makes actual parameter {v} observable", s.pos))

    for key, group in theory.group_keys.items():
        shapes = {
            tuple(theory.domain(s.param(v).domain).kind for v in s.observe_params if v in action_scope(theory, s))
            for s in group
        }
        if len(shapes) > 1:
            diags.append(
                Diagnostic("error", f"schemas sharing observation key {key} disagree on visible arguments", group[0].pos)
            )

    for fname, rule in theory.rules.items():
        decl = theory.fluents.get(fname)
        if decl is None:
            diags.append(Diagnostic("error", f"successor rule for unknown fluent {fname}"))
            continue
        fk = theory.domain(decl.domain).kind
        for i, c in enumerate(rule.cases):
            scope = rule_scope(theory, rule, c.pattern, diags)
            if c.guard is not None:
                tc.check(c.guard, scope, "bool", f"guard in rule for {fname}")
            tc.check(c.value, scope, fk, f"value in rule for {fname}")
            if c.guard is None:
                for later in rule.cases[i + 1:]:
                    if _covers(c.pattern, later.pattern):
                        diags.append(
                            Diagnostic("warning", f"case {later.pattern} for {fname} is unreachable: {c.pattern} matches first")
                        )

    if any(d.severity == "error" for d in diags):
        return diags

    for iw in theory.init:
        if iw.weight < 0:
            diags.append(Diagnostic("error", f"initial weight {format_value(iw.weight)} is negative"))
    if theory.init and sum(iw.weight for iw in theory.init) <= 0:
        diags.append(Diagnostic("error", "initial weights must have a positive total"))
    if not theory.init:
        diags.append(Diagnostic("warning", "no initial worlds declared"))

    diags.extend(_likelihood_checks(theory, normalization_budget))
    return diags


def _likelihood_checks(theory: ActionTheory, budget: int) -> list:
    out: list[Diagnostic] = []
    comp = theory.compiled
    trajs = [t for t, _ in theory.initial_trajectories()]

    for s in theory.actions.values():
        if isinstance(s.likelihood, Lit):
            if kind_of(s.likelihood.value) == "num" and s.likelihood.value < 0:
                out.append(Diagnostic("error", f"likelihood must be nonnegative ({s.name})", s.likelihood.pos))
            continue
        if any(not theory.domain(p.domain).finite for p in s.params):
            continue
        lk, spent = comp.likelihood[s.name], 0
        names = comp.param_names[s.name]
        for t in trajs:
            for a in theory.enumerate_actions(s, {}):
                spent += 1
                if spent > budget:
                    break
                try:
                    v = lk(Env(t, dict(zip(names, a.args))))
                except EvaluationError as e:
                    out.append(Diagnostic("error", f"likelihood of {a}: {e.message}", e.pos))
                    break
                if v < 0:
                    out.append(Diagnostic("error", f"likelihood must be nonnegative ({a} gives {format_value(v)})", s.likelihood.pos))
                    break

    for key, group in theory.group_keys.items():
        out.extend(_normalization(theory, key, group, trajs, budget))
    return out


def _normalization(theory, key, group, trajs, budget) -> list:
    comp = theory.compiled
    first = group[0]
    vis_domains = [theory.domain(first.param(v).domain) for v in first.observe_params]
    if not all(d.finite for d in vis_domains):
        return []
    bad, spent = None, 0
    for t in trajs:
        for vis in itertools.product(*vis_domains):
            total, possible = 0, False
            for s in group:
                fixed = dict(zip(s.observe_params, vis))
                if any(v not in theory.domain(s.param(n).domain) for n, v in fixed.items()):
                    continue
                names = comp.param_names[s.name]
                for a in theory.enumerate_actions(s, fixed):
                    spent += 1
                    env = Env(t, dict(zip(names, a.args)))
                    try:
                        if not comp.poss[s.name](env):
                            continue
                        total += comp.likelihood[s.name](env)
                    except EvaluationError:
                        continue
                    possible = True
            if possible and abs(total - 1) > (1e-9 if isinstance(total, float) else 0):
                # prefer an example with a nonzero sum; it says more
                if bad is None or (not bad[2] and total):
                    bad = (t.last, ObservationSignature(key, vis), total)
            if spent > budget:
                return [Diagnostic("info", f"normalization check for {key} stopped after {budget} evaluations")] + (
                    [_norm_warning(key, bad)] if bad else []
                )
    return [_norm_warning(key, bad)] if bad else []


def _norm_warning(key, bad) -> Diagnostic:
    world, sig, total = bad
    return Diagnostic(
        "warning",
        f"likelihoods of {key} do not sum to 1 over possible completions "
        f"(e.g. {sig} in {world!r} sums to {format_value(total)})",
    )
