"""Hand-written lexer and recursive-descent parser for theory and scenario files.

Identifiers may contain hyphens (``sense-position``), so binary minus
between two names needs whitespace: ``x - y``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

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
    FluentIndex,
    FluentRef,
    IfThenElse,
    InRange,
    Lit,
    Neg,
    Node,
    Not,
    Pos,
    Quant,
    SitCalcError,
    Var,
    WorldState,
    format_value,
    kind_of,
    norm_num,
    walk,
)
from .programs import Choice, Ground, Pi, Prim, ProcCall, Program, ProgramDef, Seq
from .theory import (
    ActionSchema,
    ActionTheory,
    Diagnostic,
    EffectClause,
    FluentDecl,
    InitWorld,
    Param,
    Pattern,
    Case,
    SuccessorStateRule,
    TheoryError,
    TypeChecker,
    compile_effect_axioms,
    validate_theory,
)


class ParseError(TheoryError):
    pass


# ---------------------------------------------------------------------------
# lexer


@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | op | eof
    text: str
    pos: Pos


_UNICODE = {
    "≠": "!=", "≤": "<=", "≥": ">=", "¬": "not", "∧": "and", "∨": "or",
    "⊃": "->", "→": "->", "≡": "<->", "↔": "<->", "∀": "forall", "∃": "exists",
    "−": "-", "×": "*", "÷": "/", "∈": "in", "π": "pi",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z_][A-Za-z0-9_]*)*)
  | (?P<op><->|->|=>|\.\.|<=|>=|!=|==|[-+*/=<>(){}\[\],:;.|^])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    for u, a in _UNICODE.items():
        if u in text:
            text = text.replace(u, f" {a} " if a.isalpha() else a)
    toks, i, line, col = [], 0, 1, 1
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError([Diagnostic("error", f"syntax error: unexpected character {text[i]!r}", Pos(line, col))])
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            toks.append(Token(kind, "=" if s == "==" else s, Pos(line, col)))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        i = m.end()
    toks.append(Token("eof", "", Pos(line, col)))
    return toks


KEYWORDS = {
    "domain", "fluent", "action", "successor", "effects", "init", "program",
    "poss", "observe", "likelihood", "case", "when", "world", "weight",
    "if", "then", "else", "not", "and", "or", "in", "forall", "exists",
    "true", "false", "now", "s_now", "prev", "pi", "nominal", "actual",
    "exec", "query", "bel", "know", "assert", "approx", "tol",
}
TOP_LEVEL = {"domain", "fluent", "action", "successor", "effects", "init", "program"}
STEP_KEYWORDS = {"observe", "exec", "query", "assert", "actual"}


# ---------------------------------------------------------------------------
# parser


class Parser:
    def __init__(self, text: str, theory: ActionTheory | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.t = theory if theory is not None else ActionTheory()
        self.diags: list[Diagnostic] = []

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def fail(self, msg: str, pos: Pos | None = None):
        raise ParseError(self.diags + [Diagnostic("error", msg, pos or self.tok.pos)])

    def expect(self, text: str) -> Token:
        if not self.at(text):
            got = self.tok.text or "end of input"
            self.fail(f"syntax error: expected '{text}', found '{got}'")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail(f"syntax error: expected {what}, found '{t.text or 'end of input'}'")
        return self.advance()

    # -- expressions -------------------------------------------------------

    def expr(self, scope: frozenset) -> Node:
        return self._iff(scope)

    def _iff(self, sc):
        left = self._implies(sc)
        while self.at("<->"):
            pos = self.advance().pos
            left = BoolOp("<->", left, self._implies(sc), pos)
        return left

    def _implies(self, sc):
        left = self._or(sc)
        if self.at("->"):
            pos = self.advance().pos
            return BoolOp("->", left, self._implies(sc), pos)
        return left

    def _or(self, sc):
        left = self._and(sc)
        while self.at("or"):
            pos = self.advance().pos
            left = BoolOp("or", left, self._and(sc), pos)
        return left

    def _and(self, sc):
        left = self._not(sc)
        while self.at("and"):
            pos = self.advance().pos
            left = BoolOp("and", left, self._not(sc), pos)
        return left

    def _not(self, sc):
        if self.at("not"):
            pos = self.advance().pos
            return Not(self._not(sc), pos)
        return self._cmp(sc)

    def _cmp(self, sc):
        left = self._add(sc)
        if self.at("=", "!=", "<", "<=", ">", ">="):
            t = self.advance()
            return Cmp(t.text, left, self._add(sc), t.pos)
        if self.at("in") and self.peek().text == "[":
            pos = self.advance().pos
            self.expect("[")
            lo = self.expr(sc)
            self.expect(",")
            hi = self.expr(sc)
            self.expect("]")
            return InRange(left, lo, hi, pos)
        return left

    def _add(self, sc):
        left = self._mul(sc)
        while self.at("+", "-"):
            t = self.advance()
            left = BinOp(t.text, left, self._mul(sc), t.pos)
        return left

    def _mul(self, sc):
        left = self._unary(sc)
        while self.at("*", "/"):
            t = self.advance()
            right = self._unary(sc)
            if (
                t.text == "/"
                and isinstance(left, Lit) and isinstance(right, Lit)
                and _is_int_lit(left) and _is_int_lit(right)
            ):
                if right.value == 0:
                    self.fail("division by zero in rational literal", t.pos)
                left = Lit(norm_num(Fraction(left.value, right.value)), left.pos)
            else:
                left = BinOp(t.text, left, right, t.pos)
        return left

    def _unary(self, sc):
        if self.at("-"):
            pos = self.advance().pos
            operand = self._unary(sc)
            if isinstance(operand, Lit) and kind_of(operand.value) == "num":
                return Lit(norm_num(-operand.value), pos)
            return Neg(operand, pos)
        if self.at("+"):
            self.advance()
            return self._unary(sc)
        return self._primary(sc)

    def _primary(self, sc) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Lit(norm_num(Fraction(t.text)), t.pos)
        if self.at("("):
            self.advance()
            e = self.expr(sc)
            self.expect(")")
            return e
        if self.at("true", "false"):
            self.advance()
            return Lit(t.text == "true", t.pos)
        if self.at("if"):
            self.advance()
            c = self.expr(sc)
            self.expect("then")
            a = self.expr(sc)
            self.expect("else")
            b = self.expr(sc)
            return IfThenElse(c, a, b, t.pos)
        if self.at("forall", "exists"):
            self.advance()
            var = self.ident("variable").text
            if not self.accept("in"):
                self.expect(":")
            dom = self.domain_ref()
            self.expect(".")
            body = self.expr(sc | {var})
            return Quant(t.text, var, dom, body, t.pos)
        if t.kind == "ident" and t.text not in KEYWORDS:
            return self._name(sc)
        self.fail(f"syntax error: unexpected '{t.text or 'end of input'}' in expression")

    def _name(self, sc) -> Node:
        t = self.advance()
        name = t.text
        if name in BUILTIN_FUNCTIONS and self.at("("):
            args = self._call_args(sc)
            if len(args) != BUILTIN_FUNCTIONS[name]:
                self.fail(f"{name}() takes {BUILTIN_FUNCTIONS[name]} arguments", t.pos)
            return Call(name, tuple(args), t.pos)
        if name in sc:
            if self.at("("):
                self.fail(f"variable {name} cannot take arguments", t.pos)
            return Var(name, t.pos)
        decl = self.t.fluents.get(name)
        if decl is not None:
            args, depth = [], 0
            if self.at("("):
                args, depth = self._fluent_args(sc)
            if len(args) != len(decl.params):
                self.fail(f"fluent {name} takes {len(decl.params)} arguments, got {len(args)}", t.pos)
            return FluentRef(name, tuple(args), depth, t.pos)
        if name in self.t.symbols and not self.at("("):
            return Lit(name, t.pos)
        hint = ""
        if "-" in name and all(p in sc or p in self.t.fluents for p in name.split("-")):
            hint = f" (write '{name.replace('-', ' - ')}' for subtraction)"
        self.fail(f"unknown identifier {name}{hint}", t.pos)

    def _call_args(self, sc) -> list:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr(sc))
            while self.accept(","):
                args.append(self.expr(sc))
        self.expect(")")
        return args

    def _fluent_args(self, sc):
        """Fluent arguments with an optional trailing situation term."""
        self.expect("(")
        args, depth = [], 0
        while not self.at(")"):
            if self.at("now", "s_now", "prev"):
                depth = self._situation()
                break
            args.append(self.expr(sc))
            if not self.accept(","):
                break
        self.expect(")")
        return args, depth

    def _situation(self) -> int:
        if self.accept("now") or self.accept("s_now"):
            return 0
        self.expect("prev")
        k = 1
        if self.accept("^"):
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.fail("prev^k needs a non-negative integer k")
            self.advance()
            k = int(t.text)
        self.expect("(")
        inner = self._situation()
        self.expect(")")
        return k + inner

    def domain_ref(self) -> str:
        t = self.tok
        if t.kind != "ident":
            self.fail("syntax error: expected a domain name")
        self.advance()
        if t.text not in self.t.domains and t.text not in BUILTIN_DOMAINS:
            self.fail(f"unknown domain {t.text}", t.pos)
        return t.text

    def constant(self, sc=frozenset()):
        """Parse and evaluate an expression that mentions no fluents or variables."""
        pos = self.tok.pos
        e = self.expr(sc)
        if any(isinstance(n, (FluentRef, Var, Quant)) for n in walk(e)):
            self.fail("expected a constant expression", pos)
        try:
            return Compiler(FluentIndex([], []), self.t.all_domains, {})(e)(Env(None, {}))
        except SitCalcError as err:
            self.fail(err.message, err.pos or pos)

    # -- theory ------------------------------------------------------------

    def theory(self) -> ActionTheory:
        while self.tok.kind != "eof":
            kw = self.tok.text
            if self.tok.kind != "ident" or kw not in TOP_LEVEL:
                self.fail(f"syntax error: expected a declaration, found '{kw}'")
            getattr(self, "_decl_" + kw)()
        self._finish()
        return self.t

    def _invalidate(self):
        for attr in ("all_domains", "symbols", "group_keys", "index", "compiler", "compiled", "history_depth", "_oi_cache"):
            self.t.__dict__.pop(attr, None)

    def _decl_domain(self):
        self.advance()
        nt = self.ident("domain name")
        self.expect("=")
        name = nt.text
        if name in self.t.domains or name in BUILTIN_DOMAINS:
            self.fail(f"duplicate domain {name}", nt.pos)
        if self.accept("{"):
            vals = []
            while not self.at("}"):
                t = self.tok
                if t.kind == "ident" and t.text not in KEYWORDS:
                    self.advance()
                    if t.text in self.t.fluents:
                        self.fail(f"symbol {t.text} clashes with a fluent name", t.pos)
                    vals.append(t.text)
                else:
                    vals.append(self.constant())
                if not self.accept(","):
                    break
            self.expect("}")
            if len(set(vals)) != len(vals):
                self.fail(f"domain {name} lists a value twice", nt.pos)
            try:
                dom = Domain.explicit(name, vals)
            except SitCalcError as e:
                self.fail(e.message, nt.pos)
        elif self.tok.kind == "ident" and self.tok.text in BUILTIN_DOMAINS:
            base = BUILTIN_DOMAINS[self.advance().text]
            dom = Domain(name, base.kind, base.values, integral=base.integral, _members=base._members)
        else:
            lo = self.constant()
            self.expect("..")
            hi = self.constant()
            if not (isinstance(lo, int) and isinstance(hi, int)) or isinstance(lo, bool):
                self.fail("integer range bounds must be integers", nt.pos)
            if hi < lo:
                self.fail(f"empty range {lo}..{hi}", nt.pos)
            dom = Domain.int_range(name, lo, hi)
        self.t.domains[name] = dom
        self._invalidate()

    def _decl_fluent(self):
        self.advance()
        nt = self.ident("fluent name")
        if nt.text in self.t.fluents:
            self.fail(f"duplicate fluent {nt.text}", nt.pos)
        if nt.text in self.t.symbols:
            self.fail(f"fluent {nt.text} clashes with a domain symbol", nt.pos)
        params = []
        if self.accept("("):
            while not self.at(")"):
                p = self.ident("parameter").text
                self.expect(":")
                d = self.domain_ref()
                if not self.t.domain(d).finite:
                    self.fail(f"fluent parameter domain {d} must be finite", nt.pos)
                params.append((p, d))
                if not self.accept(","):
                    break
            self.expect(")")
        self.expect(":")
        dt = self.tok
        dom = self.domain_ref()
        if not self.t.domain(dom).finite:
            self.fail(f"fluent {nt.text} needs a finite domain, not {dom}", dt.pos)
        default = None
        if self.accept("="):
            default = self.constant()
            if default not in self.t.domain(dom):
                self.fail(f"default {format_value(default)} outside domain {dom}", dt.pos)
        self.t.fluents[nt.text] = FluentDecl(nt.text, tuple(params), dom, default, nt.pos)
        self._invalidate()

    def _decl_action(self):
        self.advance()
        nt = self.ident("action name")
        if nt.text in self.t.actions:
            self.fail(f"duplicate action {nt.text}", nt.pos)
        self.expect("(")
        params = []
        while not self.at(")"):
            mode = "nominal"
            if self.at("nominal", "actual"):
                mode = self.advance().text
            pn = self.ident("parameter").text
            self.expect(":")
            params.append(Param(pn, self.domain_ref(), mode))
            if not self.accept(","):
                break
        self.expect(")")
        if len({p.name for p in params}) != len(params):
            self.fail(f"repeated parameter name in {nt.text}", nt.pos)
        scope = frozenset(p.name for p in params)
        kw = {}
        while self.at("poss", "observe", "likelihood") and self.peek().text == ":":
            which = self.advance().text
            self.expect(":")
            if which in kw:
                self.fail(f"duplicate {which} clause for {nt.text}")
            if which == "observe":
                self.expect("(")
                key = self.ident("observation key").text
                vis = []
                while self.accept(","):
                    v = self.ident("parameter")
                    if v.text not in scope:
                        self.fail(f"observe clause names unknown parameter {v.text}", v.pos)
                    vis.append(v.text)
                self.expect(")")
                kw["observe"] = (key, tuple(vis))
            else:
                kw[which] = self.expr(scope)
        key, vis = kw.get("observe", ("", ()))
        self.t.actions[nt.text] = ActionSchema(
            nt.text, tuple(params), kw.get("poss", Lit(True)), key, vis, kw.get("likelihood", Lit(1)), nt.pos
        )
        self._invalidate()

    def _fluent_head(self):
        nt = self.ident("fluent name")
        decl = self.t.fluents.get(nt.text)
        if decl is None:
            self.fail(f"unknown fluent {nt.text}", nt.pos)
        params = []
        if self.accept("("):
            while not self.at(")"):
                params.append(self.ident("parameter").text)
                if not self.accept(","):
                    break
            self.expect(")")
        if len(params) != len(decl.params):
            self.fail(f"fluent {nt.text} takes {len(decl.params)} parameters", nt.pos)
        if nt.text in self.t.rules:
            self.fail(f"duplicate successor rule for {nt.text}", nt.pos)
        return nt, decl, tuple(params)

    def _pattern(self) -> Pattern:
        st = self.ident("action name")
        schema = self.t.actions.get(st.text)
        if schema is None:
            self.fail(f"unknown action schema {st.text}", st.pos)
        args = []
        if self.accept("("):
            while not self.at(")"):
                t = self.tok
                if t.kind == "ident" and t.text not in KEYWORDS and t.text not in self.t.symbols:
                    self.advance()
                    args.append(Var(t.text, t.pos))
                else:
                    args.append(Lit(self.constant(), t.pos))
                if not self.accept(","):
                    break
            self.expect(")")
        if len(args) != len(schema.params):
            self.fail(f"pattern {st.text} needs {len(schema.params)} arguments", st.pos)
        return Pattern(st.text, tuple(args))

    def _pattern_scope(self, params, pattern):
        return frozenset(params) | {a.name for a in pattern.args if isinstance(a, Var) and a.name != "_"}

    def _decl_successor(self):
        self.advance()
        nt, decl, params = self._fluent_head()
        self.expect("{")
        cases = []
        while self.accept("case"):
            pat = self._pattern()
            sc = self._pattern_scope(params, pat)
            guard = self.expr(sc) if self.accept("when") else None
            self.expect("=>")
            cases.append(Case(pat, guard, self.expr(sc)))
            if not self.accept(";"):
                break
        self.expect("}")
        self.t.rules[nt.text] = SuccessorStateRule(nt.text, params, tuple(cases))
        self._invalidate()

    def _decl_effects(self):
        self.advance()
        nt, decl, params = self._fluent_head()
        self.expect("{")
        clauses = []
        while not self.at("}"):
            pol = None
            if self.at("+", "-"):
                pol = self.advance().text
            pat = self._pattern()
            sc = self._pattern_scope(params, pat)
            ctx = self.expr(sc) if self.accept("when") else None
            value = None
            if pol is None:
                self.expect("=>")
                value = self.expr(sc)
            clauses.append(EffectClause(nt.text, pat, pol, value, ctx, params))
            if not self.accept(";"):
                break
        self.expect("}")
        try:
            rule = compile_effect_axioms(clauses, nt.text, params)
        except TheoryError as e:
            self.fail(e.diagnostics[0].message, nt.pos)
        self.t.rules[nt.text] = rule
        self.t.effects[nt.text] = tuple(clauses)
        self._invalidate()

    def world_block(self) -> WorldState:
        pos = self.expect("{").pos
        mapping = {}
        while not self.at("}"):
            ft = self.ident("fluent")
            decl = self.t.fluents.get(ft.text)
            if decl is None:
                self.fail(f"unknown fluent {ft.text}", ft.pos)
            args = []
            if self.accept("("):
                while not self.at(")"):
                    args.append(self.constant())
                    if not self.accept(","):
                        break
                self.expect(")")
            self.expect("=")
            key = (ft.text, tuple(args))
            if key in mapping:
                self.fail(f"{ft.text} assigned twice", ft.pos)
            mapping[key] = self.constant()
            if not self.accept(","):
                break
        self.expect("}")
        try:
            return self.t.world(mapping)
        except SitCalcError as e:
            self.fail(e.message, pos)

    def _decl_init(self):
        self.advance()
        self.expect("{")
        worlds = list(self.t.init)
        while self.accept("world"):
            world = self.world_block()
            wpos = self.tok.pos
            weight = Fraction(1)
            if self.accept("weight"):
                weight = self.constant()
                if kind_of(weight) != "num":
                    self.fail("weight must be a number", wpos)
                if weight < 0:
                    self.fail(f"initial weight {format_value(weight)} is negative", wpos)
            worlds.append(InitWorld(world, weight))
            if not self.accept(";"):
                break
        self.expect("}")
        self.t.init = tuple(worlds)

    def _decl_program(self):
        self.advance()
        nt = self.ident("program name")
        if nt.text in self.t.programs or nt.text in self.t.actions:
            self.fail(f"duplicate program or action name {nt.text}", nt.pos)
        params = []
        if self.accept("("):
            while not self.at(")"):
                pn = self.ident("parameter").text
                self.expect(":")
                params.append((pn, self.domain_ref()))
                if not self.accept(","):
                    break
            self.expect(")")
        self.expect("=")
        body = self.program(frozenset(p for p, _ in params))
        self.t.programs[nt.text] = ProgramDef(nt.text, tuple(params), body)

    # -- programs ------------------------------------------------------------

    def program(self, sc: frozenset, stop_at_steps: bool = False) -> Program:
        return self._p_choice(sc, stop_at_steps)

    def _p_choice(self, sc, stop):
        left = self._p_seq(sc, stop)
        while self.accept("|"):
            left = Choice(left, self._p_seq(sc, stop))
        return left

    def _p_seq(self, sc, stop):
        left = self._p_atom(sc, stop)
        while self.at(";"):
            nxt = self.peek()
            if nxt.kind == "eof" or (stop and nxt.text in STEP_KEYWORDS) or nxt.text in TOP_LEVEL or nxt.text in ("}",):
                break
            self.advance()
            left = Seq(left, self._p_atom(sc, stop))
        return left

    def _p_atom(self, sc, stop):
        if self.accept("("):
            p = self.program(sc, False)
            self.expect(")")
            return p
        if self.accept("pi"):
            var = self.ident("variable").text
            self.expect(":")
            dom = self.domain_ref()
            self.expect(".")
            return Pi(var, dom, self.program(sc | {var}, stop))
        nt = self.ident("action or program name")
        args = self._call_args(sc) if self.at("(") else []
        name = nt.text
        if name in self.t.programs:
            return ProcCall(name, tuple(args), nt.pos)
        schema = self.t.actions.get(name)
        if schema is None:
            # forward reference to a program defined later in the file
            return ProcCall(name, tuple(args), nt.pos)
        if len(args) == len(schema.nominal):
            return Prim(name, tuple(args), nt.pos)
        if len(args) == len(schema.params):
            return Ground(name, tuple(args), nt.pos)
        self.fail(
            f"{name} takes {len(schema.nominal)} nominal or {len(schema.params)} total arguments, got {len(args)}",
            nt.pos,
        )

    # -- finishing ------------------------------------------------------------

    def _finish(self):
        diags = []
        for pd in self.t.programs.values():
            self._check_program(pd.body, {p: self.t.domain(d).kind for p, d in pd.params}, diags)
        if any(d.severity == "error" for d in diags):
            raise ParseError(diags)
        diags = validate_theory(self.t)
        errors = [d for d in diags if d.severity == "error"]
        if errors:
            raise ParseError(errors)
        self.t.warnings = [d for d in diags if d.severity != "error"]

    def _check_program(self, p: Program, scope: dict, diags: list):
        tc = TypeChecker(self.t, diags)
        if isinstance(p, ProcCall):
            pd = self.t.programs.get(p.name)
            if pd is None:
                diags.append(Diagnostic("error", f"unknown action schema or program {p.name}", p.pos))
                return
            if len(p.args) != len(pd.params):
                diags.append(Diagnostic("error", f"program {p.name} takes {len(pd.params)} arguments", p.pos))
            for a, (_, d) in zip(p.args, pd.params):
                tc.check(a, scope, self.t.domain(d).kind, f"argument of {p.name}")
        elif isinstance(p, (Prim, Ground)):
            s = self.t.actions[p.schema]
            params = s.nominal if isinstance(p, Prim) else s.params
            for a, prm in zip(p.args, params):
                tc.check(a, scope, self.t.domain(prm.domain).kind, f"argument {prm.name} of {s.name}")
        elif isinstance(p, (Seq, Choice)):
            for c in ((p.first, p.second) if isinstance(p, Seq) else (p.left, p.right)):
                self._check_program(c, scope, diags)
        elif isinstance(p, Pi):
            dom = self.t.domain(p.domain)
            if not dom.finite:
                diags.append(Diagnostic("error", f"pi over unbounded domain {p.domain}"))
            self._check_program(p.body, {**scope, p.var: dom.kind}, diags)


def _is_int_lit(n: Lit) -> bool:
    return isinstance(n.value, int) and not isinstance(n.value, bool)


# ---------------------------------------------------------------------------
# public entry points


def parse_theory(text: str) -> ActionTheory:
    """Parse and validate a theory; raises :class:`ParseError` with diagnostics.

    Non-fatal diagnostics (warnings, infos) end up in ``theory.warnings``.
    """
    return Parser(text).theory()


def parse_formula(text: str, theory: ActionTheory, variables: dict | None = None) -> Node:
    """Parse one formula or expression against a theory's names.

    ``variables`` maps free variable names to their kinds (bool/num/sym).
    """
    p = Parser(text, theory)
    scope = frozenset(variables or {})
    e = p.expr(scope)
    if p.tok.kind != "eof":
        p.fail(f"syntax error: unexpected '{p.tok.text}' after formula")
    diags: list = []
    TypeChecker(theory, diags).check(e, dict(variables or {}))
    if diags:
        raise ParseError(diags)
    return e


def parse_program(text: str, theory: ActionTheory) -> Program:
    p = Parser(text, theory)
    prog = p.program(frozenset())
    if p.tok.kind != "eof":
        p.fail(f"syntax error: unexpected '{p.tok.text}' after program")
    diags: list = []
    p._check_program(prog, {}, diags)
    if diags:
        raise ParseError(diags)
    return prog
