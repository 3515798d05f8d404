"""Source-form printing of expressions, programs, theories and scenarios.

Output re-parses to an equal tree; that round trip is part of the test suite.
"""

from __future__ import annotations

from fractions import Fraction

from .core import (
    BinOp,
    BoolOp,
    Call,
    Cmp,
    FluentRef,
    IfThenElse,
    InRange,
    Lit,
    Neg,
    Node,
    Not,
    Quant,
    Var,
    format_value,
)
from .programs import Choice, Ground, Pi, Prim, ProcCall, Program, Seq

# binding strength; higher binds tighter
_LEVEL = {"<->": 1, "->": 2, "or": 3, "and": 4, "not": 5, "cmp": 6, "+": 7, "-": 7, "*": 8, "/": 8, "neg": 9}
_ATOM = 10


def _level(n: Node) -> int:
    if isinstance(n, BoolOp):
        return _LEVEL[n.op]
    if isinstance(n, Not):
        return _LEVEL["not"]
    if isinstance(n, (Cmp, InRange)):
        return _LEVEL["cmp"]
    if isinstance(n, BinOp):
        return _LEVEL[n.op]
    if isinstance(n, Neg):
        return _LEVEL["neg"]
    if isinstance(n, Lit) and isinstance(n.value, Fraction):
        return _LEVEL["/"]
    if isinstance(n, Lit) and not isinstance(n.value, (bool, str)) and n.value < 0:
        return _LEVEL["neg"]
    if isinstance(n, (IfThenElse, Quant)):
        return 0
    return _ATOM


def _wrap(n: Node, min_level: int) -> str:
    s = expr_str(n)
    return f"({s})" if _level(n) < min_level else s


def expr_str(n: Node | None) -> str:
    if n is None:
        return "true"
    if isinstance(n, Lit):
        return format_value(n.value)
    if isinstance(n, Var):
        return n.name
    if isinstance(n, FluentRef):
        args = [expr_str(a) for a in n.args]
        if n.depth:
            args.append(_sit(n.depth))
        return f"{n.name}({', '.join(args)})" if args else n.name
    if isinstance(n, BinOp):
        lv = _LEVEL[n.op]
        # left-associative: the right operand needs strictly tighter binding
        return f"{_wrap(n.left, lv)} {n.op} {_wrap(n.right, lv + 1)}"
    if isinstance(n, Neg):
        return f"-{_wrap(n.operand, _ATOM)}"
    if isinstance(n, Call):
        return f"{n.fn}({', '.join(expr_str(a) for a in n.args)})"
    if isinstance(n, IfThenElse):
        return f"if {expr_str(n.cond)} then {expr_str(n.then)} else {expr_str(n.other)}"
    if isinstance(n, Cmp):
        lv = _LEVEL["cmp"]
        return f"{_wrap(n.left, lv + 1)} {n.op} {_wrap(n.right, lv + 1)}"
    if isinstance(n, InRange):
        lv = _LEVEL["cmp"]
        return f"{_wrap(n.expr, lv + 1)} in [{expr_str(n.lo)}, {expr_str(n.hi)}]"
    if isinstance(n, Not):
        return f"not {_wrap(n.operand, _LEVEL['not'])}"
    if isinstance(n, BoolOp):
        lv = _LEVEL[n.op]
        if n.op == "->":
            return f"{_wrap(n.left, lv + 1)} -> {_wrap(n.right, lv)}"
        return f"{_wrap(n.left, lv)} {n.op} {_wrap(n.right, lv + 1)}"
    if isinstance(n, Quant):
        return f"{n.kind} {n.var}: {n.domain} . {expr_str(n.body)}"
    raise TypeError(n)


def _sit(depth: int) -> str:
    return "now" if depth == 0 else f"prev^{depth}(now)"


def program_str(p: Program) -> str:
    if isinstance(p, (Prim, Ground, ProcCall)):
        name = p.schema if not isinstance(p, ProcCall) else p.name
        if not p.args:
            return name
        return f"{name}({', '.join(expr_str(a) for a in p.args)})"
    if isinstance(p, Seq):
        return f"{_pwrap(p.first, 2)} ; {_pwrap(p.second, 3)}"
    if isinstance(p, Choice):
        return f"{_pwrap(p.left, 1)} | {_pwrap(p.right, 2)}"
    if isinstance(p, Pi):
        return f"pi {p.var}: {p.domain} . {program_str(p.body)}"
    raise TypeError(p)


def _plevel(p: Program) -> int:
    if isinstance(p, Choice):
        return 1
    if isinstance(p, Seq):
        return 2
    if isinstance(p, Pi):
        return 0
    return 3


def _pwrap(p: Program, min_level: int) -> str:
    s = program_str(p)
    return f"({s})" if _plevel(p) < min_level else s


def theory_str(t) -> str:
    """Render an ActionTheory back to theory-file syntax."""
    out = []
    for d in t.domains.values():
        out.append(f"domain {d.name} = {d.spec()}")
    if t.domains:
        out.append("")
    for f in t.fluents.values():
        params = f"({', '.join(f'{p}: {d}' for p, d in f.params)})" if f.params else ""
        default = f" = {format_value(f.default)}" if f.default is not None else ""
        out.append(f"fluent {f.name}{params} : {f.domain}{default}")
    out.append("")
    for s in t.actions.values():
        params = ", ".join(f"{p.mode} {p.name}: {p.domain}" for p in s.params)
        out.append(f"action {s.name}({params})")
        out.append(f"  poss: {expr_str(s.poss)}")
        vis = "".join(f", {v}" for v in s.observe_params)
        out.append(f"  observe: ({s.observe_key}{vis})")
        out.append(f"  likelihood: {expr_str(s.likelihood)}")
        out.append("")
    for name, rule in t.rules.items():
        head = name + (f"({', '.join(rule.params)})" if rule.params else "")
        if name in t.effects:
            out.append(f"effects {head} {{")
            for c in t.effects[name]:
                pol = c.polarity or ""
                when = f" when {expr_str(c.context)}" if c.context is not None else ""
                val = f" => {expr_str(c.value)}" if c.polarity is None else ""
                out.append(f"  {pol}{c.pattern}{when}{val} ;")
        else:
            out.append(f"successor {head} {{")
            for c in rule.cases:
                when = f" when {expr_str(c.guard)}" if c.guard is not None else ""
                out.append(f"  case {c.pattern}{when} => {expr_str(c.value)} ;")
        out.append("}")
        out.append("")
    if t.init:
        out.append("init {")
        for iw in t.init:
            out.append(f"  world {world_str(iw.world)} weight {format_value(iw.weight)} ;")
        out.append("}")
        out.append("")
    for pd in t.programs.values():
        params = f"({', '.join(f'{p}: {d}' for p, d in pd.params)})" if pd.params else ""
        out.append(f"program {pd.name}{params} = {program_str(pd.body)}")
    return "\n".join(out).rstrip() + "\n"


def world_str(world) -> str:
    return "{" + ", ".join(f"{k} = {format_value(v)}" for k, v in world.as_dict().items()) + "}"
