"""Values, domains, expression/formula trees, world histories and weighted beliefs.

Everything here is immutable.  Expressions are compiled once into Python
closures (see :class:`Compiler`) because the engine evaluates the same
precondition and likelihood bodies many thousands of times.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence, Union

Value = Union[bool, int, Fraction, float, str]
Weight = Union[Fraction, float]


# ---------------------------------------------------------------------------
# errors


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class SitCalcError(Exception):
    """Base class; ``pos`` is the source location when one is known."""

    def __init__(self, message: str, pos: Pos | None = None):
        self.message = message
        self.pos = pos
        super().__init__(f"{pos}: {message}" if pos else message)


class EvaluationError(SitCalcError):
    pass


class BeliefError(SitCalcError):
    """Runtime belief failure: impossible observation, undefined belief."""


# ---------------------------------------------------------------------------
# values


def kind_of(v: Value) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, (int, Fraction, float)):
        return "num"
    if isinstance(v, str):
        return "sym"
    raise TypeError(f"not a value: {v!r}")


def norm_num(v):
    """Collapse integral rationals to int so equal numbers hash and print alike."""
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def format_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def json_value(v: Value):
    if isinstance(v, Fraction):
        return format_value(v)
    return v


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Domain:
    """A named set of values.  ``values is None`` means unbounded."""

    name: str
    kind: str  # bool | num | sym
    values: tuple | None = None
    lo: int | None = None
    hi: int | None = None
    integral: bool = False
    _members: frozenset | None = field(default=None, compare=False, repr=False)

    @classmethod
    def int_range(cls, name: str, lo: int, hi: int) -> "Domain":
        return cls(name, "num", tuple(range(lo, hi + 1)), lo, hi)

    @classmethod
    def explicit(cls, name: str, values: Sequence[Value]) -> "Domain":
        kinds = {kind_of(v) for v in values}
        if len(kinds) > 1:
            raise SitCalcError(f"domain {name} mixes value kinds {sorted(kinds)}")
        kind = kinds.pop() if kinds else "sym"
        vals = tuple(norm_num(v) for v in values)
        return cls(name, kind, vals, _members=frozenset(vals))

    @property
    def finite(self) -> bool:
        return self.values is not None

    def __contains__(self, v) -> bool:
        if kind_of(v) != self.kind:
            return False
        if self.values is None:
            return not self.integral or _is_int(v)
        if self.lo is not None:
            return _is_int(v) and self.lo <= v <= self.hi
        return v in self._members

    def __iter__(self) -> Iterator[Value]:
        if self.values is None:
            raise EvaluationError(f"cannot enumerate unbounded domain {self.name}")
        return iter(self.values)

    def __len__(self) -> int:
        if self.values is None:
            raise EvaluationError(f"unbounded domain {self.name} has no size")
        return len(self.values)

    def spec(self) -> str:
        """Source form, as written after ``domain Name =``."""
        if self.values is None:
            return self.name
        if self.lo is not None:
            return f"{self.lo}..{self.hi}"
        return "{" + ", ".join(format_value(v) for v in self.values) + "}"


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) or (
        isinstance(v, Fraction) and v.denominator == 1
    )


BOOL = Domain("bool", "bool", (False, True), _members=frozenset((False, True)))
INT = Domain("int", "num", integral=True)
NUMBER = Domain("number", "num")
BUILTIN_DOMAINS = {"bool": BOOL, "int": INT, "number": NUMBER}


# ---------------------------------------------------------------------------
# expression and formula trees


def _node(cls):
    return dataclass(frozen=True)(cls)


@_node
class Node:
    pass


@_node
class Lit(Node):
    value: Value
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class Var(Node):
    """Action parameter, pattern variable or quantified variable."""

    name: str
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class FluentRef(Node):
    """``name(args)`` evaluated ``depth`` steps into the past (0 = now)."""

    name: str
    args: tuple = ()
    depth: int = 0
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class BinOp(Node):
    op: str  # + - * /
    left: Node
    right: Node
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class Neg(Node):
    operand: Node
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class Call(Node):
    """Builtin function: abs, min, max, normal."""

    fn: str
    args: tuple
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class IfThenElse(Node):
    cond: Node
    then: Node
    other: Node
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class Cmp(Node):
    op: str  # = != < <= > >=
    left: Node
    right: Node
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class InRange(Node):
    expr: Node
    lo: Node
    hi: Node
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class Not(Node):
    operand: Node
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class BoolOp(Node):
    op: str  # and | or | -> | <->
    left: Node
    right: Node
    pos: Pos | None = field(default=None, compare=False, repr=False)


@_node
class Quant(Node):
    kind: str  # forall | exists
    var: str
    domain: str
    body: Node
    pos: Pos | None = field(default=None, compare=False, repr=False)


BUILTIN_FUNCTIONS = {"abs": 1, "min": 2, "max": 2, "normal": 3}


def children(node: Node) -> tuple:
    if isinstance(node, (Lit, Var)):
        return ()
    if isinstance(node, FluentRef):
        return node.args
    if isinstance(node, (BinOp, Cmp, BoolOp)):
        return (node.left, node.right)
    if isinstance(node, (Neg, Not)):
        return (node.operand,)
    if isinstance(node, Call):
        return node.args
    if isinstance(node, IfThenElse):
        return (node.cond, node.then, node.other)
    if isinstance(node, InRange):
        return (node.expr, node.lo, node.hi)
    if isinstance(node, Quant):
        return (node.body,)
    raise TypeError(node)


def walk(node: Node) -> Iterator[Node]:
    yield node
    for c in children(node):
        yield from walk(c)


def prev_depth(node: Node) -> int:
    """Deepest ``prev`` reference in the tree."""
    return max((n.depth for n in walk(node) if isinstance(n, FluentRef)), default=0)


def free_vars(node: Node, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(node, Var):
        return set() if node.name in bound else {node.name}
    if isinstance(node, Quant):
        return free_vars(node.body, bound | {node.var})
    out: set[str] = set()
    for c in children(node):
        out |= free_vars(c, bound)
    return out


# ---------------------------------------------------------------------------
# world states


class FluentIndex:
    """Fixed ordering of ground fluents; a WorldState is a tuple in this order."""

    def __init__(self, ground: Sequence[tuple[str, tuple]], domains: Sequence[Domain]):
        self.ground = tuple(ground)
        self.domains = tuple(domains)
        self.position = {g: i for i, g in enumerate(self.ground)}

    def __len__(self) -> int:
        return len(self.ground)

    def label(self, i: int) -> str:
        name, args = self.ground[i]
        if not args:
            return name
        return f"{name}({', '.join(format_value(a) for a in args)})"


class WorldState:
    """Total assignment of values to ground fluents."""

    __slots__ = ("index", "values", "_hash")

    def __init__(self, index: FluentIndex, values: Sequence[Value]):
        self.index = index
        self.values = tuple(values)
        self._hash = hash(self.values)

    @classmethod
    def from_mapping(cls, index: FluentIndex, mapping: Mapping) -> "WorldState":
        """Build from ``{(name, args) or name: value}``; must be total."""
        vals = [None] * len(index)
        for key, v in mapping.items():
            k = key if isinstance(key, tuple) else (key, ())
            if k not in index.position:
                raise SitCalcError(f"unknown ground fluent {k[0]}{k[1] or ''}")
            vals[index.position[k]] = norm_num(v)
        missing = [index.label(i) for i, v in enumerate(vals) if v is None]
        if missing:
            raise SitCalcError(f"world is not total; missing {', '.join(missing)}")
        world = cls(index, vals)
        world.check_domains()
        return world

    def check_domains(self) -> None:
        for i, (v, dom) in enumerate(zip(self.values, self.index.domains)):
            if v not in dom:
                raise EvaluationError(
                    f"value {format_value(v)} for {self.index.label(i)} "
                    f"is outside domain {dom.name}"
                )

    def __getitem__(self, key) -> Value:
        k = key if isinstance(key, tuple) else (key, ())
        return self.values[self.index.position[k]]

    def replace(self, updates: Mapping[int, Value]) -> "WorldState":
        vals = list(self.values)
        for i, v in updates.items():
            vals[i] = v
        return WorldState(self.index, vals)

    def as_dict(self) -> dict[str, Value]:
        return {self.index.label(i): v for i, v in enumerate(self.values)}

    def __eq__(self, other) -> bool:
        return isinstance(other, WorldState) and self.values == other.values

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={format_value(v)}" for k, v in self.as_dict().items())
        return "{" + inner + "}"


# ---------------------------------------------------------------------------
# actions and observation signatures


@dataclass(frozen=True)
class GroundAction:
    schema: str
    args: tuple = ()

    def __str__(self) -> str:
        return f"{self.schema}({', '.join(format_value(a) for a in self.args)})"


@dataclass(frozen=True)
class ObservationSignature:
    """Agent-visible equivalence-class key of a ground action."""

    key: str
    args: tuple = ()

    def __str__(self) -> str:
        return f"{self.key}({', '.join(format_value(a) for a in self.args)})"


# ---------------------------------------------------------------------------
# histories


@dataclass(frozen=True)
class Trajectory:
    """An initial world followed by (action, resulting world) steps.

    ``truncated`` counts leading steps dropped by :func:`BeliefState.compact`;
    those steps are no longer reachable through ``prev``.
    """

    origin: int
    worlds: tuple
    actions: tuple = ()
    truncated: int = 0

    @classmethod
    def initial(cls, origin: int, world: WorldState) -> "Trajectory":
        return cls(origin, (world,))

    @property
    def last(self) -> WorldState:
        return self.worlds[-1]

    @property
    def length(self) -> int:
        return self.truncated + len(self.actions)

    def world_at(self, depth: int) -> WorldState:
        if depth >= len(self.worlds):
            what = "retained history" if self.truncated else "trajectory length"
            raise EvaluationError(
                f"prev depth {depth} exceeds {what} {len(self.worlds) - 1}"
            )
        return self.worlds[-1 - depth]

    def extend(self, action: GroundAction, world: WorldState) -> "Trajectory":
        return Trajectory(
            self.origin, self.worlds + (world,), self.actions + (action,), self.truncated
        )

    def tail(self, keep: int) -> "Trajectory":
        if len(self.actions) <= keep:
            return self
        drop = len(self.actions) - keep
        return Trajectory(
            self.origin, self.worlds[drop:], self.actions[drop:], self.truncated + drop
        )

    def __str__(self) -> str:
        parts = [repr(self.worlds[0])]
        for a, w in zip(self.actions, self.worlds[1:]):
            parts.append(f"--{a}--> {w!r}")
        return " ".join(parts)


@dataclass(frozen=True)
class BeliefState:
    """K-related histories with their (unnormalized) weights.

    Zero-weight members stay: they are still possible for the agent even
    though it gives them no credence.
    """

    step: int
    members: tuple  # ((Trajectory, weight), ...)
    mode: str = "exact"

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown numeric mode {self.mode!r}")
        for traj, w in self.members:
            if w < 0:
                raise BeliefError(f"negative weight {w} on member {traj}")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def total(self) -> Weight:
        return sum((w for _, w in self.members), Fraction(0) if self.mode == "exact" else 0.0)

    def table(self, fluents: Iterable[str] | None = None) -> list[tuple[WorldState, Weight]]:
        """Normalized weight per distinct final world, in first-seen order."""
        acc: dict[WorldState, Weight] = {}
        for traj, w in self.members:
            acc[traj.last] = acc.get(traj.last, 0) + w
        tot = self.total
        if tot:
            return [(world, norm_num(w / tot)) for world, w in acc.items()]
        return list(acc.items())

    def marginal(self, fluent, args: tuple = ()) -> dict[Value, Weight]:
        """Degree of belief in each value of one ground fluent."""
        tot = self.total
        if not tot:
            raise BeliefError("belief undefined (division by zero): total weight is 0")
        out: dict[Value, Weight] = {}
        for traj, w in self.members:
            v = traj.last[(fluent, args)]
            out[v] = out.get(v, 0) + w
        return {v: norm_num(w / tot) for v, w in sorted(out.items(), key=lambda kv: _sort_key(kv[0]))}

    def compact(self, keep: int) -> "BeliefState":
        """Drop history older than ``keep`` steps and merge identical tails.

        Exact for Bel and Know as long as no formula, precondition or
        likelihood looks back further than ``keep`` steps.
        """
        acc: dict[tuple, list] = {}
        for traj, w in self.members:
            t = traj.tail(keep)
            key = (t.worlds, t.actions)
            if key in acc:
                acc[key][1] = acc[key][1] + w
            else:
                acc[key] = [t, w]
        return BeliefState(self.step, tuple((t, w) for t, w in acc.values()), self.mode)

    def prune(self, epsilon: float) -> "BeliefState":
        if self.mode != "float":
            raise BeliefError("pruning is only available in float mode")
        tot = self.total
        kept = tuple((t, w) for t, w in self.members if tot and w / tot >= epsilon)
        return BeliefState(self.step, kept, self.mode)


def _sort_key(v: Value):
    return (kind_of(v), v if not isinstance(v, str) else 0, v if isinstance(v, str) else "")


# ---------------------------------------------------------------------------
# evaluation


class Env:
    """Evaluation context: the history being inspected plus variable bindings."""

    __slots__ = ("traj", "bind")

    def __init__(self, traj: Trajectory, bind: dict):
        self.traj = traj
        self.bind = bind


Compiled = Callable[[Env], Any]


def _type_error(msg: str, pos):
    return EvaluationError(f"type mismatch: {msg}", pos)


def _num(v, pos, what="operand"):
    if isinstance(v, bool) or not isinstance(v, (int, Fraction, float)):
        raise _type_error(f"{what} {format_value(v)} is not numeric", pos)
    return v


def _same_kind(a, b, op, pos):
    ka, kb = kind_of(a), kind_of(b)
    if ka != kb:
        raise _type_error(f"cannot compare {ka} {format_value(a)} {op} {kb} {format_value(b)}", pos)


def _truth(v, pos):
    if not isinstance(v, bool):
        raise _type_error(f"{format_value(v)} is not a truth value", pos)
    return v


def _div(a, b, pos):
    if b == 0:
        raise EvaluationError("division by zero", pos)
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return norm_num(Fraction(a) / Fraction(b))


def normal_cell(d, sigma, width) -> float:
    """Mass of N(0, sigma^2) on the cell of the given width centred at ``d``."""
    from .gaussian import cell_mass

    return cell_mass(float(d), float(sigma), float(width))


_ARITH = {
    "+": lambda a, b, pos: norm_num(a + b),
    "-": lambda a, b, pos: norm_num(a - b),
    "*": lambda a, b, pos: norm_num(a * b),
    "/": _div,
}

_ORDER = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


class Compiler:
    """Turns trees into closures against one fluent index and domain table."""

    def __init__(self, index: FluentIndex, domains: Mapping[str, Domain], fluent_params: Mapping[str, int]):
        self.index = index
        self.domains = domains
        self.fluent_params = fluent_params

    def __call__(self, node: Node) -> Compiled:
        return getattr(self, "_" + type(node).__name__)(node)

    def _Lit(self, n: Lit):
        v = n.value
        return lambda env: v

    def _Var(self, n: Var):
        name, pos = n.name, n.pos

        def var(env):
            try:
                return env.bind[name]
            except KeyError:
                raise EvaluationError(f"unbound variable {name}", pos) from None

        return var

    def _FluentRef(self, n: FluentRef):
        depth, pos, name = n.depth, n.pos, n.name
        position = self.index.position
        if all(isinstance(a, Lit) for a in n.args):
            key = (name, tuple(a.value for a in n.args))
            if key not in position:
                raise EvaluationError(f"no ground fluent {name}{key[1]}", pos)
            i = position[key]
            if depth == 0:
                return lambda env: env.traj.worlds[-1].values[i]

            def ref(env):
                try:
                    return env.traj.world_at(depth).values[i]
                except EvaluationError as e:
                    raise EvaluationError(e.message, pos) from None

            return ref
        argfs = [self(a) for a in n.args]

        def ref_dyn(env):
            key = (name, tuple(f(env) for f in argfs))
            try:
                i = position[key]
            except KeyError:
                raise EvaluationError(
                    f"argument {key[1]} outside the declared domain of {name}", pos
                ) from None
            try:
                return env.traj.world_at(depth).values[i]
            except EvaluationError as e:
                raise EvaluationError(e.message, pos) from None

        return ref_dyn

    def _BinOp(self, n: BinOp):
        lf, rf, pos, fn = self(n.left), self(n.right), n.pos, _ARITH[n.op]
        return lambda env: fn(_num(lf(env), pos), _num(rf(env), pos), pos)

    def _Neg(self, n: Neg):
        f, pos = self(n.operand), n.pos
        return lambda env: norm_num(-_num(f(env), pos))

    def _Call(self, n: Call):
        fs, pos = [self(a) for a in n.args], n.pos
        if n.fn == "abs":
            (f,) = fs
            return lambda env: abs(_num(f(env), pos))
        if n.fn in ("min", "max"):
            pick = min if n.fn == "min" else max
            a, b = fs
            return lambda env: pick(_num(a(env), pos), _num(b(env), pos))
        if n.fn == "normal":
            d, s, w = fs

            def normal(env):
                sigma, width = _num(s(env), pos), _num(w(env), pos)
                if sigma <= 0 or width <= 0:
                    raise EvaluationError("normal() needs positive sigma and width", pos)
                return normal_cell(_num(d(env), pos), sigma, width)

            return normal
        raise EvaluationError(f"unknown function {n.fn}", pos)

    def _IfThenElse(self, n: IfThenElse):
        c, t, o, pos = self(n.cond), self(n.then), self(n.other), n.pos
        return lambda env: t(env) if _truth(c(env), pos) else o(env)

    def _Cmp(self, n: Cmp):
        lf, rf, pos, op = self(n.left), self(n.right), n.pos, n.op
        if op in ("=", "!="):
            neq = op == "!="

            def eq(env):
                a, b = lf(env), rf(env)
                _same_kind(a, b, op, pos)
                return (a != b) if neq else (a == b)

            return eq
        cmp = _ORDER[op]
        return lambda env: cmp(_num(lf(env), pos), _num(rf(env), pos))

    def _InRange(self, n: InRange):
        e, lo, hi, pos = self(n.expr), self(n.lo), self(n.hi), n.pos
        return lambda env: _num(lo(env), pos) <= _num(e(env), pos) <= _num(hi(env), pos)

    def _Not(self, n: Not):
        f, pos = self(n.operand), n.pos
        return lambda env: not _truth(f(env), pos)

    def _BoolOp(self, n: BoolOp):
        lf, rf, pos = self(n.left), self(n.right), n.pos
        if n.op == "and":
            return lambda env: _truth(lf(env), pos) and _truth(rf(env), pos)
        if n.op == "or":
            return lambda env: _truth(lf(env), pos) or _truth(rf(env), pos)
        if n.op == "->":
            return lambda env: (not _truth(lf(env), pos)) or _truth(rf(env), pos)
        return lambda env: _truth(lf(env), pos) == _truth(rf(env), pos)

    def _Quant(self, n: Quant):
        body, var, pos = self(n.body), n.var, n.pos
        try:
            dom = self.domains[n.domain]
        except KeyError:
            raise EvaluationError(f"unknown domain {n.domain}", pos) from None
        if not dom.finite:
            raise EvaluationError(f"cannot quantify over unbounded domain {dom.name}", pos)
        values = dom.values
        want = n.kind == "forall"

        def quant(env):
            saved = env.bind.get(var, _MISSING)
            try:
                for v in values:
                    env.bind[var] = v
                    if _truth(body(env), pos) != want:
                        return not want
                return want
            finally:
                if saved is _MISSING:
                    env.bind.pop(var, None)
                else:
                    env.bind[var] = saved

        return quant


_MISSING = object()


def evaluate(node: Node, trajectory: Trajectory, bindings: Mapping | None = None, compiler: Compiler | None = None) -> Value:
    """Evaluate an expression or formula at the end of ``trajectory``.

    ``compiler`` defaults to one built from the trajectory's fluent index
    (quantifiers then only see the builtin domains).
    """
    if compiler is None:
        index = trajectory.last.index
        params = {name: len(args) for name, args in index.ground}
        compiler = Compiler(index, BUILTIN_DOMAINS, params)
    return compiler(node)(Env(trajectory, dict(bindings or {})))
