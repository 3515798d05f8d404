"""Complex actions: primitive steps closed under sequence, choice and pi."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Pos


@dataclass(frozen=True)
class Program:
    pass


@dataclass(frozen=True)
class Prim(Program):
    """Schema applied to its nominal arguments; actual arguments are left open."""

    schema: str
    args: tuple  # Exprs, one per nominal parameter
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Ground(Program):
    """Schema applied to every parameter (Exprs, possibly over pi variables)."""

    schema: str
    args: tuple
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq(Program):
    first: Program
    second: Program


@dataclass(frozen=True)
class Choice(Program):
    left: Program
    right: Program


@dataclass(frozen=True)
class Pi(Program):
    var: str
    domain: str
    body: Program


@dataclass(frozen=True)
class ProcCall(Program):
    """Use of a named ``program`` definition; expanded at execution time."""

    name: str
    args: tuple
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ProgramDef:
    name: str
    params: tuple  # ((name, domain name), ...)
    body: Program


def program_exprs(p: Program):
    """All argument expressions appearing in a program."""
    if isinstance(p, (Prim, Ground, ProcCall)):
        yield from p.args
    elif isinstance(p, Seq):
        yield from program_exprs(p.first)
        yield from program_exprs(p.second)
    elif isinstance(p, Choice):
        yield from program_exprs(p.left)
        yield from program_exprs(p.right)
    elif isinstance(p, Pi):
        yield from program_exprs(p.body)
