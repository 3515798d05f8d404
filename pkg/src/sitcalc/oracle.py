"""Brute-force reference semantics.

Builds the whole tree of situations reachable under a signature sequence
by trying every ground action of every schema, then reads Bel and Know off
the leaves.  Nothing here goes through the engine's incremental
progression, compiled effect tables or Oi-class index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    BeliefError,
    GroundAction,
    Node,
    ObservationSignature,
    SitCalcError,
    Trajectory,
    WorldState,
    evaluate,
    norm_num,
)
from .theory import ActionTheory, match_pattern


def all_ground_actions(theory: ActionTheory) -> list:
    out = []
    for s in theory.actions.values():
        pools = [list(theory.domain(p.domain)) for p in s.params]
        out.extend(GroundAction(s.name, args) for args in itertools.product(*pools))
    return out


def _bindings(theory: ActionTheory, a: GroundAction) -> dict:
    s = theory.actions[a.schema]
    return {p.name: v for p, v in zip(s.params, a.args)}


def successor(theory: ActionTheory, a: GroundAction, traj: Trajectory) -> WorldState:
    """Next world by reading every successor rule case by case."""
    comp = theory.compiler
    values = {}
    for slot, (fname, fargs) in enumerate(theory.index.ground):
        rule = theory.rule(fname)
        fixed = dict(zip(rule.params, fargs))
        new = traj.last.values[slot]
        for case in rule.cases:
            b = match_pattern(case.pattern, a, fixed)
            if b is None:
                continue
            if case.guard is not None and not evaluate(case.guard, traj, b, comp):
                continue
            new = norm_num(evaluate(case.value, traj, b, comp))
            break
        values[(fname, fargs)] = new
    return WorldState.from_mapping(theory.index, values)


@dataclass
class SituationTree:
    """Leaves at the given depth with weight = initial weight x product of likelihoods."""

    leaves: list = field(default_factory=list)  # [(Trajectory, Fraction)]

    @classmethod
    def build(cls, theory: ActionTheory, signatures: Sequence[ObservationSignature]) -> "SituationTree":
        actions = all_ground_actions(theory)
        comp = theory.compiler
        level = [(t, Fraction(w)) for t, w in theory.initial_trajectories()]
        for sig in signatures:
            nxt = []
            for traj, w in level:
                for a in actions:
                    if theory.signature_of(a) != sig:
                        continue
                    b = _bindings(theory, a)
                    if not evaluate(theory.actions[a.schema].poss, traj, b, comp):
                        continue
                    lk = evaluate(theory.actions[a.schema].likelihood, traj, b, comp)
                    if isinstance(lk, float):
                        raise SitCalcError("oracle works in exact arithmetic only")
                    nxt.append((traj.extend(a, successor(theory, a, traj)), w * Fraction(lk)))
            level = nxt
        return cls(level)


def oracle_bel(theory: ActionTheory, signatures: Sequence[ObservationSignature], formula: Node):
    tree = SituationTree.build(theory, signatures)
    comp = theory.compiler
    total = sum((w for _, w in tree.leaves), Fraction(0))
    if total == 0:
        raise BeliefError("belief undefined (division by zero)")
    hit = sum((w for t, w in tree.leaves if evaluate(formula, t, {}, comp)), Fraction(0))
    return norm_num(hit / total)


def oracle_know(theory: ActionTheory, signatures: Sequence[ObservationSignature], formula: Node) -> bool:
    tree = SituationTree.build(theory, signatures)
    if not tree.leaves:
        raise BeliefError("knowledge undefined: empty situation tree")
    comp = theory.compiler
    return all(evaluate(formula, t, {}, comp) for t, _ in tree.leaves)
