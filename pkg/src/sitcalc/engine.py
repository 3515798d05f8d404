"""Belief progression: Poss, action application, Oi classes, likelihoods, K/p update,
Bel/Know queries, complex-action execution and seeded simulation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    BeliefError,
    BeliefState,
    Env,
    EvaluationError,
    GroundAction,
    Node,
    ObservationSignature,
    SitCalcError,
    Trajectory,
    WorldState,
    Weight,
    format_value,
    norm_num,
    prev_depth,
)
from .programs import Choice, Ground, Pi, Prim, ProcCall, Program, Seq
from .theory import ActionTheory, match_pattern


@dataclass(frozen=True)
class StepOutcome:
    action: GroundAction
    signature: ObservationSignature
    world: WorldState


# ---------------------------------------------------------------------------
# single actions


def _env(theory: ActionTheory, action: GroundAction, trajectory: Trajectory) -> Env:
    return Env(trajectory, dict(zip(theory.compiled.param_names[action.schema], action.args)))


def poss(theory: ActionTheory, action: GroundAction, trajectory: Trajectory) -> bool:
    """Precondition of ``action`` at the end of ``trajectory``."""
    return theory.compiled.poss[action.schema](_env(theory, action, trajectory))


def likelihood(theory: ActionTheory, action: GroundAction, trajectory: Trajectory) -> Weight:
    v = theory.compiled.likelihood[action.schema](_env(theory, action, trajectory))
    if v < 0:
        raise SitCalcError(f"likelihood of {action} is negative ({format_value(v)})")
    return v


def apply_action(theory: ActionTheory, action: GroundAction, world: WorldState | Trajectory) -> WorldState:
    """Successor world: each fluent takes its first matching case, else persists.

    Passing a Trajectory lets rule bodies use ``prev``.
    """
    traj = world if isinstance(world, Trajectory) else Trajectory.initial(-1, world)
    updates = {}
    for slot, fixed, cases in theory.compiled.effects[action.schema]:
        for pattern, guard, value in cases:
            b = match_pattern(pattern, action, fixed)
            if b is None:
                continue
            env = Env(traj, b)
            if guard is not None and not guard(env):
                continue
            updates[slot] = norm_num(value(env))
            break
    if not updates:
        return traj.last
    new = traj.last.replace(updates)
    for slot in updates:
        if new.values[slot] not in new.index.domains[slot]:
            raise EvaluationError(
                f"{action} takes {new.index.label(slot)} to {format_value(new.values[slot])}, "
                f"outside domain {new.index.domains[slot].name}"
            )
    return new


def oi_class(theory: ActionTheory, signature: ObservationSignature) -> tuple:
    """Every ground action the agent cannot tell apart from one with ``signature``."""
    cache = theory.__dict__.setdefault("_oi_cache", {})
    if signature in cache:
        return cache[signature]
    out = []
    for s in theory.group_keys.get(signature.key, ()):
        if len(s.observe_params) != len(signature.args):
            continue
        fixed = dict(zip(s.observe_params, signature.args))
        if any(v not in theory.domain(s.param(n).domain) for n, v in fixed.items()):
            continue
        out.extend(theory.enumerate_actions(s, fixed))
    cache[signature] = tuple(out)
    return cache[signature]


def signature(theory: ActionTheory, key: str, *args) -> ObservationSignature:
    """Convenience constructor that checks the key and arity."""
    group = theory.group_keys.get(key)
    if not group:
        raise SitCalcError(f"unknown action schema or observation key {key}")
    if len(group[0].observe_params) != len(args):
        raise SitCalcError(f"observation {key} carries {len(group[0].observe_params)} values, got {len(args)}")
    return ObservationSignature(key, tuple(norm_num(a) for a in args))


# ---------------------------------------------------------------------------
# beliefs


def initial_belief(theory: ActionTheory, mode: str = "exact") -> BeliefState:
    members = []
    for traj, w in theory.initial_trajectories():
        members.append((traj, float(w) if mode == "float" else Fraction(w)))
    return BeliefState(0, tuple(members), mode)


def progress(
    theory: ActionTheory,
    belief: BeliefState,
    signature: ObservationSignature,
    history: int | None = None,
) -> BeliefState:
    """K/p successor: every member extended by every possible Oi-equivalent action.

    ``history`` bounds how many past steps each member keeps (None keeps all);
    members whose retained tails coincide are merged.
    """
    if history is not None and history < theory.history_depth:
        raise SitCalcError(f"history {history} is shorter than the theory's prev depth {theory.history_depth}")
    candidates = oi_class(theory, signature)
    comp = theory.compiled
    exact = belief.mode == "exact"
    new = []
    for traj, w in belief.members:
        for a in candidates:
            env = Env(traj, dict(zip(comp.param_names[a.schema], a.args)))
            if not comp.poss[a.schema](env):
                continue
            lk = comp.likelihood[a.schema](env)
            if lk < 0:
                raise SitCalcError(f"likelihood of {a} is negative ({format_value(lk)})")
            if exact and isinstance(lk, float):
                raise SitCalcError(f"likelihood of {a} is a float; use float mode")
            world = apply_action(theory, a, traj)
            nw = w * lk if exact else w * float(lk)
            new.append((traj.extend(a, world), nw))
    if not new:
        raise BeliefError(f"impossible observation: no possible situation is consistent with {signature}")
    out = BeliefState(belief.step + 1, tuple(new), belief.mode)
    return out.compact(history) if history is not None else out


def observe_sequence(theory: ActionTheory, belief: BeliefState, signatures: Iterable[ObservationSignature], history: int | None = None) -> BeliefState:
    for sig in signatures:
        belief = progress(theory, belief, sig, history)
    return belief


def bel(theory: ActionTheory, belief: BeliefState, formula: Node) -> Weight:
    """Normalized weight of the members satisfying ``formula``."""
    tot = belief.total
    if not tot:
        raise BeliefError("belief undefined (division by zero): every possible situation has weight 0")
    f = theory.compiler(formula)
    num = sum((w for traj, w in belief.members if _holds(f, traj)), Fraction(0) if belief.mode == "exact" else 0.0)
    return norm_num(num / tot)


def know(theory: ActionTheory, belief: BeliefState, formula: Node) -> bool:
    """True iff ``formula`` holds in every possible member, weight 0 included."""
    if not belief.members:
        raise BeliefError("knowledge undefined: no possible situations")
    f = theory.compiler(formula)
    return all(_holds(f, traj) for traj, _ in belief.members)


def _holds(f, traj: Trajectory) -> bool:
    v = f(Env(traj, {}))
    if not isinstance(v, bool):
        raise EvaluationError("query is not a formula")
    return v


def check_depth(formula: Node, belief: BeliefState) -> None:
    d = prev_depth(formula)
    for traj, _ in belief.members:
        if d > len(traj.worlds) - 1:
            raise EvaluationError(f"prev depth {d} exceeds history length {len(traj.worlds) - 1}")


# ---------------------------------------------------------------------------
# complex actions


def _expand(theory: ActionTheory, p: Program, bind: dict) -> Program:
    """Replace a ProcCall with its definition body plus bindings."""
    pd = theory.programs.get(p.name)
    if pd is None:
        raise SitCalcError(f"unknown program {p.name}")
    return pd


def _arg_values(theory, args, bind, traj) -> tuple:
    comp = theory.compiler
    return tuple(norm_num(comp(a)(Env(traj, dict(bind)))) for a in args)


def ground_steps(theory: ActionTheory, p: Program, bind: dict, traj: Trajectory) -> Iterable[GroundAction]:
    """Candidate ground actions for a single-step program (Prim, Ground)."""
    s = theory.schema(p.schema)
    vals = _arg_values(theory, p.args, bind, traj)
    if isinstance(p, Ground):
        yield GroundAction(s.name, vals)
        return
    fixed = dict(zip((q.name for q in s.nominal), vals))
    for n, v in fixed.items():
        if v not in theory.domain(s.param(n).domain):
            return
    yield from theory.enumerate_actions(s, fixed)


def run_program(theory: ActionTheory, program: Program, trajectory: Trajectory, bind: dict | None = None) -> list:
    """All terminal histories of ``program`` from ``trajectory`` (order-preserving, no duplicates)."""
    out = _run(theory, program, trajectory, dict(bind or {}))
    seen, uniq = set(), []
    for t in out:
        key = (t.worlds, t.actions)
        if key not in seen:
            seen.add(key)
            uniq.append(t)
    return uniq


def _run(theory, p, traj, bind) -> list:
    if isinstance(p, (Prim, Ground)):
        out = []
        for a in ground_steps(theory, p, bind, traj):
            if a.args and any(v not in theory.domain(q.domain) for q, v in zip(theory.schema(a.schema).params, a.args)):
                continue
            if poss(theory, a, traj):
                out.append(traj.extend(a, apply_action(theory, a, traj)))
        return out
    if isinstance(p, Seq):
        return [t2 for t1 in _run(theory, p.first, traj, bind) for t2 in _run(theory, p.second, t1, bind)]
    if isinstance(p, Choice):
        return _run(theory, p.left, traj, bind) + _run(theory, p.right, traj, bind)
    if isinstance(p, Pi):
        out = []
        for v in theory.domain(p.domain):
            out.extend(_run(theory, p.body, traj, {**bind, p.var: v}))
        return out
    if isinstance(p, ProcCall):
        pd = _expand(theory, p, bind)
        vals = _arg_values(theory, p.args, bind, traj)
        return _run(theory, pd.body, traj, dict(zip((n for n, _ in pd.params), vals)))
    raise TypeError(p)


def program_signatures(theory: ActionTheory, program: Program, bind: dict | None = None) -> set:
    """Every observation sequence the program can produce, ignoring preconditions.

    Arguments must not depend on fluents (there is no world to read them from).
    """
    return set(_sigs(theory, program, dict(bind or {})))


def _sigs(theory, p, bind):
    if isinstance(p, (Prim, Ground)):
        seen = set()
        for a in ground_steps(theory, p, bind, None):
            sig = theory.signature_of(a)
            if sig not in seen:
                seen.add(sig)
                yield (sig,)
    elif isinstance(p, Seq):
        firsts = set(_sigs(theory, p.first, bind))
        seconds = set(_sigs(theory, p.second, bind))
        for a in firsts:
            for b in seconds:
                yield a + b
    elif isinstance(p, Choice):
        yield from _sigs(theory, p.left, bind)
        yield from _sigs(theory, p.right, bind)
    elif isinstance(p, Pi):
        for v in theory.domain(p.domain):
            yield from _sigs(theory, p.body, {**bind, p.var: v})
    elif isinstance(p, ProcCall):
        pd = _expand(theory, p, bind)
        vals = _arg_values(theory, p.args, bind, None)
        yield from _sigs(theory, pd.body, dict(zip((n for n, _ in pd.params), vals)))
    else:
        raise TypeError(p)


def path_weight(theory: ActionTheory, start: Trajectory, end: Trajectory) -> Weight:
    """Product of likelihoods along the steps ``end`` adds to ``start``."""
    w = Fraction(1)
    n = len(start.actions)
    for k in range(n, len(end.actions)):
        prefix = Trajectory(end.origin, end.worlds[: k + 1], end.actions[:k], end.truncated)
        w = w * likelihood(theory, end.actions[k], prefix)
    return w


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _sample(rng: random.Random, items: Sequence, weights: Sequence):
    total = sum(weights)
    if not total:
        return None
    if all(isinstance(w, (int, Fraction)) for w in weights):
        u = Fraction(rng.random()) * total
    else:
        u = rng.random() * float(total)
    acc = 0
    last = None
    for it, w in zip(items, weights):
        if not w:
            continue
        acc += w
        last = it
        if u < acc:
            return it
    return last


def simulate_program(theory: ActionTheory, actual: Trajectory, program: Program, rng) -> list:
    """Resolve the program's nondeterminism in the actual world.

    One terminal history is drawn with probability proportional to the
    product of step likelihoods.  Returns one StepOutcome per primitive step.
    """
    rng = _rng(rng)
    ends = run_program(theory, program, actual)
    weights = [path_weight(theory, actual, e) for e in ends]
    chosen = _sample(rng, ends, weights)
    if chosen is None:
        raise BeliefError("command unexecutable in actual world")
    steps = []
    for k in range(len(actual.actions), len(chosen.actions)):
        a = chosen.actions[k]
        steps.append(StepOutcome(a, theory.signature_of(a), chosen.worlds[k + 1]))
    return steps


def simulate_step(theory: ActionTheory, actual: Trajectory, command: Program, rng) -> StepOutcome:
    """Single-step variant of :func:`simulate_program`."""
    steps = simulate_program(theory, actual, command, rng)
    if len(steps) != 1:
        raise SitCalcError(f"command produced {len(steps)} steps; use simulate_program")
    return steps[0]


def simulate_observation(theory: ActionTheory, actual: Trajectory, sig: ObservationSignature, rng) -> StepOutcome:
    """Pick the actual action behind an observation, proportional to likelihood."""
    rng = _rng(rng)
    cands, weights = [], []
    for a in oi_class(theory, sig):
        if poss(theory, a, actual):
            cands.append(a)
            weights.append(likelihood(theory, a, actual))
    chosen = _sample(rng, cands, weights)
    if chosen is None:
        raise BeliefError(f"impossible observation: {sig} cannot occur in the actual world")
    return StepOutcome(chosen, sig, apply_action(theory, chosen, actual))


def replay(theory: ActionTheory, trajectory: Trajectory) -> None:
    """Re-derive every step; raises if a stored world or precondition is wrong."""
    prefix = Trajectory(trajectory.origin, trajectory.worlds[:1], (), trajectory.truncated)
    for a, w in zip(trajectory.actions, trajectory.worlds[1:]):
        if not poss(theory, a, prefix):
            raise SitCalcError(f"{a} is not possible after {prefix}")
        nxt = apply_action(theory, a, prefix)
        if nxt != w:
            raise SitCalcError(f"{a} should yield {nxt!r}, trajectory has {w!r}")
        prefix = prefix.extend(a, w)
