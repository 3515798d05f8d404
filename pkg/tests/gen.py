"""Random theory generators shared by the property and acceptance tests.

Every generator returns source text, so the parser is exercised too.
"""

from __future__ import annotations

import random
from fractions import Fraction

from sitcalc.engine import apply_action, poss


def frac(f: Fraction) -> str:
    f = Fraction(f)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def rand_dist(rng: random.Random, n: int, zeros: bool = True) -> list:
    """n nonnegative rationals summing to 1, at least one positive."""
    w = [rng.randint(0 if zeros else 1, 9) for _ in range(n)]
    if not any(w):
        w[rng.randrange(n)] = 1
    tot = sum(w)
    return [Fraction(x, tot) for x in w]


def table_expr(cells: dict, default: str = "0") -> str:
    """Nested if-then-else over (condition, value) pairs."""
    out = default
    for cond, val in reversed(list(cells.items())):
        out = f"if {cond} then {frac(val)} else {out}"
    return out


# ---------------------------------------------------------------------------
# pure sensing


def sensing_theory(rng: random.Random):
    """Fluent f over 0..n-1, an unrelated bool g, and a noisy reading of f.

    Returns (text, prior over (f, g), likelihood table L[x][t]).
    """
    n = rng.randint(2, 5)
    m = rng.randint(2, 4)  # reading values
    L = {x: {} for x in range(m)}
    for t in range(n):
        col = rand_dist(rng, m)  # P(reading | f = t) sums to 1 over readings
        for x in range(m):
            L[x][t] = col[x]
    cells = {f"x = {x} and t = {t}": L[x][t] for x in range(m) for t in range(n) if L[x][t]}
    worlds = [(t, g) for t in range(n) for g in (False, True)]
    prior = dict(zip(worlds, rand_dist(rng, len(worlds))))
    init = "\n".join(
        f"  world {{f = {t}, g = {'true' if g else 'false'}}} weight {frac(w)} ;"
        for (t, g), w in prior.items()
    )
    text = f"""
domain V = 0..{n - 1}
domain R = 0..{m - 1}
fluent f : V
fluent g : bool

action sense(nominal x: R, actual t: V)
  poss: t = f
  observe: (sense, x)
  likelihood: {table_expr(cells)}

init {{
{init}
}}
"""
    return text, n, m, prior, L


# ---------------------------------------------------------------------------
# additive effector


def effector_theory(rng: random.Random):
    """f moves by an actual y drawn from a state-independent table around x.

    Returns (text, prior over f, L[x][y]).
    """
    cmds = range(-2, 3)
    L = {}
    for x in cmds:
        spread = rng.randint(0, 2)
        ys = list(range(x - spread, x + spread + 1))
        L[x] = dict(zip(ys, rand_dist(rng, len(ys))))
    cells = {f"x = {x} and y = {y}": p for x in cmds for y, p in L[x].items() if p}
    support = rng.sample(range(-4, 5), rng.randint(1, 5))
    prior = dict(zip(sorted(support), rand_dist(rng, len(support), zeros=False)))
    init = "\n".join(f"  world {{f = {t}}} weight {frac(w)} ;" for t, w in prior.items())
    poss = rng.choice(["true", "abs(x - y) <= 2"])
    text = f"""
domain F = -20..20
domain C = -2..2
domain Y = -4..4
fluent f : F

action move(nominal x: C, actual y: Y)
  poss: {poss}
  observe: (move, x)
  likelihood: {table_expr(cells)}

successor f {{
  case move(x, y) => f + y ;
}}

init {{
{init}
}}
"""
    return text, prior, L


# ---------------------------------------------------------------------------
# small general theories for the oracle


_POSS = ["true", "f != x", "y = f", "abs(x - y) <= 1", "g", "f <= y", "not g or f = x"]
_LK = [
    "1",
    "1/2",
    "if x = y then 2/3 else 1/3",
    "if f = y then 3/4 else 1/4",
    "if g then 1/5 else 4/5",
    "if f = x then 0 else 1",
]


def small_theory(rng: random.Random):
    """Up to 4 fluent values, up to 3 action schemas, random Oi groups."""
    k = rng.randint(2, 4)
    top = k - 1
    values_f = ["y", "x", "0", str(top), f"min(f + 1, {top})", "max(f - 1, 0)", "if f = x then 0 else x"]
    n_actions = rng.randint(1, 3)
    groups = ["obs0", "obs1"]
    decls, f_cases, g_cases = [], [], []
    for i in range(n_actions):
        name = f"act{i}"
        has_y = rng.random() < 0.7
        params = "nominal x: D" + (", actual y: D" if has_y else "")
        poss = rng.choice([p for p in _POSS if has_y or "y" not in p])
        lk = rng.choice([e for e in _LK if has_y or "y" not in e])
        decls.append(
            f"action {name}({params})\n  poss: {poss}\n  observe: ({rng.choice(groups)}, x)\n  likelihood: {lk}\n"
        )
        pattern = f"{name}(x, y)" if has_y else f"{name}(x)"
        if rng.random() < 0.8:
            val = rng.choice([v for v in values_f if has_y or "y" not in v])
            guard = rng.choice(["", "", " when g", " when f != x"])
            f_cases.append(f"  case {pattern}{guard} => {val} ;")
        if rng.random() < 0.4:
            g_cases.append(f"  case {pattern} => {rng.choice(['not g', 'f = x', 'true'])} ;")
    worlds = [(f, g) for f in range(k) for g in (False, True)]
    chosen = rng.sample(worlds, rng.randint(1, len(worlds)))
    init = "\n".join(
        f"  world {{f = {f}, g = {'true' if g else 'false'}}} weight {rng.randint(0, 5) if i else rng.randint(1, 5)} ;"
        for i, (f, g) in enumerate(chosen)
    )
    text = f"domain D = 0..{top}\nfluent f : D\nfluent g : bool\n\n" + "\n".join(decls)
    if f_cases:
        text += "\nsuccessor f {\n" + "\n".join(f_cases) + "\n}\n"
    if g_cases:
        text += "\nsuccessor g {\n" + "\n".join(g_cases) + "\n}\n"
    text += "\ninit {\n" + init + "\n}\n"
    return text


def walk_signatures(theory, rng: random.Random, depth: int) -> list:
    """Signatures along a random executable path from a random initial world."""
    traj, _ = rng.choice(theory.initial_trajectories())
    sigs = []
    actions = [
        a for s in theory.actions.values() for a in theory.enumerate_actions(s, {})
    ]
    for _ in range(depth):
        ok = [a for a in actions if poss(theory, a, traj)]
        if not ok:
            break
        a = rng.choice(ok)
        sigs.append(theory.signature_of(a))
        traj = traj.extend(a, apply_action(theory, a, traj))
    return sigs


def random_queries(theory, rng: random.Random, depth: int, count: int = 4) -> list:
    top = max(theory.domain("D").values)
    pool = [
        "true",
        "g",
        f"f = {rng.randint(0, top)}",
        f"f != {rng.randint(0, top)}",
        f"f >= {rng.randint(0, top)} and not g",
        f"g -> f = {rng.randint(0, top)}",
        "exists v: D . f = v and v > 0",
    ]
    if depth:
        pool += [f"f(prev(now)) = {rng.randint(0, top)}", "f = f(prev(now))"]
    return rng.sample(pool, count)

