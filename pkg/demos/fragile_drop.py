"""Dropping an object that may be fragile: belief in breakage tracks belief in fragility.

Run:  python3 demos/fragile_drop.py
"""

import dataclasses
from fractions import Fraction
from importlib import resources

from sitcalc import bel, initial_belief, parse_formula, parse_theory, progress, signature
from sitcalc.theory import InitWorld

DATA = resources.files("sitcalc") / "data"


def with_prior(theory, p):
    """Same theory with P(Fragile(A)) = p."""
    worlds = [iw.world for iw in theory.init]
    fragile = [iw.world[("Fragile", ("A",))] for iw in theory.init]
    init = tuple(InitWorld(w, p if f else 1 - p) for w, f in zip(worlds, fragile))
    return dataclasses.replace(theory, init=init)


def main():
    base = parse_theory((DATA / "drop.sitc").read_text())
    broken = parse_formula("Broken(A)", base)
    fragile = parse_formula("Fragile(A)", base)
    print(f"{'P(Fragile)':>10}  {'P(Broken) after drop':>20}  {'ratio':>6}")
    for p in (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
        t = with_prior(base, p)
        b0 = initial_belief(t)
        b1 = progress(t, b0, signature(t, "drop", "A"))
        pb = bel(t, b1, broken)
        ratio = pb / bel(t, b0, fragile)
        print(f"{str(p):>10}  {str(pb):>20}  {str(ratio):>6}")


if __name__ == "__main__":
    main()
