"""Walk the one-dimensional robot through eight observations and print its belief.

Run:  python3 demos/robot_walkthrough.py
"""

from importlib import resources

from sitcalc import bel, initial_belief, parse_formula, parse_theory, progress, signature

DATA = resources.files("sitcalc") / "data"

# (action key, visible argument); exact motion first, then noisy motion
STEPS = [
    ("sense-position", 11),
    ("sense-position", 11),
    ("exact-advance", -2),
    ("sense-position", 9),
    ("exact-advance", 2),
    ("advance", 1),
    ("advance", -1),
    ("sense-position", 11),
]


def show(b):
    m = b.marginal("position")
    cells = "  ".join(f"{p}:{w}" for p, w in sorted(m.items()) if w)
    print(f"S{b.step}  {cells}")


def main():
    robot = parse_theory((DATA / "robot.sitc").read_text())
    b = initial_belief(robot)
    show(b)
    for key, arg in STEPS:
        b = progress(robot, b, signature(robot, key, arg))
        show(b)

    near = parse_formula("abs(position - 11) <= 1", robot)
    print(f"\nP(position within 1 of 11) = {bel(robot, b, near)}")


if __name__ == "__main__":
    main()
