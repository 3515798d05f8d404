"""Compare the discrete belief engine on a fine grid with closed-form Kalman updates.

Run:  python3 demos/kalman_vs_grid.py   (takes a few seconds)
"""

import math

from sitcalc import GaussianBelief, initial_belief, kalman_correct, kalman_predict, progress, signature
from sitcalc.gaussian import grid_theory

SIGMA = 1.0
H = SIGMA / 20
STEPS = [("advance", 2.0), ("sense", 2.5), ("advance", -1.0), ("sense", 1.2), ("advance", 0.5)]


def grid_moments(b):
    m = b.marginal("position")
    mean = math.fsum(k * H * p for k, p in m.items())
    var = math.fsum((k * H - mean) ** 2 * p for k, p in m.items())
    return mean, var


def main():
    prior = GaussianBelief(0.0, SIGMA**2)
    theory = grid_theory(prior, SIGMA, SIGMA, step=H, halfwidth_cells=120)
    b = initial_belief(theory, "float")
    g = prior
    print(f"{'step':<16}{'grid mean':>11}{'kalman':>10}{'grid var':>11}{'kalman':>10}")
    for kind, v in STEPS:
        # only the current cell matters, so older history is dropped
        b = progress(theory, b, signature(theory, kind, round(v / H)), history=0)
        g = kalman_predict(g, v, SIGMA**2) if kind == "advance" else kalman_correct(g, v, SIGMA**2)
        mean, var = grid_moments(b)
        print(f"{kind + ' ' + str(v):<16}{mean:>11.5f}{g.mean:>10.5f}{var:>11.5f}{g.var:>10.5f}")


if __name__ == "__main__":
    main()
