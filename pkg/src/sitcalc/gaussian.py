"""Linear-Gaussian belief updates and grid discretization of Normal noise."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def normal_cdf(x: float, sigma: float = 1.0) -> float:
    return 0.5 * (1.0 + math.erf(x / (sigma * math.sqrt(2.0))))


def cell_mass(d: float, sigma: float, width: float) -> float:
    """Mass of N(0, sigma^2) on [d - width/2, d + width/2]."""
    half = width / 2.0
    lo, hi = d - half, d + half
    # use the upper tail on the right so tiny masses keep their precision
    if lo > 0:
        return 0.5 * (math.erfc(lo / (sigma * math.sqrt(2.0))) - math.erfc(hi / (sigma * math.sqrt(2.0))))
    if hi < 0:
        return cell_mass(-d, sigma, width)
    return normal_cdf(hi, sigma) - normal_cdf(lo, sigma)


@dataclass(frozen=True)
class GaussianBelief:
    mean: float
    var: float

    def __post_init__(self):
        if not self.var > 0:
            raise ValueError(f"variance must be positive, got {self.var}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.var)


def kalman_predict(b: GaussianBelief, x: float, var_e: float) -> GaussianBelief:
    """Additive move by ``x`` with N(0, var_e) effector noise."""
    if var_e < 0:
        raise ValueError("effector variance must be nonnegative")
    return GaussianBelief(b.mean + x, b.var + var_e)


def kalman_correct(b: GaussianBelief, z: float, var_s: float) -> GaussianBelief:
    """Condition on reading ``z`` with N(0, var_s) sensor noise."""
    if not var_s > 0:
        raise ValueError("sensor variance must be positive")
    denom = var_s + b.var
    return GaussianBelief((z * b.var + b.mean * var_s) / denom, b.var * var_s / denom)


@dataclass(frozen=True)
class DiscretePMF:
    """Probabilities on the grid points ``k * step`` for k in ``offsets``."""

    step: float
    offsets: tuple
    probs: tuple
    tol: float = field(default=1e-12, repr=False, compare=False)  # allowed |sum - 1|

    def __post_init__(self):
        if len(self.offsets) != len(self.probs):
            raise ValueError("offsets and probs differ in length")
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        if abs(math.fsum(self.probs) - 1.0) > self.tol:
            raise ValueError("probabilities do not sum to 1")

    def __getitem__(self, k: int) -> float:
        i = k - self.offsets[0]
        return self.probs[i] if 0 <= i < len(self.probs) else 0.0

    def items(self):
        return zip(self.offsets, self.probs)

    @property
    def mean(self) -> float:
        return math.fsum(k * self.step * p for k, p in self.items())

    @property
    def var(self) -> float:
        m = self.mean
        return math.fsum((k * self.step - m) ** 2 * p for k, p in self.items())


def discretize_normal(sigma: float, step: float | None = None, halfwidth: float | None = None, renormalize: bool = True) -> DiscretePMF:
    """Per-cell masses of N(0, sigma^2) on a grid of spacing ``step``.

    Cells reach out to ``halfwidth``; the truncated tails are folded back in
    by renormalization.  Defaults: step = sigma/20, halfwidth = 6 sigma.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    step = sigma / 20 if step is None else step
    halfwidth = 6 * sigma if halfwidth is None else halfwidth
    if not step > 0 or halfwidth < step:
        raise ValueError("need step > 0 and halfwidth >= step")
    n = int(math.floor(halfwidth / step + 1e-9))
    half = [cell_mass(k * step, sigma, step) for k in range(n + 1)]
    masses = half[:0:-1] + half
    offsets = tuple(range(-n, n + 1))
    if not renormalize:
        return DiscretePMF(step, offsets, tuple(masses), tol=math.inf)
    tot = math.fsum(masses)
    return DiscretePMF(step, offsets, tuple(m / tot for m in masses))


def grid_theory(
    prior: GaussianBelief,
    sigma_e: float,
    sigma_s: float,
    step: float | None = None,
    halfwidth_cells: int | None = None,
    span: int = 2000,
):
    """Discrete robot theory whose noise cells are Normal integrals.

    Positions, commands and readings are integers counting grid cells of
    width ``step`` (default min(sigma_e, sigma_s)/20).  ``advance(x)`` moves
    by x plus an actual offset ``e``; ``sense(z)`` reads position plus ``e``.
    Noise offsets reach ``halfwidth_cells`` (default 6 sigma).  The initial
    belief is the discretized prior; weights are floats, so use float mode.
    """
    from .parser import parse_theory
    from .theory import InitWorld

    step = min(sigma_e, sigma_s) / 20 if step is None else step
    se, ss = sigma_e / step, sigma_s / step
    if halfwidth_cells is None:
        halfwidth_cells = int(math.ceil(6 * max(se, ss)))
    text = f"""
domain Cell = {-span}..{span}
domain Offset = {-halfwidth_cells}..{halfwidth_cells}

fluent position : Cell

action advance(nominal x: Cell, actual e: Offset)
  poss: abs(e) <= {int(math.ceil(6 * se))}
  observe: (advance, x)
  likelihood: normal(e, {se!r}, 1)

action sense(nominal z: Cell, actual e: Offset)
  poss: position + e = z and abs(e) <= {int(math.ceil(6 * ss))}
  observe: (sense, z)
  likelihood: normal(e, {ss!r}, 1)

successor position {{
  case advance(x, e) => position + x + e ;
}}
"""
    theory = parse_theory(text)
    pmf = discretize_normal(prior.sigma / step, 1.0, 6 * prior.sigma / step)
    centre = int(round(prior.mean / step))
    theory.init = tuple(
        InitWorld(theory.world({"position": centre + k}), p) for k, p in pmf.items()
    )
    return theory
