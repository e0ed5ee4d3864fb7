"""Scaling and iteration arithmetic for the global-in-time argument.

Given the regularity s, a horizon T, the data norm and the smallness target
eps0, the plan fixes the dilation rho, the frequency threshold N and the
torus rescaling lam so that one local step almost conserves the modified
energy and floor(N^(1-eps)) steps cover [0, T].  The "1-" appearing in the
iteration-count exponent is the same global slack eps used everywhere else;
it tightens the admissible range to s > -(1-eps)/24, which the plan reports
alongside the results.  All relations are kept to relative 1e-12 and can be
re-checked via Plan.residuals().
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .energies import energy_E1
from .fields import InitialDataSpec, FrequencyGrid, hs_norm, make_initial_data, rescale
from .multipliers import MultiplierParams

__all__ = ["PlanInput", "Plan", "GrowthBound", "make_plan", "growth_bound",
           "SmallnessCheck", "rescaled_smallness_check"]

_EPS0_CUBE_LIMIT = 0.01


@dataclass(frozen=True)
class PlanInput:
    s: float
    T: float
    u0_norm: float
    eps0: float
    eps: float = 0.05

    def __post_init__(self):
        if not -1.0 / 24.0 < self.s < 0.0:
            raise ValueError(f"s={self.s} outside the admissible range (-1/24, 0)")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if self.u0_norm < 0:
            raise ValueError("u0_norm must be nonnegative")
        if not self.eps0 > 0 or (4.0 * self.eps0) ** 3 >= _EPS0_CUBE_LIMIT:
            raise ValueError(f"eps0={self.eps0} violates (4*eps0)^3 < 1/100")
        if not 0.0 <= self.eps < 1.0:
            raise ValueError("eps must lie in [0, 1)")

    @property
    def eta_min(self) -> float:
        return -2.0 * self.s / (1.0 + 24.0 * self.s)

    @property
    def s_boundary(self) -> float:
        """Smallest admissible s for this slack: below it the iteration
        exponent (1-eps+24s)/(1+6s) turns negative."""
        return -(1.0 - self.eps) / 24.0


@dataclass(frozen=True)
class Plan:
    rho: float
    lam: float
    N: float
    iterations: int
    eta_min: float
    s_boundary: float
    inp: PlanInput

    def residuals(self) -> dict:
        """Relative re-substitution errors of the two defining relations."""
        i = self.inp
        lam_ref = self.rho * self.N ** (-6.0 * i.s / (1.0 + 6.0 * i.s))
        n_lhs = self.N ** ((1.0 - i.eps + 24.0 * i.s) / (1.0 + 6.0 * i.s))
        n_rhs = self.rho**3 * i.T
        return {
            "lambda": abs(self.lam - lam_ref) / lam_ref,
            "N": abs(n_lhs - n_rhs) / n_rhs,
        }

    def to_payload(self) -> dict:
        return {
            "rho": self.rho,
            "lambda": self.lam,
            "N": self.N,
            "iterations": self.iterations,
            "eta_min": self.eta_min,
            "s_boundary": self.s_boundary,
            "input": {
                "s": self.inp.s,
                "T": self.inp.T,
                "u0_norm": self.inp.u0_norm,
                "eps0": self.inp.eps0,
                "eps": self.inp.eps,
            },
        }


def make_plan(inp: PlanInput) -> Plan:
    """Closed-form rho, N, lam and the iteration count.

    rho is the smallest dilation >= 1 bringing rho^(-1/6-s)*u0_norm down to
    eps0 (equality attained at the closed form); N then solves
    N^((1-eps+24s)/(1+6s)) = rho^3*T and lam = rho*N^(-6s/(1+6s)).
    """
    if inp.s <= inp.s_boundary:
        raise ValueError(
            f"s={inp.s} is at or below the slack boundary -(1-eps)/24="
            f"{inp.s_boundary}; the iteration exponent (1-eps+24s)/(1+6s) "
            f"would not be positive")
    if inp.u0_norm < inp.eps0:
        rho = 1.0
    else:
        rho = (inp.u0_norm / inp.eps0) ** (1.0 / (1.0 / 6.0 + inp.s))
        rho = max(rho, 1.0)
    expo = (1.0 + 6.0 * inp.s) / (1.0 - inp.eps + 24.0 * inp.s)
    base = rho**3 * inp.T
    if base <= 1.0:
        raise ValueError(f"rho^3*T={base} does not force N > 1; enlarge T or the data")
    N = base**expo
    if not N > 1.0:
        raise ValueError(f"plan produced N={N} <= 1")
    lam = rho * N ** (-6.0 * inp.s / (1.0 + 6.0 * inp.s))
    iterations = math.floor(N ** (1.0 - inp.eps))
    return Plan(rho, lam, N, iterations, inp.eta_min, inp.s_boundary, inp)


@dataclass(frozen=True)
class GrowthBound:
    value: float
    margin: float


def growth_bound(inp: PlanInput, eta: float) -> GrowthBound:
    """Predicted sup-in-time norm bound (1+T)^eta * u0_norm for eta above
    the minimal exponent; the margin eta - eta_min is reported alongside."""
    if eta <= inp.eta_min:
        raise ValueError(f"eta={eta} must exceed eta_min={inp.eta_min} strictly")
    return GrowthBound((1.0 + inp.T) ** eta * inp.u0_norm, eta - inp.eta_min)


@dataclass(frozen=True)
class SmallnessCheck:
    iu_norm: float
    eps0: float
    ok: bool
    lam: float
    grid_modes: int


def rescaled_smallness_check(inp: PlanInput, plan: Plan, M: int = 256,
                             seed: int = 0) -> SmallnessCheck:
    """Numerical closure of the smallness step at toy scale.

    Draws data with the requested H^s norm on a unit torus, applies the
    plan's rescaling, and measures the L^2 norm under the smoothing operator
    with threshold N capped to the grid (the arithmetic N may exceed any
    affordable resolution; capping only makes the check harsher).
    """
    grid = FrequencyGrid(L=2.0 * math.pi, M=M)
    spec = InitialDataSpec(kind="random-phase", hs_target=inp.u0_norm, s=inp.s,
                           seed=seed)
    u0 = make_initial_data(spec, grid)
    v = rescale(u0, plan.lam)
    N_eff = min(plan.N, float(v.grid.kmax() * v.grid.dk))
    p = MultiplierParams(s=inp.s, N=max(N_eff, 1.0))
    iu = math.sqrt(energy_E1(v, p))
    return SmallnessCheck(iu, inp.eps0, iu < inp.eps0, plan.lam, M)
