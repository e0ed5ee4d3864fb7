"""Pseudo-spectral integrator for u_t + u_xxx = (u^4)_x on the torus.

In mode coordinates the flow is uhat' = i xi^3 uhat + i xi (u^4)hat.  The
linear phase is applied exactly through the integrating factor; the quartic
term is evaluated in physical space on a zero-padded grid (pad factor >= 5/2,
which keeps every retained product mode alias-free) and the classical RK4
tableau is applied to the interaction-picture variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import BlowUpError
from .fields import FrequencyGrid, SpectralField, hermitize

__all__ = ["SolverConfig", "Trajectory", "nonlinear_rhs", "step", "run"]


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters.

    nonlinear=False freezes the quartic term (test hook for the exact linear
    phase).  observe_stride controls how often observers fire and states are
    recorded.  max_coeff is the blow-up guard on max |uhat|.
    """

    dt: float
    t_end: float
    dealias_pad: float = 2.5
    nonlinear: bool = True
    observe_stride: int = 1
    max_coeff: float = 1e8

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.dealias_pad < 2.5:
            raise ValueError(f"dealias pad factor must be >= 5/2, got {self.dealias_pad}")
        if self.observe_stride < 1:
            raise ValueError("observe_stride must be >= 1")


@dataclass
class Trajectory:
    """Stride-sampled states of a run (always includes t=0 and the final time)."""

    grid: FrequencyGrid
    times: list[float]
    states: list[np.ndarray] = dc_field(repr=False)

    def fields(self):
        return [SpectralField(self.grid, c) for c in self.states]


def _padded_size(M: int, pad: float) -> int:
    Mp = int(math.ceil(pad * M))
    return Mp + (Mp % 2)


def nonlinear_rhs(grid: FrequencyGrid, coeffs: np.ndarray, pad: float = 2.5) -> np.ndarray:
    """i*xi*(u^4)hat with zero-padded (alias-free) evaluation of the product.

    The Nyquist bin of the output is pinned to zero so the right-hand side
    maps the state space (Hermitian, Nyquist-free) into itself; otherwise
    each step would inject a Nyquist component that the symmetry projection
    removes again, and the two operations together would perturb the retained
    modes at first order in dt.
    """
    Mp = _padded_size(grid.M, pad)
    k = grid.mode_numbers()
    big = np.zeros(Mp, dtype=np.complex128)
    big[k % Mp] = coeffs
    u = np.fft.ifft(big) * Mp
    w = np.fft.fft(u**4) / Mp
    out = 1j * grid.xi() * w[k % Mp]
    out[grid.nyquist_index] = 0.0
    return out


def step(field: SpectralField, dt: float, pad: float = 2.5, nonlinear: bool = True) -> SpectralField:
    """One integrating-factor RK4 step; dt may be negative (reversibility checks)."""
    grid = field.grid
    c0 = field.coeffs
    xi3 = grid.xi() ** 3
    E = np.exp(1j * xi3 * dt)
    if not nonlinear:
        return SpectralField(grid, E * c0)
    E2 = np.exp(1j * xi3 * (dt / 2.0))

    def N(c):
        return nonlinear_rhs(grid, c, pad)

    n1 = N(c0)
    u2 = E2 * (c0 + (dt / 2.0) * n1)
    n2 = N(u2)
    u3 = E2 * c0 + (dt / 2.0) * n2
    n3 = N(u3)
    u4 = E * c0 + dt * (E2 * n3)
    n4 = N(u4)
    c1 = E * c0 + (dt / 6.0) * (E * n1 + 2.0 * E2 * (n2 + n3) + n4)
    return SpectralField(grid, hermitize(grid, c1))


def run(u0: SpectralField, cfg: SolverConfig, observers=()) -> Trajectory:
    """March to t_end, recording every observe_stride steps.

    Raises BlowUpError (with the time stamp) when a coefficient leaves the
    trusted range or turns non-finite.
    """
    n_steps = int(round(cfg.t_end / cfg.dt))
    if abs(n_steps * cfg.dt - cfg.t_end) > 1e-9 * max(cfg.t_end, cfg.dt):
        raise ValueError("t_end must be an integer number of steps")
    grid = u0.grid
    f = u0.copy()
    times = [0.0]
    states = [f.coeffs.copy()]
    for obs in observers:
        obs(0.0, f)
    for n in range(1, n_steps + 1):
        f = step(f, cfg.dt, cfg.dealias_pad, cfg.nonlinear)
        t = n * cfg.dt
        amp = np.max(np.abs(f.coeffs))
        if not np.isfinite(amp) or amp > cfg.max_coeff:
            raise BlowUpError(t)
        if n % cfg.observe_stride == 0 or n == n_steps:
            times.append(t)
            states.append(f.coeffs.copy())
            for obs in observers:
                obs(t, f)
    return Trajectory(grid, times, states)
