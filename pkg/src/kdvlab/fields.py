"""Periodic grids, spectral fields, norms, initial data, and rescaling.

Transform convention, fixed once for the whole package: the forward
transform carries 1/M, so coefficients approximate Fourier-series
coefficients and are grid-size independent,

    u(x_j) = sum_k uhat_k exp(i xi_k x_j),   xi_k = dk * k,  dk = 2*pi/L.

Parseval constant under this convention: ||u||_{L2}^2 = L * sum |uhat_k|^2,
and every multilinear functional in the package carries the same single
factor L.  Coefficients are stored in numpy FFT order; the Nyquist bin is
pinned to zero (it has no conjugate partner and odd-order derivatives are
sign-ambiguous there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import GridCompatibilityError

__all__ = [
    "FrequencyGrid",
    "SpectralField",
    "InitialDataSpec",
    "hermitize",
    "hermitian_defect",
    "l2_norm",
    "hs_norm",
    "make_initial_data",
    "rescale",
]

DEFAULT_L = 2.0 * math.pi * 64.0


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform torus grid: length L, M points (M even), spacing dk = 2*pi/L."""

    L: float = DEFAULT_L
    M: int = 256

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.M < 4 or self.M % 2:
            raise ValueError(f"M must be even and >= 4, got {self.M}")

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.L

    def mode_numbers(self) -> np.ndarray:
        """Integer mode numbers in FFT order: 0, 1, ..., M/2-1, -M/2, ..., -1."""
        return np.fft.fftfreq(self.M, d=1.0 / self.M).astype(np.int64)

    def xi(self) -> np.ndarray:
        """Frequencies dk * k in FFT order."""
        return self.dk * self.mode_numbers()

    def x(self) -> np.ndarray:
        """Physical collocation points j*L/M."""
        return np.arange(self.M) * (self.L / self.M)

    @property
    def nyquist_index(self) -> int:
        return self.M // 2

    def kmax(self) -> int:
        """Largest usable mode number (Nyquist excluded)."""
        return self.M // 2 - 1


@dataclass
class SpectralField:
    """A real field on the torus stored by its complex mode coefficients."""

    grid: FrequencyGrid
    coeffs: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.M,):
            raise ValueError(f"coeffs shape {c.shape} does not match M={self.grid.M}")
        self.coeffs = c

    def values(self) -> np.ndarray:
        """Physical samples; real part only (imaginary residue is rounding)."""
        return np.real(np.fft.ifft(self.coeffs) * self.grid.M)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    @classmethod
    def from_values(cls, grid: FrequencyGrid, values) -> "SpectralField":
        c = np.fft.fft(np.asarray(values, dtype=float)) / grid.M
        f = cls(grid, c)
        f.coeffs = hermitize(grid, f.coeffs)
        return f


def hermitize(grid: FrequencyGrid, coeffs: np.ndarray) -> np.ndarray:
    """Project onto Hermitian symmetry uhat(-k) = conj(uhat(k)); zero the Nyquist bin."""
    M = grid.M
    idx = (-np.arange(M)) % M
    out = 0.5 * (coeffs + np.conj(coeffs[idx]))
    out[0] = out[0].real
    out[grid.nyquist_index] = 0.0
    return out

def hermitian_defect(field: SpectralField) -> float:
    """Max deviation from Hermitian symmetry (0 for a genuinely real field)."""
    c = field.coeffs
    idx = (-np.arange(field.grid.M)) % field.grid.M
    return float(np.max(np.abs(c - np.conj(c[idx]))))


def l2_norm(field: SpectralField) -> float:
    return math.sqrt(field.grid.L * float(np.sum(np.abs(field.coeffs) ** 2)))


def hs_norm(field: SpectralField, s: float) -> float:
    """Sobolev norm sqrt(L * sum <xi>^{2s} |uhat|^2); s = 0 recovers the L2 norm."""
    xi = field.grid.xi()
    w = (1.0 + xi**2) ** s
    return math.sqrt(field.grid.L * float(np.sum(w * np.abs(field.coeffs) ** 2)))


@dataclass(frozen=True)
class InitialDataSpec:
    """Deterministic initial-data recipe.

    kind "random-phase": power-law envelope <xi>^(-decay) on the mode band
    with uniform random phases.  kind "gaussian-bumps": a mean-free sum of
    n_bumps periodized Gaussians.  Either way the result is normalized so
    the H^s norm equals hs_target (relative accuracy 1e-12).
    """

    kind: str
    hs_target: float
    s: float = 0.0
    seed: int = 0
    decay: float = 1.5
    band: tuple[int, int] | None = None
    n_bumps: int = 3
    width_frac: float = 0.05

    def __post_init__(self):
        if self.kind not in ("random-phase", "gaussian-bumps"):
            raise ValueError(f"unknown initial data kind {self.kind!r}")
        if not self.hs_target > 0:
            raise ValueError("hs_target must be positive")
        if self.kind == "random-phase" and not self.decay >= 0:
            raise ValueError("decay must be nonnegative")


def make_initial_data(spec: InitialDataSpec, grid: FrequencyGrid) -> SpectralField:
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    c = np.zeros(grid.M, dtype=np.complex128)
    kmax = grid.kmax()
    if spec.kind == "random-phase":
        lo, hi = spec.band if spec.band is not None else (1, kmax)
        hi = min(hi, kmax)
        if lo < 1 or lo > hi:
            raise ValueError(f"mode band [{lo}, {hi}] is empty on this grid (kmax={kmax})")
        ks = np.arange(lo, hi + 1)
        xi = grid.dk * ks
        amps = (1.0 + xi**2) ** (-spec.decay / 2.0)
        phases = rng.uniform(0.0, 2.0 * math.pi, size=ks.size)
        c[ks] = amps * np.exp(1j * phases)
        c[-ks] = np.conj(c[ks])
    else:
        x = grid.x()
        vals = np.zeros(grid.M)
        centers = rng.uniform(0.0, grid.L, size=spec.n_bumps)
        widths = spec.width_frac * grid.L * rng.uniform(0.5, 1.5, size=spec.n_bumps)
        amps = rng.uniform(0.5, 1.0, size=spec.n_bumps) * rng.choice([-1.0, 1.0], size=spec.n_bumps)
        for ctr, w, a in zip(centers, widths, amps):
            d = np.mod(x - ctr + grid.L / 2.0, grid.L) - grid.L / 2.0
            vals += a * np.exp(-0.5 * (d / w) ** 2)
        c = np.fft.fft(vals) / grid.M
        c[0] = 0.0  # mean-free
    c = hermitize(grid, c)
    f = SpectralField(grid, c)
    cur = hs_norm(f, spec.s)
    if cur == 0.0:
        raise ValueError("initial data recipe produced the zero field; target unachievable")
    f.coeffs *= spec.hs_target / cur
    return f


def rescale(field: SpectralField, lam: float, target_grid: FrequencyGrid | None = None) -> SpectralField:
    """Scaling map u(x) -> lam^(-2/3) u(x/lam), realized on the lam*L torus.

    In mode coordinates the map keeps indices and multiplies coefficients by
    lam^(-2/3); the continuum Fourier image is lam^(1/3) uhat(lam xi).  Any
    lam > 0 is accepted because the target grid is relabeled (dk -> dk/lam)
    rather than embedded.  The L2 norm scales by lam^(-1/6) exactly.
    """
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    new_L = lam * field.grid.L
    if target_grid is None:
        target_grid = FrequencyGrid(new_L, field.grid.M)
    else:
        if target_grid.M != field.grid.M:
            raise GridCompatibilityError(
                f"target grid has M={target_grid.M}, source has M={field.grid.M}"
            )
        if abs(target_grid.L - new_L) > 1e-9 * new_L:
            raise GridCompatibilityError(
                f"target grid length {target_grid.L} incompatible with lam*L={new_L}"
            )
    return SpectralField(target_grid, field.coeffs * lam ** (-2.0 / 3.0))
