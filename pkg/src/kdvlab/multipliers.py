"""Frequency multiplier symbols on the zero-sum hyperplane.

Everything here is pure arithmetic on frequency tuples: the damping
multiplier m, the cubic resonance function, the quintic derivative
symbol, the regularized quotient symbol, and the pointwise ratio that
compares the derivative symbol against its smoothing majorant.

Conventions, fixed once:
  m(xi)      = 1 for |xi| < N, (|xi|/N)**s for |xi| >= N
  bracket    <xi> = (1 + xi^2)**0.5
  phi_n      = xi_1^3 + ... + xi_n^3 on tuples with zero sum
  "a-minus"  exponents are realized through a single slack epsilon,
             e.g. (1/2)- becomes 1/2 - eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MultiplierParams",
    "SymbolValue",
    "bracket",
    "gamma_tol",
    "on_gamma",
    "require_gamma",
    "m_eval",
    "phi_n",
    "m1_symbol",
    "m5_prime",
    "pointwise_ratio",
    "pointwise_ratio_batch",
    "random_gamma_tuples",
]

S_LOWER = -1.0 / 6.0


@dataclass(frozen=True)
class MultiplierParams:
    """Damping multiplier parameters: regularity s in (-1/6, 0], threshold N >= 1."""

    s: float
    N: float

    def __post_init__(self):
        if not (S_LOWER < self.s <= 0.0):
            raise ValueError(f"s must lie in (-1/6, 0], got {self.s}")
        if not self.N >= 1.0:
            raise ValueError(f"N must be >= 1, got {self.N}")


@dataclass(frozen=True)
class SymbolValue:
    """A symbol evaluation that may sit near the resonant set.

    value is always finite.  singular_flag marks the degenerate case where
    the cutoff did not exclude the singular set and the quotient had to be
    replaced by 0 to stay finite; a cleanly suppressed term (|phi| <= K)
    keeps the flag off.
    """

    value: float
    singular_flag: bool = False


def bracket(xi):
    """Japanese bracket <xi> = (1 + xi^2)**0.5; accepts scalars or arrays."""
    return np.sqrt(1.0 + np.asarray(xi, dtype=float) ** 2)


def gamma_tol(xs) -> float:
    """Zero-sum tolerance: 1e-9 * max(1, max |xi_j|)."""
    xs = np.asarray(xs, dtype=float)
    return 1e-9 * max(1.0, float(np.max(np.abs(xs))) if xs.size else 1.0)


def on_gamma(xs, tol: float | None = None) -> bool:
    """True when the tuple sums to zero within tolerance."""
    xs = np.asarray(xs, dtype=float)
    if tol is None:
        tol = gamma_tol(xs)
    return abs(math.fsum(xs.tolist())) <= tol


def require_gamma(xs, what: str = "tuple"):
    if not on_gamma(xs):
        total = math.fsum(np.asarray(xs, dtype=float).tolist())
        raise ValueError(f"{what} is off the zero-sum hyperplane (sum={total!r})")


def m_eval(p: MultiplierParams, xi):
    """Damping multiplier m(xi): 1 below the threshold, (|xi|/N)**s at and above it.

    Accepts scalars or arrays.  Continuous at |xi| = N since (N/N)**s = 1.
    """
    ax = np.abs(np.asarray(xi, dtype=float))
    out = np.ones_like(ax)
    hi = ax >= p.N
    if np.any(hi):
        out[hi] = (ax[hi] / p.N) ** p.s
    if np.isscalar(xi) or np.ndim(xi) == 0:
        return float(out)
    return out


def phi_n(xs) -> float:
    """Cubic resonance function: sum of cubes, exactly-rounded accumulation."""
    xs = np.asarray(xs, dtype=float)
    return math.fsum((xs**3).tolist())


def m1_symbol(p: MultiplierParams, xs) -> float:
    """Quintic derivative symbol sum(m(xi_j)^2 * xi_j) on a zero-sum 5-tuple."""
    xs = np.asarray(xs, dtype=float)
    if xs.shape != (5,):
        raise ValueError(f"expected a 5-tuple, got shape {xs.shape}")
    require_gamma(xs, "5-tuple")
    terms = m_eval(p, xs) ** 2 * xs
    return math.fsum(terms.tolist())


def m5_prime(p: MultiplierParams, xs, K: float) -> SymbolValue:
    """Regularized quotient symbol -2*M1 / (5*phi5), active only where |phi5| > K.

    Outside the cutoff the value is 0 by construction, so the symbol never
    divides by a small resonance the cutoff was meant to exclude.
    """
    if K < 0:
        raise ValueError(f"cutoff K must be >= 0, got {K}")
    xs = np.asarray(xs, dtype=float)
    if xs.shape != (5,):
        raise ValueError(f"expected a 5-tuple, got shape {xs.shape}")
    require_gamma(xs, "5-tuple")
    phi = phi_n(xs)
    if not abs(phi) > K:
        return SymbolValue(0.0, False)
    num = m1_symbol(p, xs)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = -2.0 * num / (5.0 * phi)
    if not np.isfinite(val):
        # cutoff failed to guard the division (K below floating resolution)
        return SymbolValue(0.0, True)
    return SymbolValue(float(val), False)


def _ratio_parts(p: MultiplierParams, xs: np.ndarray, eps: float):
    """numerator |M1|/(m1*..*m5) and majorant max_j |xi_j|<xi_j>^(1/2-eps) / N^(1/2-eps)."""
    mvals = m_eval(p, xs)
    num = np.abs(np.sum(mvals**2 * xs, axis=-1)) / np.prod(mvals, axis=-1)
    expo = 0.5 - eps
    maj = np.max(np.abs(xs) * bracket(xs) ** expo, axis=-1) / p.N**expo
    return num, maj


def pointwise_ratio(p: MultiplierParams, xs, eps: float = 0.05) -> float:
    """|M1/(m1...m5)| divided by its smoothing majorant on a zero-sum 5-tuple.

    Returns 0 by convention when the majorant vanishes (the all-zero tuple).
    """
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    xs = np.asarray(xs, dtype=float)
    if xs.shape != (5,):
        raise ValueError(f"expected a 5-tuple, got shape {xs.shape}")
    require_gamma(xs, "5-tuple")
    expo = 0.5 - eps
    maj = float(np.max(np.abs(xs) * bracket(xs) ** expo) / p.N**expo)
    if maj == 0.0:
        return 0.0
    # exactly-rounded numerator sum for near-cancelling tuples
    mvals = m_eval(p, xs)
    num = abs(math.fsum((mvals**2 * xs).tolist())) / float(np.prod(mvals))
    return num / maj


def pointwise_ratio_batch(p: MultiplierParams, xs: np.ndarray, eps: float = 0.05) -> np.ndarray:
    """Vectorized pointwise_ratio over rows of an (n, 5) array of zero-sum tuples.

    Rows are trusted to be on the hyperplane (the samplers construct them so);
    the scalar entry point re-checks on demand.
    """
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != 5:
        raise ValueError(f"expected an (n, 5) array, got shape {xs.shape}")
    num, maj = _ratio_parts(p, xs, eps)
    out = np.zeros(xs.shape[0])
    ok = maj > 0.0
    out[ok] = num[ok] / maj[ok]
    return out


def random_gamma_tuples(rng: np.random.Generator, n: int, lo: float, hi: float) -> np.ndarray:
    """(n, 5) zero-sum tuples with four log-uniform magnitudes in [lo, hi].

    Signs are independent fair coins and the fifth entry closes the sum, so
    the rows mix widely separated scales including near-cancelling ones.
    """
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    mags = np.exp(rng.uniform(math.log(lo), math.log(hi), size=(n, 4)))
    signs = rng.choice((-1.0, 1.0), size=(n, 4))
    xs = np.empty((n, 5))
    xs[:, :4] = mags * signs
    xs[:, 4] = -np.sum(xs[:, :4], axis=1)
    return xs
