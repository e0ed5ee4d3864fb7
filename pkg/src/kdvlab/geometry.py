"""Resonance-surface geometry: region labels, Jacobians, Morse checks.

Conventions used throughout, on a zero-sum 8-tuple t = (t0, ..., t7):

    C    := t4 + t5 + t6 + t7                 (composite second-generation leg)
    Phi5 := t0^3 + t1^3 + t2^3 + t3^3 + C^3   (first-generation resonance)
    Phi8 := t0^3 + t1^3 + ... + t7^3          (full resonance)
    xi   := -t0                               (output-side frequency)

Each Jacobian pair differentiates (Phi5, Phi8) with respect to two of these
variables while a documented third frequency compensates to stay on the
hyperplane; cubes differentiate to 3*(square), so every matrix entry carries
the constant 3 and the determinants the constant 9.  Region labels follow
the three-way split of the non-vanishing set by how many frequencies reach
the threshold N and whether the three largest are comparable while their
four-fold subsum is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NewtonDivergenceError
from .multipliers import MultiplierParams, require_gamma

__all__ = [
    "classify_region",
    "order_tuple",
    "jacobian_phi5_phi8",
    "phi5_octic",
    "phi8_octic",
    "MorseResult",
    "morse_solve",
    "morse_check",
    "morse_hessian",
    "MORSE_FAMILIES",
    "JACOBIAN_PAIRS",
]

JACOBIAN_PAIRS = ("xi1_xi3", "xi_xi2", "xi_xi7")
MORSE_FAMILIES = ("d3_case_B", "refined_case_b")


def order_tuple(t) -> tuple:
    """Sort a frequency tuple by decreasing magnitude (ties keep input order)."""
    return tuple(sorted(t, key=abs, reverse=True))


def classify_region(t, p: MultiplierParams, c_big: float = 1.0,
                    c_comp: float = 4.0, c_gg: float = 8.0) -> str:
    """Label an ordered zero-sum 8-tuple as vanishing / D1 / D2 / D3.

    t must be ordered by decreasing magnitude.  "vanishing": every frequency
    and the four-fold subsum t0+t1+t2+t3 sit below c_big*N, which forces the
    five-fold symbol to vanish identically.  "D1": the fifth-largest
    frequency still reaches c_big*N.  Otherwise the tuple lands in "D3" when
    the three largest are comparable (|t0| <= c_comp*|t2|) and dominate the
    subsum (|t0+t1+t2+t3| <= |t2|/c_gg), else in "D2".
    """
    if len(t) != 8:
        raise ValueError("expected a tuple of 8 frequencies")
    a = np.abs(np.asarray(t, dtype=float))
    if np.any(a[:-1] < a[1:] - 1e-12 * max(1.0, a.max())):
        raise ValueError("tuple must be ordered by decreasing magnitude")
    require_gamma(t, "classify_region")
    if min(c_big, c_comp, c_gg) <= 0:
        raise ValueError("threshold factors must be positive")
    thresh = c_big * p.N
    sub = abs(math.fsum(t[:4]))
    if max(a[0], sub) < thresh:
        return "vanishing"
    if a[4] >= thresh:
        return "D1"
    comparable = a[0] <= c_comp * a[2]
    dominant = sub <= a[2] / c_gg
    return "D3" if comparable and dominant else "D2"


def phi5_octic(t) -> float:
    """First-generation resonance with legs (t0, t1, t2, t3, t4+t5+t6+t7)."""
    c = math.fsum(t[4:8])
    return math.fsum([t[0] ** 3, t[1] ** 3, t[2] ** 3, t[3] ** 3, c**3])


def phi8_octic(t) -> float:
    return math.fsum(v**3 for v in t)


def jacobian_phi5_phi8(t, pair: str) -> float:
    """Closed-form determinant of the 2x2 Jacobian of (Phi5, Phi8).

    Pairs, with xi := -t0 and C := t4+t5+t6+t7:
      "xi1_xi3": d/d(t1, t3), compensating frequency t7;
      "xi_xi2":  d/d(xi, t2), compensating frequency t4;
      "xi_xi7":  d/d(xi, t7), compensating frequency t4.
    Entries are 3*(difference of squares); the determinant carries 9.
    """
    if len(t) != 8:
        raise ValueError("expected a tuple of 8 frequencies")
    require_gamma(t, "jacobian_phi5_phi8")
    t0, t1, t2, t3, t4, t5, t6, t7 = (float(v) for v in t)
    C = t4 + t5 + t6 + t7
    if pair == "xi1_xi3":
        m = ((t1 * t1 - C * C, t3 * t3 - C * C),
             (t1 * t1 - t7 * t7, t3 * t3 - t7 * t7))
    elif pair == "xi_xi2":
        m = ((t0 * t0 - C * C, C * C - t2 * t2),
             (t0 * t0 - t4 * t4, t4 * t4 - t2 * t2))
    elif pair == "xi_xi7":
        m = ((t0 * t0 - C * C, 0.0),
             (t0 * t0 - t4 * t4, t4 * t4 - t7 * t7))
    else:
        raise ValueError(f"unknown pair {pair!r}; expected one of {JACOBIAN_PAIRS}")
    return 9.0 * (m[0][0] * m[1][1] - m[0][1] * m[1][0])


# -- Morse analysis of the renormalized stationary-point polynomial ----------
#
# Both families reduce to  P(p1, p2) = 1 - p1^3 - p2^3 - r^3 - pd^3  with the
# dependent leg pd = c - p1 - p2 - r eliminated by the constraint, c = 1, and
# spectator r (identically 0 for d3_case_B, a parameter for refined_case_b).
# Stationarity means p1^2 = p2^2 = pd^2; with r = 0 the full stationary set
# is {(1,1), (1,-1), (-1,1), (1/3,1/3)}.  The sign-flip candidate (-1,-1) is
# not stationary: the damped Newton iteration started there descends the
# symmetric line into (1/3, 1/3).


@dataclass(frozen=True)
class MorseResult:
    family: str
    point: tuple
    grad_norm: float
    det: float
    iterations: int


def _family_spectator(family: str, spectator: float) -> float:
    if family not in MORSE_FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {MORSE_FAMILIES}")
    if family == "d3_case_B":
        if spectator != 0.0:
            raise ValueError("d3_case_B has no spectator frequency")
        return 0.0
    return float(spectator)


def _grad_hess(p1: float, p2: float, r: float, c: float = 1.0):
    pd = c - p1 - p2 - r
    g = (-3.0 * p1 * p1 + 3.0 * pd * pd, -3.0 * p2 * p2 + 3.0 * pd * pd)
    h = ((-6.0 * (p1 + pd), -6.0 * pd), (-6.0 * pd, -6.0 * (p2 + pd)))
    return g, h


def morse_hessian(family: str, point, spectator: float = 0.0,
                  constraint: float = 1.0):
    """Exact Hessian of P at an arbitrary point (not necessarily stationary).

    constraint is the normalized sum the dependent leg absorbs (1 in the
    paper's normalization).  Flipping point, spectator and constraint
    together negates the Hessian entrywise (the cubic part of P is odd), so
    the determinant is invariant under the global sign flip.
    """
    r = _family_spectator(family, spectator)
    _, h = _grad_hess(float(point[0]), float(point[1]), r, float(constraint))
    return h


def morse_solve(family: str, base_point, spectator: float = 0.0,
                max_iter: int = 50, tol: float = 1e-12) -> MorseResult:
    """Damped Newton on grad P from base_point; returns the stationary point
    found with its gradient norm and Hessian determinant."""
    r = _family_spectator(family, spectator)
    candidates = ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0))
    b = (float(base_point[0]), float(base_point[1]))
    if min(math.hypot(b[0] - q[0], b[1] - q[1]) for q in candidates) > 0.1:
        raise ValueError("base_point must lie within 0.1 of a listed candidate")
    p1, p2 = b
    for it in range(max_iter):
        g, h = _grad_hess(p1, p2, r)
        gn = math.hypot(*g)
        if gn < tol:
            det = h[0][0] * h[1][1] - h[0][1] * h[1][0]
            return MorseResult(family, (p1, p2), gn, det, it)
        det_h = h[0][0] * h[1][1] - h[0][1] * h[1][0]
        if abs(det_h) < 1e-14:
            raise NewtonDivergenceError("singular Hessian during Newton iteration")
        d1 = -(h[1][1] * g[0] - h[0][1] * g[1]) / det_h
        d2 = -(h[0][0] * g[1] - h[1][0] * g[0]) / det_h
        # backtracking on |grad|^2
        lam = 1.0
        while lam > 1e-8:
            gq, _ = _grad_hess(p1 + lam * d1, p2 + lam * d2, r)
            if math.hypot(*gq) < gn:
                break
            lam *= 0.5
        else:
            raise NewtonDivergenceError("line search stalled before convergence")
        p1 += lam * d1
        p2 += lam * d2
    raise NewtonDivergenceError(f"no stationary point within {max_iter} iterations")


def morse_check(family: str, base_point, spectator: float = 0.0) -> float:
    """Hessian determinant of P at the stationary point nearest base_point."""
    return morse_solve(family, base_point, spectator).det
