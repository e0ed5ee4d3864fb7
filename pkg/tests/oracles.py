"""Independent reference implementations for the test suite.

Everything here is coded against the documented definitions only: mpmath
scalar arithmetic at 50 digits, exhaustive loops over grid tuples, plain
central differences, dense 1-d scans.  Nothing imports package internals
beyond public dataclasses, so agreement between these oracles and the
package is evidence, not tautology.
"""

from __future__ import annotations

import itertools
import math

import mpmath as mp
import numpy as np

mp.mp.dps = 50


# -- multiplier scalars -------------------------------------------------------

def mp_m(s, N, xi):
    xi = mp.mpf(xi)
    if abs(xi) < N:
        return mp.mpf(1)
    return (abs(xi) / mp.mpf(N)) ** mp.mpf(s)


def mp_m1(s, N, xs):
    return mp.fsum(mp_m(s, N, x) ** 2 * mp.mpf(x) for x in xs)


def mp_phi(xs):
    return mp.fsum(mp.mpf(x) ** 3 for x in xs)


def mp_m5_prime(s, N, xs, K):
    phi = mp_phi(xs)
    if not abs(phi) > K:
        return mp.mpf(0)
    return -2 * mp_m1(s, N, xs) / (5 * phi)


def mp_pointwise_ratio(s, N, xs, eps):
    expo = mp.mpf(1) / 2 - mp.mpf(eps)
    maj = max(abs(mp.mpf(x)) * mp.sqrt(1 + mp.mpf(x) ** 2) ** expo for x in xs)
    maj = maj / mp.mpf(N) ** expo
    if maj == 0:
        return mp.mpf(0)
    prod = mp.fprod(mp_m(s, N, x) for x in xs)
    return abs(mp_m1(s, N, xs)) / prod / maj


# -- exhaustive quintic hyperplane sums ---------------------------------------

def exhaustive_quintic(coeffs_by_k: dict, dk: float, s: float, N: float,
                       mode: str, K: float = 0.0):
    """Brute-force sum over every quadruple of active modes, the fifth mode
    closing the sum.  mode "m1" weights by M1; mode "m5cut" by M1/Phi5 on
    |Phi5| > K.  Returns the bare hyperplane sum (no Parseval factor)."""
    ks = sorted(coeffs_by_k)
    dk = mp.mpf(dk)
    acc = mp.mpc(0)
    for k1, k2, k3, k4 in itertools.product(ks, repeat=4):
        k5 = -(k1 + k2 + k3 + k4)
        if k5 not in coeffs_by_k:
            continue
        kk = (k1, k2, k3, k4, k5)
        xs = [dk * k for k in kk]
        g = mp_m1(s, N, xs)
        if mode == "m5cut":
            h = sum(k**3 for k in kk)
            phi = dk**3 * h
            if not abs(phi) > K:
                continue
            g = g / phi
        prod = mp.mpc(1)
        for k in kk:
            c = coeffs_by_k[k]
            prod *= mp.mpc(c.real, c.imag)
        acc += g * prod
    return acc


def contributing_quintuples(ks, dk: float, K: float) -> set:
    """Grid quintuples (ordered) with k1+..+k5 = 0 and |dk^3 (k1^3+..)| > K."""
    out = set()
    kset = set(ks)
    for k1, k2, k3, k4 in itertools.product(sorted(ks), repeat=4):
        k5 = -(k1 + k2 + k3 + k4)
        if k5 not in kset:
            continue
        h = k1**3 + k2**3 + k3**3 + k4**3 + k5**3
        if abs(mp.mpf(dk) ** 3 * h) > K:
            out.add((k1, k2, k3, k4, k5))
    return out


# -- geometry oracles ---------------------------------------------------------

def phi5_ref(t):
    c = t[4] + t[5] + t[6] + t[7]
    return t[0] ** 3 + t[1] ** 3 + t[2] ** 3 + t[3] ** 3 + c**3


def phi8_ref(t):
    return sum(v**3 for v in t)


_FD_MOVES = {
    "xi1_xi3": ((1, +1, 7), (3, +1, 7)),
    "xi_xi2": ((0, -1, 4), (2, +1, 4)),
    "xi_xi7": ((0, -1, 4), (7, +1, 4)),
}


def fd_jacobian_det(t, pair: str, h: float = 1e-10) -> float:
    """Central differences of (phi5_ref, phi8_ref) along the documented
    on-hyperplane directions for the pair, then the 2x2 determinant.

    The differences are taken in 50-digit arithmetic.  In float64 the
    quartic symbol is O(scale**4) and its rounding noise, divided by 2h,
    swamps determinants that sit a few orders below scale**4; at 50
    digits a step of 1e-10 leaves truncation error around 1e-20 relative.
    """
    hh = mp.mpf(h)
    cols = []
    for idx, sgn, comp in _FD_MOVES[pair]:
        tp = [mp.mpf(v) for v in t]
        tp[idx] += sgn * hh
        tp[comp] -= sgn * hh
        tm = [mp.mpf(v) for v in t]
        tm[idx] -= sgn * hh
        tm[comp] += sgn * hh
        d5 = (phi5_ref(tp) - phi5_ref(tm)) / (2 * hh)
        d8 = (phi8_ref(tp) - phi8_ref(tm)) / (2 * hh)
        cols.append((d5, d8))
    return float(cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1])


def grad_p_ref(family: str, p1: float, p2: float, r: float = 0.0, c: float = 1.0):
    """Gradient of P = 1 - p1^3 - p2^3 - r^3 - pd^3, pd = c - p1 - p2 - r,
    by symmetric differences of the scalar polynomial itself."""

    def P(a, b):
        pd = c - a - b - r
        return 1.0 - a**3 - b**3 - r**3 - pd**3

    h = 1e-6
    return ((P(p1 + h, p2) - P(p1 - h, p2)) / (2 * h),
            (P(p1, p2 + h) - P(p1, p2 - h)) / (2 * h))


# -- sublevel oracle ----------------------------------------------------------

def dense_band_integral(weight_of_v, phi_of_v, lo: float, hi: float,
                        vlo: float, vhi: float, n: int = 200001,
                        quotient_alpha: float | None = None) -> float:
    """Midpoint scan of integral of weight over {v: lo <= phi(v) <= hi}."""
    edges = np.linspace(vlo, vhi, n)
    mids = 0.5 * (edges[:-1] + edges[1:])
    dv = edges[1] - edges[0]
    ph = phi_of_v(mids)
    keep = (ph >= lo) & (ph <= hi)
    w = weight_of_v(mids)
    if quotient_alpha is not None:
        w = w / np.maximum(np.abs(ph - quotient_alpha), 1e-300)
    return float(np.sum(w[keep]) * dv)


# -- scaling-plan oracle ------------------------------------------------------

def mp_plan_rootsolve(s, T, u0_norm, eps0, eps):
    """Re-derives (rho, N, lam) at 50 digits without the closed form for N:
    rho from the smallness equality, then N by bisection on the defining
    relation N^((1-eps+24s)/(1+6s)) = rho^3*T, then lam by substitution."""
    s = mp.mpf(s)
    T = mp.mpf(T)
    u0 = mp.mpf(u0_norm)
    e0 = mp.mpf(eps0)
    eps = mp.mpf(eps)
    if u0 < e0:
        rho = mp.mpf(1)
    else:
        rho = max((u0 / e0) ** (1 / (mp.mpf(1) / 6 + s)), mp.mpf(1))
    rhs = rho**3 * T
    expo = (1 - eps + 24 * s) / (1 + 6 * s)

    def f(N):
        return N**expo - rhs

    lo, hi = mp.mpf(1), mp.mpf(2)
    while f(hi) < 0:
        hi *= 2
    for _ in range(400):
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    N = (lo + hi) / 2
    lam = rho * N ** (-6 * s / (1 + 6 * s))
    return float(rho), float(N), float(lam)


# -- field-space oracles ------------------------------------------------------

def physical_space_e1(u_values: np.ndarray, L: float) -> float:
    """Rectangle-rule L2 norm squared of a sampled real field (exact for
    bandlimited data by the discrete Parseval identity)."""
    M = u_values.size
    return float(L / M * np.sum(u_values**2))


def band_power(coeffs: np.ndarray, modes: np.ndarray, lo: int, hi: int) -> float:
    """Total |coeff|^2 over modes with lo <= |k| < hi."""
    sel = (np.abs(modes) >= lo) & (np.abs(modes) < hi)
    return float(np.sum(np.abs(coeffs[sel]) ** 2))
