"""Frequency-restricted sublevel estimates by stratified Monte Carlo.

The object of study is

    sup_{fixed, alpha}  integral over the free variables, on the convolution
    hyperplane, of  weight * 1_{|Phi - alpha| < K}        (slab mode)
    or of           weight / |Phi - alpha| on {|...| > K}  (tail mode),

with Phi the cubic resonance function of the frame.  After eliminating the
dependent frequency through the hyperplane constraint, Phi is a cubic
polynomial in any single free variable, with an integer leading coefficient
determined by the frame alone.  The estimator samples all free variables but
the last uniformly, and in the last variable resolves the sublevel set
exactly: cubic roots in closed form, then the weight integrated over the
resulting intervals with fixed Gauss panels.  Plain uniform sampling is kept
as a control; at K far below the range of Phi it is hopeless (hit rate ~
K / range), which is why stratification is the primary route.

Estimates are unbiased over the outer samples; the reported stderr is the
outer Monte Carlo error (panel quadrature bias is far below it).  Chunks
draw from seeds spawned deterministically off the master seed and are
reduced in fixed order, so every number is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .multipliers import MultiplierParams, bracket

__all__ = ["SublevelQuery", "SublevelEstimate", "ScalingReport", "sublevel_integral", "sweep_sup"]

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class _Frame:
    """Index bookkeeping: slot 0 is the output frequency, the constraint is
    xi_0 = sum of the inputs, and Phi = xi_0^3 - sum of (slot)^3 with the
    composite slot (if any) summing its member frequencies first."""

    n_idx: int
    sigma: tuple[int, ...]
    slots: tuple[tuple[int, tuple[int, ...]], ...]
    projection: bool = False


_FRAMES = {
    "quintic": _Frame(5, (1, -1, -1, -1, -1),
                      ((1, (0,)), (-1, (1,)), (-1, (2,)), (-1, (3,)), (-1, (4,)))),
    "octic5": _Frame(8, (1, -1, -1, -1, -1, -1, -1, -1),
                     ((1, (0,)), (-1, (1,)), (-1, (2,)), (-1, (3,)), (-1, (4, 5, 6, 7)))),
    "free3": _Frame(3, (), (), projection=True),
}

_WEIGHTS = ("one", "basic_smoothing", "refined_b", "d3")


@dataclass(frozen=True)
class SublevelQuery:
    """One frequency-restricted integral: frame, weight, index split, level.

    free_indices: integrated frequencies; on constrained frames the last one
    is eliminated by the hyperplane constraint and the one before it carries
    the stratification.  fixed_freqs: values for every index outside A.
    box: half-width of the sampling box (None means 4N).
    """

    params: MultiplierParams
    weight: str = "basic_smoothing"
    frame: str = "quintic"
    free_indices: tuple[int, ...] = (1, 2, 4)
    fixed_freqs: dict = dc_field(default_factory=dict)
    alpha: float = 0.0
    K: float = 1.0
    box: float | None = None
    eps: float = 0.05
    mode: str = "slab"
    estimator: str = "stratified"

    def __post_init__(self):
        if self.frame not in _FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}")
        if self.weight not in _WEIGHTS:
            raise ValueError(f"unknown weight {self.weight!r}")
        if self.weight in ("basic_smoothing", "refined_b") and self.frame != "quintic":
            raise ValueError(f"weight {self.weight!r} is defined on the quintic frame")
        if self.mode not in ("slab", "tail_quotient"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.estimator not in ("stratified", "uniform"):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if not self.K > 0:
            raise ValueError("K must be positive")
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")
        fr = _FRAMES[self.frame]
        A = tuple(self.free_indices)
        if not A or len(set(A)) != len(A):
            raise ValueError("free_indices must be nonempty and distinct")
        if any(j < 0 or j >= fr.n_idx for j in A):
            raise ValueError(f"free index out of range for frame {self.frame!r}")
        if len(A) >= fr.n_idx:
            raise ValueError("free_indices must be a proper subset")
        if not fr.projection and len(A) < 2:
            raise ValueError("constrained frames need at least 2 free indices")
        rest = set(range(fr.n_idx)) - set(A)
        extra = set(self.fixed_freqs) - rest
        if extra:
            raise ValueError(f"fixed_freqs carries non-fixed indices {sorted(extra)}")

    def require_complete(self):
        """Evaluation needs a value for every non-free index; templates fed to
        sweep_sup may leave them open (the sweep draws them)."""
        fr = _FRAMES[self.frame]
        missing = set(range(fr.n_idx)) - set(self.free_indices) - set(self.fixed_freqs)
        if missing:
            raise ValueError(f"fixed_freqs is missing indices {sorted(missing)}")

    def half_width(self) -> float:
        return self.box if self.box is not None else 4.0 * self.params.N


@dataclass
class SublevelEstimate:
    value: float
    stderr: float
    samples: int
    seed: int


def _weight_values(q: SublevelQuery, xs: np.ndarray) -> np.ndarray:
    """Weight on assembled frequency tuples; xs has frame indices on the last axis."""
    if q.weight == "one":
        return np.ones(xs.shape[:-1])
    if q.weight == "basic_smoothing":
        inputs = xs[..., 1:5]
        return np.max(np.abs(inputs) * bracket(inputs) ** (0.5 - q.eps), axis=-1)
    if q.weight == "refined_b":
        xi0, xi4 = xs[..., 0], xs[..., 4]
        return (np.abs(xi0) * bracket(xi0) ** (1.0 - 2.0 * q.eps)
                / bracket(xi4) ** (0.5 - q.eps))
    # d3: |xi|^(1-4s) |xi4| / N^(-4s)
    s, N = q.params.s, q.params.N
    xi0, xi4 = xs[..., 0], xs[..., 4]
    return np.abs(xi0) ** (1.0 - 4.0 * s) * np.abs(xi4) * N ** (4.0 * s)


class _Prepared:
    """Per-configuration sample state shared across K levels.

    Holds, per outer sample, the linearization xi_j = c_j + b_j * v in the
    stratified variable v and the resulting cubic coefficients of Phi(v).
    """

    def __init__(self, q: SublevelQuery, n: int, seed: int, chunk: int = 2048):
        self.q = q
        q.require_complete()
        fr = _FRAMES[q.frame]
        A = tuple(q.free_indices)
        self.dep = None if fr.projection else A[-1]
        sampled = A if fr.projection else A[:-1]
        self.strat = sampled[-1]
        self.outer = sampled[:-1]
        self.B = q.half_width()
        self.n = n
        self.seed = seed
        # deterministic chunked draws, fixed reduction order
        ss = np.random.SeedSequence(seed)
        kids = ss.spawn(max(1, math.ceil(n / chunk)))
        blocks = []
        left = n
        for child in kids:
            m = min(chunk, left)
            rng = np.random.default_rng(child)
            blocks.append(rng.uniform(-self.B, self.B, size=(m, len(self.outer))))
            left -= m
        self.outer_vals = np.vstack(blocks) if blocks else np.zeros((0, 0))
        # linearization xi_j = c_j + b_j v
        cj = np.zeros((n, fr.n_idx))
        bj = np.zeros(fr.n_idx)
        for j in range(fr.n_idx):
            if j == self.strat:
                bj[j] = 1.0
            elif j in self.outer:
                cj[:, j] = self.outer_vals[:, self.outer.index(j)]
            elif self.dep is not None and j == self.dep:
                continue
            else:
                cj[:, j] = q.fixed_freqs[j]
        if self.dep is not None:
            sig = fr.sigma
            acc = np.zeros(n)
            for j in range(fr.n_idx):
                if j in (self.dep, self.strat):
                    continue
                acc += sig[j] * cj[:, j]
            cj[:, self.dep] = -acc / sig[self.dep]
            bj[self.dep] = -sig[self.strat] / sig[self.dep]
        self.cj, self.bj = cj, bj
        # cubic coefficients of Phi(v) per sample
        if fr.projection:
            self.a = (np.zeros(n), np.zeros(n), np.ones(n), np.zeros(n))
        else:
            a3 = np.zeros(n)
            a2 = np.zeros(n)
            a1 = np.zeros(n)
            a0 = np.zeros(n)
            for tau, members in fr.slots:
                c = cj[:, list(members)].sum(axis=1)
                b = float(bj[list(members)].sum())
                a3 += tau * b**3
                a2 += tau * 3.0 * c * b**2
                a1 += tau * 3.0 * c**2 * b
                a0 += tau * c**3
            self.a = (a3, a2, a1, a0)

    def phi(self, v: np.ndarray) -> np.ndarray:
        a3, a2, a1, a0 = self.a
        shape = (-1,) + (1,) * (v.ndim - 1)
        return ((a3.reshape(shape) * v + a2.reshape(shape)) * v + a1.reshape(shape)) * v \
            + a0.reshape(shape)

    def tuples_at(self, v: np.ndarray) -> np.ndarray:
        """Frequency tuples at stratified-variable values v (per-sample leading axis)."""
        shape = (-1,) + (1,) * (v.ndim - 1)
        parts = [self.cj[:, j].reshape(shape) + self.bj[j] * v
                 for j in range(self.cj.shape[1])]
        return np.stack(parts, axis=-1)


def _roots_in_box(prep: _Prepared, target: np.ndarray) -> np.ndarray:
    """Real roots of Phi(v) = target per sample, padded with +B (the box end).

    Closed-form (Cardano / trig) branches vectorized over samples, then two
    Newton polish passes on the cubic itself.
    """
    a3, a2, a1, a0 = prep.a
    n = prep.n
    B = prep.B
    t = np.broadcast_to(np.asarray(target, dtype=float), (n,))
    roots = np.full((n, 3), B)
    scale = np.maximum.reduce([np.abs(a3) * B**3, np.abs(a2) * B**2,
                               np.abs(a1) * B, np.abs(a0 - t)]) + 1e-300
    cubic = np.abs(a3) * B**3 > 1e-13 * scale
    quad = ~cubic & (np.abs(a2) * B**2 > 1e-13 * scale)
    lin = ~cubic & ~quad & (np.abs(a1) * B > 1e-13 * scale)

    if np.any(cubic):
        A3, A2, A1 = a3[cubic], a2[cubic], a1[cubic]
        A0 = a0[cubic] - t[cubic]
        b, c, d = A2 / A3, A1 / A3, A0 / A3
        p = c - b * b / 3.0
        qq = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
        disc = (qq / 2.0) ** 2 + (p / 3.0) ** 3
        r = np.full((p.size, 3), np.nan)
        one = disc > 0
        if np.any(one):
            sq = np.sqrt(disc[one])
            r[one, 0] = np.cbrt(-qq[one] / 2.0 + sq) + np.cbrt(-qq[one] / 2.0 - sq)
        three = ~one
        if np.any(three):
            pm = np.minimum(p[three], -1e-300)
            rad = np.sqrt(-pm / 3.0)
            arg = np.clip(3.0 * qq[three] / (2.0 * pm * rad), -1.0, 1.0)
            theta = np.arccos(arg) / 3.0
            for k in range(3):
                r[three, k] = 2.0 * rad * np.cos(theta - 2.0 * math.pi * k / 3.0)
        r -= (b / 3.0)[:, None]
        # Newton polish against the undepressed cubic
        for _ in range(2):
            f = ((A3[:, None] * r + A2[:, None]) * r + A1[:, None]) * r + A0[:, None]
            df = (3.0 * A3[:, None] * r + 2.0 * A2[:, None]) * r + A1[:, None]
            step = np.where(np.abs(df) > 1e-300, f / np.where(df == 0, 1.0, df), 0.0)
            r = r - step
        roots[cubic] = np.where(np.isfinite(r), r, B)

    if np.any(quad):
        A2, A1 = a2[quad], a1[quad]
        A0 = a0[quad] - t[quad]
        disc = A1 * A1 - 4.0 * A2 * A0
        r = np.full((A2.size, 3), B)
        ok = disc >= 0
        sq = np.sqrt(np.where(ok, disc, 0.0))
        qf = -0.5 * (A1 + np.sign(A1 + (A1 == 0)) * sq)
        with np.errstate(divide="ignore", invalid="ignore"):
            r0 = np.where(ok, qf / A2, B)
            r1 = np.where(ok & (qf != 0), A0 / np.where(qf == 0, 1.0, qf), B)
        r[:, 0], r[:, 1] = r0, r1
        roots[quad] = r

    if np.any(lin):
        roots[lin, 0] = (t[lin] - a0[lin]) / a1[lin]

    np.clip(roots, -B, B, out=roots)
    roots[~np.isfinite(roots)] = B
    return roots


def _band_integral(prep: _Prepared, lo: np.ndarray, hi: np.ndarray,
                   quotient_alpha: float | None, panels: int) -> np.ndarray:
    """Per-sample integral over {v in box: lo <= Phi(v) <= hi} of the weight
    (divided by |Phi - alpha| when quotient_alpha is given)."""
    q = prep.q
    n, B = prep.n, prep.B
    r_lo = _roots_in_box(prep, lo)
    r_hi = _roots_in_box(prep, hi)
    bp = np.concatenate([np.full((n, 1), -B), r_lo, r_hi, np.full((n, 1), B)], axis=1)
    bp.sort(axis=1)
    mids = 0.5 * (bp[:, :-1] + bp[:, 1:])
    pm = prep.phi(mids)
    lo_b = np.broadcast_to(np.asarray(lo, float), (n,))[:, None]
    hi_b = np.broadcast_to(np.asarray(hi, float), (n,))[:, None]
    keep = (pm >= lo_b) & (pm <= hi_b)
    lens = bp[:, 1:] - bp[:, :-1]
    keep &= lens > 0
    # Gauss panels on every kept segment
    nseg = mids.shape[1]
    edges = np.linspace(0.0, 1.0, panels + 1)
    total = np.zeros(n)
    for pnl in range(panels):
        aa = bp[:, :-1] + lens * edges[pnl]
        ll = lens * (edges[pnl + 1] - edges[pnl])
        nodes = aa[:, :, None] + (ll[:, :, None] * 0.5) * (_GAUSS_X[None, None, :] + 1.0)
        xs = prep.tuples_at(nodes)
        w = _weight_values(q, xs)
        if quotient_alpha is not None:
            pv = prep.phi(nodes)
            w = w / np.maximum(np.abs(pv - quotient_alpha), 1e-300)
        seg = (w * _GAUSS_W[None, None, :]).sum(axis=2) * (ll * 0.5)
        total += np.where(keep, seg, 0.0).sum(axis=1)
    return total


def _inner_values(prep: _Prepared, alpha: float, K: float) -> np.ndarray:
    """Exact-in-v inner integrals per outer sample for the query's mode."""
    q = prep.q
    if q.mode == "slab":
        return _band_integral(prep, alpha - K, alpha + K, None, panels=1)
    # tail: dyadic shells in |Phi - alpha| from K out to the box range of Phi
    a3, a2, a1, a0 = prep.a
    B = prep.B
    bound = (np.abs(a3) * B**3 + np.abs(a2) * B**2 + np.abs(a1) * B
             + np.abs(a0 - alpha))
    tmax = float(np.max(bound)) if bound.size else 0.0
    total = np.zeros(prep.n)
    t1 = K
    while t1 < tmax:
        t2 = min(2.0 * t1, tmax)
        total += _band_integral(prep, alpha + t1, alpha + t2, alpha, panels=4)
        total += _band_integral(prep, alpha - t2, alpha - t1, alpha, panels=4)
        t1 = t2
    return total


def _uniform_values(q: SublevelQuery, n: int, seed: int) -> np.ndarray:
    """Control estimator: plain uniform sampling of every free variable."""
    q.require_complete()
    fr = _FRAMES[q.frame]
    A = tuple(q.free_indices)
    dep = None if fr.projection else A[-1]
    sampled = A if fr.projection else A[:-1]
    B = q.half_width()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    vals = rng.uniform(-B, B, size=(n, len(sampled)))
    xs = np.zeros((n, fr.n_idx))
    for j in range(fr.n_idx):
        if j in sampled:
            xs[:, j] = vals[:, sampled.index(j)]
        elif dep is not None and j == dep:
            continue
        else:
            xs[:, j] = q.fixed_freqs[j]
    if dep is not None:
        sig = fr.sigma
        acc = np.zeros(n)
        for j in range(fr.n_idx):
            if j != dep:
                acc += sig[j] * xs[:, j]
        xs[:, dep] = -acc / sig[dep]
    if fr.projection:
        phi = xs[:, sampled[-1]]
    else:
        phi = np.zeros(n)
        for tau, members in fr.slots:
            phi += tau * xs[:, list(members)].sum(axis=1) ** 3
    w = _weight_values(q, xs)
    if q.mode == "slab":
        return w * (np.abs(phi - q.alpha) < q.K)
    dist = np.abs(phi - q.alpha)
    return np.where(dist > q.K, w / np.maximum(dist, 1e-300), 0.0)


def sublevel_integral(q: SublevelQuery, samples: int, seed: int) -> SublevelEstimate:
    """Monte Carlo estimate of the query integral; deterministic given the seed."""
    if samples < 1000:
        raise ValueError("at least 1000 samples are required")
    B = q.half_width()
    if not B > 0:
        raise ValueError("sampling box must have positive volume")
    fr = _FRAMES[q.frame]
    sampled = len(q.free_indices) - (0 if fr.projection else 1)
    if q.estimator == "uniform":
        vals = _uniform_values(q, samples, seed)
        vol = (2.0 * B) ** sampled
    else:
        n_outer = sampled - 1
        n_eff = samples if n_outer > 0 else 1
        prep = _Prepared(q, n_eff, seed)
        vals = _inner_values(prep, q.alpha, q.K)
        vol = (2.0 * B) ** n_outer
    mean = float(np.mean(vals))
    sd = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
    return SublevelEstimate(vol * mean, vol * sd / math.sqrt(max(vals.size, 1)),
                            int(vals.size), seed)


@dataclass
class ScalingReport:
    """Sup-over-configurations estimates across dyadic levels plus the
    log-log fit; argmax_config records the maximizer at the largest level."""

    weight: str
    levels: list[float]
    estimates: list[float]
    stderr: list[float]
    slope: float | None
    slope_ci: float | None
    argmax_config: dict
    seed: int

    def to_payload(self) -> dict:
        return {
            "weight": self.weight,
            "levels": self.levels,
            "estimates": self.estimates,
            "stderr": self.stderr,
            "slope": self.slope,
            "slope_ci": self.slope_ci,
            "argmax_config": self.argmax_config,
            "seed": self.seed,
        }


def sweep_sup(q: SublevelQuery, fixed_samples: int, K_levels, seed: int,
              samples: int = 4096) -> ScalingReport:
    """Approximate the sup over fixed frequencies and alpha across K levels.

    Configuration 0 always carries alpha = 0 (the resonant sheet); the rest
    draw alpha uniformly within the empirical range of Phi for their fixed
    frequencies.  Each configuration reuses one outer sample set across all
    levels (common random numbers), then the per-level max over
    configurations is fit against K in log-log coordinates.  All-zero levels
    make the regression degenerate: slope and slope_ci are reported as None,
    never as 0.
    """
    levels = [float(k) for k in K_levels]
    if len(levels) < 8:
        raise ValueError("need at least 8 dyadic levels")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    for a, b in zip(levels, levels[1:]):
        if abs(b / a - 2.0) > 1e-9:
            raise ValueError("levels must be dyadic (consecutive ratio 2)")
    fr = _FRAMES[q.frame]
    rest = sorted(set(range(fr.n_idx)) - set(q.free_indices))
    B = q.half_width()
    ss = np.random.SeedSequence(seed)
    kids = ss.spawn(fixed_samples)
    best_val = [-math.inf] * len(levels)
    best_err = [0.0] * len(levels)
    best_cfg: list[dict | None] = [None] * len(levels)
    for ci_idx, child in enumerate(kids):
        rng = np.random.default_rng(child)
        fixed = {j: float(rng.uniform(-B, B)) for j in rest}
        qc = replace(q, fixed_freqs=fixed)
        if ci_idx == 0:
            alpha = 0.0
        else:
            # coefficient bound on the range of Phi under this configuration
            prep0 = _Prepared(qc, 256, int(child.generate_state(2)[1]))
            a3, a2, a1, a0 = prep0.a
            amax = float(np.max(np.abs(a3) * B**3 + np.abs(a2) * B**2
                                + np.abs(a1) * B + np.abs(a0)))
            alpha = float(rng.uniform(-amax, amax))
        qc = replace(qc, alpha=alpha)
        sub_seed = int(child.generate_state(3)[2])
        sampled = len(q.free_indices) - (0 if fr.projection else 1)
        if q.estimator == "stratified":
            n_eff = samples if sampled - 1 > 0 else 1
            prep = _Prepared(qc, n_eff, sub_seed)
            vol = (2.0 * B) ** (sampled - 1)
            for li, K in enumerate(levels):
                vals = _inner_values(prep, alpha, K)
                est = vol * float(np.mean(vals))
                err = vol * (float(np.std(vals, ddof=1)) / math.sqrt(vals.size)
                             if vals.size > 1 else 0.0)
                if est > best_val[li]:
                    best_val[li] = est
                    best_err[li] = err
                    best_cfg[li] = {"fixed": {str(k): v for k, v in fixed.items()},
                                    "alpha": alpha, "config_index": ci_idx,
                                    "seed": sub_seed}
        else:
            for li, K in enumerate(levels):
                est = sublevel_integral(replace(qc, K=K), samples, sub_seed)
                if est.value > best_val[li]:
                    best_val[li] = est.value
                    best_err[li] = est.stderr
                    best_cfg[li] = {"fixed": {str(k): v for k, v in fixed.items()},
                                    "alpha": alpha, "config_index": ci_idx,
                                    "seed": sub_seed}
    pos = [(k, v) for k, v in zip(levels, best_val) if v > 0]
    if len(pos) < 3:
        slope, ci = None, None
    else:
        lx = np.log([k for k, _ in pos])
        ly = np.log([v for _, v in pos])
        (sl, _), cov = np.polyfit(lx, ly, 1, cov=True)
        slope, ci = float(sl), float(1.96 * math.sqrt(max(cov[0][0], 0.0)))
    arg = best_cfg[-1] or {}
    return ScalingReport(q.weight, levels, best_val, best_err, slope, ci, arg, seed)
