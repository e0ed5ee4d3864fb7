"""Damped energies along a trajectory: E1, the quintic correction, E2.

The quintic functionals are exact hyperplane sums over grid quintuples
k1+..+k5 = 0.  On a grid the resonance function factors as
phi5 = dk^3 * (k1^3+..+k5^3) with integer mode numbers, so the cutoff
comparison |phi5| > K is decided on the exact integer cube sum.  The
O(A^4) quadruple loop is a compiled kernel chunked over k1 with
compensated accumulation per chunk and a fixed reduction order, so
results are bit-reproducible.

Realized identities for u_t + u_xxx = (u^4)_x under this package's
transform convention (validated by the derivative crosscheck):

    d/dt E1 = (2/5) * L * Im( sum_Gamma M1 * uhat^5 )
    E2      = E1 + (2/5) * L * Re( sum_Gamma (M1/phi5) 1_{|phi5|>K} uhat^5 )

where M1 = sum_j m(xi_j)^2 xi_j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BudgetExceededError
from .fields import SpectralField
from .multipliers import MultiplierParams, m_eval
from .solver import Trajectory

__all__ = [
    "TrackerConfig",
    "EnergyRecord",
    "CrosscheckResult",
    "energy_E1",
    "quintic_correction",
    "dE1_direct",
    "track_energies",
    "derivative_crosscheck",
    "almost_conservation_sweep",
    "SweepResult",
    "write_energy_csv",
    "ENERGY_CSV_HEADER",
]

ENERGY_CSV_HEADER = ["t", "E1", "corr5", "E2", "dE1_fd", "dE1_lambda5"]


@dataclass(frozen=True)
class TrackerConfig:
    """Knobs for the hyperplane sums.

    K: resonance cutoff; None means N**(-1/2) from the multiplier params.
    mode_cutoff: largest |xi| admitted to the sums; None means the grid max.
    amp_threshold: relative coefficient floor; modes below it are dropped
    from the truncated field before the (then exact) hyperplane sum.
    budget: refuse quadruple counts A^4 above this.
    """

    K: float | None = None
    mode_cutoff: float | None = None
    amp_threshold: float = 1e-12
    stride: int = 1
    budget: float = 2e9
    tol_reality: float = 1e-8

    def __post_init__(self):
        if self.K is not None and self.K < 0:
            raise ValueError("K must be >= 0")
        if not 0 <= self.amp_threshold < 1:
            raise ValueError("amp_threshold is a relative floor in [0, 1)")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    def cutoff(self, p: MultiplierParams) -> float:
        return self.K if self.K is not None else p.N ** -0.5


@dataclass
class EnergyRecord:
    """One sampled row of the energy stream; derivative columns may be nan."""

    t: float
    E1: float
    corr5: float
    E2: float
    dE1_fd: float = math.nan
    dE1_lambda5: float = math.nan

    def validate(self, strict_equivalence: bool = False):
        if not self.E1 >= 0:
            raise ValueError(f"E1 must be nonnegative, got {self.E1}")
        if abs(self.E2 - (self.E1 + self.corr5)) > 1e-12 * max(1.0, abs(self.E1)):
            raise ValueError("E2 != E1 + corr5")
        if strict_equivalence and abs(self.corr5) > 0.5 * self.E1:
            raise ValueError("correction exceeds half of E1 (outside the small regime)")


@njit(cache=True)
def _quintic_kernel(kv, g_dense, cre_dense, cim_dense, kmax, mode, hthresh, dk3):
    """Per-k1 partial sums of W * uhat(k1)..uhat(k5) over quadruples of kv.

    mode 0: W = M1;  mode 1: W = M1/(dk3*h) on |h| > hthresh, else 0,
    with h the exact integer cube sum.  Kahan accumulation per chunk.
    """
    n = kv.shape[0]
    part_re = np.zeros(n)
    part_im = np.zeros(n)
    for i1 in range(n):
        k1 = kv[i1]
        j1 = k1 + kmax
        g1 = g_dense[j1]
        h1 = k1 * k1 * k1
        a1 = cre_dense[j1]
        b1 = cim_dense[j1]
        sre = 0.0
        cre = 0.0
        sim = 0.0
        cim = 0.0
        for i2 in range(n):
            k2 = kv[i2]
            j2 = k2 + kmax
            g12 = g1 + g_dense[j2]
            h12 = h1 + k2 * k2 * k2
            k12 = k1 + k2
            a2 = cre_dense[j2]
            b2 = cim_dense[j2]
            a12 = a1 * a2 - b1 * b2
            b12 = a1 * b2 + b1 * a2
            for i3 in range(n):
                k3 = kv[i3]
                j3 = k3 + kmax
                g123 = g12 + g_dense[j3]
                h123 = h12 + k3 * k3 * k3
                k123 = k12 + k3
                a3 = cre_dense[j3]
                b3 = cim_dense[j3]
                a123 = a12 * a3 - b12 * b3
                b123 = a12 * b3 + b12 * a3
                for i4 in range(n):
                    k4 = kv[i4]
                    k5 = -(k123 + k4)
                    if k5 < -kmax or k5 > kmax:
                        continue
                    j5 = k5 + kmax
                    a5 = cre_dense[j5]
                    b5 = cim_dense[j5]
                    if a5 == 0.0 and b5 == 0.0:
                        continue
                    j4 = k4 + kmax
                    h = h123 + k4 * k4 * k4 + k5 * k5 * k5
                    g = g123 + g_dense[j4] + g_dense[j5]
                    if mode == 1:
                        if not (abs(h) > hthresh):
                            continue
                        w = g / (dk3 * h)
                    else:
                        w = g
                    a4 = cre_dense[j4]
                    b4 = cim_dense[j4]
                    ar = a123 * a4 - b123 * b4
                    br = a123 * b4 + b123 * a4
                    tre = w * (ar * a5 - br * b5)
                    tim = w * (ar * b5 + br * a5)
                    # Kahan step, real then imaginary
                    y = tre - cre
                    t = sre + y
                    cre = (t - sre) - y
                    sre = t
                    y = tim - cim
                    t = sim + y
                    cim = (t - sim) - y
                    sim = t
        part_re[i1] = sre
        part_im[i1] = sim
    return part_re, part_im


def _active_arrays(u: SpectralField, p: MultiplierParams, cfg: TrackerConfig):
    """Truncated field as dense lookup arrays plus the active mode list."""
    grid = u.grid
    kmax = grid.kmax()
    k = grid.mode_numbers()
    c = u.coeffs
    amp = np.abs(c)
    peak = float(np.max(amp))
    keep = np.ones(grid.M, dtype=bool)
    keep[grid.nyquist_index] = False
    if peak > 0 and cfg.amp_threshold > 0:
        keep &= amp >= cfg.amp_threshold * peak
    cut = cfg.mode_cutoff
    if cut is not None:
        keep &= np.abs(grid.xi()) <= cut
    kv = np.sort(k[keep]).astype(np.int64)
    if float(kv.size) ** 4 > cfg.budget:
        raise BudgetExceededError(
            f"{kv.size}^4 quadruples exceed budget {cfg.budget:g}; "
            "reduce mode_cutoff or raise amp_threshold"
        )
    size = 2 * kmax + 1
    cre = np.zeros(size)
    cim = np.zeros(size)
    idx = k[keep] + kmax
    cre[idx] = np.real(c[keep])
    cim[idx] = np.imag(c[keep])
    kk = np.arange(-kmax, kmax + 1, dtype=np.int64)
    xi = grid.dk * kk
    g = m_eval(p, xi) ** 2 * xi
    return kv, g, cre, cim, kmax


def _hyperplane(u, p, cfg, mode: int, K: float = 0.0) -> complex:
    kv, g, cre, cim, kmax = _active_arrays(u, p, cfg)
    if kv.size == 0:
        return 0.0 + 0.0j
    dk3 = u.grid.dk**3
    hthresh = K / dk3
    pre, pim = _quintic_kernel(kv, g, cre, cim, kmax, mode, hthresh, dk3)
    return complex(math.fsum(pre.tolist()), math.fsum(pim.tolist()))


def energy_E1(u: SpectralField, p: MultiplierParams) -> float:
    """E1 = L * sum m(xi)^2 |uhat|^2 (the damped mass; always >= 0)."""
    xi = u.grid.xi()
    w = m_eval(p, xi) ** 2
    return u.grid.L * float(np.sum(w * np.abs(u.coeffs) ** 2))


def quintic_correction(u: SpectralField, p: MultiplierParams, cfg: TrackerConfig) -> float:
    """corr5 = (2/5) * L * Re(sum (M1/phi5) 1_{|phi5|>K} uhat^5) over the truncated field.

    The sum is real up to rounding (even multiplier, Hermitian coefficients);
    a reality defect beyond tol_reality * (|corr5| + E1) raises.
    """
    K = cfg.cutoff(p)
    z = _hyperplane(u, p, cfg, mode=1, K=K)
    val = 0.4 * u.grid.L * z.real
    defect = 0.4 * u.grid.L * abs(z.imag)
    scale = abs(val) + energy_E1(u, p)
    if scale > 0 and defect > cfg.tol_reality * scale:
        raise RuntimeError(f"quintic correction reality defect {defect:g} vs scale {scale:g}")
    return val

def dE1_direct(u: SpectralField, p: MultiplierParams, cfg: TrackerConfig) -> float:
    """Instantaneous d/dt E1 evaluated by the uncut hyperplane sum."""
    z = _hyperplane(u, p, cfg, mode=0)
    return 0.4 * u.grid.L * z.imag


def track_energies(traj: Trajectory, p: MultiplierParams, cfg: TrackerConfig,
                   with_derivatives: bool = False) -> list[EnergyRecord]:
    """E1/corr5/E2 on every cfg.stride-th stored state of a trajectory."""
    recs = []
    for i in range(0, len(traj.times), cfg.stride):
        u = SpectralField(traj.grid, traj.states[i])
        e1 = energy_E1(u, p)
        c5 = quintic_correction(u, p, cfg)
        rec = EnergyRecord(traj.times[i], e1, c5, e1 + c5)
        if with_derivatives:
            rec.dE1_lambda5 = dE1_direct(u, p, cfg)
        recs.append(rec)
    for r in recs:
        r.validate()
    return recs


@dataclass
class CrosscheckResult:
    records: list[EnergyRecord]
    abs_mismatch: float
    rel_mismatch: float
    scale: float
    degenerate: bool


def derivative_crosscheck(traj: Trajectory, p: MultiplierParams, cfg: TrackerConfig) -> CrosscheckResult:
    """Central-difference d/dt E1 against the direct hyperplane evaluation.

    The relative mismatch is max |fd - direct| over interior samples divided
    by max |direct|.  When the direct values all vanish (s = 0, say) the
    comparison is degenerate and only the absolute mismatch is meaningful.
    """
    recs = track_energies(traj, p, cfg, with_derivatives=True)
    ts = np.array([r.t for r in recs])
    e1 = np.array([r.E1 for r in recs])
    direct = np.array([r.dE1_lambda5 for r in recs])
    if len(recs) < 3:
        raise ValueError("need at least 3 samples for central differences")
    fd = np.full_like(e1, math.nan)
    fd[1:-1] = (e1[2:] - e1[:-2]) / (ts[2:] - ts[:-2])
    for r, v in zip(recs, fd):
        r.dE1_fd = float(v)
    scale = float(np.max(np.abs(direct)))
    diff = float(np.nanmax(np.abs(fd[1:-1] - direct[1:-1])))
    degenerate = scale < 1e-14 * max(1.0, float(np.max(e1)))
    rel = math.inf if (degenerate and diff > 0) else (diff / scale if scale > 0 else 0.0)
    return CrosscheckResult(recs, diff, rel, scale, degenerate)


@dataclass
class SweepResult:
    """Almost-conservation sweep over N at fixed data; JSON keys are pinned."""

    N_values: list[float]
    K_values: list[float]
    supdE1: list[float]
    supdE2: list[float]
    slopes: dict
    ci: dict
    seeds: dict
    config_hash: str
    partial: bool = False
    records: dict | None = None

    def to_payload(self) -> dict:
        return {
            "N": self.N_values,
            "K": self.K_values,
            "supdE1": self.supdE1,
            "supdE2": self.supdE2,
            "slopes": self.slopes,
            "ci": self.ci,
            "seeds": self.seeds,
            "config_hash": self.config_hash,
            "partial": self.partial,
        }


def _fit_loglog(x, y):
    """Least-squares slope with a 95% half-width; None when degenerate.

    Degenerate means fewer than 3 positive points, or increments so flat
    across N that there is no scaling signal to fit (the s=0 situation,
    where every increment is pure solver drift of the same size).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = y > 0
    if int(np.sum(ok)) < 3:
        return None, None
    if float(np.max(y[ok]) / np.min(y[ok])) < 1.05:
        return None, None
    lx, ly = np.log(x[ok]), np.log(y[ok])
    (slope, _), cov = np.polyfit(lx, ly, 1, cov=True)
    return float(slope), float(1.96 * math.sqrt(max(cov[0][0], 0.0)))


def almost_conservation_sweep(u0: SpectralField, solver_cfg, tracker_cfg: TrackerConfig,
                              s: float, N_values, seeds: dict | None = None,
                              config_hash: str = "") -> SweepResult:
    """Run the flow once, then evaluate sup |E1(t)-E1(0)| and sup |E2(t)-E2(0)| per N.

    The flow does not depend on N (the energies are diagnostics), so a single
    trajectory serves every N.  A blow-up mid-run truncates the usable states
    and marks the report partial instead of crashing.
    """
    from .errors import BlowUpError
    from .solver import run

    collected_t: list[float] = []
    collected_c: list[np.ndarray] = []

    def collect(t, f):
        collected_t.append(t)
        collected_c.append(f.coeffs.copy())

    partial = False
    try:
        traj = run(u0, solver_cfg, observers=[collect])
    except BlowUpError:
        partial = True
        traj = Trajectory(u0.grid, collected_t, collected_c)
        if len(traj.times) < 2:
            raise
    supd1, supd2, Ks, per_n_records = [], [], [], {}
    for N in N_values:
        p = MultiplierParams(s, float(N))
        K = tracker_cfg.cutoff(p)
        recs = track_energies(traj, p, tracker_cfg)
        e1 = np.array([r.E1 for r in recs])
        e2 = np.array([r.E2 for r in recs])
        supd1.append(float(np.max(np.abs(e1 - e1[0]))))
        supd2.append(float(np.max(np.abs(e2 - e2[0]))))
        Ks.append(K)
        per_n_records[float(N)] = recs
    s1, w1 = _fit_loglog(N_values, supd1)
    s2, w2 = _fit_loglog(N_values, supd2)
    return SweepResult(
        N_values=[float(N) for N in N_values],
        K_values=Ks,
        supdE1=supd1,
        supdE2=supd2,
        slopes={"E1": s1, "E2": s2},
        ci={"E1": w1, "E2": w2},
        seeds=seeds or {},
        config_hash=config_hash,
        partial=partial,
        records=per_n_records,
    )


def write_energy_csv(path, records: list[EnergyRecord]):
    with open(path, "w") as fh:
        fh.write(",".join(ENERGY_CSV_HEADER) + "\n")
        for r in records:
            row = [r.t, r.E1, r.corr5, r.E2, r.dE1_fd, r.dE1_lambda5]
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
