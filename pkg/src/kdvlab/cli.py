"""Command-line driver: every experiment as a subcommand.

One YAML config (explicit schema version, unknown keys are hard errors)
drives all subcommands; --seed / --out / --epsilon override the matching
config entries.  Each run writes the fully-resolved config plus its sha256
next to the outputs, reports are deterministic given the config, and slope
or tolerance checks convert into the process exit status so the commands
compose with make and CI.
"""

from __future__ import annotations

import argparse
import copy
import math
import os
import sys

import numpy as np
import yaml

from . import __version__
from .energies import (
    TrackerConfig,
    almost_conservation_sweep,
    derivative_crosscheck,
    track_energies,
    write_energy_csv,
)
from .errors import BlowUpError, ConfigError, KdvLabError
from .fields import FrequencyGrid, InitialDataSpec, make_initial_data
from .geometry import JACOBIAN_PAIRS, MORSE_FAMILIES, jacobian_phi5_phi8, morse_solve, phi5_octic, phi8_octic
from .multipliers import MultiplierParams, pointwise_ratio_batch, random_gamma_tuples
from .planner import PlanInput, growth_bound, make_plan, rescaled_smallness_check
from .reporting import write_report, write_resolved_config
from .solver import SolverConfig, run
from .sublevel import SublevelQuery, sweep_sup

SCHEMA_VERSION = 1

DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "seed": 1234,
    "epsilon": 0.05,
    "out": "runs/out",
    "solver": {
        "L": 2.0 * math.pi,
        "M": 96,
        "dt": 1e-3,
        "t_end": 1.0,
        "pad": 2.5,
        "observe_stride": 25,
        "nonlinear": True,
        "max_coeff": 1e8,
    },
    "multiplier": {
        "s": -1.0 / 24.0,
        "N": 8.0,
        "N_list": [4.0, 8.0, 16.0, 32.0],
        "K": "auto",
    },
    "initial_data": {
        "kind": "random-phase",
        "hs_target": 1.0,
        "s": 0.0,
        "seed": 7,
        "decay": 1.5,
        "band": [1, 24],
        "n_bumps": 3,
        "width_frac": 0.05,
    },
    "tracker": {
        "amp_threshold": 1e-12,
        "mode_cutoff": None,
        "budget": 2e9,
        "tol_reality": 1e-8,
        "stride": 1,
        "with_derivatives": False,
        "crosscheck_tol": 1e-2,
    },
    "pointwise": {
        "samples": 200000,
        "scale_lo": 1e-2,
        "scale_hi_factor": 1e3,
        "hist_bins": 64,
        "baseline": {},
        "regress_factor": 1.1,
    },
    "sublevel": {
        "frame": "quintic",
        "weight": "basic_smoothing",
        "free_indices": [1, 2, 4],
        "fixed_freqs": {},
        "alpha": 0.0,
        "mode": "slab",
        "estimator": "stratified",
        "box": None,
        "K_levels": [2.0**k for k in range(-7, 1)],
        "fixed_samples": 64,
        "samples": 4096,
        "slope_window": None,
    },
    "geometry": {
        "jacobian_samples": 10000,
        "fd_step_rel": 5e-2,
        "tol_rel": 1e-6,
        "scale": 10.0,
    },
    "plan": {
        "s": -1.0 / 48.0,
        "T": 100.0,
        "u0_norm": 1.0,
        "eps0": 0.05,
        "eta": None,
        "check_M": 0,
    },
}


# mappings whose keys are data (frequency indices, N values), not schema
_OPEN_MAPS = {"pointwise.baseline", "sublevel.fixed_freqs"}


def _merge(defaults: dict, user: dict, path: str = "") -> dict:
    out = {}
    for key, val in user.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key '{path}{key}'")
        base = defaults[key]
        if isinstance(base, dict) and not isinstance(val, dict) and val is not None:
            raise ConfigError(f"config key '{path}{key}' must be a mapping")
        if f"{path}{key}" in _OPEN_MAPS and isinstance(val, dict):
            out[key] = copy.deepcopy(val)
        elif isinstance(base, dict) and isinstance(val, dict):
            out[key] = _merge(base, val, f"{path}{key}.")
        else:
            out[key] = val
    for key, val in defaults.items():
        if key not in out:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file does not parse as YAML: {exc}")
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    cfg = _merge(DEFAULT_CONFIG, raw)
    if cfg["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {cfg['schema_version']!r}; "
                          f"this tool reads version {SCHEMA_VERSION}")
    # YAML parses bare mapping keys as ints; the resolved-config sidecar is
    # JSON, which only has string keys
    cfg["sublevel"]["fixed_freqs"] = {
        str(k): v for k, v in cfg["sublevel"]["fixed_freqs"].items()}
    cfg["pointwise"]["baseline"] = {
        str(k): v for k, v in cfg["pointwise"]["baseline"].items()}
    return cfg


def _tracker_config(cfg: dict) -> TrackerConfig:
    t = cfg["tracker"]
    K = cfg["multiplier"]["K"]
    return TrackerConfig(
        K=None if K == "auto" else float(K),
        mode_cutoff=t["mode_cutoff"],
        amp_threshold=t["amp_threshold"],
        stride=t["stride"],
        budget=t["budget"],
        tol_reality=t["tol_reality"],
    )


def _solver_config(cfg: dict) -> SolverConfig:
    s = cfg["solver"]
    return SolverConfig(dt=s["dt"], t_end=s["t_end"], dealias_pad=s["pad"],
                        nonlinear=s["nonlinear"], observe_stride=s["observe_stride"],
                        max_coeff=s["max_coeff"])


def _initial_field(cfg: dict):
    s = cfg["solver"]
    d = cfg["initial_data"]
    grid = FrequencyGrid(L=s["L"], M=s["M"])
    band = None if d["band"] is None else (int(d["band"][0]), int(d["band"][1]))
    spec = InitialDataSpec(kind=d["kind"], hs_target=d["hs_target"], s=d["s"],
                           seed=d["seed"], decay=d["decay"], band=band,
                           n_bumps=d["n_bumps"], width_frac=d["width_frac"])
    return make_initial_data(spec, grid)


def cmd_verify_pointwise(cfg: dict, out: str, resolved_hash: str) -> int:
    mult = cfg["multiplier"]
    pw = cfg["pointwise"]
    eps = cfg["epsilon"]
    N_list = [float(N) for N in mult["N_list"]]
    ss = np.random.SeedSequence(cfg["seed"])
    kids = ss.spawn(len(N_list))
    per_n = []
    regressions = []
    for N, child in zip(N_list, kids):
        p = MultiplierParams(s=mult["s"], N=N)
        rng = np.random.default_rng(child)
        chunk = 250000
        left = int(pw["samples"])
        sup = 0.0
        arg = None
        vals_for_hist = []
        while left > 0:
            n = min(chunk, left)
            xs = random_gamma_tuples(rng, n, pw["scale_lo"],
                                     pw["scale_hi_factor"] * N)
            ratios = pointwise_ratio_batch(p, xs, eps)
            i = int(np.argmax(ratios))
            if ratios[i] > sup:
                sup = float(ratios[i])
                arg = [float(v) for v in xs[i]]
            vals_for_hist.append(ratios)
            left -= n
        allr = np.concatenate(vals_for_hist)
        counts, edges = np.histogram(allr, bins=int(pw["hist_bins"]),
                                     range=(0.0, max(1.05 * sup, 1e-12)))
        entry = {
            "N": N,
            "samples": int(pw["samples"]),
            "sup": sup,
            "argmax_tuple": arg,
            "hist_edges": [float(e) for e in edges],
            "hist_counts": [int(c) for c in counts],
        }
        base = pw["baseline"].get(str(int(N))) if pw["baseline"] else None
        if base is not None and sup > float(base) * pw["regress_factor"]:
            regressions.append({"N": N, "sup": sup, "baseline": float(base)})
        per_n.append(entry)
        print(f"N={N:g}: sup ratio {sup:.6f} over {pw['samples']} samples")
    payload = {
        "s": mult["s"],
        "epsilon": eps,
        "per_N": per_n,
        "sup_overall": max(e["sup"] for e in per_n),
        "regressions": regressions,
        "seed": cfg["seed"],
    }
    write_report(os.path.join(out, "verify_pointwise.json"), payload, resolved_hash)
    if regressions:
        print(f"FAIL: {len(regressions)} recorded bound(s) regressed beyond "
              f"factor {pw['regress_factor']}", file=sys.stderr)
        return 1
    return 0


def cmd_verify_sublevel(cfg: dict, out: str, resolved_hash: str) -> int:
    sl = cfg["sublevel"]
    mult = cfg["multiplier"]
    if int(sl["samples"]) <= 0:
        raise ConfigError("sublevel.samples must be positive")
    q = SublevelQuery(
        params=MultiplierParams(s=mult["s"], N=float(mult["N"])),
        weight=sl["weight"],
        frame=sl["frame"],
        free_indices=tuple(int(j) for j in sl["free_indices"]),
        fixed_freqs={int(k): float(v) for k, v in sl["fixed_freqs"].items()},
        alpha=sl["alpha"],
        K=float(sl["K_levels"][0]),
        box=sl["box"],
        eps=cfg["epsilon"],
        mode=sl["mode"],
        estimator=sl["estimator"],
    )
    rep = sweep_sup(q, int(sl["fixed_samples"]), [float(k) for k in sl["K_levels"]],
                    cfg["seed"], samples=int(sl["samples"]))
    write_report(os.path.join(out, "verify_sublevel.json"), rep.to_payload(),
                 resolved_hash)
    if rep.slope is None:
        print("degenerate regression: every level estimate is zero")
        return 1 if sl["slope_window"] else 0
    print(f"weight={rep.weight}: slope {rep.slope:.4f} +- {rep.slope_ci:.4f} "
          f"over {len(rep.levels)} levels")
    win = sl["slope_window"]
    if win is not None:
        lo, hi = float(win[0]), float(win[1])
        if not lo <= rep.slope <= hi:
            print(f"FAIL: slope {rep.slope:.4f} outside window [{lo}, {hi}]",
                  file=sys.stderr)
            return 1
    return 0


def _fd_cols(t, pair: str, h: float):
    moves = {
        "xi1_xi3": ((1, +1, 7), (3, +1, 7)),
        "xi_xi2": ((0, -1, 4), (2, +1, 4)),
        "xi_xi7": ((0, -1, 4), (7, +1, 4)),
    }[pair]
    cols = []
    for idx, sgn, comp in moves:
        tp = list(t)
        tp[idx] += sgn * h
        tp[comp] -= sgn * h
        tm = list(t)
        tm[idx] -= sgn * h
        tm[comp] += sgn * h
        cols.append(((phi5_octic(tp) - phi5_octic(tm)) / (2 * h),
                     (phi8_octic(tp) - phi8_octic(tm)) / (2 * h)))
    return cols


def _fd_jacobian(t, pair: str, h: float) -> tuple[float, float]:
    """Finite-difference determinant along the documented on-hyperplane
    directions, independent of the closed forms.

    The central difference of a polynomial of degree <= 4 has error exactly
    c*h^2 (the fifth derivative vanishes), so one Richardson step over h and
    h/2 removes truncation entirely and only rounding remains; that argues
    for a large step, not a small one.  Returns (det, prod_scale) where
    prod_scale = |a00*a11| + |a01*a10| measures the cancellation suffered in
    assembling the determinant: when det is tiny against prod_scale neither
    this route nor the closed form can resolve it in double precision, which
    is the working definition of a degenerate draw.
    """
    c1 = _fd_cols(t, pair, h)
    c2 = _fd_cols(t, pair, h / 2.0)
    a = [[(4.0 * c2[i][j] - c1[i][j]) / 3.0 for j in range(2)] for i in range(2)]
    det = a[0][0] * a[1][1] - a[1][0] * a[0][1]
    prod_scale = abs(a[0][0] * a[1][1]) + abs(a[1][0] * a[0][1])
    return det, prod_scale


def cmd_verify_geometry(cfg: dict, out: str, resolved_hash: str) -> int:
    geo = cfg["geometry"]
    scale = float(geo["scale"])
    h = geo["fd_step_rel"] * scale
    rng = np.random.default_rng(np.random.SeedSequence(cfg["seed"]))
    jac = {}
    worst = 0.0
    for pair in JACOBIAN_PAIRS:
        max_rel = 0.0
        kept = 0
        for _ in range(int(geo["jacobian_samples"])):
            t = rng.uniform(-scale, scale, size=8)
            t[7] -= t.sum()
            det_cf = jacobian_phi5_phi8(t, pair)
            det_fd, prod_scale = _fd_jacobian(t, pair, h)
            # degenerate draw: determinant below the float64 resolution of
            # the products it is assembled from, on either route
            if abs(det_cf) * 1e7 < prod_scale:
                continue
            kept += 1
            rel = abs(det_fd - det_cf) / abs(det_cf)
            max_rel = max(max_rel, rel)
        jac[pair] = {"max_rel_err": max_rel, "kept": kept}
        worst = max(worst, max_rel)
        print(f"jacobian {pair}: max rel err {max_rel:.3e} on {kept} samples")
    morse = []
    morse_ok = True
    for family in MORSE_FAMILIES:
        for base in ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)):
            try:
                res = morse_solve(family, base)
                ok = res.grad_norm < 1e-10 and abs(res.det) > 1e-6
                morse.append({"family": family, "base": list(base),
                              "point": [res.point[0], res.point[1]],
                              "grad_norm": res.grad_norm, "det": res.det,
                              "converged": True, "ok": ok})
                morse_ok &= ok
                print(f"morse {family} from {base}: point "
                      f"({res.point[0]:+.6f}, {res.point[1]:+.6f}) det {res.det:+.3f}")
            except KdvLabError as exc:
                morse.append({"family": family, "base": list(base),
                              "converged": False, "error": str(exc)})
                morse_ok = False
    payload = {"jacobian": jac, "jacobian_worst": worst, "morse": morse,
               "seed": cfg["seed"]}
    write_report(os.path.join(out, "verify_geometry.json"), payload, resolved_hash)
    if worst > geo["tol_rel"] or not morse_ok:
        print("FAIL: geometry checks outside tolerance", file=sys.stderr)
        return 1
    return 0


def cmd_simulate(cfg: dict, out: str, resolved_hash: str) -> int:
    u0 = _initial_field(cfg)
    scfg = _solver_config(cfg)
    tcfg = _tracker_config(cfg)
    mult = cfg["multiplier"]
    p = MultiplierParams(s=mult["s"], N=float(mult["N"]))
    blowup_t = None
    try:
        traj = run(u0, scfg)
    except BlowUpError as exc:
        print(f"blow-up guard tripped at t={exc.t}", file=sys.stderr)
        blowup_t = exc.t
        traj = None
    if traj is None:
        payload = {"blowup_t": blowup_t, "completed": False}
        write_report(os.path.join(out, "simulate.json"), payload, resolved_hash)
        return 1
    recs = track_energies(traj, p, tcfg,
                          with_derivatives=cfg["tracker"]["with_derivatives"])
    write_energy_csv(os.path.join(out, "energies.csv"), recs)
    e1 = [r.E1 for r in recs]
    e2 = [r.E2 for r in recs]
    payload = {
        "completed": True,
        "t_end": traj.times[-1],
        "n_records": len(recs),
        "N": float(mult["N"]),
        "s": mult["s"],
        "K": tcfg.cutoff(p),
        "E1_initial": e1[0],
        "E2_initial": e2[0],
        "supdE1": max(abs(v - e1[0]) for v in e1),
        "supdE2": max(abs(v - e2[0]) for v in e2),
    }
    write_report(os.path.join(out, "simulate.json"), payload, resolved_hash)
    print(f"t_end={traj.times[-1]:g}: sup|dE1|={payload['supdE1']:.3e} "
          f"sup|dE2|={payload['supdE2']:.3e} over {len(recs)} records")
    return 0


def cmd_sweep_energy(cfg: dict, out: str, resolved_hash: str) -> int:
    u0 = _initial_field(cfg)
    scfg = _solver_config(cfg)
    tcfg = _tracker_config(cfg)
    mult = cfg["multiplier"]
    N_list = [float(N) for N in mult["N_list"]]
    res = almost_conservation_sweep(
        u0, scfg, tcfg, mult["s"], N_list,
        seeds={"data": cfg["initial_data"]["seed"], "global": cfg["seed"]},
        config_hash=resolved_hash)
    write_report(os.path.join(out, "sweep_energy.json"), res.to_payload(),
                 resolved_hash)
    for N, recs in (res.records or {}).items():
        write_energy_csv(os.path.join(out, f"energy_N{N:g}.csv"), recs)
    for i, N in enumerate(res.N_values):
        print(f"N={N:g}: sup|dE1|={res.supdE1[i]:.3e} sup|dE2|={res.supdE2[i]:.3e}")
    if len(N_list) < 3:
        print("fewer than 3 levels: increments only, no slope")
    else:
        print(f"slopes: E1 {res.slopes['E1']} E2 {res.slopes['E2']}")
    if res.partial:
        print("partial sweep (blow-up truncated the trajectory)", file=sys.stderr)
        return 1
    return 0


def cmd_crosscheck_derivative(cfg: dict, out: str, resolved_hash: str) -> int:
    u0 = _initial_field(cfg)
    scfg = _solver_config(cfg)
    tcfg = _tracker_config(cfg)
    mult = cfg["multiplier"]
    p = MultiplierParams(s=mult["s"], N=float(mult["N"]))
    traj = run(u0, scfg)
    res = derivative_crosscheck(traj, p, tcfg)
    write_energy_csv(os.path.join(out, "crosscheck.csv"), res.records)
    payload = {
        "abs_mismatch": res.abs_mismatch,
        "rel_mismatch": None if math.isinf(res.rel_mismatch) else res.rel_mismatch,
        "scale": res.scale,
        "degenerate": res.degenerate,
        "n_records": len(res.records),
    }
    write_report(os.path.join(out, "crosscheck.json"), payload, resolved_hash)
    print(f"dE1/dt mismatch: abs {res.abs_mismatch:.3e} rel {res.rel_mismatch:.3e}"
          f" (scale {res.scale:.3e})")
    tol = cfg["tracker"]["crosscheck_tol"]
    if not res.degenerate and res.rel_mismatch > tol:
        print(f"FAIL: relative mismatch above {tol}", file=sys.stderr)
        return 1
    return 0


def cmd_plan(cfg: dict, out: str, resolved_hash: str) -> int:
    pl = cfg["plan"]
    inp = PlanInput(s=pl["s"], T=pl["T"], u0_norm=pl["u0_norm"], eps0=pl["eps0"],
                    eps=cfg["epsilon"])
    plan = make_plan(inp)
    payload = plan.to_payload()
    payload["residuals"] = plan.residuals()
    eta = pl["eta"]
    if eta is not None:
        gb = growth_bound(inp, float(eta))
        payload["growth_bound"] = {"eta": float(eta), "value": gb.value,
                                   "margin": gb.margin}
    if pl["check_M"]:
        chk = rescaled_smallness_check(inp, plan, M=int(pl["check_M"]),
                                       seed=cfg["seed"])
        payload["smallness_check"] = {"iu_norm": chk.iu_norm, "eps0": chk.eps0,
                                      "ok": chk.ok, "grid_modes": chk.grid_modes}
    write_report(os.path.join(out, "plan.json"), payload, resolved_hash)
    rows = [("rho", plan.rho), ("lambda", plan.lam), ("N", plan.N),
            ("iterations", plan.iterations), ("eta_min", plan.eta_min),
            ("s_boundary", plan.s_boundary)]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}} = {v:g}")
    return 0


_COMMANDS = {
    "verify-pointwise": cmd_verify_pointwise,
    "verify-sublevel": cmd_verify_sublevel,
    "verify-geometry": cmd_verify_geometry,
    "simulate": cmd_simulate,
    "sweep-energy": cmd_sweep_energy,
    "crosscheck-derivative": cmd_crosscheck_derivative,
    "plan": cmd_plan,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kdvlab",
        description="Multiplier-energy experiments for the quartic KdV flow")
    ap.add_argument("--version", action="version", version=f"kdvlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="YAML config path")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument("--epsilon", type=float, default=None,
                       help="override the exponent slack")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.out is not None:
            cfg["out"] = args.out
        if args.epsilon is not None:
            cfg["epsilon"] = args.epsilon
        out = cfg["out"]
        os.makedirs(out, exist_ok=True)
        resolved_hash = write_resolved_config(out, cfg)
        return _COMMANDS[args.command](cfg, out, resolved_hash)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
