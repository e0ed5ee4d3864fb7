import math

import numpy as np
import pytest

from kdvlab import (
    MultiplierParams,
    ScalingReport,
    SublevelQuery,
    sublevel_integral,
    sweep_sup,
)

from oracles import dense_band_integral


P4 = MultiplierParams(s=-1.0 / 24.0, N=4.0)
P2 = MultiplierParams(s=-1.0 / 24.0, N=2.0)


def toy_query(**kw):
    """Projection frame with a linear resonance variable: everything exact."""
    base = dict(params=P2, weight="one", frame="free3", free_indices=(0, 1),
                fixed_freqs={2: 0.0}, alpha=0.0, K=1.0)
    base.update(kw)
    return SublevelQuery(**base)


def quintic_query(**kw):
    base = dict(params=P4, weight="basic_smoothing", frame="quintic",
                free_indices=(1, 2, 4), fixed_freqs={0: 5.0, 3: -2.0},
                alpha=0.0, K=4.0)
    base.update(kw)
    return SublevelQuery(**base)


def test_query_validation():
    with pytest.raises(ValueError):
        quintic_query(frame="sextic")
    with pytest.raises(ValueError):
        quintic_query(weight="huge")
    with pytest.raises(ValueError):
        quintic_query(mode="shell")
    with pytest.raises(ValueError):
        quintic_query(estimator="importance")
    with pytest.raises(ValueError):
        quintic_query(K=0.0)
    with pytest.raises(ValueError):
        quintic_query(eps=0.7)
    with pytest.raises(ValueError):
        quintic_query(free_indices=(1, 1, 2))
    with pytest.raises(ValueError):
        quintic_query(free_indices=(1, 2, 9))
    with pytest.raises(ValueError):
        quintic_query(free_indices=(0, 1, 2, 3, 4))
    with pytest.raises(ValueError):
        quintic_query(free_indices=(1,))
    with pytest.raises(ValueError):
        quintic_query(fixed_freqs={0: 5.0, 3: -2.0, 4: 1.0})
    # smoothing weights only exist on the quintic frame
    with pytest.raises(ValueError):
        toy_query(weight="basic_smoothing")


def test_missing_fixed_frequencies_rejected_at_evaluation():
    q = quintic_query(fixed_freqs={0: 5.0})  # template: index 3 open
    with pytest.raises(ValueError):
        sublevel_integral(q, 1000, seed=0)


def test_minimum_sample_count():
    with pytest.raises(ValueError):
        sublevel_integral(toy_query(), 999, seed=0)


def test_default_box_is_4N():
    assert quintic_query().half_width() == 16.0
    assert quintic_query(box=9.0).half_width() == 9.0


def test_toy_slab_exact():
    # Phi(v) = v: the inner measure is exactly 2K for |alpha| <= B - K, the
    # outer integral contributes 2B, and the stratified estimator has zero
    # variance
    q = toy_query(K=1.0)
    B = q.half_width()
    est = sublevel_integral(q, 2000, seed=3)
    assert est.value == pytest.approx(2.0 * B * 2.0 * q.K, rel=1e-12)
    assert est.stderr <= 1e-12 * est.value  # ulp jitter across segments only
    assert est.samples == 2000


def test_toy_slab_clipped_at_box_edge():
    q = toy_query(alpha=8.0, K=1.0)  # alpha at the box end: half the slab
    B = q.half_width()
    est = sublevel_integral(q, 1000, seed=3)
    assert est.value == pytest.approx(2.0 * B * q.K, rel=1e-12)


def test_toy_uniform_control_agrees():
    q = toy_query(K=2.0, estimator="uniform")
    B = q.half_width()
    est = sublevel_integral(q, 200_000, seed=5)
    want = 2.0 * B * 2.0 * q.K
    assert est.stderr > 0.0
    assert abs(est.value - want) <= 4.0 * est.stderr


def test_toy_tail_closed_form():
    # integral of 1/|v| over K < |v| <= B is 2 log(B/K); outer volume 2B
    q = toy_query(K=0.25, mode="tail_quotient")
    B = q.half_width()
    est = sublevel_integral(q, 1000, seed=7)
    want = 2.0 * B * 2.0 * math.log(B / q.K)
    assert est.value == pytest.approx(want, rel=1e-9)


def quintic_1d_query(**kw):
    """Everything fixed except the stratified/dependent pair: the stratified
    estimator reduces to one exact 1-d band integral."""
    base = dict(params=P4, weight="basic_smoothing", frame="quintic",
                free_indices=(3, 4), fixed_freqs={0: 9.0, 1: 3.5, 2: -1.25},
                alpha=2.0, K=30.0)
    base.update(kw)
    return SublevelQuery(**base)


def _oracle_1d(q, mode):
    """Dense-scan reference for the 1-d reduction of the quintic frame."""
    x0, x1, x2 = q.fixed_freqs[0], q.fixed_freqs[1], q.fixed_freqs[2]
    c = x0 - x1 - x2  # dependent: xi4 = c - v

    def tuples(v):
        return np.stack([np.full_like(v, x0), np.full_like(v, x1),
                         np.full_like(v, x2), v, c - v], axis=-1)

    def phi(v):
        return x0**3 - x1**3 - x2**3 - v**3 - (c - v) ** 3

    def weight(v):
        xs = tuples(v)
        inp = xs[..., 1:5]
        return np.max(np.abs(inp) * (1.0 + inp**2) ** (0.5 * (0.5 - q.eps)),
                      axis=-1)

    B = q.half_width()
    if mode == "slab":
        return dense_band_integral(weight, phi, q.alpha - q.K, q.alpha + q.K,
                                   -B, B, n=2_000_001)
    lo = dense_band_integral(weight, phi, -np.inf, q.alpha - q.K, -B, B,
                             n=2_000_001, quotient_alpha=q.alpha)
    hi = dense_band_integral(weight, phi, q.alpha + q.K, np.inf, -B, B,
                             n=2_000_001, quotient_alpha=q.alpha)
    return lo + hi


def test_quintic_slab_against_dense_scan():
    q = quintic_1d_query()
    est = sublevel_integral(q, 1000, seed=0)
    assert est.value == pytest.approx(_oracle_1d(q, "slab"), rel=2e-4)


def test_quintic_tail_against_dense_scan():
    q = quintic_1d_query(mode="tail_quotient", K=60.0)
    est = sublevel_integral(q, 1000, seed=0)
    assert est.value == pytest.approx(_oracle_1d(q, "tail"), rel=2e-4)


def test_stratified_uniform_cross_route():
    # the two estimator routes must agree within combined Monte Carlo error;
    # K is large enough that the uniform control actually scores hits
    qs = quintic_query(K=60.0)
    a = sublevel_integral(qs, 20_000, seed=11)
    b = sublevel_integral(quintic_query(K=60.0, estimator="uniform"),
                          400_000, seed=12)
    sigma = math.hypot(a.stderr, b.stderr)
    assert abs(a.value - b.value) <= 4.0 * sigma


def test_slab_monotone_in_K():
    prev = -math.inf
    for K in (1.0, 2.0, 4.0, 8.0, 16.0):
        est = sublevel_integral(quintic_query(K=K), 4000, seed=21)
        assert est.value >= prev - 1e-9 * max(1.0, abs(est.value))
        prev = est.value


def test_reproducibility_bitwise():
    q = quintic_query()
    a = sublevel_integral(q, 5000, seed=42)
    b = sublevel_integral(q, 5000, seed=42)
    assert a.value == b.value and a.stderr == b.stderr
    c = sublevel_integral(q, 5000, seed=43)
    assert c.value != a.value


def dyadic(lo_exp, n=8):
    return [2.0**e for e in range(lo_exp, lo_exp + n)]


def test_sweep_levels_validation():
    q = toy_query()
    with pytest.raises(ValueError):
        sweep_sup(q, 4, dyadic(-7, 7), seed=0)  # too few levels
    with pytest.raises(ValueError):
        sweep_sup(q, 4, [1, 2, 4, 8, 16, 32, 64, 100], seed=0)  # not dyadic
    with pytest.raises(ValueError):
        sweep_sup(q, 4, list(reversed(dyadic(-7))), seed=0)


def test_sweep_toy_unit_slope():
    # sup over configurations of the linear-Phi slab is 4*B*K at every level
    # (the alpha = 0 configuration is never clipped) so the fitted slope is
    # exactly 1 and the argmax is that configuration
    q = toy_query()
    rpt = sweep_sup(q, 8, dyadic(-7), seed=9, samples=1200)
    B = q.half_width()
    assert rpt.estimates == pytest.approx([4.0 * B * K for K in rpt.levels], rel=1e-12)
    assert rpt.slope == pytest.approx(1.0, abs=1e-9)
    assert rpt.slope_ci == pytest.approx(0.0, abs=1e-9)
    assert rpt.argmax_config["config_index"] == 0
    assert rpt.argmax_config["alpha"] == 0.0
    assert set(rpt.argmax_config) == {"fixed", "alpha", "config_index", "seed"}


def test_sweep_payload_keys_pinned():
    q = toy_query()
    rpt = sweep_sup(q, 2, dyadic(-7), seed=1, samples=1000)
    payload = rpt.to_payload()
    assert list(payload.keys()) == [
        "weight", "levels", "estimates", "stderr", "slope", "slope_ci",
        "argmax_config", "seed",
    ]
    assert payload["weight"] == "one"
    assert payload["seed"] == 1


def test_sweep_degenerate_slope_is_none():
    # tail levels above the entire range of Phi - alpha on the box (the
    # coefficient bound tops out near 2^18 here): every estimate is zero and
    # the regression must report None rather than a fake 0
    q = quintic_query(mode="tail_quotient")
    rpt = sweep_sup(q, 2, dyadic(19), seed=2, samples=1000)
    assert all(v == 0.0 for v in rpt.estimates)
    assert rpt.slope is None
    assert rpt.slope_ci is None


def test_sweep_reproducible():
    q = quintic_query()
    a = sweep_sup(q, 3, dyadic(-4), seed=5, samples=1200)
    b = sweep_sup(q, 3, dyadic(-4), seed=5, samples=1200)
    assert a.estimates == b.estimates
    assert a.argmax_config == b.argmax_config
