import math

import numpy as np
import pytest

from kdvlab import (
    MultiplierParams,
    SymbolValue,
    bracket,
    m1_symbol,
    m5_prime,
    m_eval,
    on_gamma,
    phi_n,
    pointwise_ratio,
    pointwise_ratio_batch,
    random_gamma_tuples,
)

from oracles import mp_m1, mp_m5_prime, mp_pointwise_ratio


P = MultiplierParams(s=-1.0 / 24.0, N=16.0)


def test_params_reject_out_of_range():
    with pytest.raises(ValueError):
        MultiplierParams(s=-1.0 / 6.0, N=16.0)
    with pytest.raises(ValueError):
        MultiplierParams(s=0.1, N=16.0)
    with pytest.raises(ValueError):
        MultiplierParams(s=-0.01, N=0.5)
    MultiplierParams(s=0.0, N=1.0)  # boundary values that are allowed


def test_m_eval_pinned_values():
    assert m_eval(P, 8.0) == 1.0
    assert m_eval(P, 16.0) == 1.0
    assert m_eval(P, 32.0) == pytest.approx(2.0 ** (-1.0 / 24.0), rel=0, abs=1e-15)
    assert m_eval(P, -32.0) == m_eval(P, 32.0)


def test_m_eval_array_and_monotone():
    xs = np.linspace(0.0, 200.0, 4001)
    vals = m_eval(P, xs)
    assert vals.shape == xs.shape
    assert np.all(vals <= 1.0) and np.all(vals > 0.0)
    hi = vals[xs >= P.N]
    assert np.all(np.diff(hi) <= 0.0)  # decaying tail for s < 0
    # continuity across the threshold
    eps = 1e-12
    assert m_eval(P, P.N - eps) == pytest.approx(m_eval(P, P.N + eps), abs=1e-12)


def test_phi_n_pinned():
    assert phi_n((1.0, -1.0, 2.0, -2.0, 0.0)) == 0.0
    assert phi_n((3.0, 1.0, -1.0, -1.0, -2.0)) == 18.0


def test_phi_n_odd_under_negation():
    # pow(-x, 3) is not bitwise -pow(x, 3), so compare at ulp scale of the
    # largest cube rather than exactly
    rng = np.random.default_rng(42)
    ts = random_gamma_tuples(rng, 10_000, 1e-2, 1e4)
    scale = np.max(np.abs(ts), axis=1) ** 3
    defect = np.array([abs(phi_n(-r) + phi_n(r)) for r in ts[:1000]])
    assert np.max(defect / scale[:1000]) <= 1e-13


def test_m1_symbol_zero_cases():
    # every frequency below threshold: m = 1 and the sum telescopes to 0
    assert m1_symbol(P, (1.0, 2.0, 3.0, -4.0, -2.0)) == pytest.approx(0.0, abs=1e-12)
    p0 = MultiplierParams(s=0.0, N=16.0)
    assert m1_symbol(p0, (32.0, -20.0, -8.0, -3.0, -1.0)) == pytest.approx(0.0, abs=1e-9)


def test_m1_symbol_frozen_oracle_value():
    t = (32.0, -20.0, -8.0, -3.0, -1.0)
    got = m1_symbol(P, t)
    assert got == pytest.approx(-1.4275525916608416, rel=1e-14)
    assert got == pytest.approx(float(mp_m1(P.s, P.N, t)), rel=1e-13)


def test_m1_symbol_random_against_mpmath():
    rng = np.random.default_rng(7)
    ts = random_gamma_tuples(rng, 64, 1e-1, 1e3)
    for row in ts:
        want = float(mp_m1(P.s, P.N, row.tolist()))
        got = m1_symbol(P, row)
        assert got == pytest.approx(want, rel=1e-11, abs=1e-11)


def test_m1_symbol_rejects_off_hyperplane():
    with pytest.raises(ValueError):
        m1_symbol(P, (1.0, 1.0, 1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        m1_symbol(P, (1.0, -1.0, 2.0))


def test_m5_prime_resonant_tuple_suppressed():
    out = m5_prime(P, (1.0, -1.0, 2.0, -2.0, 0.0), K=0.0)
    assert out == SymbolValue(0.0, False)


def test_m5_prime_zero_at_s_zero():
    p0 = MultiplierParams(s=0.0, N=16.0)
    out = m5_prime(p0, (32.0, -20.0, -8.0, -3.0, -1.0), K=0.5)
    assert out.value == pytest.approx(0.0, abs=1e-12)
    assert not out.singular_flag


def test_m5_prime_compositional_and_frozen():
    t = (32.0, -20.0, -8.0, -3.0, -1.0)
    out = m5_prime(P, t, K=0.5)
    assert out.value == pytest.approx(-2.0 * m1_symbol(P, t) / (5.0 * phi_n(t)), rel=1e-14)
    assert out.value == pytest.approx(float(mp_m5_prime(P.s, P.N, t, 0.5)), rel=1e-13)
    assert out.value == pytest.approx(2.3568641103860683e-05, rel=1e-12)


def test_m5_prime_cutoff_behavior():
    t = (32.0, -20.0, -8.0, -3.0, -1.0)
    phi = abs(phi_n(t))
    below = m5_prime(P, t, K=phi * 2.0)
    assert below == SymbolValue(0.0, False)
    at = m5_prime(P, t, K=phi)  # strict inequality: |phi| > K fails at equality
    assert at == SymbolValue(0.0, False)
    with pytest.raises(ValueError):
        m5_prime(P, t, K=-1.0)


def test_m5_prime_symmetries():
    rng = np.random.default_rng(3)
    ts = random_gamma_tuples(rng, 50, 1e-1, 1e3)
    for row in ts:
        base = m5_prime(P, row, K=1e-6).value
        perm = m5_prime(P, row[::-1].copy(), K=1e-6).value
        neg = m5_prime(P, -row, K=1e-6).value
        assert perm == pytest.approx(base, rel=1e-12, abs=1e-300)
        assert neg == pytest.approx(base, rel=1e-12, abs=1e-300)


def test_pointwise_ratio_below_threshold_is_zero():
    assert pointwise_ratio(P, (1.0, 2.0, 3.0, -4.0, -2.0)) == pytest.approx(0.0, abs=1e-13)


def test_pointwise_ratio_zero_at_s_zero():
    p0 = MultiplierParams(s=0.0, N=16.0)
    rng = np.random.default_rng(5)
    ts = random_gamma_tuples(rng, 100, 1e-1, 1e3)
    vals = pointwise_ratio_batch(p0, ts)
    assert np.max(vals) <= 1e-10


def test_pointwise_ratio_frozen_oracle_value():
    t = (32.0, -20.0, -8.0, -3.0, -1.0)
    got = pointwise_ratio(P, t, eps=0.05)
    assert got == pytest.approx(0.033920644446125824, rel=1e-13)
    assert got == pytest.approx(float(mp_pointwise_ratio(P.s, P.N, t, 0.05)), rel=1e-12)


def test_pointwise_ratio_batch_matches_scalar():
    rng = np.random.default_rng(9)
    ts = random_gamma_tuples(rng, 256, 1e-2, 1e4)
    batch = pointwise_ratio_batch(P, ts, eps=0.05)
    for i in range(0, 256, 17):
        assert batch[i] == pytest.approx(pointwise_ratio(P, ts[i], eps=0.05), rel=1e-10)


def test_pointwise_ratio_eps_validation():
    with pytest.raises(ValueError):
        pointwise_ratio(P, (1.0, 2.0, 3.0, -4.0, -2.0), eps=0.0)
    with pytest.raises(ValueError):
        pointwise_ratio_batch(P, np.zeros((4, 5)), eps=0.5)


def test_random_gamma_tuples_properties():
    rng = np.random.default_rng(123)
    ts = random_gamma_tuples(rng, 5000, 1e-3, 1e3)
    assert ts.shape == (5000, 5)
    assert np.max(np.abs(np.sum(ts, axis=1))) <= 1e-9 * max(1.0, np.max(np.abs(ts)))
    mags = np.abs(ts[:, :4])
    assert np.min(mags) >= 1e-3 and np.max(mags) <= 1e3
    assert all(on_gamma(r) for r in ts[:50])
    with pytest.raises(ValueError):
        random_gamma_tuples(rng, 10, 1.0, 0.5)


def test_bracket_values():
    assert bracket(0.0) == 1.0
    assert float(bracket(1.0)) == pytest.approx(math.sqrt(2.0), rel=1e-15)
    arr = bracket(np.array([0.0, 3.0, -4.0]))
    assert arr == pytest.approx(np.array([1.0, math.sqrt(10.0), math.sqrt(17.0)]))
