import math

import numpy as np
import pytest

from kdvlab import (
    FrequencyGrid,
    GridCompatibilityError,
    InitialDataSpec,
    SpectralField,
    hermitian_defect,
    hermitize,
    hs_norm,
    l2_norm,
    make_initial_data,
    rescale,
)

from oracles import band_power, physical_space_e1


def test_grid_validation_and_layout():
    g = FrequencyGrid(L=2.0 * math.pi, M=8)
    assert g.dk == pytest.approx(1.0)
    assert g.mode_numbers().tolist() == [0, 1, 2, 3, -4, -3, -2, -1]
    assert g.nyquist_index == 4
    assert g.kmax() == 3
    with pytest.raises(ValueError):
        FrequencyGrid(L=0.0, M=8)
    with pytest.raises(ValueError):
        FrequencyGrid(L=1.0, M=7)
    with pytest.raises(ValueError):
        FrequencyGrid(L=1.0, M=2)


def test_roundtrip_values_coeffs(grid32):
    rng = np.random.default_rng(0)
    vals = rng.standard_normal(grid32.M)
    vals -= vals.mean()
    f = SpectralField.from_values(grid32, vals)
    assert hermitian_defect(f) <= 1e-14
    # Nyquist pinning is the only lossy part of the projection
    back = f.values()
    vals_no_nyq = vals - np.real(
        np.fft.ifft(np.eye(grid32.M)[grid32.nyquist_index] * np.fft.fft(vals))
    )
    assert back == pytest.approx(vals_no_nyq, abs=1e-12)


def test_hermitize_is_projection(grid32):
    rng = np.random.default_rng(1)
    c = rng.standard_normal(grid32.M) + 1j * rng.standard_normal(grid32.M)
    h1 = hermitize(grid32, c)
    h2 = hermitize(grid32, h1)
    assert h2 == pytest.approx(h1, abs=1e-15)
    assert h1[grid32.nyquist_index] == 0.0
    assert h1[0].imag == 0.0
    assert hermitian_defect(SpectralField(grid32, h1)) <= 1e-14


def test_l2_norm_matches_physical_quadrature(field32):
    # discrete Parseval: rectangle rule is exact for bandlimited data
    want = math.sqrt(physical_space_e1(field32.values(), field32.grid.L))
    assert l2_norm(field32) == pytest.approx(want, rel=1e-12)
    assert hs_norm(field32, 0.0) == pytest.approx(l2_norm(field32), rel=1e-14)


def test_hs_norm_weighting(grid32):
    c = np.zeros(grid32.M, dtype=complex)
    c[2] = 0.5
    c[-2] = 0.5
    f = SpectralField(grid32, c)
    xi = grid32.dk * 2
    want = math.sqrt(grid32.L * 2 * 0.25 * (1 + xi**2) ** 1.0)
    assert hs_norm(f, 1.0) == pytest.approx(want, rel=1e-14)


def test_initial_data_hits_target_norm(grid32):
    for s in (0.0, 0.5, -0.25):
        spec = InitialDataSpec(kind="random-phase", hs_target=0.7, s=s, seed=4)
        f = make_initial_data(spec, grid32)
        assert hs_norm(f, s) == pytest.approx(0.7, rel=1e-12)
    spec = InitialDataSpec(kind="gaussian-bumps", hs_target=1.3, s=0.0, seed=4)
    f = make_initial_data(spec, grid32)
    assert hs_norm(f, 0.0) == pytest.approx(1.3, rel=1e-12)
    assert abs(f.coeffs[0]) == 0.0  # mean-free


def test_initial_data_deterministic(grid32):
    spec = InitialDataSpec(kind="random-phase", hs_target=1.0, seed=99)
    a = make_initial_data(spec, grid32)
    b = make_initial_data(spec, grid32)
    assert np.array_equal(a.coeffs, b.coeffs)
    c = make_initial_data(
        InitialDataSpec(kind="random-phase", hs_target=1.0, seed=100), grid32
    )
    assert not np.array_equal(a.coeffs, c.coeffs)


def test_initial_data_band_and_envelope():
    g = FrequencyGrid(L=2.0 * math.pi, M=128)
    spec = InitialDataSpec(kind="random-phase", hs_target=1.0, seed=2,
                           decay=1.5, band=(4, 40))
    f = make_initial_data(spec, g)
    modes = g.mode_numbers()
    assert band_power(f.coeffs, modes, 0, 4) == 0.0
    assert band_power(f.coeffs, modes, 41, g.M // 2) == 0.0
    # dyadic band sums follow the envelope integral within 5 percent
    xi = g.xi()
    amps2 = (1.0 + xi**2) ** (-spec.decay)
    for lo, hi in ((4, 8), (8, 16), (16, 32)):
        got = band_power(f.coeffs, modes, lo, hi)
        sel = (np.abs(modes) >= lo) & (np.abs(modes) < hi)
        want = np.sum(amps2[sel])
        ratio = got / want
        ref = band_power(f.coeffs, modes, 4, 41) / np.sum(
            amps2[(np.abs(modes) >= 4) & (np.abs(modes) <= 40)]
        )
        assert ratio == pytest.approx(ref, rel=5e-2)


def test_initial_data_rejects_bad_specs(grid32):
    with pytest.raises(ValueError):
        InitialDataSpec(kind="white-noise", hs_target=1.0)
    with pytest.raises(ValueError):
        InitialDataSpec(kind="random-phase", hs_target=0.0)
    with pytest.raises(ValueError):
        make_initial_data(
            InitialDataSpec(kind="random-phase", hs_target=1.0, band=(40, 60)),
            grid32,
        )


def test_rescale_identity(field32):
    out = rescale(field32, 1.0)
    assert out.grid.L == field32.grid.L
    assert np.array_equal(out.coeffs, field32.coeffs)


def test_rescale_l2_scaling(field32):
    lam = 7.3
    out = rescale(field32, lam)
    assert out.grid.L == pytest.approx(lam * field32.grid.L, rel=1e-15)
    assert l2_norm(out) == pytest.approx(l2_norm(field32) * lam ** (-1.0 / 6.0), rel=1e-12)


def test_rescale_composition(field32):
    a, b = 2.0, 3.5
    once = rescale(rescale(field32, a), b)
    direct = rescale(field32, a * b)
    assert once.grid.L == pytest.approx(direct.grid.L, rel=1e-12)
    assert once.coeffs == pytest.approx(direct.coeffs, rel=1e-12)


def test_rescale_grid_compatibility(field32):
    good = FrequencyGrid(L=2.0 * field32.grid.L, M=field32.grid.M)
    out = rescale(field32, 2.0, target_grid=good)
    assert out.grid is good
    with pytest.raises(GridCompatibilityError):
        rescale(field32, 2.0, target_grid=FrequencyGrid(L=2.0 * field32.grid.L, M=64))
    with pytest.raises(GridCompatibilityError):
        rescale(field32, 2.0, target_grid=FrequencyGrid(L=3.0 * field32.grid.L, M=field32.grid.M))
    with pytest.raises(ValueError):
        rescale(field32, -1.0)
