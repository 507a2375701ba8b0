"""Grids, model lineshapes, FWHM estimation and transform pairs."""

import numpy as np
import pytest

from eitnarrow.errors import (
    InvalidParameterError,
    MultimodalSpectrumError,
    TruncationWarning,
    UnresolvedWidthError,
)
from eitnarrow.spectral import (
    GAUSSIAN_FWHM_FACTOR,
    CorrelationFunction,
    FrequencyGrid,
    Spectrum,
    coherence_time,
    correlation_to_spectrum,
    fwhm_estimate,
    gaussian_spectrum,
    lorentzian_spectrum,
    periodogram,
    spectrum_to_correlation,
)

TWO_PI = 2.0 * np.pi


def test_centered_grid_is_symmetric():
    grid = FrequencyGrid.centered(step=1.5, count=101)
    w = grid.omegas
    assert np.allclose(w, -w[::-1])
    assert w[50] == 0.0


def test_grid_invariants():
    with pytest.raises(InvalidParameterError):
        FrequencyGrid(start=0.0, step=0.0, count=100)
    with pytest.raises(InvalidParameterError):
        FrequencyGrid(start=0.0, step=1.0, count=4)


def test_gaussian_peak_and_unit_offset():
    grid = FrequencyGrid.centered(step=0.25, count=65)
    s = gaussian_spectrum(0.0, 4.0, grid)
    assert s.density[32] == 1.0
    # omega = +/- omega_w -> 1/e
    i = np.argmin(np.abs(grid.omegas - 4.0))
    assert s.density[i] == pytest.approx(np.exp(-1.0), rel=1e-12)


def test_gaussian_fwhm_factor():
    omega_w = 2.0 * np.pi * 588.5e3
    grid = FrequencyGrid.spanning(4.0 * omega_w, 4001)
    s = gaussian_spectrum(0.0, omega_w, grid)
    est = fwhm_estimate(s)
    assert abs(est - GAUSSIAN_FWHM_FACTOR * omega_w) < grid.step
    # the derived input width: omega_w = FWHM/(2 sqrt(ln 2)) with FWHM 980 kHz
    assert est == pytest.approx(TWO_PI * 980e3, rel=1e-3)


def test_lorentzian_peak_half_max_and_fwhm():
    gamma = TWO_PI * 4.6e3
    grid = FrequencyGrid.spanning(40.0 * gamma, 8001)
    s = lorentzian_spectrum(0.0, gamma, grid)
    assert s.density.max() == 1.0
    i = np.argmin(np.abs(grid.omegas - gamma))
    assert s.density[i] == pytest.approx(0.5, abs=1e-3)
    assert abs(fwhm_estimate(s) - 2.0 * gamma) < grid.step
    assert fwhm_estimate(s) == pytest.approx(TWO_PI * 9.2e3, rel=1e-3)


def test_model_constructors_reject_nonpositive_width():
    grid = FrequencyGrid.centered(step=1.0, count=16)
    with pytest.raises(InvalidParameterError):
        gaussian_spectrum(0.0, 0.0, grid)
    with pytest.raises(InvalidParameterError):
        lorentzian_spectrum(0.0, -1.0, grid)


def test_fwhm_estimate_flat_spectrum_unresolved():
    grid = FrequencyGrid.centered(step=1.0, count=32)
    with pytest.raises(UnresolvedWidthError):
        fwhm_estimate(Spectrum(0.0, grid, np.ones(32)))


def test_fwhm_estimate_multimodal():
    grid = FrequencyGrid.centered(step=0.1, count=201)
    w = grid.omegas
    two_peaks = np.exp(-((w - 5.0) ** 2)) + np.exp(-((w + 5.0) ** 2))
    with pytest.raises(MultimodalSpectrumError):
        fwhm_estimate(Spectrum(0.0, grid, two_peaks))


def test_coherence_time():
    assert coherence_time(2.0, "input") == 1.0
    gamma = TWO_PI * 4.6e3 / 2.0  # HWHM of the 4.6 kHz FWHM line
    assert coherence_time(gamma, "output") == pytest.approx(2.0 / gamma)
    assert coherence_time(gamma, "output") == pytest.approx(1.384e-4, rel=1e-3)
    with pytest.raises(InvalidParameterError):
        coherence_time(-1.0)
    with pytest.raises(InvalidParameterError):
        coherence_time(1.0, "sideways")


def test_gaussian_correlation_pair():
    omega_w = 3.0e4
    grid = FrequencyGrid.spanning(8.0 * omega_w, 2001)
    s = gaussian_spectrum(0.0, omega_w, grid)
    taus = np.linspace(0.0, 6.0 / omega_w, 40)
    r = spectrum_to_correlation(s, taus[1], taus.size)
    expected = np.abs(r.values[0]) * np.exp(-(omega_w**2) * r.lags**2 / 4.0)
    assert np.allclose(np.abs(r.values), expected, atol=1e-6 * abs(r.values[0]))


def test_lorentzian_correlation_pair():
    gamma = 2.0e3
    grid = FrequencyGrid.spanning(4000.0 * gamma, 400001)
    s = lorentzian_spectrum(0.0, gamma, grid)
    r = spectrum_to_correlation(s, 0.1 / gamma, 30)
    expected = np.abs(r.values[0]) * np.exp(-gamma * r.lags)
    assert np.allclose(np.abs(r.values), expected, rtol=2e-3)


def test_zero_spectrum_zero_correlation():
    grid = FrequencyGrid.centered(step=1.0, count=64)
    r = spectrum_to_correlation(Spectrum(0.0, grid, np.zeros(64)), 0.01, 16)
    assert np.all(r.values == 0)


def test_truncation_warning_on_wide_density():
    grid = FrequencyGrid.centered(step=1.0, count=64)
    with pytest.warns(TruncationWarning):
        spectrum_to_correlation(Spectrum(0.0, grid, np.ones(64)), 0.01, 16)


def test_round_trip_gaussian():
    omega_w = 1.0e5
    grid = FrequencyGrid.spanning(8.0 * omega_w, 1501)
    s = gaussian_spectrum(0.0, omega_w, grid)
    dtau = np.pi / (8.0 * abs(grid.omegas[-1]))
    n = int(np.ceil(16.0 / (omega_w * dtau)))
    r = spectrum_to_correlation(s, dtau, n)
    back = correlation_to_spectrum(r, grid)
    assert np.max(np.abs(back.density - s.density)) < 1e-6


def test_parseval():
    omega_w = 1.0e5
    grid = FrequencyGrid.spanning(8.0 * omega_w, 1501)
    s = gaussian_spectrum(0.0, omega_w, grid)
    r = spectrum_to_correlation(s, 1e-7, 8)
    assert abs(r.values[0].real - s.integral()) < 1e-8 * s.integral()


def test_constant_correlation_is_a_line_at_zero():
    r = CorrelationFunction(1e-3, np.ones(64, dtype=complex))
    grid = FrequencyGrid.spanning(2e4, 201)
    with pytest.warns(TruncationWarning):
        s = correlation_to_spectrum(r, grid)
    assert np.argmax(s.density) == 100


def test_exponential_correlation_gives_lorentzian():
    gamma = 1.0e3
    dtau = 1e-5
    n = 2000
    taus = dtau * np.arange(n)
    r = CorrelationFunction(dtau, np.exp(-gamma * taus).astype(complex))
    grid = FrequencyGrid.spanning(20.0 * gamma, 801)
    s = correlation_to_spectrum(r, grid)
    expected = (1.0 / np.pi) * gamma / (grid.omegas**2 + gamma**2)
    assert np.allclose(s.density, expected, atol=2e-3 * expected.max())


def test_periodogram_normalization_and_windows():
    rng = np.random.default_rng(3)
    x = rng.normal(size=512) + 1j * rng.normal(size=512)
    dt = 1e-4
    for window in ("boxcar", "hann"):
        s = periodogram(x, dt, window=window)
        # density integral ~ (window-weighted) mean power
        assert s.integral() == pytest.approx(np.mean(np.abs(x) ** 2), rel=0.2)
    with pytest.raises(InvalidParameterError):
        periodogram(x, dt, window="flat-top")


def test_spectrum_rejects_negative_density():
    grid = FrequencyGrid.centered(step=1.0, count=16)
    with pytest.raises(InvalidParameterError):
        Spectrum(0.0, grid, np.full(16, -1.0))
