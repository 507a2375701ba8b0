"""Frequency grids, spectra, correlation functions and their transforms.

All frequencies are angular (rad/s); conversions from Hz happen at the
I/O boundary.  Spectrum <-> correlation transforms use direct trapezoid
quadrature so that arbitrary (non power-of-two) grids give bit-stable
results.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidParameterError,
    MultimodalSpectrumError,
    TruncationWarning,
    UnresolvedWidthError,
)

SQRT_LN2 = np.sqrt(np.log(2.0))
# Gaussian exp(-(w/ww)^2) has FWHM = GAUSSIAN_FWHM_FACTOR * ww
GAUSSIAN_FWHM_FACTOR = 2.0 * SQRT_LN2

EDGE_DECAY = 1e-6  # spectral density / correlation edge decay threshold


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of angular frequency offsets from the carrier."""

    start: float  # rad/s
    step: float  # rad/s
    count: int

    def __post_init__(self):
        if self.step <= 0:
            raise InvalidParameterError("grid step must be positive")
        if self.count < 8:
            raise InvalidParameterError("grid needs at least 8 points")

    @classmethod
    def centered(cls, step: float, count: int) -> "FrequencyGrid":
        """Grid symmetric about zero offset."""
        return cls(start=-step * (count - 1) / 2.0, step=step, count=count)

    @classmethod
    def spanning(cls, half_width: float, count: int) -> "FrequencyGrid":
        """Centered grid covering [-half_width, +half_width]."""
        if half_width <= 0:
            raise InvalidParameterError("half_width must be positive")
        return cls.centered(step=2.0 * half_width / (count - 1), count=count)

    @property
    def omegas(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)


@dataclass(frozen=True)
class Spectrum:
    """Nonnegative spectral density samples on a frequency grid."""

    carrier: float  # absolute carrier frequency omega_0 [rad/s]
    grid: FrequencyGrid
    density: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.density, dtype=float)
        object.__setattr__(self, "density", d)
        if d.shape != (self.grid.count,):
            raise InvalidParameterError("density length must match grid count")
        if not np.all(np.isfinite(d)):
            raise InvalidParameterError("density must be finite")
        if np.any(d < 0):
            raise InvalidParameterError("density must be nonnegative")

    @property
    def omegas(self) -> np.ndarray:
        return self.grid.omegas

    def integral(self) -> float:
        """Trapezoid integral of the density over the grid."""
        return float(np.trapezoid(self.density, dx=self.grid.step))


@dataclass(frozen=True)
class CorrelationFunction:
    """Complex correlation samples at lags 0, dtau, 2*dtau, ..."""

    lag_step: float  # s
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if self.lag_step <= 0:
            raise InvalidParameterError("lag step must be positive")
        if v.ndim != 1 or v.size < 2:
            raise InvalidParameterError("need at least two lag samples")

    @property
    def lags(self) -> np.ndarray:
        return self.lag_step * np.arange(self.values.size)


@dataclass(frozen=True)
class FitResult:
    """Parameters of a fitted Gaussian or Lorentzian lineshape.

    ``width`` is omega_w for the Gaussian model and the HWHM gamma_n for
    the Lorentzian model (FWHM = 2*gamma_n).
    """

    model: str  # "gaussian" | "lorentzian"
    center: float  # rad/s
    width: float  # rad/s
    amplitude: float
    rms_residual: float  # rms residual / peak amplitude

    @property
    def fwhm(self) -> float:
        if self.model == "gaussian":
            return GAUSSIAN_FWHM_FACTOR * self.width
        return 2.0 * self.width


def gaussian_spectrum(carrier: float, omega_w: float, grid: FrequencyGrid) -> Spectrum:
    """exp(-(omega - omega_0)^2 / omega_w^2) sampled on ``grid``."""
    if omega_w <= 0:
        raise InvalidParameterError("omega_w must be positive")
    w = grid.omegas
    return Spectrum(carrier, grid, np.exp(-((w / omega_w) ** 2)))


def lorentzian_spectrum(carrier: float, gamma_n: float, grid: FrequencyGrid) -> Spectrum:
    """gamma_n^2 / ((omega - omega_0)^2 + gamma_n^2) sampled on ``grid``."""
    if gamma_n <= 0:
        raise InvalidParameterError("gamma_n must be positive")
    w = grid.omegas
    return Spectrum(carrier, grid, gamma_n**2 / (w**2 + gamma_n**2))


def _cross(w0, y0, w1, y1, half):
    # linear interpolation of the half-max crossing between two grid points
    return w0 + (half - y0) * (w1 - w0) / (y1 - y0)


def fwhm_estimate(s: Spectrum) -> float:
    """Full width at half maximum from interpolated half-max crossings."""
    y = s.density
    w = s.omegas
    imax = int(np.argmax(y))
    if imax == 0 or imax == y.size - 1:
        raise UnresolvedWidthError("peak lies on the grid boundary")
    half = y[imax] / 2.0
    above = y >= half
    # count contiguous regions above half maximum
    edges = np.flatnonzero(np.diff(above.astype(int)))
    n_regions = (int(above[0]) + int(above[-1]) + edges.size) // 2
    if n_regions > 1:
        raise MultimodalSpectrumError(
            f"{n_regions} disjoint regions above half maximum"
        )
    below_left = np.flatnonzero(~above[:imax])
    below_right = np.flatnonzero(~above[imax:])
    if below_left.size == 0 or below_right.size == 0:
        raise UnresolvedWidthError("density never falls below half maximum")
    il = below_left[-1]  # last point below half on the left
    ir = imax + below_right[0]  # first point below half on the right
    left = _cross(w[il], y[il], w[il + 1], y[il + 1], half)
    right = _cross(w[ir - 1], y[ir - 1], w[ir], y[ir], half)
    return float(right - left)


def coherence_time(width: float, kind: str = "output") -> float:
    """Characteristic coherence time 2/width for a spectral width."""
    if kind not in ("input", "output"):
        raise InvalidParameterError(f"unknown width kind {kind!r}")
    if width <= 0:
        raise InvalidParameterError("width must be positive")
    return 2.0 / width


def _trapezoid_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, step)
    w[0] = w[-1] = step / 2.0
    return w


def spectrum_to_correlation(s: Spectrum, dtau: float, n: int) -> CorrelationFunction:
    """R(tau) = integral I_omega exp(-i omega tau) domega by trapezoid."""
    if dtau <= 0 or n < 2:
        raise InvalidParameterError("need dtau > 0 and n >= 2")
    peak = s.density.max()
    if peak > 0 and max(s.density[0], s.density[-1]) >= EDGE_DECAY * peak:
        warnings.warn(
            "spectral density has not decayed below 1e-6 of peak at the "
            "grid edges; correlation values are truncated",
            TruncationWarning,
            stacklevel=2,
        )
    w = s.omegas
    taus = dtau * np.arange(n)
    weights = _trapezoid_weights(w.size, s.grid.step)
    kernel = np.exp(-1j * np.outer(taus, w))
    values = kernel @ (weights * s.density)
    return CorrelationFunction(dtau, values)


def correlation_to_spectrum(r: CorrelationFunction, grid: FrequencyGrid) -> Spectrum:
    """Inverse transform using the Hermitian extension R(-tau) = R*(tau)."""
    v = r.values
    r0 = abs(v[0])
    if r0 > 0 and abs(v[-1]) >= EDGE_DECAY * r0:
        warnings.warn(
            "correlation has not decayed below 1e-6 of R(0) at the last "
            "lag; spectrum values are truncated",
            TruncationWarning,
            stacklevel=2,
        )
    taus = r.lags
    weights = _trapezoid_weights(taus.size, r.lag_step)
    kernel = np.exp(1j * np.outer(grid.omegas, taus))
    density = (kernel @ (weights * v)).real / np.pi
    # round-off can leave tiny negative values; clip them
    density = np.clip(density, 0.0, None)
    return Spectrum(0.0, grid, density)


def periodogram(
    envelope: np.ndarray, dt: float, carrier: float = 0.0, window: str = "boxcar"
) -> Spectrum:
    """Periodogram of a complex envelope, normalized so the density
    integral equals the (window-weighted) mean power of the series.

    ``window`` is ``boxcar`` or ``hann``; the Hann taper suppresses
    leakage sidelobes when a narrow line sits on weak broadband wings.
    """
    x = np.asarray(envelope, dtype=complex)
    n = x.size
    if n < 8:
        raise InvalidParameterError("series too short for a periodogram")
    if window == "boxcar":
        w = np.ones(n)
    elif window == "hann":
        w = np.hanning(n)
    else:
        raise InvalidParameterError(f"unknown window {window!r}")
    spec = np.fft.fftshift(np.fft.fft(x * w))
    density = (np.abs(spec) ** 2) * dt / (2.0 * np.pi * np.sum(w**2))
    freqs = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(n, dt))
    grid = FrequencyGrid(start=float(freqs[0]), step=float(freqs[1] - freqs[0]), count=n)
    return Spectrum(carrier, grid, density)
