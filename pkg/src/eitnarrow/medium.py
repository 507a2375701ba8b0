"""Three-level Lambda medium parameterization.

Complex dephasing rates, the coupling constant eta, the effective
ground-coherence rate, per-frequency transfer exponents, EIT
transmission scans and the closed-form thick-medium width.

Two prefactor conventions exist for the per-frequency exponent: the
reduction of the correlation-propagation equations gives 2*eta, while
the quoted thick-medium filter uses eta.  ``convention`` selects
"derived" (2*eta) or "paper" (eta); the discrepancy is reported, never
silently reconciled.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, OpticallyThinError, SingularRateError
from .fitting import fit_lineshape
from .spectral import FrequencyGrid, Spectrum

CONVENTIONS = {"paper": 1.0, "derived": 2.0}


def convention_factor(convention: str) -> float:
    try:
        return CONVENTIONS[convention]
    except KeyError:
        raise InvalidParameterError(
            f"unknown exponent convention {convention!r}"
        ) from None


@dataclass(frozen=True)
class AtomicMedium:
    """Vapor-cell parameters.  Rates in 1/s, lengths in m."""

    number_density: float  # N [1/m^3]
    wavelength: float  # lambda [m]
    gamma_r: float  # radiative decay a -> b [1/s]
    gamma_ab: float  # optical coherence decay on a-b [1/s]
    gamma_ac: float  # optical coherence decay on a-c [1/s]
    gamma_cb: float  # ground coherence decay [1/s]
    doppler_width: float  # Delta_W [rad/s]
    length: float  # cell length L [m]

    def __post_init__(self):
        if self.number_density <= 0 or self.wavelength <= 0 or self.length < 0:
            raise InvalidParameterError("N and lambda must be positive, L >= 0")
        for name in ("gamma_r", "gamma_ab", "gamma_ac", "gamma_cb", "doppler_width"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0")


@dataclass(frozen=True)
class FieldConfig:
    """Rabi frequencies, detunings and frozen populations."""

    omega_d: complex  # drive Rabi frequency [rad/s]
    omega_p: complex = 0.0  # probe Rabi frequency [rad/s]
    delta_p: float = 0.0  # probe detuning [rad/s]
    delta_ac: float = 0.0  # drive detuning [rad/s]
    rho_aa: float = 0.0
    rho_bb: float = 1.0
    rho_cc: float = 0.0

    def __post_init__(self):
        pops = (self.rho_aa, self.rho_bb, self.rho_cc)
        if min(pops) < 0 or abs(sum(pops) - 1.0) > 1e-9:
            raise InvalidParameterError("populations must be >= 0 and sum to 1")
        if abs(self.omega_p) > 0.1 * abs(self.omega_d):
            warnings.warn(
                "probe Rabi frequency is not small against the drive; "
                "weak-probe interpretation does not apply",
                UserWarning,
                stacklevel=2,
            )

    @property
    def n_ab(self) -> float:
        return self.rho_aa - self.rho_bb

    @property
    def n_ca(self) -> float:
        return self.rho_cc - self.rho_aa


@dataclass(frozen=True)
class ComplexRates:
    """Complex dephasing rates and derived coherence quantities."""

    gamma_ab: complex  # Gamma_ab = gamma_eff + i*delta_p [1/s]
    gamma_ca: complex  # Gamma_ca = gamma_eff - i*delta_ac [1/s]
    gamma_cb_eff: complex  # power-broadened ground coherence rate [1/s]
    n_factor: complex  # population/dephasing factor [s]


def coupling_eta(m: AtomicMedium) -> float:
    """Field-medium coupling eta = 3 lambda^2 N gamma_r / (8 pi)."""
    return 3.0 * m.wavelength**2 * m.number_density * m.gamma_r / (8.0 * np.pi)


def complex_rates(m: AtomicMedium, f: FieldConfig, doppler: bool = True) -> ComplexRates:
    """Dephasing rates with the Doppler substitution gamma -> Delta_W
    applied to both optical coherences when ``doppler`` is on."""
    g_ab = m.doppler_width if doppler else m.gamma_ab
    g_ac = m.doppler_width if doppler else m.gamma_ac
    gamma_ab = g_ab + 1j * f.delta_p
    gamma_ca = g_ac - 1j * f.delta_ac
    if gamma_ab == 0 or gamma_ca == 0:
        raise SingularRateError("optical dephasing rate is zero")
    gamma_cb_eff = (
        m.gamma_cb
        + abs(f.omega_d) ** 2 / gamma_ab
        + abs(f.omega_p) ** 2 / gamma_ca
    )
    n_factor = f.n_ab / gamma_ab - f.n_ca / gamma_ca
    return ComplexRates(gamma_ab, gamma_ca, gamma_cb_eff, n_factor)


def transfer_exponent(
    m: AtomicMedium,
    f: FieldConfig,
    omega,
    doppler: bool = True,
    convention: str = "paper",
) -> np.ndarray:
    """Per-frequency propagation exponent kappa(omega) [1/m].

    The spectral density transfer over a length z is exp(Re kappa * z).
    """
    c = convention_factor(convention)
    rates = complex_rates(m, f, doppler)
    omega = np.asarray(omega, dtype=float)
    denom = rates.gamma_cb_eff - 1j * omega
    if np.any(np.abs(denom) == 0):
        raise SingularRateError("transfer denominator vanishes on the grid")
    eta = coupling_eta(m)
    kappa = c * eta * (m.gamma_cb - 1j * omega) * rates.n_factor / denom
    return kappa


def transmission(
    m: AtomicMedium,
    f: FieldConfig,
    omega,
    doppler: bool = True,
    convention: str = "paper",
) -> np.ndarray:
    """Spectral density transfer exp(Re kappa(omega) * L)."""
    kappa = transfer_exponent(m, f, omega, doppler, convention)
    return np.exp(kappa.real * m.length)


def wing_transmission(
    m: AtomicMedium, f: FieldConfig, doppler: bool = True, convention: str = "paper"
) -> float:
    """omega -> infinity transfer limit (bare resonant absorption)."""
    c = convention_factor(convention)
    rates = complex_rates(m, f, doppler)
    return float(np.exp(c * coupling_eta(m) * rates.n_factor.real * m.length))


@dataclass(frozen=True)
class TransmissionScan:
    """Monochromatic-probe EIT transmission versus two-photon detuning."""

    grid: FrequencyGrid
    transmission: np.ndarray
    wing: float  # T at infinite detuning


def eit_transmission_scan(
    m: AtomicMedium,
    f: FieldConfig,
    grid: FrequencyGrid,
    doppler: bool = True,
    convention: str = "paper",
) -> TransmissionScan:
    """Transmission T(delta) of a monochromatic probe scanned across the
    two-photon resonance."""
    t = transmission(m, f, grid.omegas, doppler, convention)
    return TransmissionScan(grid, t, wing_transmission(m, f, doppler, convention))


def eit_width(scan: TransmissionScan) -> float:
    """Fitted FWHM of the EIT feature T(delta) - T(inf) [rad/s]."""
    feature = np.clip(scan.transmission - scan.wing, 0.0, None)
    if feature.max() <= 0:
        raise InvalidParameterError("scan shows no transparency feature")
    fit = fit_lineshape(Spectrum(0.0, scan.grid, feature), "lorentzian")
    return fit.fwhm


def optical_depth(m: AtomicMedium) -> float:
    """Dimensionless thick-medium parameter eta*L/Delta_W."""
    if m.doppler_width <= 0:
        raise InvalidParameterError("Doppler width must be positive")
    return coupling_eta(m) * m.length / m.doppler_width


def closed_form_width(m: AtomicMedium, omega_sq: float) -> float:
    """Closed-form beat-signal width |Omega|^2/(Delta_W sqrt(eta L/Delta_W - 1))."""
    if omega_sq <= 0:
        raise InvalidParameterError("|Omega|^2 must be positive")
    d = optical_depth(m)
    if d <= 1.0:
        raise OpticallyThinError(
            f"eta*L/Delta_W = {d:.4g} <= 1; the medium is optically thin "
            "and the narrowing formula does not apply"
        )
    return omega_sq / (m.doppler_width * np.sqrt(d - 1.0))


def drive_for_target_width(m: AtomicMedium, width: float) -> float:
    """|Omega_d| that makes the closed-form width equal ``width``."""
    if width <= 0:
        raise InvalidParameterError("target width must be positive")
    d = optical_depth(m)
    if d <= 1.0:
        raise OpticallyThinError("medium is optically thin")
    return float(np.sqrt(width * m.doppler_width * np.sqrt(d - 1.0)))


def thick_filter_hwhm(m: AtomicMedium, omega_sq: float) -> float:
    """Half width at half maximum of the thick-medium spectral filter
    exp(-eta L omega^2 / (Delta_W ((|Omega|^2/Delta_W)^2 + omega^2)))."""
    d = optical_depth(m)
    if d <= np.log(2.0):
        raise OpticallyThinError(
            "filter never drops to half maximum (eta*L/Delta_W <= ln 2)"
        )
    a = omega_sq / m.doppler_width
    return float(a * np.sqrt(np.log(2.0) / (d - np.log(2.0))))
