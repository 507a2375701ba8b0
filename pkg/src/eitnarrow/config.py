"""Run configuration: sectioned key/value files with explicit units.

Grammar: INI sections parsed by :mod:`configparser`.  Every physical key
carries its unit in the name (``_mhz``, ``_khz``, ``_hz``, ``_cm``,
``_nm``, ``_us``, ``_ms``, ``_per_s``); frequency-like units are cyclic
and are converted to angular rad/s internally, so a ``2*pi`` can never
go missing silently.  Unknown sections or keys are errors.

Recognized sections and keys (defaults in parentheses):

[medium]
    density_cm3 (3e11)          atom number density [1/cm^3]
    wavelength_nm (794.98)      probe transition wavelength
    gamma_r_per_s (3.61e7)      radiative decay rate a -> b [1/s]
    gamma_ab_per_s (2e7)        homogeneous a-b coherence decay [1/s]
    gamma_ac_per_s (2e7)        homogeneous a-c coherence decay [1/s]
    gamma_cb_hz (0)             ground coherence decay [Hz]
    doppler_fwhm_mhz (500)      Doppler width Delta_W [MHz]
    doppler_mode (on)           on | off
    length_cm (2.5)             cell length

[fields]
    omega_d_mhz (0 = auto)      drive Rabi frequency; 0 picks the value
                                whose closed-form width equals
                                target_width_khz
    target_width_khz (4.6)      target output width for the auto drive
    omega_p_mhz (0)             probe Rabi frequency (Monte Carlo only)
    delta_p_mhz (0)             probe one-photon detuning
    delta_ac_mhz (0)            drive one-photon detuning
    rho_aa, rho_bb, rho_cc      frozen populations (0, 1, 0)

[input]
    shape (gaussian)            gaussian | lorentzian
    fwhm_khz (980)              input beat-spectrum FWHM
    grid_points (3001)
    span_factor (6.0)           grid half-width = span_factor * FWHM

[propagation]
    exponent_convention (paper) paper | derived
    z_steps (64)

[mc]
    realizations (200)
    slices (8)
    dt_us (0.1)
    duration_ms (1.0)
    drive_diffusion_khz (0)
    full_integration (off)      on | off

[sweep]
    omega_d_min_mhz (2.0)
    omega_d_max_mhz (6.5)
    points (8)

[run]
    seed (12345)
"""

from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, OpticallyThinError
from .medium import AtomicMedium, FieldConfig, convention_factor, drive_for_target_width
from .errors import InvalidParameterError

TWO_PI = 2.0 * np.pi

DEFAULTS: dict[str, dict[str, str]] = {
    "medium": {
        "density_cm3": "3e11",
        "wavelength_nm": "794.98",
        "gamma_r_per_s": "3.61e7",
        "gamma_ab_per_s": "2e7",
        "gamma_ac_per_s": "2e7",
        "gamma_cb_hz": "0",
        "doppler_fwhm_mhz": "500",
        "doppler_mode": "on",
        "length_cm": "2.5",
    },
    "fields": {
        "omega_d_mhz": "0",
        "target_width_khz": "4.6",
        "omega_p_mhz": "0",
        "delta_p_mhz": "0",
        "delta_ac_mhz": "0",
        "rho_aa": "0",
        "rho_bb": "1",
        "rho_cc": "0",
    },
    "input": {
        "shape": "gaussian",
        "fwhm_khz": "980",
        "grid_points": "3001",
        "span_factor": "6.0",
    },
    "propagation": {
        "exponent_convention": "paper",
        "z_steps": "64",
    },
    "mc": {
        "realizations": "200",
        "slices": "8",
        "dt_us": "0.1",
        "duration_ms": "1.0",
        "drive_diffusion_khz": "0",
        "full_integration": "off",
    },
    "sweep": {
        "omega_d_min_mhz": "2.0",
        "omega_d_max_mhz": "6.5",
        "points": "8",
    },
    "run": {
        "seed": "12345",
    },
}

_ENUMS = {
    ("medium", "doppler_mode"): ("on", "off"),
    ("input", "shape"): ("gaussian", "lorentzian"),
    ("propagation", "exponent_convention"): ("paper", "derived"),
    ("mc", "full_integration"): ("on", "off"),
}

_INTS = {
    ("input", "grid_points"),
    ("propagation", "z_steps"),
    ("mc", "realizations"),
    ("mc", "slices"),
    ("sweep", "points"),
    ("run", "seed"),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved, validated run configuration."""

    medium: AtomicMedium
    fields: FieldConfig
    doppler: bool
    convention: str
    input_shape: str
    input_fwhm: float  # rad/s
    grid_points: int
    span_factor: float
    z_steps: int
    mc_realizations: int
    mc_slices: int
    mc_dt: float  # s
    mc_duration: float  # s
    mc_drive_diffusion: float  # rad^2/s
    mc_full_integration: bool
    sweep_omega_d: np.ndarray  # rad/s
    seed: int
    resolved: dict  # section -> key -> string, fully resolved
    digest: str  # short hash of the resolved configuration


def _resolve_text(path: str | None) -> dict[str, dict[str, str]]:
    merged = {sec: dict(keys) for sec, keys in DEFAULTS.items()}
    if path is None:
        return merged
    if not os.path.isfile(path):
        raise ConfigError(f"configuration file not found: {path}", code="config-not-found")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}", code="config-parse-error") from exc
    for sec in parser.sections():
        if sec not in merged:
            raise ConfigError(f"unknown section [{sec}]", code="unknown-key")
        for key, value in parser.items(sec):
            if key not in merged[sec]:
                raise ConfigError(f"unknown key {key!r} in section [{sec}]", code="unknown-key")
            merged[sec][key] = value.strip()
    return merged


def _number(resolved, sec, key) -> float:
    raw = resolved[sec][key]
    try:
        if (sec, key) in _INTS:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"key {key!r} in [{sec}] must be a number, got {raw!r}", code="bad-number"
        ) from None


def _enum(resolved, sec, key) -> str:
    raw = resolved[sec][key].lower()
    allowed = _ENUMS[(sec, key)]
    if raw not in allowed:
        raise ConfigError(
            f"key {key!r} in [{sec}] must be one of {allowed}, got {raw!r}",
            code="bad-enum",
        )
    return raw


def config_digest(resolved: dict) -> str:
    text = "\n".join(
        f"{sec}.{key}={resolved[sec][key]}"
        for sec in sorted(resolved)
        for key in sorted(resolved[sec])
    )
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def load_config(path: str | None = None, seed: int | None = None) -> RunConfig:
    """Load, merge with defaults, validate and convert a configuration.

    ``seed`` overrides the [run] seed (CLI ``--seed`` flag).
    """
    resolved = _resolve_text(path)
    if seed is not None:
        resolved["run"]["seed"] = str(int(seed))

    num = lambda sec, key: _number(resolved, sec, key)  # noqa: E731
    doppler = _enum(resolved, "medium", "doppler_mode") == "on"
    convention = _enum(resolved, "propagation", "exponent_convention")
    convention_factor(convention)
    input_shape = _enum(resolved, "input", "shape")
    full_integration = _enum(resolved, "mc", "full_integration") == "on"

    try:
        medium = AtomicMedium(
            number_density=num("medium", "density_cm3") * 1e6,
            wavelength=num("medium", "wavelength_nm") * 1e-9,
            gamma_r=num("medium", "gamma_r_per_s"),
            gamma_ab=num("medium", "gamma_ab_per_s"),
            gamma_ac=num("medium", "gamma_ac_per_s"),
            gamma_cb=num("medium", "gamma_cb_hz") * TWO_PI,
            doppler_width=num("medium", "doppler_fwhm_mhz") * TWO_PI * 1e6,
            length=num("medium", "length_cm") * 1e-2,
        )
        omega_d = num("fields", "omega_d_mhz") * TWO_PI * 1e6
        if omega_d == 0:
            target = num("fields", "target_width_khz") * TWO_PI * 1e3
            try:
                omega_d = drive_for_target_width(medium, target)
            except OpticallyThinError as exc:
                raise ConfigError(
                    f"omega_d_mhz = 0 (auto) needs an optically thick medium: {exc}",
                    code="bad-parameter",
                ) from exc
            resolved["fields"]["omega_d_mhz"] = repr(omega_d / (TWO_PI * 1e6))
        fields = FieldConfig(
            omega_d=omega_d,
            omega_p=num("fields", "omega_p_mhz") * TWO_PI * 1e6,
            delta_p=num("fields", "delta_p_mhz") * TWO_PI * 1e6,
            delta_ac=num("fields", "delta_ac_mhz") * TWO_PI * 1e6,
            rho_aa=num("fields", "rho_aa"),
            rho_bb=num("fields", "rho_bb"),
            rho_cc=num("fields", "rho_cc"),
        )
    except InvalidParameterError as exc:
        raise ConfigError(str(exc), code="bad-parameter") from exc

    points = int(num("sweep", "points"))
    if points < 1:
        raise ConfigError("sweep needs at least one point", code="bad-parameter")
    sweep = np.linspace(
        num("sweep", "omega_d_min_mhz"), num("sweep", "omega_d_max_mhz"), points
    ) * TWO_PI * 1e6

    grid_points = int(num("input", "grid_points"))
    z_steps = int(num("propagation", "z_steps"))
    if grid_points < 8 or z_steps < 1:
        raise ConfigError("grid_points >= 8 and z_steps >= 1 required", code="bad-parameter")

    return RunConfig(
        medium=medium,
        fields=fields,
        doppler=doppler,
        convention=convention,
        input_shape=input_shape,
        input_fwhm=num("input", "fwhm_khz") * TWO_PI * 1e3,
        grid_points=grid_points,
        span_factor=num("input", "span_factor"),
        z_steps=z_steps,
        mc_realizations=int(num("mc", "realizations")),
        mc_slices=int(num("mc", "slices")),
        mc_dt=num("mc", "dt_us") * 1e-6,
        mc_duration=num("mc", "duration_ms") * 1e-3,
        mc_drive_diffusion=num("mc", "drive_diffusion_khz") * TWO_PI * 1e3,
        mc_full_integration=full_integration,
        sweep_omega_d=sweep,
        seed=int(num("run", "seed")),
        resolved=resolved,
        digest=config_digest(resolved),
    )


__all__ = ["DEFAULTS", "RunConfig", "config_digest", "load_config"]
