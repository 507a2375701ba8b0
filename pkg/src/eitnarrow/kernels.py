"""Hot numeric kernels with numba acceleration and numpy fallbacks.

Set the environment variable ``EITNARROW_DISABLE_NUMBA=1`` to force the
pure numpy/scipy implementations (same arithmetic, no compilation).
``benchmarks/bench_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.signal import lfilter

_DISABLED = os.environ.get("EITNARROW_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _DISABLED = True

USE_NUMBA = not _DISABLED


def _phi12(x: complex) -> tuple[complex, complex]:
    """phi1 = (e^x - 1)/x, phi2 = (e^x - 1 - x)/x^2 with small-x guard.

    The direct quotients cancel catastrophically for small |x|, so the
    series takes over below 1e-2 where its truncation error is ~1e-13.
    """
    if abs(x) < 1e-2:
        x2 = x * x
        phi1 = 1.0 + x / 2.0 + x2 / 6.0 + x2 * x / 24.0 + x2 * x2 / 120.0
        phi2 = 0.5 + x / 6.0 + x2 / 24.0 + x2 * x / 120.0 + x2 * x2 / 720.0
        return phi1, phi2
    ex = np.exp(x)
    return (ex - 1.0) / x, (ex - 1.0 - x) / (x * x)


# ---------------------------------------------------------------------------
# correlation sweep: G' = nfac * R(tau) - gtilde * G, exponential integrator
# with piecewise-linear source:
#   G[k+1] = decay*G[k] + c_prev*R[k] + c_curr*R[k+1]
# ---------------------------------------------------------------------------


def g_sweep_coefficients(gtilde: complex, nfac: complex, dtau: float):
    x = -gtilde * dtau
    phi1, phi2 = _phi12(x)
    decay = np.exp(x)
    c_prev = dtau * nfac * (phi1 - phi2)
    c_curr = dtau * nfac * phi2
    return complex(decay), complex(c_prev), complex(c_curr)


def _g_sweep_numpy(r_values, g0, decay, c_prev, c_curr):
    # first-order linear recurrence == IIR filter
    b = np.array([c_curr, c_prev], dtype=complex)
    a = np.array([1.0, -decay], dtype=complex)
    zi = np.array([decay * g0 + c_prev * r_values[0]], dtype=complex)
    tail, _ = lfilter(b, a, r_values[1:], zi=zi)
    out = np.empty(r_values.size, dtype=complex)
    out[0] = g0
    out[1:] = tail
    return out


def _g_sweep_loop(r_values, g0, decay, c_prev, c_curr):
    n = r_values.size
    out = np.empty(n, dtype=np.complex128)
    g = g0
    out[0] = g
    for k in range(n - 1):
        g = decay * g + c_prev * r_values[k] + c_curr * r_values[k + 1]
        out[k + 1] = g
    return out


if USE_NUMBA:
    _g_sweep_compiled = njit(cache=True)(_g_sweep_loop)

    def g_sweep(r_values, g0, decay, c_prev, c_curr):
        return _g_sweep_compiled(
            np.ascontiguousarray(r_values, dtype=np.complex128),
            complex(g0),
            complex(decay),
            complex(c_prev),
            complex(c_curr),
        )

else:

    def g_sweep(r_values, g0, decay, c_prev, c_curr):
        return _g_sweep_numpy(
            np.asarray(r_values, dtype=complex),
            complex(g0),
            complex(decay),
            complex(c_prev),
            complex(c_curr),
        )


g_sweep.__doc__ = """Integrate the slaved-coherence lag ODE along the lag grid."""


# ---------------------------------------------------------------------------
# Monte-Carlo slab propagation.
#
# Per time sample the probe envelope is swept through nsl slices; each
# slice advances the field exactly for its frozen ground coherence
# (midpoint field sampling) and steps the coherence with a second-order
# exponential integrator.
# ---------------------------------------------------------------------------


def _mc_batch_loop(probe, drive, out, nsl, e_full, e_half, b_full, b_half,
                   fcoef, erho, alpha, beta, nfac, gtilde):
    nreal, nt = probe.shape
    for r in range(nreal):
        rho = np.zeros(nsl, dtype=np.complex128)
        s_prev = np.zeros(nsl, dtype=np.complex128)
        w = probe[r, 0]
        d0 = drive[r, 0]
        for j in range(nsl):
            s = w * np.conj(d0)
            rho[j] = nfac * s / gtilde
            s_prev[j] = s
            w = e_full * w + b_full * (fcoef * d0 * rho[j])
        for t in range(nt):
            w = probe[r, t]
            d = drive[r, t]
            for j in range(nsl):
                src = fcoef * d * rho[j]
                w_mid = e_half * w + b_half * src
                w_out = e_full * w + b_full * src
                s = w_mid * np.conj(d)
                rho[j] = erho * rho[j] + alpha * s + beta * s_prev[j]
                s_prev[j] = s
                w = w_out
            out[r, t] = w
    return out


def _mc_batch_numpy(probe, drive, out, nsl, e_full, e_half, b_full, b_half,
                    fcoef, erho, alpha, beta, nfac, gtilde):
    nreal, nt = probe.shape
    rho = np.zeros((nreal, nsl), dtype=complex)
    s_prev = np.zeros((nreal, nsl), dtype=complex)
    w = probe[:, 0].copy()
    d0 = drive[:, 0]
    for j in range(nsl):
        s = w * np.conj(d0)
        rho[:, j] = nfac * s / gtilde
        s_prev[:, j] = s
        w = e_full * w + b_full * (fcoef * d0 * rho[:, j])
    for t in range(nt):
        w = probe[:, t].copy()
        d = drive[:, t]
        dc = np.conj(d)
        for j in range(nsl):
            src = fcoef * d * rho[:, j]
            w_mid = e_half * w + b_half * src
            w = e_full * w + b_full * src
            s = w_mid * dc
            rho[:, j] = erho * rho[:, j] + alpha * s + beta * s_prev[:, j]
            s_prev[:, j] = s
        out[:, t] = w
    return out


if USE_NUMBA:
    _mc_batch_compiled = njit(cache=True)(_mc_batch_loop)

    def mc_batch(probe, drive, nsl, e_full, e_half, b_full, b_half,
                 fcoef, erho, alpha, beta, nfac, gtilde):
        probe = np.ascontiguousarray(probe, dtype=np.complex128)
        drive = np.ascontiguousarray(drive, dtype=np.complex128)
        out = np.empty_like(probe)
        return _mc_batch_compiled(
            probe, drive, out, nsl,
            complex(e_full), complex(e_half), complex(b_full), complex(b_half),
            complex(fcoef), complex(erho), complex(alpha), complex(beta),
            complex(nfac), complex(gtilde),
        )

else:

    def mc_batch(probe, drive, nsl, e_full, e_half, b_full, b_half,
                 fcoef, erho, alpha, beta, nfac, gtilde):
        probe = np.asarray(probe, dtype=complex)
        drive = np.asarray(drive, dtype=complex)
        out = np.empty_like(probe)
        return _mc_batch_numpy(
            probe, drive, out, nsl,
            complex(e_full), complex(e_half), complex(b_full), complex(b_half),
            complex(fcoef), complex(erho), complex(alpha), complex(beta),
            complex(nfac), complex(gtilde),
        )


mc_batch.__doc__ = """Propagate a batch of probe envelopes through the sliced medium."""
