"""Pure-numpy fallback for the propagation kernel.

Mirrors the compiled ``_kernels`` extension: same signature, same results up
to rounding. Vectorised over the spectral parameter, sequential over steps.
"""
import math

import numpy as np

# series switchover for the derivative coefficient (independent of the
# user-facing small-omega threshold, which governs cosh and sinh(x)/x only)
_DERIV_SERIES_RADIUS = 0.5
_COSH_COEF = [1.0 / math.factorial(2 * k) for k in range(5)]
_SINHC_COEF = [1.0 / math.factorial(2 * k + 1) for k in range(5)]
_DSINHC_COEF = [k / math.factorial(2 * k + 1) for k in range(1, 14)]


def _poly(coef, x):
    out = np.zeros_like(x) + coef[-1]
    for c in coef[-2::-1]:
        out = out * x + c
    return out


def step_coefficients(q, h, z, threshold, with_derivative=False):
    """exp(h G) = c I + s G for G = [[q, -z], [z, -q]].

    Returns (c, s) or (c, s, dc/dz, ds/dz).
    """
    z = np.asarray(z, dtype=complex)
    u = q * q - z * z
    X = h * h * u
    small = np.abs(X) < threshold * threshold
    w = np.sqrt(u)
    with np.errstate(all="ignore"):
        c = np.where(small, _poly(_COSH_COEF, X), np.cosh(h * w))
        s = np.where(small, h * _poly(_SINHC_COEF, X), np.sinh(h * w) / w)
    if not with_derivative:
        return c, s
    dc = -z * h * s
    near = np.abs(X) < _DERIV_SERIES_RADIUS ** 2
    with np.errstate(all="ignore"):
        ds_du = np.where(near, h ** 3 * _poly(_DSINHC_COEF, X), (h * c - s) / (2.0 * u))
    ds = -2.0 * z * ds_du
    return c, s, dc, ds


def step_diagonal(q, h, z, c, s, dc=None, ds=None):
    """Diagonal entries c +- q s (and z-derivatives) of the step matrix.

    When Re(h w) > 1 the entry c - q s (q > 0) cancels badly, so it is
    rebuilt from the eigen-expansion with 1 - q/w = -z^2 / (w (w + q)).
    """
    z = np.asarray(z, dtype=complex)
    pp, pm = c + s * q, c - s * q
    dpp = dpm = None
    if dc is not None:
        dpp, dpm = dc + ds * q, dc - ds * q
    u = q * q - z * z
    w = np.sqrt(u)
    big = (h * w).real > 1.0
    if not np.any(big):
        return pp, pm, dpp, dpm
    zb, wb, ub, sb = z[big], w[big], u[big], np.broadcast_to(s, z.shape)[big]
    if q >= 0:
        alpha_p, alpha_m = 1.0 + q / wb, -zb * zb / (wb * (wb + q))
    else:
        alpha_p, alpha_m = -zb * zb / (wb * (wb - q)), 1.0 - q / wb
    with np.errstate(over="ignore", under="ignore"):
        ep, em = np.exp(h * wb), np.exp(-h * wb)
    pp, pm = np.array(pp, dtype=complex), np.array(pm, dtype=complex)
    pp[big] = 0.5 * (alpha_p * ep + alpha_m * em)
    pm[big] = 0.5 * (alpha_m * ep + alpha_p * em)
    if dc is not None:
        dpp, dpm = np.array(dpp, dtype=complex), np.array(dpm, dtype=complex)
        dpp[big] = -zb / ub * (0.5 * h * wb * (alpha_p * ep - alpha_m * em) - q * sb)
        dpm[big] = -zb / ub * (0.5 * h * wb * (alpha_m * ep - alpha_p * em) + q * sb)
    return pp, pm, dpp, dpm


def propagate(q, h, z, M0=None, D0=None, with_derivative=False, threshold=1e-4,
              record=False):
    """Left-multiply M0 by the step exponentials of consecutive pieces.

    Parameters are 1-d arrays ``q``, ``h`` (pieces) and ``z`` (spectral
    parameters). Returns (M, D, history) with M of shape (m, 2, 2); D is the
    z-derivative when requested; history has shape (n + 1, m, 2, 2) when
    ``record`` is set.
    """
    z = np.ascontiguousarray(z, dtype=complex).ravel()
    m = z.size
    if M0 is None:
        M = np.zeros((m, 2, 2), dtype=complex)
        M[:, 0, 0] = M[:, 1, 1] = 1.0
    else:
        M = np.array(M0, dtype=complex).reshape(m, 2, 2)
    D = None
    if with_derivative:
        D = np.zeros((m, 2, 2), dtype=complex) if D0 is None else np.array(D0, dtype=complex).reshape(m, 2, 2)
    hist = None
    if record:
        hist = np.empty((len(q) + 1, m, 2, 2), dtype=complex)
        hist[0] = M
    for k, (qk, hk) in enumerate(zip(np.asarray(q, float), np.asarray(h, float))):
        coeffs = step_coefficients(qk, hk, z, threshold, with_derivative)
        c, s = coeffs[0], coeffs[1]
        pp, pm, dpp, dpm = step_diagonal(qk, hk, z, *coeffs)
        P = np.empty((m, 2, 2), dtype=complex)
        P[:, 0, 0] = pp
        P[:, 0, 1] = -s * z
        P[:, 1, 0] = s * z
        P[:, 1, 1] = pm
        if with_derivative:
            ds = coeffs[3]
            dP = np.empty((m, 2, 2), dtype=complex)
            dP[:, 0, 0] = dpp
            dP[:, 0, 1] = -ds * z - s
            dP[:, 1, 0] = ds * z + s
            dP[:, 1, 1] = dpm
            D = dP @ M + P @ D
        M = P @ M
        if record:
            hist[k + 1] = M
    return M, D, hist
