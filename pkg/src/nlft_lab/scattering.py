"""Hermite-Biehler functions, scattering coefficients and their identities.

From M = [[A, B], [C, D]] we form E = A - iC and E~ = B - iD, and the
scattering coefficients

    a = e^{itz} (E + i E~) / 2,    b = e^{itz} (E - i E~) / 2.

Schwarz reflections X#(z) = conj(X(conj z)) are always obtained from a
second propagation at conj(z).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .errors import NonUnimodularIdentityViolation
from .potential import Potential
from .propagator import (DEFAULT_OPTIONS, growth_estimate, propagate_arrays,
                         propagate_mp)
from .report import DiagnosticReport


@dataclass(frozen=True)
class ScatteringPair:
    t: float
    z: object
    E: object
    E_tilde: object
    dE_dz: Optional[object] = None
    dE_tilde_dz: Optional[object] = None

    @property
    def scattering(self):
        """The scattering functions e^{itz} E and e^{itz} E~."""
        ph = np.exp(1j * self.t * np.asarray(self.z))
        return ph * self.E, ph * self.E_tilde


@dataclass(frozen=True)
class ABPair:
    t: float
    z: object
    a: object
    b: object


def _shape_out(x, shape):
    x = np.asarray(x).reshape(shape)
    return x.item() if shape == () else x


def hb_arrays(f: Potential, t, z, opts=DEFAULT_OPTIONS, with_derivative=False, t0=0.0):
    """E and E~ (and z-derivatives) on a flat z array, windowed from t0.

    Past the support, (1, -i) is a left eigenvector of the free rotation, so
    E and E~ pick up the exact factor e^{-i(t - t1) z}. Applying it in closed
    form avoids the cancellation A - iC suffers in the lower half-plane,
    where A and C grow like e^{t |Im z|} while E decays.
    """
    z = np.ravel(np.asarray(z, dtype=complex))
    t_eff = min(t, max(f.support_end, t0))
    tail = t - t_eff
    M, D, _, _ = propagate_arrays(f, t0, t_eff, z, opts, with_derivative=with_derivative)
    E = M[:, 0, 0] - 1j * M[:, 1, 0]
    Et = M[:, 0, 1] - 1j * M[:, 1, 1]
    ph = np.exp(-1j * tail * z) if tail > 0 else 1.0
    if not with_derivative:
        return ph * E, ph * Et
    dE = D[:, 0, 0] - 1j * D[:, 1, 0]
    dEt = D[:, 0, 1] - 1j * D[:, 1, 1]
    if tail > 0:
        dE = dE - 1j * tail * E
        dEt = dEt - 1j * tail * Et
    return ph * E, ph * Et, ph * dE, ph * dEt


def hb_with_sharp(f: Potential, t, z, opts=DEFAULT_OPTIONS, with_derivative=False, t0=0.0):
    """(E, E~, E#, E~#) and, with derivatives, their z-derivatives as well.

    E#'(z) = conj(E'(conj z)). One kernel call handles z and conj(z).
    """
    z = np.ravel(np.asarray(z, dtype=complex))
    n = z.size
    out = hb_arrays(f, t, np.concatenate([z, np.conj(z)]), opts, with_derivative, t0)
    front = [x[:n] for x in out]
    back = [np.conj(x[n:]) for x in out]
    if not with_derivative:
        return front[0], front[1], back[0], back[1]
    return (front[0], front[1], back[0], back[1]), (front[2], front[3], back[2], back[3])


def hermite_biehler(f: Potential, t, z, with_derivative=False, opts=DEFAULT_OPTIONS):
    if t < 0:
        raise ValueError("t must be >= 0")
    shape = np.shape(z)
    out = hb_arrays(f, t, np.ravel(np.asarray(z, dtype=complex)), opts, with_derivative)
    parts = [_shape_out(x, shape) for x in out]
    if with_derivative:
        return ScatteringPair(t, z, parts[0], parts[1], parts[2], parts[3])
    return ScatteringPair(t, z, parts[0], parts[1])


def _ab_from_E(t, z, E, Et):
    ph = np.exp(1j * t * z)
    return 0.5 * ph * (E + 1j * Et), 0.5 * ph * (E - 1j * Et)


def ab_arrays(f: Potential, t, z, opts=DEFAULT_OPTIONS, t0=0.0):
    """a and b for a flat z array on the window [t0, t]."""
    z = np.ravel(np.asarray(z, dtype=complex))
    if f.is_zero() or f.support_end <= t0:
        return np.ones_like(z), np.zeros_like(z)
    # the tail phases of E and e^{itz} cancel, so a and b are frozen past the support
    t_eff = min(t, max(f.support_end, t0))
    E, Et = hb_arrays(f, t_eff, z, opts, t0=t0)
    return _ab_from_E(t_eff - t0, z, E, Et)


def ab_coefficients(f: Potential, t, z, opts=DEFAULT_OPTIONS):
    if t < 0:
        raise ValueError("t must be >= 0")
    shape = np.shape(z)
    a, b = ab_arrays(f, t, z, opts)
    return ABPair(t, z, _shape_out(a, shape), _shape_out(b, shape))


def nlft_partial(f: Potential, T, s, opts=DEFAULT_OPTIONS, tol=1e-6):
    """f_T^dagger(s) = b(T, s) / a(T, s) for real s (scalar or array)."""
    shape = np.shape(s)
    s_arr = np.ravel(np.asarray(s, dtype=float))
    a, b = ab_arrays(f, T, s_arr.astype(complex), opts)
    dev = np.abs(np.abs(a) ** 2 - np.abs(b) ** 2 - 1.0)
    if np.any(dev > tol * np.maximum(1.0, np.abs(a) ** 2)):
        raise NonUnimodularIdentityViolation(
            f"|a|^2 - |b|^2 deviates from 1 by {dev.max():.3e}")
    return _shape_out(b / a, shape)


def local_scattering(f: Potential, t1, t2, s, opts=DEFAULT_OPTIONS):
    """a_{t1->t2}(s), b_{t1->t2}(s) from the transfer matrix on [t1, t2]."""
    if not 0 <= t1 <= t2:
        raise ValueError("need 0 <= t1 <= t2")
    shape = np.shape(s)
    a, b = ab_arrays(f, t2, s, opts, t0=t1)
    return ABPair(t2 - t1, s, _shape_out(a, shape), _shape_out(b, shape))


# -- identity verification --------------------------------------------------

DEFAULT_TOLERANCES = {
    "det": 1e-12,
    "wronskian": 1e-10,
    "unimodular": 1e-12,
    "hermite_biehler": 0.0,
}


def _needs_mp(f, t, z, tol):
    g = growth_estimate(f, t, z)
    return np.finfo(float).eps * 8 * g * g > 0.01 * tol


def _sample_residuals_double(f, t, z, opts):
    M, _, _, _ = propagate_arrays(f, 0.0, t, np.array([z, np.conj(z)]), opts)
    det = M[0, 0, 0] * M[0, 1, 1] - M[0, 0, 1] * M[0, 1, 0]
    E = M[:, 0, 0] - 1j * M[:, 1, 0]
    Et = M[:, 0, 1] - 1j * M[:, 1, 1]
    Es, Ets = np.conj(E[1]), np.conj(Et[1])
    wr = E[0] * Ets - Et[0] * Es
    out = {"det": abs(det - 1.0), "wronskian": abs(wr - 2j)}
    if z.imag == 0.0:
        a, b = _ab_from_E(t, z, E[0], Et[0])
        out["unimodular"] = abs(abs(a) ** 2 - abs(b) ** 2 - 1.0)
    return out


def _sample_residuals_mp(f, t, z, opts, dps):
    ctx = mpmath.MPContext()
    ctx.dps = dps
    M = propagate_mp(f, 0.0, t, z, step_budget=opts.step_budget, ctx=ctx)
    Mc = propagate_mp(f, 0.0, t, np.conj(z), step_budget=opts.step_budget, ctx=ctx)
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    E = M[0][0] - 1j * M[1][0]
    Et = M[0][1] - 1j * M[1][1]
    Es = ctx.conj(Mc[0][0] - 1j * Mc[1][0])
    Ets = ctx.conj(Mc[0][1] - 1j * Mc[1][1])
    wr = E * Ets - Et * Es
    out = {"det": float(abs(det - 1)), "wronskian": float(abs(wr - 2j))}
    if z.imag == 0.0:
        ph = ctx.exp(1j * ctx.mpf(t) * ctx.mpf(z.real))
        a = ph * (E + 1j * Et) / 2
        b = ph * (E - 1j * Et) / 2
        out["unimodular"] = float(abs(abs(a) ** 2 - abs(b) ** 2 - 1))
    return out


def verify_identities(f: Potential, t, z_samples, tolerances=None, opts=DEFAULT_OPTIONS,
                      precision="auto"):
    """Residuals of det M = 1, E E~# - E~ E# = 2i, |a|^2 - |b|^2 = 1 and the
    Hermite-Biehler margin |E(z)| - |E(conj z)| at each sample.

    ``precision`` is "double", "mp" or "auto". In "auto" mode a sample is
    re-propagated in extended precision when the entries of M are so large
    that the double-precision determinant cannot reach the tolerance.
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    report = DiagnosticReport("verify_identities")
    zs = [complex(z) for z in np.ravel(np.asarray(z_samples, dtype=complex))]
    n_mp = 0
    for k, z in enumerate(zs):
        use_mp = precision == "mp" or (
            precision == "auto" and _needs_mp(f, t, z, min(tol["det"], tol["unimodular"])))
        if use_mp:
            digits = 30 + int(2 * math.log10(growth_estimate(f, t, z)))
            res = _sample_residuals_mp(f, t, z, opts, digits)
            n_mp += 1
        else:
            res = _sample_residuals_double(f, t, z, opts)
        for key, val in res.items():
            report.add(f"{key}[{k}]", val, tol[key])
        if z.imag > 0:
            E_up, _ = hb_arrays(f, t, np.array([z, np.conj(z)]), opts)
            report.add(f"hermite_biehler[{k}]", abs(E_up[0]) - abs(E_up[1]),
                       tol["hermite_biehler"], relation=">")
    report.data.update({"t": t, "z": zs, "extended_precision_samples": n_mp})
    return report
