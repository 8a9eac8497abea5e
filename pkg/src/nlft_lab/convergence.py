"""Pointwise convergence experiments and the t-integral identities for a(t, s)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._kernels_py import step_coefficients
from .errors import FitQualityTooLow, NoZeroInBox
from .potential import Potential
from .propagator import DEFAULT_OPTIONS, propagate_arrays
from .quadrature import gauss_legendre
from .report import DiagnosticReport
from .scattering import ab_arrays, local_scattering, nlft_partial
from .zeros import increments, sine_fit, track_zero


@dataclass
class ConvergenceScan:
    s: float
    T_grid: list = field(default_factory=list)
    values: list = field(default_factory=list)
    cauchy_moduli: list = field(default_factory=list)

    def rows(self):
        return [(T, v.real, v.imag, c) for T, v, c in zip(self.T_grid, self.values, self.cauchy_moduli)]


def _suffix_diameters(values):
    v = np.asarray(values, dtype=complex)
    out = np.zeros(v.size)
    for k in range(v.size - 1, -1, -1):
        spread = float(np.max(np.abs(v[k] - v[k:]))) if v.size else 0.0
        out[k] = max(spread, out[k + 1] if k + 1 < v.size else 0.0)
    return out.tolist()


def convergence_scan(f: Potential, s, T_grid, opts=DEFAULT_OPTIONS):
    """f_T^dagger(s) over T_grid plus the Cauchy moduli of every suffix."""
    T = [float(x) for x in T_grid]
    if any(b <= a for a, b in zip(T, T[1:])):
        raise ValueError("T_grid must be strictly ascending")
    values = [complex(nlft_partial(f, x, float(s), opts)) for x in T]
    return ConvergenceScan(float(s), T, values, _suffix_diameters(values))


# -- a and b along the time axis ---------------------------------------------


@dataclass(frozen=True)
class TimeQuadrature:
    """Gauss-Legendre nodes on sub-panels of the propagation partition."""

    order: int = 16
    panel: float = 0.25


@dataclass
class Trace:
    """a(u, s), b(u, s) at quadrature nodes u with weights and f(u)."""

    u: np.ndarray
    weights: np.ndarray
    q: np.ndarray
    a: np.ndarray
    b: np.ndarray
    a_end: complex
    b_end: complex
    log_a_end: complex


def _step_matrices(q, h, s, threshold):
    c, sh = step_coefficients(q, h, s + 0j, threshold)
    P = np.empty(q.shape + (2, 2), dtype=complex)
    P[..., 0, 0] = c + sh * q
    P[..., 0, 1] = -sh * s
    P[..., 1, 0] = sh * s
    P[..., 1, 1] = c - sh * q
    return P


def _ab_from_M(M, u, s):
    E = M[..., 0, 0] - 1j * M[..., 1, 0]
    Et = M[..., 0, 1] - 1j * M[..., 1, 1]
    ph = np.exp(1j * u * s)
    return 0.5 * ph * (E + 1j * Et), 0.5 * ph * (E - 1j * Et)


def trace_ab(f: Potential, t, s, quad=TimeQuadrature(), opts=DEFAULT_OPTIONS):
    """a, b of the truncated potential at quadrature nodes in (0, t).

    Each node is reached by one exact step from the nearest sub-panel edge,
    so a(u, s) is exact at every node. log a(t, s) uses the continuous branch
    of arg a obtained by unwrapping along all nodes; panels are halved until
    every phase increment stays below pi / 2.
    """
    s = float(s)
    q_pc, h_pc = f.pieces(0.0, t, opts.step_budget)
    panel = quad.panel
    x, w = gauss_legendre(quad.order)
    while True:
        n_sub = np.maximum(1, np.ceil(h_pc / panel)).astype(int)
        q_sub = np.repeat(q_pc, n_sub)
        h_sub = np.repeat(h_pc / n_sub, n_sub)
        M, _, hist, _ = _propagate_pieces(q_sub, h_sub, s, opts)
        edges = np.concatenate([[0.0], np.cumsum(h_sub)])
        frac = 0.5 * (x + 1)
        dh = h_sub[:, None] * frac[None, :]
        Pn = _step_matrices(np.broadcast_to(q_sub[:, None], dh.shape), dh, s,
                            opts.small_omega_threshold)
        Mn = Pn @ hist[:-1, None, :, :]
        u = edges[:-1, None] + dh
        a, b = _ab_from_M(Mn, u, s)
        a_edge, _ = _ab_from_M(hist, edges, s)
        # interleave edge and node values in time order for unwrapping
        seq = np.concatenate([a_edge[:-1, None], a], axis=1).ravel()
        seq = np.concatenate([seq, a_edge[-1:]])
        dphi = np.angle(seq[1:] / seq[:-1])
        if np.all(np.abs(dphi) < 0.5 * math.pi) or panel < 1e-6:
            break
        panel *= 0.5
    a_end, b_end = _ab_from_M(M, t, s)
    log_a = math.log(abs(a_end)) + 1j * float(np.sum(dphi))
    if f.is_zero():
        a, b = np.ones_like(a), np.zeros_like(b)
        a_end, b_end, log_a = 1.0, 0.0, 0.0
    weights = (0.5 * h_sub[:, None] * w[None, :]).ravel()
    return Trace(u.ravel(), weights, np.repeat(q_sub, quad.order), a.ravel(), b.ravel(),
                 complex(a_end), complex(b_end), complex(log_a))


def _propagate_pieces(q, h, s, opts):
    M, _, hist = _backend.propagate_kernel(q, h, np.array([s + 0j]), record=True,
                                           threshold=opts.small_omega_threshold)
    return M[0], None, hist[:, 0], None


def log_a_identity_residual(f: Potential, t, s, quad=TimeQuadrature(), opts=DEFAULT_OPTIONS,
                            tol=1e-7):
    """log a(t, s) against int_0^t f(u) conj(b(u, s)) / a(u, s) e^{2ius} du.

    Also reports, as informational, the printed variant
    |a| - 1 - i arg a = 8 int_0^t f (b / conj a) e^{-2ius} du.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    s = float(s)
    tr = trace_ab(f, t, s, quad, opts)
    integrand = tr.q * np.conj(tr.b) / tr.a * np.exp(2j * tr.u * s)
    rhs = complex(np.dot(tr.weights, integrand))
    residual = abs(tr.log_a_end - rhs)
    printed_lhs = abs(tr.a_end) - 1 - 1j * tr.log_a_end.imag
    printed_rhs = 8 * np.conj(rhs)
    report = DiagnosticReport("log_a_identity")
    report.add("corrected_residual", residual, tol)
    report.add("printed_form_residual", abs(printed_lhs - printed_rhs), 0.0,
               relation=">", informational=True)
    report.data.update({"log_a": tr.log_a_end, "integral": rhs, "residual": residual,
                        "printed_lhs": printed_lhs, "printed_rhs": printed_rhs,
                        "arg_a": tr.log_a_end.imag})
    return report


def section4_ode_residuals(f: Potential, t, s, h=1e-4, opts=DEFAULT_OPTIONS, tol=1e-7):
    """Central differences of |a| and arg a in t versus closed derivative forms.

    Oracle: a' = f e^{2its} conj(b), so d|a|/dt = Re(conj(a) a') / |a| and
    d arg a / dt = Im(a' / a). The printed variants
    2f Re(E^2 + E~^2) / |a|^2 and -2f Im(E^2 + E~^2) / |a|^2 are reported as
    informational residuals.
    """
    s = float(s)
    ts = np.array([t - h, t, t + h])
    vals = [ab_arrays(f, tt, np.array([s + 0j]), opts) for tt in ts]
    a = np.array([v[0][0] for v in vals])
    b = vals[1][1][0]
    q = float(f.propagation_values(t, opts.step_budget)) if t < f.support_end else 0.0
    d_abs = (abs(a[2]) - abs(a[0])) / (2 * h)
    d_arg = float(np.angle(a[2] / a[0])) / (2 * h)
    ap = q * np.exp(2j * t * s) * np.conj(b)
    oracle_abs = (np.conj(a[1]) * ap).real / abs(a[1])
    oracle_arg = (ap / a[1]).imag
    M, _, _, _ = propagate_arrays(f, 0.0, t, np.array([s + 0j]), opts)
    E = M[0, 0, 0] - 1j * M[0, 1, 0]
    Et = M[0, 0, 1] - 1j * M[0, 1, 1]
    sq = E * E + Et * Et
    printed_abs = 2 * q * sq.real / abs(a[1]) ** 2
    printed_arg = -2 * q * sq.imag / abs(a[1]) ** 2
    report = DiagnosticReport("section4_ode")
    report.add("abs_a_residual", abs(d_abs - oracle_abs), tol)
    report.add("arg_a_residual", abs(d_arg - oracle_arg), tol)
    report.add("printed_abs_residual", abs(d_abs - printed_abs), 0.0, relation=">",
               informational=True)
    report.add("printed_arg_residual", abs(d_arg - printed_arg), 0.0, relation=">",
               informational=True)
    report.data.update({"d_abs_a": d_abs, "d_arg_a": d_arg, "oracle_abs": oracle_abs,
                        "oracle_arg": oracle_arg, "printed_abs": printed_abs,
                        "printed_arg": printed_arg})
    return report


def equivalence_surface(f: Potential, t, s_grid, y_grid, quad=TimeQuadrature(),
                        opts=DEFAULT_OPTIONS):
    """I(t, s, y) = int_0^t f(u) b(u, s) / conj(a(u, s)) e^{-2iuy} du on a grid.

    Rows follow s_grid, columns y_grid.
    """
    s_grid = np.atleast_1d(np.asarray(s_grid, dtype=float))
    y_grid = np.atleast_1d(np.asarray(y_grid, dtype=float))
    out = np.zeros((s_grid.size, y_grid.size), dtype=complex)
    if f.is_zero() or t <= 0:
        return out
    for i, s in enumerate(s_grid):
        tr = trace_ab(f, t, s, quad, opts)
        g = tr.weights * tr.q * tr.b / np.conj(tr.a)
        out[i] = np.exp(-2j * np.outer(y_grid, tr.u)) @ g
    return out


def local_asymptotic_residual(f: Potential, s, t1, t2, C, grid_n=16, max_fit_error=0.5,
                              dt_max=0.05, opts=DEFAULT_OPTIONS):
    """Compare a_{t1->t2}(s) with e^{i(t2-t1)s} alpha2 conj(alpha1) (1 + i eps1 coth(2 t1 y1)).

    ``max_fit_error`` bounds the relative sup error of both sine fits.
    """
    if not 0 < t1 <= t2:
        raise ValueError("need 0 < t1 <= t2")
    fit1 = sine_fit(f, t1, s, C, grid_n, opts=opts)
    traj = track_zero(f, t1, t2, fit1["zero_used"], dt_max=dt_max, s=s, C=C, opts=opts)
    fit2 = fit1 if t2 == t1 else sine_fit(f, t2, s, C, grid_n, w=fit1["w"], opts=opts)
    for fit in (fit1, fit2):
        rel = fit["sup_error"] / fit["scale"]
        if rel > max_fit_error:
            raise FitQualityTooLow(f"relative sine-fit error {rel:.3g} exceeds {max_fit_error:g}")
    if abs(fit2["zero_used"] - traj.zeros[-1]) > 1e-6 * (1 + abs(traj.zeros[-1])):
        raise NoZeroInBox("tracked zero is not the one nearest to s at t2")
    eps1, eps2 = increments(traj, s, t1, t2)
    y1 = -traj.zeros[0].imag
    a_loc = complex(local_scattering(f, t1, t2, float(s), opts).a)
    model = (np.exp(1j * (t2 - t1) * s) * fit2["alpha"] * np.conj(fit1["alpha"])
             * (1 + 1j * eps1 / math.tanh(2 * t1 * y1)))
    residual = abs(a_loc - model)
    scale = eps1 ** 2 + eps2 ** 2
    report = DiagnosticReport("local_asymptotic")
    report.add("residual", residual, math.inf, informational=True)
    report.add("eps_sq", scale, math.inf, informational=True)
    report.add("ty_in_range", t1 * y1, 2.0, relation=">", informational=True)
    report.data.update({"residual": residual, "eps1": eps1, "eps2": eps2, "eps_sq": scale,
                        "a_local": a_loc, "model": complex(model), "trajectory": traj})
    return report
