"""Spectral weight, reproducing kernels and the non-linear Parseval integral."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TailNotConverged
from .potential import Potential, l2_norm_sq
from .propagator import DEFAULT_OPTIONS
from .quadrature import QuadratureResult, cos_over_square_tail, panel_nodes
from .report import DiagnosticReport
from .scattering import ab_arrays, hb_arrays, hb_with_sharp

DEFAULT_T_W = 200.0


@dataclass(frozen=True)
class SpectralWeight:
    s: float
    w: float
    w_tilde: float
    t_used: float
    drift: float = 0.0


@dataclass(frozen=True)
class Box:
    """Q(s, half_width) = {z : |Re(s - z)| <= half_width, |Im z| <= half_width}."""

    s: float
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @classmethod
    def scaled(cls, s, C, t):
        return cls(float(s), C / t)

    def contains(self, z):
        z = np.asarray(z)
        return (np.abs(self.s - z.real) <= self.half_width) & (np.abs(z.imag) <= self.half_width)

    def grid(self, n):
        """n x n lattice of points covering the box, flattened."""
        x = np.linspace(self.s - self.half_width, self.s + self.half_width, n)
        y = np.linspace(-self.half_width, self.half_width, n)
        X, Y = np.meshgrid(x, y)
        return (X + 1j * Y).ravel()

    def rect(self):
        h = self.half_width
        return (self.s - h, self.s + h, -h, h)


def estimate_w(f: Potential, s, t_w=None, opts=DEFAULT_OPTIONS):
    """w(s) = 1 / |E(t_w, s)|^2 and w~(s) = 1 / |E~(t_w, s)|^2.

    Past the support of f, |E(t, s)| is constant in t, so compactly
    supported potentials give the exact stationary value. For other
    potentials ``drift`` reports |w(t_w) - w(t_w / 2)|.
    """
    if t_w is None:
        t_w = f.support_end if math.isfinite(f.support_end) else DEFAULT_T_W
    E, Et = hb_arrays(f, t_w, np.array([complex(s)]), opts)
    w, wt = 1.0 / abs(E[0]) ** 2, 1.0 / abs(Et[0]) ** 2
    drift = 0.0
    if t_w < f.support_end:
        E2, _ = hb_arrays(f, t_w / 2, np.array([complex(s)]), opts)
        drift = abs(w - 1.0 / abs(E2[0]) ** 2)
    return SpectralWeight(float(s), w, wt, float(t_w), drift)


# -- reproducing kernels ----------------------------------------------------

SINGULAR_RADIUS = 1e-8


def _hb_parts(f, t, pts, opts, with_derivative=False):
    """E and E# (and derivatives) at pts; one kernel call covers pts and conj(pts)."""
    out = hb_with_sharp(f, t, pts, opts, with_derivative=with_derivative)
    if with_derivative:
        (E, _, Es, _), (Ez, _, Esz, _) = out
        return E, Es, Ez, Esz
    return out[0], out[2]


def _split_time(f, t):
    """(t1, tau): E(t, z) = e^{-i tau z} E(t1, z) with tau the free stretch past the support."""
    t1 = min(t, f.support_end)
    return t1, t - t1


def _numerator(E_z, Es_z, E_w, Es_w, tau=0.0, d=0.0):
    """A(z) C(w) - C(z) A(w) written through E = A - iC and E# = A + iC.

    With E and E# taken at t1 and d = w - z, the free phases e^{+-i tau d}
    of the stretch past the support are applied as one factor each.
    """
    if tau == 0.0:
        return (E_z * Es_w - Es_z * E_w) / 2j
    return (E_z * Es_w * np.exp(1j * tau * d) - Es_z * E_w * np.exp(-1j * tau * d)) / 2j


def _sin(x):
    """sin through exponentials, matching the rounding of the free numerator."""
    return (np.exp(1j * x) - np.exp(-1j * x)) / 2j


def kernel_K(f: Potential, t, lam, z, opts=DEFAULT_OPTIONS, radius=SINGULAR_RADIUS):
    """K(t, lam, z) = (A(z) C(w) - C(z) A(w)) / (pi (w - z)), w = conj(lam).

    The numerator is evaluated as (E(z) E#(w) - E#(z) E(w)) / 2i, which is the
    same function but keeps the exact free evolution of E past the support.
    Inside ``radius`` of the diagonal w = z the derivative limit
    (E(z) E#'(z) - E#(z) E'(z)) / (2 pi i) = (A C' - C A') / pi is used.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    shape = np.broadcast(np.asarray(lam), np.asarray(z)).shape
    lam_a, z_a = np.broadcast_arrays(np.asarray(lam, dtype=complex), np.asarray(z, dtype=complex))
    w = np.conj(lam_a).ravel()
    zz = z_a.ravel()
    n = zz.size
    t1, tau = _split_time(f, t)
    diff = w - zz
    near = np.abs(diff) < radius
    if t1 > 0:
        E, Es, dE, dEs = _hb_parts(f, t1, np.concatenate([zz, w]), opts, with_derivative=True)
    else:
        E = Es = np.ones(2 * n, dtype=complex)
        dE = dEs = np.zeros(2 * n, dtype=complex)
    with np.errstate(all="ignore"):
        quotient = _numerator(E[:n], Es[:n], E[n:], Es[n:], tau, diff) / (np.pi * diff)
    # d/dw of the numerator at w = z; the tau terms come from the free phases
    limit = (_numerator(E[:n], Es[:n], dE[:n], dEs[:n]) + tau * E[:n] * Es[:n]) / np.pi
    out = np.where(near, limit, quotient)
    return out.reshape(shape).item() if shape == () else out.reshape(shape)


def sinc_kernel(t, lam, z):
    """Paley-Wiener kernel sin(t (w - z)) / (pi (w - z)), w = conj(lam)."""
    d = np.conj(np.asarray(lam, dtype=complex)) - np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        out = np.where(np.abs(d) < 1e-12, t / np.pi + 0 * d, np.sin(t * d) / (np.pi * d))
    return out.item() if out.shape == () else out


def kernel_proximity(f: Potential, s, C, t, grid_n=8, w=None, opts=DEFAULT_OPTIONS):
    """Sup over (lam, z) in Q(s, C/t)^2 of
    |A(z) C(conj lam) - C(z) A(conj lam) - sin(t (conj lam - z)) / w(s)|.
    """
    if not t > 0 or grid_n < 4:
        raise ValueError("need t > 0 and grid_n >= 4")
    if w is None:
        w = estimate_w(f, s, opts=opts).w
    box = Box.scaled(s, C, t)
    pts = box.grid(grid_n)
    # the box is symmetric about R, so conj(lam) runs over the same lattice;
    # rows index z, columns index w = conj(lam)
    t1, tau = _split_time(f, t)
    if t1 > 0:
        E, Es = _hb_parts(f, t1, pts, opts)
    else:
        E = Es = np.ones(pts.size, dtype=complex)
    diff = pts[None, :] - pts[:, None]
    lhs = _numerator(E[:, None], Es[:, None], E[None, :], Es[None, :], tau, diff)
    disc = np.abs(lhs - _sin(t * diff) / w)
    sup = float(disc.max())
    report = DiagnosticReport("kernel_proximity")
    report.add("sup_discrepancy", sup, math.inf, informational=True)
    report.add("normalized_discrepancy", sup / t, math.inf, informational=True)
    report.data.update({"s": s, "C": C, "t": t, "w": w, "sup_discrepancy": sup,
                        "normalized": sup / t, "grid_n": grid_n})
    return report


# -- non-linear Parseval ----------------------------------------------------


@dataclass(frozen=True)
class ParsevalQuadrature:
    gauss_order: int = 16
    initial_cutoff: float = 16.0
    tail_tol: float = 1e-9
    s_max_cap: float = 1e6
    panel_width: float = 0.5


def log_abs_a(f, t, s, opts=DEFAULT_OPTIONS):
    a, _ = ab_arrays(f, t, np.asarray(s, dtype=float).astype(complex), opts)
    return np.log(np.abs(a))


MAX_TAIL_JUMPS = 2000


def born_tail(f: Potential, t, S, opts=DEFAULT_OPTIONS):
    """First-order estimate of the integral of log|a(t, s)| over s > S.

    For piecewise-constant f with jumps J_j at t_j, the linear term of b is
    -(2is)^{-1} sum_j J_j e^{2is t_j}, so log|a| ~ |b|^2 / 2 and the tail is
    (1/8) sum_{j,k} J_j J_k int_S^inf cos(2 s |t_j - t_k|) / s^2 ds.
    The neglected terms are O(1/S^2).
    """
    q, h = f.pieces(0.0, t, opts.step_budget)
    pos = np.concatenate([[0.0], np.cumsum(h)])
    jumps = np.diff(np.concatenate([[0.0], q, [0.0]]))
    keep = jumps != 0.0
    pos, jumps = pos[keep], jumps[keep]
    if jumps.size > MAX_TAIL_JUMPS:
        # only the non-oscillating part
        return float(np.sum(jumps ** 2)) / (8.0 * S)
    omega = 2.0 * np.abs(pos[:, None] - pos[None, :])
    return float(jumps @ cos_over_square_tail(omega, S) @ jumps) / 8.0


def integrate_log_abs_a(f: Potential, t, quad=ParsevalQuadrature(), opts=DEFAULT_OPTIONS):
    """Integral of log|a(t, s)| over the real line.

    Gauss-Legendre panels on [-S, S] plus twice the first-order tail beyond S
    (the integrand is even in s). S is doubled until two successive values
    agree to ``tail_tol``.
    """
    if f.is_zero() or t == 0:
        return QuadratureResult(0.0, 0.0, 0.0), np.zeros(0), np.zeros(0)
    width = min(quad.panel_width, math.pi / (4.0 * t))

    def piece(lo, hi, order=quad.gauss_order):
        n = max(1, int(math.ceil((hi - lo) / width)))
        nodes, weights = panel_nodes(np.linspace(lo, hi, n + 1), order)
        both = np.concatenate([nodes, -nodes])
        vals = log_abs_a(f, t, both, opts)
        return float(np.dot(weights, vals[: nodes.size]) + np.dot(weights, vals[nodes.size:])), nodes, vals

    S = quad.initial_cutoff
    core, nodes, vals = piece(0.0, S)
    refine_err = abs(core - piece(0.0, S, quad.gauss_order // 2)[0])
    total = core
    prev = total + 2.0 * born_tail(f, t, S, opts)
    while True:
        if 2 * S > quad.s_max_cap:
            raise TailNotConverged(
                f"tail of the log|a| integral not converged before S = {quad.s_max_cap:g}")
        shell, _, _ = piece(S, 2 * S)
        total += shell
        S *= 2
        value = total + 2.0 * born_tail(f, t, S, opts)
        if abs(value - prev) < quad.tail_tol:
            err = abs(value - prev) + refine_err
            break
        prev = value
    s_all = np.concatenate([nodes, -nodes])
    order = np.argsort(s_all)
    return QuadratureResult(value, err, S), s_all[order], vals[order]


def nonlinear_parseval_residual(f: Potential, t, quad=ParsevalQuadrature(), opts=DEFAULT_OPTIONS,
                                tol=1e-6, normalization="printed"):
    """Compare the integral of log|a(t, .)| with ||f||^2 on (0, t).

    Two forms are reported: the bare identity ``lhs = ||f||^2`` and the
    Plancherel-normalised ``lhs = (pi/2) ||f||^2`` that holds for the
    e^{2ius} convention of the scattering coefficients. ``normalization``
    selects which one gates the report; the other is informational.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if normalization not in ("printed", "plancherel"):
        raise ValueError("normalization must be 'printed' or 'plancherel'")
    qr, s_grid, vals = integrate_log_abs_a(f, t, quad, opts)
    rhs = l2_norm_sq(f, 0.0, t).value
    scale = tol * max(1.0, rhs)
    report = DiagnosticReport("nonlinear_parseval")
    report.add("printed_residual", abs(qr.value - rhs), scale,
               informational=normalization != "printed")
    report.add("plancherel_residual", abs(qr.value - 0.5 * math.pi * rhs), scale,
               informational=normalization != "plancherel")
    report.add("min_log_abs_a", float(vals.min()) if vals.size else 0.0, -1e-12,
               relation=">")
    report.data.update({"lhs": qr.value, "rhs": rhs, "quadrature": qr,
                        "residual": abs(qr.value - rhs),
                        "s": s_grid, "log_abs_a": vals})
    return report


# -- linearisation ----------------------------------------------------------


def fourier_linear(f: Potential, T, s, opts=DEFAULT_OPTIONS):
    """int_0^T f(u) e^{2ius} du over the propagator's constant pieces."""
    q, h = f.pieces(0.0, T, opts.step_budget)
    u1 = np.cumsum(h)
    u0 = u1 - h
    s = float(s)
    if s == 0.0:
        return complex(np.sum(q * h))
    return complex(np.sum(q * (np.exp(2j * s * u1) - np.exp(2j * s * u0)) / (2j * s)))


def linearization_error(f: Potential, T, s, eps_list, opts=DEFAULT_OPTIONS):
    """err(eps) = |b_{eps f}(T, s) - eps * int_0^T f(u) e^{2ius} du| and the
    log-log slope of err against eps."""
    lin = fourier_linear(f, T, s, opts)
    errs = []
    for eps in eps_list:
        if eps < 0:
            raise ValueError("eps must be non-negative")
        if eps == 0:
            errs.append(0.0)
            continue
        _, b = ab_arrays(f.scaled(eps), T, np.array([complex(s)]), opts)
        errs.append(abs(b[0] - eps * lin))
    eps_arr = np.asarray(eps_list, dtype=float)
    err_arr = np.asarray(errs)
    ok = (eps_arr > 0) & (err_arr > 0)
    slope = float(np.polyfit(np.log(eps_arr[ok]), np.log(err_arr[ok]), 1)[0]) if ok.sum() >= 2 else math.nan
    report = DiagnosticReport("linearization")
    for eps, e in zip(eps_list, errs):
        report.add(f"err[eps={eps:g}]", e, math.inf, informational=True)
    report.add("slope", slope, 1.9, relation=">")
    report.data.update({"eps": list(eps_list), "errors": errs, "slope": slope, "linear_term": lin})
    return report
