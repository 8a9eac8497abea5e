"""Exact-step propagation of the real Dirac system.

On an interval where f = q is constant the transfer matrix obeys
M' = G M with G = [[q, -z], [z, -q]], so one step of length h is

    exp(hG) = cosh(h w) I + sinh(h w) / w * G,    w^2 = q^2 - z^2.

Both coefficients are even in w, so the branch of the square root does not
matter. Products of these steps give M(t, z) exactly for piecewise-constant
potentials; smooth presets are reduced to their midpoint approximant.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _backend
from .potential import Potential, abs_integral


@dataclass(frozen=True)
class PropagationOptions:
    step_budget: int = 200
    with_derivative: bool = False
    small_omega_threshold: float = 1e-4

    def __post_init__(self):
        if int(self.step_budget) < 1:
            raise ValueError("step_budget must be >= 1")
        if not 0 < self.small_omega_threshold < 1:
            raise ValueError("small_omega_threshold must lie in (0, 1)")


DEFAULT_OPTIONS = PropagationOptions()


@dataclass(frozen=True)
class TransferMatrix:
    """Entries of M = [[A, B], [C, D]]; scalars or equally shaped arrays."""

    a11: object
    a12: object
    a21: object
    a22: object

    @classmethod
    def from_array(cls, M, shape=()):
        M = np.asarray(M)
        parts = [M[..., i, j].reshape(shape) for i in (0, 1) for j in (0, 1)]
        if shape == ():
            parts = [p.item() for p in parts]
        return cls(*parts)

    @property
    def A(self):
        return self.a11

    @property
    def B(self):
        return self.a12

    @property
    def C(self):
        return self.a21

    @property
    def D(self):
        return self.a22

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def as_array(self):
        return np.stack(
            [np.stack([np.asarray(self.a11), np.asarray(self.a12)], -1),
             np.stack([np.asarray(self.a21), np.asarray(self.a22)], -1)], -2)


def step_exact(q, h, z, threshold=DEFAULT_OPTIONS.small_omega_threshold):
    """exp(h G) for constant potential q over a step of length h."""
    if not h > 0:
        raise ValueError("step length must be positive")
    M, _, _ = _backend.propagate_kernel(np.array([float(q)]), np.array([float(h)]),
                                        np.atleast_1d(np.asarray(z, dtype=complex)),
                                        threshold=threshold)
    return TransferMatrix.from_array(M, np.shape(z))


def propagate_arrays(f: Potential, t0, t1, z, opts=DEFAULT_OPTIONS, M0=None, D0=None,
                     record=False, with_derivative=None):
    """Raw propagation over [t0, t1] for a flat array of z.

    Returns (M, D, history, pieces) where pieces = (q, h) is the partition
    used; history[k] is M at the k-th partition node when ``record`` is set.
    """
    if with_derivative is None:
        with_derivative = opts.with_derivative
    q, h = f.pieces(t0, t1, opts.step_budget)
    M, D, hist = _backend.propagate_kernel(
        q, h, np.ascontiguousarray(np.ravel(z), dtype=complex), M0, D0,
        with_derivative=with_derivative, threshold=opts.small_omega_threshold, record=record)
    return M, D, hist, (q, h)


def propagate(f: Potential, t, z, opts=DEFAULT_OPTIONS, with_derivative=None):
    """M(t, z), and dM/dz when derivatives are requested.

    ``z`` may be a scalar or an array; entries of the result follow its shape.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    shape = np.shape(z)
    M, D, _, _ = propagate_arrays(f, 0.0, t, z, opts, with_derivative=with_derivative)
    out = TransferMatrix.from_array(M, shape)
    if D is None:
        return out
    return out, TransferMatrix.from_array(D, shape)


def transfer(f: Potential, t1, t2, z, opts=DEFAULT_OPTIONS, with_derivative=None):
    """M_{t1->t2}(z), propagated from the identity at t1 (no inversion)."""
    if not 0 <= t1 <= t2:
        raise ValueError("need 0 <= t1 <= t2")
    shape = np.shape(z)
    M, D, _, _ = propagate_arrays(f, t1, t2, z, opts, with_derivative=with_derivative)
    out = TransferMatrix.from_array(M, shape)
    if D is None:
        return out
    return out, TransferMatrix.from_array(D, shape)


def propagate_batch(f: Potential, t, zs, opts=DEFAULT_OPTIONS, threads=1, chunk=64):
    """Map ``propagate`` over a z-grid; the result does not depend on ``threads``."""
    zs = np.ravel(np.asarray(zs, dtype=complex))
    blocks = [zs[i:i + chunk] for i in range(0, zs.size, chunk)] or [zs]

    def work(block):
        return propagate_arrays(f, 0.0, t, block, opts)[0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    return np.concatenate(parts, axis=0)


# -- extended precision -----------------------------------------------------


def propagate_mp(f: Potential, t0, t1, z, dps=50, step_budget=DEFAULT_OPTIONS.step_budget,
                 ctx=None):
    """Arbitrary-precision M_{t0->t1}(z) for a single z.

    Returns a 2x2 nested list of mpc values of ``ctx`` (a private context at
    ``dps`` digits when omitted, so concurrent calls never share precision
    state). Used where double precision cannot resolve cancellation.
    """
    q, h = f.pieces(t0, t1, step_budget)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.dps = dps
    zz = ctx.mpc(z)
    M = [[ctx.mpc(1), ctx.mpc(0)], [ctx.mpc(0), ctx.mpc(1)]]
    for qk, hk in zip(q, h):
        qk = ctx.mpf(float(qk))
        hk = ctx.mpf(float(hk))
        w = ctx.sqrt(qk * qk - zz * zz)
        c = ctx.cosh(hk * w)
        s = hk if w == 0 else ctx.sinh(hk * w) / w
        P = [[c + s * qk, -s * zz], [s * zz, c - s * qk]]
        M = [[P[i][0] * M[0][j] + P[i][1] * M[1][j] for j in (0, 1)] for i in (0, 1)]
    return M


def growth_estimate(f: Potential, t, z):
    """Rough size of the entries of M(t, z): exp(int_0^t |f| + t |Im z|)."""
    l1 = abs_integral(f, 0.0, t).value
    return math.exp(min(700.0, l1 + t * abs(complex(z).imag)))
