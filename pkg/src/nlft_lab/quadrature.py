"""Deterministic quadrature helpers shared across modules."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float = 0.0
    domain_cutoff: float = math.nan

    def __float__(self):
        return float(self.value)


def simpson_doubling(fn, a, b, rtol=1e-10, n0=64, max_doublings=22):
    """Composite Simpson rule on [a, b], doubling panels until converged.

    ``fn`` must accept a numpy array. Returns a QuadratureResult whose
    error estimate is the Richardson difference |S_2n - S_n| / 15.
    """
    if b <= a:
        return QuadratureResult(0.0, 0.0)
    n = n0
    prev = _simpson(fn, a, b, n)
    for _ in range(max_doublings):
        n *= 2
        cur = _simpson(fn, a, b, n)
        diff = abs(cur - prev)
        if diff <= rtol * max(abs(cur), 1e-300) or diff == 0.0:
            return QuadratureResult(cur, diff / 15.0)
        prev = cur
    return QuadratureResult(cur, diff / 15.0)


def _simpson(fn, a, b, n):
    x = np.linspace(a, b, n + 1)
    y = np.asarray(fn(x), dtype=float)
    h = (b - a) / n
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


@lru_cache(maxsize=16)
def gauss_legendre(n):
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(edges, order):
    """Gauss-Legendre nodes and weights for consecutive panels.

    ``edges`` is an ascending array of panel endpoints. Returns flat arrays
    (nodes, weights) ordered panel by panel.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + hi) * 0.5 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def sine_integral_complement(x, tol=1e-16, max_iter=500):
    """pi/2 - Si(x) for x >= 0 (array).

    Power series below 2; above, the modified Lentz continued fraction for
    E1(ix), using pi/2 - Si(x) = -Im E1(ix).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 2.0
    xs = x[small]
    term = xs.copy()
    acc = xs.copy()
    for n in range(1, 40):
        term = -term * xs * xs / ((2 * n) * (2 * n + 1))
        acc = acc + term / (2 * n + 1)
    out[small] = 0.5 * math.pi - acc
    xl = x[~small]
    if xl.size:
        tiny = 1e-300
        b = 1.0 + 1j * xl
        c = np.full_like(b, 1.0 / tiny)
        d = 1.0 / b
        h = d.copy()
        for i in range(2, max_iter):
            a = -float((i - 1) ** 2)
            b = b + 2.0
            d = 1.0 / (a * d + b)
            c = b + a / c
            delta = c * d
            h = h * delta
            if np.all(np.abs(delta - 1.0) < tol):
                break
        h = (np.cos(xl) - 1j * np.sin(xl)) * h
        out[~small] = -h.imag
    return out


def cos_over_square_tail(omega, S):
    """int_S^inf cos(omega s) / s^2 ds for omega >= 0, S > 0."""
    omega = np.asarray(omega, dtype=float)
    x = omega * S
    return np.cos(x) / S - omega * sine_integral_complement(x)
