"""Real potentials driving the Dirac system.

A :class:`Potential` is an immutable description of a real function f on
[0, inf). Four representations are supported: a constant, a
piecewise-constant function, a uniformly sampled function (one value per
grid cell) and a named analytic preset. Every representation can be
truncated, integrated and reduced to a list of constant pieces for the
exact-step propagator.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .quadrature import QuadratureResult, simpson_doubling

INF = math.inf

# name -> (callable(t, params), default params)
PRESETS = {
    "free": (lambda t, p: np.zeros_like(t), {}),
    "powerdecay": (
        lambda t, p: p["amp"] * (1.0 + t) ** (-p["p"]),
        {"amp": 1.0, "p": 0.7},
    ),
    "gaussian": (
        lambda t, p: p["amp"] * np.exp(-0.5 * ((t - p["center"]) / p["width"]) ** 2),
        {"amp": 1.0, "center": 1.0, "width": 0.5},
    ),
    "oscdecay": (
        lambda t, p: p["amp"] * np.cos(p["omega"] * t) * (1.0 + t) ** (-p["p"]),
        {"amp": 1.0, "omega": 1.0, "p": 0.7},
    ),
}

KINDS = ("constant", "piecewise", "sampled", "preset")


@dataclass(frozen=True)
class Potential:
    """Immutable real potential f on [0, support_end).

    Use the classmethod constructors rather than instantiating directly.
    """

    kind: str
    q: float = 0.0
    breaks: tuple = ()
    values: tuple = ()
    grid_step: float = 0.0
    samples: tuple = ()
    name: str = ""
    params: tuple = ()
    offset: float = 0.0
    support_end: float = INF
    _samples_arr: np.ndarray = field(default=None, repr=False, compare=False)

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, q, T=INF):
        return cls(kind="constant", q=float(q), support_end=_nonneg(T, "T"))

    @classmethod
    def zero(cls):
        return cls(kind="constant", q=0.0, support_end=0.0)

    @classmethod
    def piecewise(cls, breaks, values):
        breaks = tuple(float(b) for b in breaks)
        values = tuple(float(v) for v in values)
        if len(breaks) < 2 or len(values) != len(breaks) - 1:
            raise ValueError("piecewise potential needs len(values) == len(breaks) - 1 >= 1")
        if breaks[0] < 0 or any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
            raise ValueError("breaks must be non-negative and strictly ascending")
        if not all(math.isfinite(v) for v in values + breaks):
            raise ValueError("breaks and values must be finite")
        return cls(kind="piecewise", breaks=breaks, values=values, support_end=breaks[-1])

    @classmethod
    def sampled(cls, grid_step, samples):
        """Sample k is the value on the cell [k*grid_step, (k+1)*grid_step)."""
        grid_step = float(grid_step)
        if not grid_step > 0:
            raise ValueError("grid_step must be positive")
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise ValueError("samples must be a finite 1-d sequence")
        arr.setflags(write=False)
        return cls(
            kind="sampled",
            grid_step=grid_step,
            samples=tuple(arr.tolist()),
            support_end=grid_step * len(arr),
            _samples_arr=arr,
        )

    @classmethod
    def preset(cls, name, support_end=INF, **params):
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
        merged = dict(PRESETS[name][1])
        offset = float(params.pop("offset", 0.0))
        unknown = set(params) - set(merged)
        if unknown:
            raise ValueError(f"unknown parameters for preset {name!r}: {sorted(unknown)}")
        merged.update({k: float(v) for k, v in params.items()})
        end = 0.0 if name == "free" else _nonneg(support_end, "support_end")
        return cls(kind="preset", name=name, params=tuple(sorted(merged.items())),
                   offset=offset, support_end=end)

    @classmethod
    def from_csv(cls, path):
        """Load a two-column (t, f(t)) CSV with a fixed grid step."""
        ts, fs = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    t, v = float(row[0]), float(row[1])
                except ValueError:
                    continue  # header line
                ts.append(t)
                fs.append(v)
        if len(ts) < 2:
            raise ValueError(f"{path}: need at least two samples")
        steps = np.diff(ts)
        h = float(steps.mean())
        if not np.allclose(steps, h, rtol=1e-6, atol=0.0):
            raise ValueError(f"{path}: samples are not on a fixed grid")
        return cls.sampled(h, fs)

    # -- basic queries ----------------------------------------------------

    @property
    def preset_params(self) -> Mapping[str, float]:
        return dict(self.params)

    def is_zero(self):
        """True when f vanishes identically (algebraically, not numerically)."""
        if self.support_end == 0.0:
            return True
        if self.kind == "constant":
            return self.q == 0.0
        if self.kind == "piecewise":
            return all(v == 0.0 for v in self.values)
        if self.kind == "sampled":
            return not np.any(self._samples_arr)
        return self.name == "free" or self.preset_params.get("amp", 1.0) == 0.0

    def evaluate(self, t):
        """Value of f at t (scalar or array); 0 outside the support."""
        scalar = np.ndim(t) == 0
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("potential is defined for t >= 0 only")
        out = self._raw(t)
        out = np.where(t < self.support_end, out, 0.0)
        return float(out) if scalar else out

    __call__ = evaluate

    def _raw(self, t):
        if self.kind == "constant":
            return np.full_like(t, self.q)
        if self.kind == "piecewise":
            b = np.asarray(self.breaks)
            v = np.asarray(self.values + (0.0,))
            idx = np.searchsorted(b, t, side="right") - 1
            inside = idx >= 0
            return np.where(inside, v[np.clip(idx, 0, len(v) - 1)], 0.0)
        if self.kind == "sampled":
            arr = self._samples_arr
            idx = np.floor(t / self.grid_step).astype(np.int64)
            ok = (idx >= 0) & (idx < arr.size)
            return np.where(ok, arr[np.clip(idx, 0, arr.size - 1)], 0.0)
        fn = PRESETS[self.name][0]
        return fn(t + self.offset, self.preset_params) + 0.0 * t

    def truncate(self, T):
        """f_T = f on [0, T), zero afterwards."""
        return replace(self, support_end=min(self.support_end, _nonneg(T, "T")))

    def shifted(self, t1):
        """The potential u -> f(u + t1) on [0, support_end - t1)."""
        t1 = _nonneg(t1, "t1")
        end = max(self.support_end - t1, 0.0)
        if self.kind == "constant":
            return replace(self, support_end=end)
        if self.kind == "preset":
            return replace(self, offset=self.offset + t1, support_end=end)
        cuts = [max(b - t1, 0.0) for b in self._exact_breaks()]
        cuts = sorted(set(c for c in cuts if c < end) | {0.0, end})
        if end == 0.0:
            return Potential.zero()
        mids = [(a + b) / 2 + t1 for a, b in zip(cuts, cuts[1:])]
        return Potential.piecewise(cuts, [float(self._raw(np.asarray(m))) for m in mids])

    def scaled(self, c):
        """The potential c * f."""
        c = float(c)
        if self.kind == "constant":
            return replace(self, q=self.q * c)
        if self.kind == "piecewise":
            return replace(self, values=tuple(v * c for v in self.values))
        if self.kind == "sampled":
            return Potential.sampled(self.grid_step, self._samples_arr * c).truncate(self.support_end)
        params = self.preset_params
        if "amp" in params:
            params["amp"] *= c
        return replace(self, params=tuple(sorted(params.items())))

    # -- propagation support ---------------------------------------------

    def _exact_breaks(self):
        if self.kind == "piecewise":
            return list(self.breaks)
        if self.kind == "sampled":
            return list(self.grid_step * np.arange(len(self.samples) + 1))
        return []

    def pieces(self, t0, t1, step_budget=200):
        """Constant pieces (q, h) covering [t0, t1] for the propagator.

        Exact for constant, piecewise and sampled kinds. Presets are replaced
        by their midpoint approximant on the global grid k / step_budget, so
        the pieces of adjacent windows compose exactly.
        """
        if t1 < t0:
            raise ValueError("need t0 <= t1")
        if t1 == t0:
            return np.zeros(0), np.zeros(0)
        end = self.support_end
        cuts = [t0, t1]
        if t0 < end < t1:
            cuts.append(end)
        if self.kind in ("piecewise", "sampled"):
            b = np.asarray(self._exact_breaks())
            cuts.extend(b[(b > t0) & (b < t1)].tolist())
        elif self.kind == "preset" and not self.is_zero():
            hi = min(t1, end)
            if hi > t0:
                k0 = math.floor(t0 * step_budget) + 1
                k1 = math.ceil(hi * step_budget) - 1
                if k1 >= k0:
                    cuts.extend((np.arange(k0, k1 + 1) / step_budget).tolist())
        cuts = np.unique(np.asarray(cuts, dtype=float))
        h = np.diff(cuts)
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        q = self.propagation_values(mids, step_budget)
        keep = h > 0
        return q[keep], h[keep]

    def propagation_values(self, t, step_budget=200):
        """Values of the piecewise-constant approximant the propagator sees."""
        t = np.asarray(t, dtype=float)
        if self.kind != "preset":
            return np.asarray(self.evaluate(t), dtype=float)
        cell_mid = (np.floor(t * step_budget) + 0.5) / step_budget
        vals = self._raw(cell_mid)
        return np.where(t < self.support_end, vals, 0.0)

    def breakpoints(self, t0, t1):
        """Discontinuities of f inside (t0, t1)."""
        pts = [b for b in self._exact_breaks() if t0 < b < t1]
        if t0 < self.support_end < t1:
            pts.append(self.support_end)
        return sorted(set(pts))


def _nonneg(x, label):
    x = float(x)
    if not x >= 0:
        raise ValueError(f"{label} must be >= 0")
    return x


# -- integrals --------------------------------------------------------------


def l2_norm_sq(f: Potential, t0, t1, rtol=1e-10):
    """Integral of f(u)^2 over [t0, t1].

    Exact for constant, piecewise and sampled kinds; composite Simpson with
    panel doubling for presets.
    """
    return _integral(f, t0, t1, lambda v: v * v, rtol)


def integral(f: Potential, t0, t1, rtol=1e-10):
    return _integral(f, t0, t1, lambda v: v, rtol)


def abs_integral(f: Potential, t0, t1, rtol=1e-10):
    return _integral(f, t0, t1, np.abs, rtol)


def _integral(f, t0, t1, g, rtol):
    if not 0 <= t0 <= t1:
        raise ValueError("need 0 <= t0 <= t1")
    hi = min(t1, f.support_end)
    if hi <= t0 or f.is_zero():
        return QuadratureResult(0.0, 0.0)
    if f.kind != "preset":
        q, h = f.pieces(t0, hi)
        return QuadratureResult(float(np.sum(g(q) * h)), 0.0)
    return simpson_doubling(lambda u: g(f._raw(u)), t0, hi, rtol=rtol)


def is_sigma_interval(f: Potential, t0, t1, sigma=0.01):
    """|int f| >= (1 - sigma) int |f| over (t0, t1)."""
    if not t0 < t1:
        raise ValueError("need t0 < t1")
    if not 0 < sigma < 1:
        raise ValueError("sigma must lie in (0, 1)")
    signed = integral(f, t0, t1).value
    total = abs_integral(f, t0, t1).value
    return abs(signed) >= (1.0 - sigma) * total


def parse_potential(spec: str) -> Potential:
    """Parse a compact potential description.

    Examples: ``free``, ``constant:q=1,T=1``, ``powerdecay:p=0.7``,
    ``piecewise:breaks=0;0.5;1,values=1;-1``, ``csv:path/to/file.csv``.
    """
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    head = head.strip()
    if head == "csv":
        return Potential.from_csv(rest)
    kv = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"malformed potential parameter {item!r}")
        kv[key.strip()] = val.strip()
    T = float(kv.pop("T", INF))
    if head == "constant":
        f = Potential.constant(float(kv.pop("q", 0.0)))
    elif head == "piecewise":
        breaks = [float(x) for x in kv.pop("breaks").split(";")]
        values = [float(x) for x in kv.pop("values").split(";")]
        f = Potential.piecewise(breaks, values)
    elif head == "sampled":
        samples = [float(x) for x in kv.pop("samples").split(";")]
        f = Potential.sampled(float(kv.pop("step")), samples)
    elif head in PRESETS:
        f = Potential.preset(head, **{k: float(v) for k, v in kv.items()})
        kv = {}
    else:
        raise ValueError(f"unknown potential kind {head!r}")
    if kv:
        raise ValueError(f"unused potential parameters: {sorted(kv)}")
    return f.truncate(T)
