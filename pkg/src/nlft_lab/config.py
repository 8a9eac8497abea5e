"""Experiment configuration: YAML key tree, validation with field paths."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from .errors import ConfigError
from .potential import Potential, parse_potential

DEFAULT_TOLERANCES = {
    "det": 1e-12,
    "wronskian": 1e-10,
    "unimodular": 1e-12,
    "closed_form": 1e-12,
    "parseval": 1e-6,
    "log_a": 1e-7,
    "zero": 1e-11,
    "semigroup": 1e-10,
}

DEFAULT_GRIDS = {
    "z_re": "-5:5:11",
    "z_im": "-1:1:5",
    "s": "-3:3:13",
    "y": "-1:1:5",
    "T": [20.0, 40.0, 80.0],
    "box_C": 5.0,
    "box_n": 8,
}

KNOWN_KEYS = {"potential", "t", "s", "rect", "seed", "output_dir", "threads", "tolerances",
              "grids", "samples", "normalization", "track_span", "eps", "eps0"}


def parse_grid(spec, path="grid"):
    """'start:stop:count' or a list of numbers -> float array."""
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return np.array([float(spec)])
    if isinstance(spec, (list, tuple)):
        try:
            arr = np.asarray([float(x) for x in spec])
        except (TypeError, ValueError):
            raise ConfigError(path, "grid list must contain numbers") from None
    elif isinstance(spec, str):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(path, f"expected start:stop:count, got {spec!r}")
        try:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(path, f"malformed grid {spec!r}") from None
        if n < 1:
            raise ConfigError(path, "count must be >= 1")
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ConfigError(path, "grid values must be finite")
        arr = np.linspace(a, b, n)
    else:
        raise ConfigError(path, "grid must be 'start:stop:count' or a list")
    if arr.size == 0:
        raise ConfigError(path, "grid is empty")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(path, "grid values must be finite")
    return arr


def parse_rect(spec, path="rect"):
    if isinstance(spec, str):
        spec = spec.split(",")
    try:
        vals = [float(x) for x in spec]
    except (TypeError, ValueError):
        raise ConfigError(path, "expected four numbers x0,x1,y0,y1") from None
    if len(vals) != 4:
        raise ConfigError(path, "expected four numbers x0,x1,y0,y1")
    if not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise ConfigError(path, "need x0 < x1 and y0 < y1")
    return tuple(vals)


@dataclass(frozen=True)
class ExperimentConfig:
    potential: str = "constant:q=1,T=1"
    t: Optional[float] = None
    s: float = 0.0
    rect: tuple = (-4.0, 4.0, -3.0, -0.01)
    seed: int = 0
    output_dir: str = "nlft_out"
    threads: int = 1
    samples: int = 200
    normalization: str = "printed"
    track_span: float = 0.0
    eps: float = 0.05
    eps0: float = 0.1
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    grids: dict = field(default_factory=lambda: dict(DEFAULT_GRIDS))

    def build_potential(self) -> Potential:
        try:
            return parse_potential(self.potential)
        except (ValueError, KeyError, OSError) as exc:
            raise ConfigError("potential", str(exc)) from None

    def horizon(self, f: Potential):
        if self.t is not None:
            return self.t
        return f.support_end if math.isfinite(f.support_end) and f.support_end > 0 else 1.0

    def grid(self, name):
        return parse_grid(self.grids[name], f"grids.{name}")

    def as_dict(self):
        return {
            "potential": self.potential, "t": self.t, "s": self.s, "rect": list(self.rect),
            "seed": self.seed, "output_dir": self.output_dir, "threads": self.threads,
            "samples": self.samples, "normalization": self.normalization,
            "track_span": self.track_span, "eps": self.eps, "eps0": self.eps0,
            "tolerances": dict(sorted(self.tolerances.items())),
            "grids": {k: (list(v) if isinstance(v, tuple) else v)
                      for k, v in sorted(self.grids.items())},
        }


def _num(value, path, positive=False, integer=False):
    if isinstance(value, bool):
        raise ConfigError(path, "expected a number")
    try:
        out = int(value) if integer else float(value)
    except (TypeError, ValueError):
        raise ConfigError(path, "expected a number") from None
    if integer and float(value) != out:
        raise ConfigError(path, "expected an integer")
    if not math.isfinite(out):
        raise ConfigError(path, "must be finite")
    if positive and out <= 0:
        raise ConfigError(path, "must be > 0")
    return out


def from_mapping(data) -> ExperimentConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a mapping")
    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    kw = {}
    if "potential" in data:
        if not isinstance(data["potential"], str):
            raise ConfigError("potential", "expected a potential spec string")
        kw["potential"] = data["potential"]
    if data.get("t") is not None:
        kw["t"] = _num(data["t"], "t", positive=True)
    if "s" in data:
        kw["s"] = _num(data["s"], "s")
    if "rect" in data:
        kw["rect"] = parse_rect(data["rect"])
    if "seed" in data:
        kw["seed"] = _num(data["seed"], "seed", integer=True)
    if "threads" in data:
        kw["threads"] = _num(data["threads"], "threads", positive=True, integer=True)
    if "samples" in data:
        kw["samples"] = _num(data["samples"], "samples", positive=True, integer=True)
    if "track_span" in data:
        kw["track_span"] = _num(data["track_span"], "track_span")
        if kw["track_span"] < 0:
            raise ConfigError("track_span", "must be >= 0")
    for key in ("eps", "eps0"):
        if key in data:
            kw[key] = _num(data[key], key, positive=True)
    if "normalization" in data:
        if data["normalization"] not in ("printed", "plancherel"):
            raise ConfigError("normalization", "must be 'printed' or 'plancherel'")
        kw["normalization"] = data["normalization"]
    if "output_dir" in data:
        if not isinstance(data["output_dir"], str) or not data["output_dir"]:
            raise ConfigError("output_dir", "expected a non-empty path")
        kw["output_dir"] = data["output_dir"]
    tol = dict(DEFAULT_TOLERANCES)
    raw_tol = data.get("tolerances") or {}
    if not isinstance(raw_tol, dict):
        raise ConfigError("tolerances", "expected a mapping")
    for name, val in raw_tol.items():
        tol[name] = _num(val, f"tolerances.{name}", positive=True)
    kw["tolerances"] = tol
    grids = dict(DEFAULT_GRIDS)
    raw_grids = data.get("grids") or {}
    if not isinstance(raw_grids, dict):
        raise ConfigError("grids", "expected a mapping")
    for name, val in raw_grids.items():
        if name in ("box_C",):
            grids[name] = _num(val, f"grids.{name}", positive=True)
        elif name == "box_n":
            grids[name] = _num(val, f"grids.{name}", positive=True, integer=True)
            if grids[name] < 4:
                raise ConfigError("grids.box_n", "must be >= 4")
        else:
            parse_grid(val, f"grids.{name}")
            grids[name] = val
    kw["grids"] = grids
    cfg = ExperimentConfig(**kw)
    cfg.build_potential()
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from None
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML: {exc}") from None
    return from_mapping(data)


def threads_from_env(default=1):
    raw = os.environ.get("NLFT_LAB_THREADS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("NLFT_LAB_THREADS", "expected a positive integer") from None
    if n < 1:
        raise ConfigError("NLFT_LAB_THREADS", "expected a positive integer")
    return n


def with_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Apply command-line overrides (None values are ignored) and revalidate."""
    data = cfg.as_dict()
    for key, val in overrides.items():
        if val is None:
            continue
        if key.startswith("grids."):
            data["grids"][key.split(".", 1)[1]] = val
        else:
            data[key] = val
    return from_mapping(data)


__all__ = ["ExperimentConfig", "load_config", "from_mapping", "parse_grid", "parse_rect",
           "threads_from_env", "with_overrides"]
