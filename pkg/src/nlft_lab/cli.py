"""Command-line front end: ``nlft-lab <command> [options]``."""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import (ExperimentConfig, load_config, parse_grid, parse_rect, threads_from_env,
                     with_overrides)
from .convergence import (convergence_scan, equivalence_surface, log_a_identity_residual)
from .errors import ConfigError, NLFTError, TailNotConverged
from .potential import Potential
from .propagator import propagate_arrays
from .report import DiagnosticReport
from .scattering import ab_arrays, hb_arrays, verify_identities
from .serialize import write_csv, write_summary
from .spectral import kernel_K, kernel_proximity, nonlinear_parseval_residual, sinc_kernel
from .zeros import (grid_zero_oracle, lemma1_detect, lemma1_ratio, lemma1_verify, locate_zeros,
                    theta_eval, track_zero, winding_count)

COMMANDS = ("verify", "nlft", "parseval", "kernels", "zeros", "converge", "freecase")
GRID_TARGET = {"verify": "z_re", "nlft": "s", "kernels": "T", "zeros": "s", "converge": "T",
               "parseval": None, "freecase": None}


def pmap(fn, items, threads):
    """Order-preserving map; results do not depend on ``threads``."""
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _rel(x, ref):
    return abs(x - ref) / max(1.0, abs(ref))


# -- commands -----------------------------------------------------------------


def cmd_verify(cfg: ExperimentConfig, f: Potential, out: Path, threads: int):
    t = cfg.horizon(f)
    rng = np.random.default_rng(cfg.seed)
    n_c = cfg.samples // 2
    r = 5.0 * np.sqrt(rng.uniform(size=n_c))
    zs = list(r * np.exp(2j * np.pi * rng.uniform(size=n_c)))
    zs += list(rng.uniform(-5, 5, size=cfg.samples - n_c) + 0j)
    grid = cfg.grid("z_re")[None, :] + 1j * cfg.grid("z_im")[:, None]
    zs += list(grid.ravel())
    tol = {k: cfg.tolerances[k] for k in ("det", "wronskian", "unimodular")}
    per = pmap(lambda z: verify_identities(f, t, [z], tol), zs, threads)
    ident = DiagnosticReport("identities")
    rows = []
    for k, (z, rep) in enumerate(zip(zs, per)):
        vals = {c.name.split("[")[0]: c.value for c in rep.checks}
        for c in rep.checks:
            ident.add(c.name.replace("[0]", f"[{k}]"), c.value, c.tolerance, c.relation)
        rows.append((k, z.real, z.imag, vals.get("det", math.nan),
                     vals.get("wronskian", math.nan), vals.get("unimodular", math.nan)))
    write_csv(out / "verify.csv", ["k", "re_z", "im_z", "det", "wronskian", "unimodular"], rows)
    # propagator invariants: semigroup and conjugation symmetry
    inv = DiagnosticReport("propagator")
    t1s = rng.uniform(0, t, size=16)
    zq = 5.0 * np.sqrt(rng.uniform(size=16)) * np.exp(2j * np.pi * rng.uniform(size=16))
    for k, (t1, z) in enumerate(zip(t1s, zq)):
        zz = np.array([z])
        M = propagate_arrays(f, 0.0, t, zz)[0][0]
        M1 = propagate_arrays(f, 0.0, t1, zz)[0][0]
        T12 = propagate_arrays(f, t1, t, zz)[0][0]
        scale = max(1.0, float(np.abs(M).max()))
        inv.add(f"semigroup[{k}]", float(np.abs(T12 @ M1 - M).max()) / scale,
                cfg.tolerances["semigroup"])
        Mc = propagate_arrays(f, 0.0, t, np.conj(zz))[0][0]
        inv.add(f"conjugation[{k}]", float(np.abs(Mc - np.conj(M)).max()) / scale,
                cfg.tolerances["semigroup"])
    return [ident, inv]


def cmd_nlft(cfg, f, out, threads):
    t = cfg.horizon(f)
    s = cfg.grid("s")
    a, b = ab_arrays(f, t, s.astype(complex))
    rep = DiagnosticReport("nlft")
    rows = []
    for sk, ak, bk in zip(s, a, b):
        rep.add(f"unimodular[s={sk:.17g}]", abs(abs(ak) ** 2 - abs(bk) ** 2 - 1),
                cfg.tolerances["unimodular"] * max(1.0, abs(ak) ** 2))
        fd = bk / ak
        rows.append((sk, ak.real, ak.imag, bk.real, bk.imag, fd.real, fd.imag))
    write_csv(out / "nlft.csv", ["s", "re_a", "im_a", "re_b", "im_b", "re_f_dagger",
                                 "im_f_dagger"], rows)
    return [rep]


def cmd_parseval(cfg, f, out, threads):
    t = cfg.horizon(f)
    try:
        rep = nonlinear_parseval_residual(f, t, tol=cfg.tolerances["parseval"],
                                          normalization=cfg.normalization)
    except TailNotConverged as exc:
        rep = DiagnosticReport("nonlinear_parseval")
        rep.add("tail_converged", math.nan, 0.0)
        rep.data["error"] = str(exc)
        return [rep]
    write_csv(out / "parseval.csv", ["s", "log_abs_a"], zip(rep["s"], rep["log_abs_a"]))
    rep.add("lhs", rep["lhs"], math.inf, informational=True)
    rep.add("rhs", rep["rhs"], math.inf, informational=True)
    return [rep]


def cmd_kernels(cfg, f, out, threads):
    ts = cfg.grid("T")
    C, n = cfg.grids["box_C"], int(cfg.grids["box_n"])
    reps = pmap(lambda t: kernel_proximity(f, cfg.s, C, t, n), ts, threads)
    sup = [r["sup_discrepancy"] for r in reps]
    write_csv(out / "kernels.csv", ["t", "sup_discrepancy"], zip(ts, sup))
    rep = DiagnosticReport("kernel_proximity")
    for t, v in zip(ts, sup):
        rep.add(f"sup_discrepancy[t={t:g}]", v, math.inf, informational=True)
    if len(sup) > 1:
        rep.add("trend_last_minus_first", sup[-1] - sup[0], 0.0)
    return [rep]


def cmd_zeros(cfg, f, out, threads):
    t = cfg.horizon(f)
    rect = cfg.rect
    tol = cfg.tolerances["zero"]
    rep = DiagnosticReport("zeros")
    n_wind = winding_count(f, t, rect)
    zs = locate_zeros(f, t, rect, tol)
    oracle = grid_zero_oracle(f, t, rect)
    rep.add("winding_minus_oracle", abs(n_wind - len(oracle)), 0.0)
    rep.add("located_minus_winding", abs(len(zs) - n_wind), 0.0)
    rows = []
    for k, z in enumerate(zs):
        absE = float(abs(hb_arrays(f, t, np.array([z]))[0][0]))
        rep.add(f"abs_E[{k}]", absE, tol)
        rep.add(f"im_z[{k}]", z.imag, 0.0, relation="<=")
        rows.append((k, z.real, z.imag, absE))
    write_csv(out / "zeros.csv", ["k", "re_z", "im_z", "abs_E"], rows)
    if cfg.track_span > 0 and zs:
        trows = []
        for k, z in enumerate(zs):
            traj = track_zero(f, t, t + cfg.track_span, z, s=cfg.s, C=cfg.grids["box_C"])
            rep.add(f"track_residual_max[{k}]", max(traj.residuals), tol)
            trows += [(k, *r) for r in traj.rows()]
        write_csv(out / "trajectories.csv", ["k", "t", "re_z", "im_z", "residual",
                                             "box_status"], trows)
    lrows = []
    for x in cfg.grid("s"):
        y = x + 0.1
        ratio = lemma1_ratio(f, t, x, y)
        ball = lemma1_detect(f, t, x, y, cfg.eps, cfg.eps0)
        verified = lemma1_verify(f, t, ball) if ball is not None else False
        if ball is not None:
            rep.add(f"lemma1_ball_holds_zero[x={x:g}]", float(verified), 0.5, relation=">")
        lrows.append((x, y, ratio, int(ball is not None), int(verified)))
    write_csv(out / "lemma1.csv", ["x", "y", "ratio", "triggered", "verified"], lrows)
    return [rep]


def cmd_converge(cfg, f, out, threads):
    t = cfg.horizon(f)
    Ts = cfg.grid("T")
    scan = convergence_scan(f, cfg.s, Ts)
    write_csv(out / "scan.csv", ["T", "re_f_dagger", "im_f_dagger", "cauchy_modulus"], scan.rows())
    rep = DiagnosticReport("converge")
    if math.isfinite(f.support_end) and Ts[0] >= f.support_end:
        rep.add("frozen_past_support", scan.cauchy_moduli[0], 1e-13)
    for k, c in enumerate(scan.cauchy_moduli):
        rep.add(f"cauchy_modulus[{k}]", c, math.inf, informational=True)
    ident = log_a_identity_residual(f, t, cfg.s, tol=cfg.tolerances["log_a"])
    s_grid, y_grid = cfg.grid("s"), cfg.grid("y")
    surf = np.array(pmap(lambda s: equivalence_surface(f, t, [s], y_grid)[0], s_grid, threads))
    rows = [(s, y, surf[i, j].real, surf[i, j].imag)
            for i, s in enumerate(s_grid) for j, y in enumerate(y_grid)]
    write_csv(out / "surface.csv", ["s", "y", "re_I", "im_I"], rows)
    for s in s_grid:
        diag = equivalence_surface(f, t, [s], [s])[0, 0]
        la = log_a_identity_residual(f, t, s)["log_a"]
        rep.add(f"diagonal[s={s:g}]", abs(diag - np.conj(la)), cfg.tolerances["log_a"])
    return [rep, ident]


def freecase_report(ts=(0.5, 1.0, 5.0), zs=None, tol=1e-12):
    """Closed-form exactness for f = 0. Errors are relative to max(1, |reference|)."""
    if zs is None:
        zs = [0, np.pi, -np.pi, 1j, -1j, 1 + 0.5j, -1 - 0.5j, 2.5 - 0.7j, -0.3 + 2j]
    zs = np.asarray(zs, dtype=complex)
    f = Potential.zero()
    rep = DiagnosticReport("freecase")
    rows = []
    for t in ts:
        E, Et = hb_arrays(f, t, zs)
        a, b = ab_arrays(f, t, zs)
        e = np.exp(-1j * t * zs)
        K = kernel_K(f, t, zs[:, None], zs[None, :])
        S = sinc_kernel(t, zs[:, None], zs[None, :])
        for k, z in enumerate(zs):
            th = theta_eval(f, t, z).theta
            errs = {"E": _rel(E[k], e[k]), "E_tilde": _rel(Et[k], -1j * e[k]),
                    "a": _rel(a[k], 1.0), "b": abs(b[k]),
                    "theta": _rel(th, np.exp(2j * t * z)),
                    "K": max(_rel(K[k, j], S[k, j]) for j in range(zs.size))}
            for name, err in errs.items():
                rep.add(f"{name}[t={t:g},z={z.real:g}{z.imag:+g}i]", err, tol)
                rows.append((name, t, z.real, z.imag, err))
    return rep, rows


def cmd_freecase(cfg, f, out, threads):
    rep, rows = freecase_report(tol=cfg.tolerances["closed_form"])
    write_csv(out / "freecase.csv", ["quantity", "t", "re_z", "im_z", "error"], rows)
    return [rep]


HANDLERS = {"verify": cmd_verify, "nlft": cmd_nlft, "parseval": cmd_parseval,
            "kernels": cmd_kernels, "zeros": cmd_zeros, "converge": cmd_converge,
            "freecase": cmd_freecase}


# -- argument handling ----------------------------------------------------------


def _merge_dash_values(argv):
    """Allow '--rect -4,4,-3,-0.01' (argparse would read the value as a flag)."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--rect", "--grid") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="nlft-lab",
                                description="Numerical experiments for the non-linear "
                                            "Fourier transform of the real Dirac system.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--potential", help="potential spec, e.g. constant:q=1,T=1")
    p.add_argument("--preset", help="preset potential name (free, powerdecay, ...)")
    p.add_argument("--t", type=float, help="time horizon")
    p.add_argument("--s", type=float, help="real spectral point")
    p.add_argument("--rect", help="x0,x1,y0,y1 search rectangle")
    p.add_argument("--grid", help="start:stop:count for the command's main grid")
    p.add_argument("--threads", type=int, help="worker threads (env NLFT_LAB_THREADS)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="seed for randomized samples")
    p.add_argument("--normalization", choices=("printed", "plancherel"),
                   help="which Parseval form gates the parseval command")
    return p


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.potential and args.preset:
        raise ConfigError("potential", "give either --potential or --preset")
    pot = args.potential or args.preset
    grid_key = GRID_TARGET[args.command]
    if args.grid is not None:
        if grid_key is None:
            raise ConfigError("grid", f"'{args.command}' has no grid to override")
        parse_grid(args.grid, f"grids.{grid_key}")
    threads = args.threads if args.threads is not None else threads_from_env(cfg.threads)
    over = {"potential": pot, "t": args.t, "s": args.s,
            "rect": list(parse_rect(args.rect)) if args.rect else None,
            "output_dir": args.out, "seed": args.seed, "threads": threads,
            "normalization": args.normalization}
    if args.grid is not None:
        over[f"grids.{grid_key}"] = args.grid
    return with_overrides(cfg, **over)


def run(command, cfg: ExperimentConfig):
    """Run one command; returns (exit_status, summary_dict)."""
    f = cfg.build_potential()
    out = Path(cfg.output_dir) / command
    out.mkdir(parents=True, exist_ok=True)
    reports = HANDLERS[command](cfg, f, out, cfg.threads)
    summary = write_summary(out / "summary.json", command, cfg.as_dict(), reports)
    return (0 if summary["pass"] else 1), summary


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_merge_dash_values(argv))
    try:
        cfg = resolve_config(args)
        status, summary = run(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NLFTError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    failed = [c for c in summary["checks"] if not c["informational"] and not c["pass"]]
    print(f"{args.command}: {len(summary['checks'])} checks, {len(failed)} failed "
          f"-> {Path(cfg.output_dir) / args.command}")
    for c in failed[:10]:
        print(f"  FAIL {c['name']}: {c['value']} vs {c['tolerance']}")
    return status


if __name__ == "__main__":
    sys.exit(main())
