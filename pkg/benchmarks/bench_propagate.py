"""Compare the compiled propagation kernel with the numpy fallback.

Usage: python benchmarks/bench_propagate.py [--pieces N] [--points M] [--repeat R]
"""
import argparse
import time

import numpy as np

from nlft_lab import _kernels_py

try:
    from nlft_lab import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pieces", type=int, default=2000)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    q = rng.uniform(-2, 2, args.pieces)
    h = np.full(args.pieces, 4.0 / args.pieces)
    z = rng.uniform(-5, 5, args.points) + 1j * rng.uniform(-1, 1, args.points)

    print(f"{args.pieces} pieces x {args.points} spectral points, best of {args.repeat}")
    rows = []
    for deriv in (False, True):
        t_py, (M_py, D_py, _) = best_of(
            lambda: _kernels_py.propagate(q, h, z, with_derivative=deriv), args.repeat)
        line = f"  derivative={deriv!s:5}  python {t_py * 1e3:9.2f} ms"
        if _kernels is not None:
            t_c, (M_c, D_c, _) = best_of(
                lambda: _kernels.propagate(q, h, z, with_derivative=deriv), args.repeat)
            diff = np.max(np.abs(M_c - M_py) / np.maximum(1.0, np.abs(M_py)))
            line += f"  compiled {t_c * 1e3:9.2f} ms  speedup {t_py / t_c:6.1f}x  max rel diff {diff:.1e}"
        rows.append(line)
        print(line)
    if _kernels is None:
        print("  compiled extension not built; only the numpy kernel was timed")
    return rows


if __name__ == "__main__":
    main()
