"""Acceptance criteria, each checked at its stated tolerance and runtime budget."""
import cmath
import math
import time

import numpy as np
import pytest

from nlft_lab import (BlaschkeProduct, Potential, ab_coefficients, convergence_scan,
                      hermite_biehler, kernel_K, kernel_proximity, l2_norm_sq,
                      lemma1_detect, linearization_error, locate_zeros, log_a_identity_residual,
                      nlft_partial, propagate, sinc_kernel, theta_eval, track_zero,
                      winding_count)
from nlft_lab.cli import main as cli_main
from nlft_lab.spectral import estimate_w, integrate_log_abs_a
from nlft_lab.zeros import grid_zero_oracle, lemma1_verify, newton_E, velocity_residual

from conftest import random_piecewise, record_acceptance
from oracles import constant_ab, constant_E

FREE_Z = [0, math.pi, -math.pi, 1j, -1j, 1 + 0.5j, -1 - 0.5j, 2.5 - 0.7j, -0.3 + 2j]


def finish(number, ok, t0, limit, detail):
    elapsed = time.perf_counter() - t0
    passed = bool(ok) and elapsed < limit
    record_acceptance(number, passed, elapsed, limit, detail)
    assert ok, detail
    assert elapsed < limit, f"runtime {elapsed:.2f}s exceeds {limit}s"


def rel(x, ref):
    return abs(x - ref) / max(1.0, abs(ref))


def test_01_free_case_exactness():
    t0 = time.perf_counter()
    f = Potential.zero()
    worst = 0.0
    zs = np.array(FREE_Z, dtype=complex)
    for t in (0.5, 1.0, 5.0):
        pair = hermite_biehler(f, t, zs)
        ab = ab_coefficients(f, t, zs)
        K = kernel_K(f, t, zs[:, None], zs[None, :])
        S = sinc_kernel(t, zs[:, None], zs[None, :])
        for k, z in enumerate(zs):
            e = cmath.exp(-1j * t * z)
            worst = max(worst, rel(pair.E[k], e), rel(pair.E_tilde[k], -1j * e),
                        rel(ab.a[k], 1), abs(ab.b[k]),
                        rel(theta_eval(f, t, z).theta, cmath.exp(2j * t * z)),
                        max(rel(K[k, j], S[k, j]) for j in range(zs.size)))
    finish(1, worst < 1e-12, t0, 1.0, f"worst relative error {worst:.2e} (tol 1e-12)")


def test_02_constant_potential_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for q in (0.5, 1.0):
        f = Potential.constant(q)
        for s in (0.0, 1.0, 2.0):
            r = ab_coefficients(f, 1.0, s)
            a, b = constant_ab(q, 1.0, s)
            worst = max(worst, abs(r.a - a), abs(r.b - b))
        worst = max(worst, abs(nlft_partial(f, 1.0, 0.0) - math.tanh(q)))
    finish(2, worst < 1e-12, t0, 1.0, f"worst error {worst:.2e} (tol 1e-12)")


def test_03_determinant_invariants():
    t0 = time.perf_counter()
    from nlft_lab import verify_identities
    rng = np.random.default_rng(3)
    worst_det = worst_wr = 0.0
    for _ in range(200):
        f = random_piecewise(rng)
        t = float(rng.uniform(0.01, 4.0))
        z = 5 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
        rep = verify_identities(f, t, [z])
        worst_det = max(worst_det, rep.max_value("det"))
        worst_wr = max(worst_wr, rep.max_value("wronskian"))
    ok = worst_det < 1e-12 and worst_wr < 1e-10
    finish(3, ok, t0, 5.0, f"max |det M - 1| = {worst_det:.2e}, max Wronskian residual {worst_wr:.2e}")


def test_04_unimodularity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(200):
        f = random_piecewise(rng)
        t = float(rng.uniform(0.01, 4.0))
        s = float(rng.uniform(-10, 10))
        r = ab_coefficients(f, t, s)
        worst = max(worst, abs(abs(r.a) ** 2 - abs(r.b) ** 2 - 1))
    finish(4, worst < 1e-12, t0, 5.0, f"max ||a|^2 - |b|^2 - 1| = {worst:.2e}")


def test_05_nonlinear_parseval():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = worst_scaled = 0.0
    for _ in range(10):
        f = random_piecewise(rng, max_support=2.0, max_q=2.0)
        t = f.support_end
        lhs = integrate_log_abs_a(f, t)[0].value
        rhs = l2_norm_sq(f, 0.0, t).value
        scale = max(1.0, rhs)
        worst = max(worst, abs(lhs - rhs) / scale)
        worst_scaled = max(worst_scaled, abs(lhs - 0.5 * math.pi * rhs) / scale)
    finish(5, worst < 1e-6, t0, 60.0,
           f"max |lhs - ||f||^2| / max(1, ||f||^2) = {worst:.3e} (tol 1e-6); "
           f"against (pi/2)||f||^2 the same measure is {worst_scaled:.2e}")


def test_06_linearization_slope():
    t0 = time.perf_counter()
    eps = [1e-1, 1e-2, 1e-3, 1e-4]
    slopes = [linearization_error(Potential.constant(1), 1.0, s, eps).data["slope"] for s in (0.0, 1.0)]
    finish(6, min(slopes) >= 1.9, t0, 2.0, f"slopes {slopes[0]:.3f}, {slopes[1]:.3f} (need >= 1.9)")


def test_07_zero_velocity_law():
    t0 = time.perf_counter()
    f = Potential.constant(1).truncate(2)
    z1, _ = newton_E(f, 1.0, 2.58 - 0.71j)
    zeta = track_zero(f, 1.0, 1.5, z1).zeros[-1]
    hs = [0.05, 0.025, 0.0125, 0.00625]
    res = [velocity_residual(f, 1.5, zeta, h) for h in hs]
    ratios = [a / b for a, b in zip(res, res[1:])]
    finish(7, min(ratios) >= 3.5, t0, 10.0,
           "halving ratios " + ", ".join(f"{r:.3f}" for r in ratios) + " (need >= 3.5)")


def test_08_zero_location_consistency():
    t0 = time.perf_counter()
    f = Potential.constant(1)
    rects = [(-4, 4, -3, -0.01), (0, 4, -1, -0.1), (-8, 8, -3, -0.01), (2.5, 2.7, -0.8, -0.6),
             (-1, 1, -3, -0.01)]
    ok = True
    worst = 0.0
    counts = []
    for rect in rects:
        n = winding_count(f, 1.0, rect)
        oracle = len(grid_zero_oracle(f, 1.0, rect))
        zs = locate_zeros(f, 1.0, rect)
        counts.append((n, oracle))
        ok &= n == oracle == len(zs)
        for z in zs:
            E = hermite_biehler(f, 1.0, z).E
            worst = max(worst, abs(E))
            ok &= z.imag < 0
    ok &= worst < 1e-11
    finish(8, ok, t0, 20.0, f"(winding, oracle) counts {counts}; max |E| at zeros {worst:.1e}")


def test_09_lemma1_detector():
    t0 = time.perf_counter()
    B = BlaschkeProduct((1j,))
    ball = lemma1_detect(B, 0.0, 0.0, 1.0, 0.05)
    hit = ball is not None and ball.contains(1j) and lemma1_verify(B, 0.0, ball)
    free = Potential.zero()
    triggers = sum(lemma1_detect(free, 2.0, x, x + 0.5, 0.05) is not None
                   for x in np.linspace(-5, 5, 100))
    finish(9, hit and triggers == 0, t0, 2.0,
           f"Blaschke ball radius {ball.radius if ball else None}, contains i: {hit}; "
           f"free-case triggers {triggers}/100")


def test_10_kernel_proximity_trend():
    t0 = time.perf_counter()
    cases = [(Potential.constant(1).truncate(1), 0.7), (Potential.preset("powerdecay"), 1.3)]
    out = []
    for f, s in cases:
        w = estimate_w(f, s).w
        sup20 = kernel_proximity(f, s, 5.0, 20.0, w=w).data["sup_discrepancy"]
        sup80 = kernel_proximity(f, s, 5.0, 80.0, w=w).data["sup_discrepancy"]
        out.append((sup20, sup80))
    ok = all(b <= a for a, b in out)
    finish(10, ok, t0, 60.0, "sup discrepancy t=20 -> t=80: "
           + "; ".join(f"{a:.4g} -> {b:.4g}" for a, b in out))


def test_11_corrected_log_a_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst = 0.0
    printed_min = math.inf
    for _ in range(20):
        f = random_piecewise(rng)
        t = float(rng.uniform(0.2, 4.0))
        s = float(rng.uniform(-3, 3))
        rep = log_a_identity_residual(f, t, s)
        worst = max(worst, rep.data["residual"])
        printed_min = min(printed_min, rep.check("printed_form_residual").value)
    diag = []
    for q, t in ((1.0, 1.0), (0.5, 2.0), (1.5, 1.0)):
        la = log_a_identity_residual(Potential.constant(q), t, 0.0).data["log_a"]
        diag.append(abs(la - math.log(math.cosh(q * t))))
    ok = worst < 1e-7 and max(diag) < 1e-8 and printed_min > 0
    finish(11, ok, t0, 20.0, f"max residual {worst:.2e} (tol 1e-7); diagonal error {max(diag):.1e} "
           f"(tol 1e-8); printed-form residual min {printed_min:.3g} (> 0)")


def test_12_convergence_scans():
    t0 = time.perf_counter()
    f = Potential.piecewise([0, 0.5, 1.5], [1.0, -0.7])
    frozen = convergence_scan(f, 0.8, [2, 5, 10, 40, 160])
    spread = max(abs(v - frozen.values[0]) for v in frozen.values)
    scan = convergence_scan(Potential.preset("powerdecay"), 0.8, [10, 20, 40, 80, 160])
    m = scan.cauchy_moduli
    decreasing = all(a > b for a, b in zip(m, m[1:]))
    finish(12, spread < 1e-13 and decreasing, t0, 60.0,
           f"frozen variation {spread:.1e}; powerdecay Cauchy moduli "
           + ", ".join(f"{x:.4g}" for x in m))


def test_13_determinism(tmp_path):
    t0 = time.perf_counter()
    args = ["verify", "--potential", "piecewise:breaks=0;0.5;2,values=1.5;-0.5", "--t", "2",
            "--seed", "11"]
    blobs = []
    out = tmp_path / "run"
    for _ in range(2):
        cli_main([*args, "--out", str(out)])
        blobs.append({p.name: p.read_bytes() for p in sorted((out / "verify").iterdir())})
    same = blobs[0] == blobs[1] and len(blobs[0]) >= 2
    finish(13, same, t0, 60.0, f"{len(blobs[0])} output files byte-identical: {same}")
