"""Inner function theta = E#/E and the resonances (zeros of E) in the lower half-plane."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (ContourThroughZero, MultiplicityAboveOne, NewtonDiverged,
                     NodeNotOnTrajectory, NoZeroInBox, PhaseStepTooLarge,
                     PoleAtEvaluationPoint, TrackingLost, ZeroEscaped, ZeroInBox)
from .potential import Potential
from .propagator import DEFAULT_OPTIONS
from .report import DiagnosticReport
from .scattering import hb_arrays, hb_with_sharp
from .spectral import Box, estimate_w

POLE_TOL = 1e-13
NEWTON_TOL = 1e-11
EPS0 = 0.1


# -- theta ------------------------------------------------------------------


@dataclass(frozen=True)
class InnerFunctionValue:
    t: float
    z: complex
    theta: complex
    theta_z: Optional[complex] = None
    theta_zz: Optional[complex] = None


def _theta_and_z(f, t, z, opts, pole_tol):
    z = np.ravel(np.asarray(z, dtype=complex))
    (E, _, Es, _), (Ez, _, Esz, _) = hb_with_sharp(f, t, z, opts, with_derivative=True)
    bad = np.abs(E) <= pole_tol
    if np.any(bad):
        raise PoleAtEvaluationPoint(f"E(t, z) vanishes at z = {z[bad][0]!r}")
    return Es / E, (Esz * E - Es * Ez) / E ** 2


def theta_eval(f: Potential, t, z, order=0, opts=DEFAULT_OPTIONS, pole_tol=POLE_TOL):
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    z = complex(z)
    if order == 0:
        E, _, Es, _ = hb_with_sharp(f, t, np.array([z]), opts)
        if abs(E[0]) <= pole_tol:
            raise PoleAtEvaluationPoint(f"E(t, z) vanishes at z = {z!r}")
        return InnerFunctionValue(t, z, complex(Es[0] / E[0]))
    if order == 1:
        th, thz = _theta_and_z(f, t, [z], opts, pole_tol)
        return InnerFunctionValue(t, z, complex(th[0]), complex(thz[0]))
    h = 1e-5 * (1 + abs(z))
    th, thz = _theta_and_z(f, t, [z, z + h, z - h], opts, pole_tol)
    return InnerFunctionValue(t, z, complex(th[0]), complex(thz[0]),
                              complex((thz[1] - thz[2]) / (2 * h)))


def theta_ode_residual(f: Potential, t, z, h=1e-4, opts=DEFAULT_OPTIONS):
    """|d theta / dt - (2iz theta + f (1 - theta^2))| by a central difference in t."""
    z = complex(z)
    vals = [theta_eval(f, tt, z, 0, opts).theta for tt in (t - h, t, t + h)]
    fd = (vals[2] - vals[0]) / (2 * h)
    q = float(f.propagation_values(t, opts.step_budget))
    return abs(fd - (2j * z * vals[1] + q * (1 - vals[1] ** 2)))


# -- argument principle -----------------------------------------------------


def scaled_E(f: Potential, t, z, opts=DEFAULT_OPTIONS, with_derivative=False):
    """e^{itz} E(t, z): same zeros as E, but of moderate size in the lower
    half-plane where E itself decays like e^{t Im z}."""
    z = np.ravel(np.asarray(z, dtype=complex))
    ph = np.exp(1j * t * z)
    if not with_derivative:
        return ph * hb_arrays(f, t, z, opts)[0]
    E, _, Ez, _ = hb_arrays(f, t, z, opts, with_derivative=True)
    return ph * E, ph * (Ez + 1j * t * E)


def _polygon_points(vertices, tau):
    """Points on a closed polygon, tau in [0, n_edges)."""
    v = np.asarray(vertices, dtype=complex)
    k = np.minimum(np.floor(tau).astype(int), v.size - 1)
    frac = tau - k
    return v[k] + frac * (v[(k + 1) % v.size] - v[k])


def _polygon_winding(f, t, vertices, n_per_edge, opts, max_points):
    n_edges = len(vertices)
    tau = np.linspace(0.0, n_edges, n_edges * n_per_edge + 1)
    E = scaled_E(f, t, _polygon_points(vertices, tau), opts)
    while True:
        if np.min(np.abs(E)) <= 1e-10:
            raise ContourThroughZero("E vanishes on the contour")
        steps = np.angle(E[1:] / E[:-1])
        bad = np.flatnonzero(np.abs(steps) >= 0.5 * math.pi)
        if bad.size == 0:
            return int(round(steps.sum() / (2 * math.pi)))
        if tau.size + bad.size > max_points:
            raise PhaseStepTooLarge("phase unwrapping exceeded its point budget")
        mid = 0.5 * (tau[bad] + tau[bad + 1])
        Em = scaled_E(f, t, _polygon_points(vertices, mid), opts)
        tau = np.insert(tau, bad + 1, mid)
        E = np.insert(E, bad + 1, Em)


def rect_vertices(rect):
    x0, x1, y0, y1 = map(float, rect)
    if not (x0 < x1 and y0 < y1):
        raise ValueError("rectangle must satisfy x0 < x1 and y0 < y1")
    return [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]


def contour_winding(f: Potential, t, vertices, n_per_edge=32, opts=DEFAULT_OPTIONS,
                    retries=5, max_points=400_000):
    """Winding number of E(t, .) along a closed counter-clockwise polygon.

    When E comes within 1e-10 of zero on the contour, the polygon is dilated
    by 1% about its centroid and the count repeated, at most ``retries`` times.
    """
    verts = np.asarray(vertices, dtype=complex)
    centre = verts.mean()
    for attempt in range(retries + 1):
        try:
            return _polygon_winding(f, t, verts, n_per_edge, opts, max_points)
        except ContourThroughZero:
            if attempt == retries:
                raise
            verts = centre + 1.01 * (verts - centre)
    raise AssertionError("unreachable")


def winding_count(f: Potential, t, rect, n_contour=32, opts=DEFAULT_OPTIONS, retries=5):
    """Number of zeros of E(t, .) inside rect = (x0, x1, y0, y1)."""
    return contour_winding(f, t, rect_vertices(rect), n_contour, opts, retries)


# -- zero location ----------------------------------------------------------


def newton_E(f: Potential, t, z0, tol=NEWTON_TOL, max_iter=40, opts=DEFAULT_OPTIONS):
    """Newton iteration on e^{itz} E(t, .) with the propagated derivative.

    Returns (zero, iterations). One extra step is taken after the residual
    drops below tol so the root is polished to rounding level. Raises
    NewtonDiverged.
    """
    z = complex(z0)
    with np.errstate(over="ignore", invalid="ignore"):  # a wild step is caught below
        for it in range(max_iter + 1):
            E, Ez = (x[0] for x in scaled_E(f, t, [z], opts, with_derivative=True))
            if not np.isfinite(E) or not np.isfinite(Ez) or Ez == 0:
                break
            if abs(E) < tol:
                z_new = z - E / Ez
                E2 = scaled_E(f, t, [z_new], opts)[0]
                return (z_new if abs(E2) <= abs(E) else z), it
            z = z - E / Ez
    raise NewtonDiverged(f"Newton on E did not converge from {complex(z0)!r}")


def _dedupe(zs, sep):
    out = []
    for z in zs:
        if all(abs(z - w) > sep for w in out):
            out.append(z)
    return out


def locate_zeros(f: Potential, t, rect, tol=NEWTON_TOL, n_contour=32, min_cell=1e-6,
                 opts=DEFAULT_OPTIONS, strict=False):
    """Zeros of E(t, .) inside rect by quadrisection plus Newton.

    Cells are split until their winding number is at most one; Newton then
    starts at the cell centre. Cells still holding two or more zeros at the
    minimum size are reported as anomalous (warning, or MultiplicityAboveOne
    when ``strict``).
    """
    x0, x1, y0, y1 = map(float, rect)
    zeros, unresolved, anomalies = [], [], []

    def inside(z, r, pad=0.0):
        return r[0] - pad <= z.real <= r[1] + pad and r[2] - pad <= z.imag <= r[3] + pad

    def count(r):
        return _polygon_winding(f, t, rect_vertices(r), n_contour, opts, 400_000)

    def split(r, frac):
        xm = r[0] + frac * (r[1] - r[0])
        ym = r[2] + frac * (r[3] - r[2])
        return [(r[0], xm, r[2], ym), (xm, r[1], r[2], ym),
                (r[0], xm, ym, r[3]), (xm, r[1], ym, r[3])]

    def children(r):
        # shift the split line off any zero lying on it
        for frac in (0.5, 0.4871, 0.5213, 0.4537):
            try:
                kids = split(r, frac)
                return [(k, count(k)) for k in kids]
            except ContourThroughZero:
                continue
        raise ContourThroughZero("could not split cell away from a zero")

    def solve(r, n):
        if n == 0:
            return
        size = max(r[1] - r[0], r[3] - r[2])
        if n == 1:
            try:
                z, _ = newton_E(f, t, complex(0.5 * (r[0] + r[1]), 0.5 * (r[2] + r[3])), tol,
                                opts=opts)
                if inside(z, r, 1e-9 * (1 + size)):
                    zeros.append(z)
                    return
            except NewtonDiverged:
                pass
            if size < min_cell:
                unresolved.append(r)
                return
        elif size < min_cell:
            anomalies.append(r)
            try:
                zeros.append(newton_E(f, t, complex(0.5 * (r[0] + r[1]), 0.5 * (r[2] + r[3])),
                                      tol, opts=opts)[0])
            except NewtonDiverged:
                unresolved.append(r)
            return
        for k, nk in children(r):
            solve(k, nk)

    total = winding_count(f, t, rect, n_contour, opts)
    solve((x0, x1, y0, y1), total)
    zeros = sorted(_dedupe(zeros, 10 * tol), key=lambda z: (z.real, z.imag))
    zeros = [z for z in zeros if inside(z, (x0, x1, y0, y1), 1e-9)]
    if anomalies:
        msg = f"{len(anomalies)} cell(s) keep winding >= 2 below size {min_cell:g}"
        if strict:
            raise MultiplicityAboveOne(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    if unresolved:
        raise NewtonDiverged(f"{len(unresolved)} cell(s) unresolved", zeros, unresolved)
    return zeros


def grid_zero_oracle(f: Potential, t, rect, n=400, tol=NEWTON_TOL, opts=DEFAULT_OPTIONS):
    """Brute-force count: local minima of |E| on a dense grid, polished by Newton.

    Independent of the contour machinery; used to cross-check winding_count.
    """
    x0, x1, y0, y1 = map(float, rect)
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    Z = xs[None, :] + 1j * ys[:, None]
    A = np.abs(scaled_E(f, t, Z.ravel(), opts)).reshape(Z.shape)
    P = np.pad(A, 1, constant_values=np.inf)
    core = P[1:-1, 1:-1]
    is_min = np.ones_like(core, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= core <= P[1 + di:P.shape[0] - 1 + di, 1 + dj:P.shape[1] - 1 + dj]
    found = []
    for i, j in zip(*np.nonzero(is_min)):
        try:
            z, _ = newton_E(f, t, Z[i, j], tol, opts=opts)
        except NewtonDiverged:
            continue
        if x0 <= z.real <= x1 and y0 <= z.imag <= y1:
            found.append(z)
    return sorted(_dedupe(found, 1e-7), key=lambda z: (z.real, z.imag))


# -- tracking ---------------------------------------------------------------


def zero_velocity(f: Potential, t, zeta, opts=DEFAULT_OPTIONS):
    """d zeta / dt for a zero zeta of E(t, .): conj(-f(t) / theta_z(t, conj zeta))."""
    q = float(f.propagation_values(t, opts.step_budget))
    if q == 0.0:
        return 0j
    thz = theta_eval(f, t, np.conj(zeta), 1, opts).theta_z
    return complex(np.conj(-q / thz))


def box_status(z, t, s, C):
    if s is None or C is None or t <= 0:
        return "outside"
    h = C / t
    if abs(s - z.real) <= h and abs(z.imag) <= h:
        return "inside_T1" if z.imag < -1.0 / t else "inside_T0"
    return "outside"


@dataclass
class ZeroTrajectory:
    times: list = field(default_factory=list)
    zeros: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    box_status: list = field(default_factory=list)

    def append(self, t, z, residual, status):
        self.times.append(float(t))
        self.zeros.append(complex(z))
        self.residuals.append(float(residual))
        self.box_status.append(status)

    def node_index(self, t):
        for k, tk in enumerate(self.times):
            if abs(tk - t) <= 1e-12 * max(1.0, abs(t)):
                return k
        raise NodeNotOnTrajectory(f"t = {t!r} is not a trajectory node")

    def rows(self):
        return [(t, z.real, z.imag, r, b) for t, z, r, b in
                zip(self.times, self.zeros, self.residuals, self.box_status)]


def track_zero(f: Potential, t0, t1, z0, dt_max=0.05, dt_min=1e-8, s=None, C=None,
               search_rect=None, tol=NEWTON_TOL, opts=DEFAULT_OPTIONS):
    """Follow a zero of E(t, .) from t0 to t1 by predictor-corrector steps."""
    if not t1 >= t0:
        raise ValueError("need t0 <= t1")
    if not 0 < dt_min <= dt_max:
        raise ValueError("need 0 < dt_min <= dt_max")
    try:
        z, _ = newton_E(f, t0, z0, tol, opts=opts)
    except NewtonDiverged as exc:
        raise ValueError("z0 is not a zero of E(t0, .)") from exc

    def residual(tt, zz):
        return float(abs(hb_arrays(f, tt, np.array([zz]), opts)[0][0]))

    def check_rect(zz):
        if search_rect is not None:
            x0, x1, y0, y1 = search_rect
            if not (x0 <= zz.real <= x1 and y0 <= zz.imag <= y1):
                raise ZeroEscaped(f"zero left the search rectangle at {zz!r}")

    check_rect(z)
    traj = ZeroTrajectory()
    traj.append(t0, z, residual(t0, z), box_status(z, t0, s, C))
    t, dt = float(t0), float(dt_max)
    while t < t1:
        final = t1 - t <= dt * (1 + 1e-9)
        t_next = t1 if final else t + dt
        step = t_next - t
        guess = z + step * zero_velocity(f, t + 0.5 * step, z, opts)
        try:
            z_new, iters = newton_E(f, t_next, guess, tol, max_iter=4, opts=opts)
        except NewtonDiverged:
            if dt <= dt_min:
                raise TrackingLost(f"Newton failed at t = {t + step:g} with dt = {dt:g}")
            dt = max(0.5 * dt, dt_min)
            continue
        t = t_next
        z = z_new
        check_rect(z)
        traj.append(t, z, residual(t, z), box_status(z, t, s, C))
        if iters <= 2:
            dt = min(dt_max, 2 * dt)
    return traj


def velocity_residual(f: Potential, t, zeta, h, tol=NEWTON_TOL, opts=DEFAULT_OPTIONS):
    """|(z(t+h) - z(t-h)) / 2h - z'(t)| with z'(t) from the velocity law."""
    v = zero_velocity(f, t, zeta, opts)
    zp, _ = newton_E(f, t + h, zeta + h * v, tol, opts=opts)
    zm, _ = newton_E(f, t - h, zeta - h * v, tol, opts=opts)
    return abs((zp - zm) / (2 * h) - v)


def riccati_residual(f: Potential, t, zeta, h=1e-4, opts=DEFAULT_OPTIONS):
    """Compare d/dt theta_z(t, w(t)), w = conj(zeta(t)), with
    2 i w theta_z - f theta_zz / theta_z."""
    zp, _ = newton_E(f, t + h, zeta + h * zero_velocity(f, t, zeta, opts), opts=opts)
    zm, _ = newton_E(f, t - h, zeta - h * zero_velocity(f, t, zeta, opts), opts=opts)
    tp = theta_eval(f, t + h, np.conj(zp), 1, opts).theta_z
    tm = theta_eval(f, t - h, np.conj(zm), 1, opts).theta_z
    w = np.conj(zeta)
    c = theta_eval(f, t, w, 2, opts)
    q = float(f.propagation_values(t, opts.step_budget))
    return abs((tp - tm) / (2 * h) - (2j * w * c.theta_z - q * c.theta_zz / c.theta_z))


def increments(traj: ZeroTrajectory, s, t1, t2):
    """Rescaled increments (eps1, eps2) of a zero z = x - iy between two nodes."""
    z1 = traj.zeros[traj.node_index(t1)]
    z2 = traj.zeros[traj.node_index(t2)]
    eps1 = t2 * (z2.real - s) - t1 * (z1.real - s)
    eps2 = t2 * (-z2.imag) - t1 * (-z1.imag)
    return eps1, eps2


# -- approximation laws -----------------------------------------------------


@dataclass(frozen=True)
class GammaScale:
    argument: float
    value: float = field(init=False)

    def __post_init__(self):
        if not self.argument > 0:
            raise ValueError("argument must be positive")
        # sqrt(2 / sinh(2a)) computed in log form to survive large a
        a = self.argument
        log_sinh = 2 * a + math.log1p(-math.exp(-4 * a)) - math.log(2)
        object.__setattr__(self, "value", math.sqrt(2) * math.exp(-0.5 * log_sinh))


@dataclass(frozen=True)
class BlaschkeProduct:
    """theta(z) = c * exp(i sigma z) * prod (z - lam) / (z - conj lam), lam in C+."""

    zeros: tuple
    sigma: float = 0.0
    unimodular: complex = 1.0

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.zeros)
        if any(z.imag <= 0 for z in zs):
            raise ValueError("zeros of an inner function lie in the upper half-plane")
        object.__setattr__(self, "zeros", zs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.unimodular * np.exp(1j * self.sigma * z)
        for lam in self.zeros:
            out = out * (z - lam) / (z - np.conj(lam))
        return out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        log_d = 1j * self.sigma + sum(1 / (z - lam) - 1 / (z - np.conj(lam)) for lam in self.zeros)
        return self(z) * log_d


@dataclass(frozen=True)
class Ball:
    center: complex
    radius: float

    def contains(self, z):
        return abs(complex(z) - self.center) < self.radius


def _abs_theta_prime(source, t, x, opts):
    if isinstance(source, BlaschkeProduct):
        return float(abs(source.derivative(x)))
    return abs(theta_eval(source, t, x, 1, opts).theta_z)


def lemma1_ratio(source, t, x, y, opts=DEFAULT_OPTIONS):
    """|theta'(x)| / |theta'(y)| for real x != y."""
    if x == y:
        raise ValueError("x and y must differ")
    return _abs_theta_prime(source, t, float(x), opts) / _abs_theta_prime(source, t, float(y), opts)


def lemma1_detect(source, t, x, y, eps, eps0=EPS0, opts=DEFAULT_OPTIONS):
    """Ball {|z - x| < 4|y - x| / eps} when |theta'(x)| / |theta'(y)| > 1 + eps.

    ``source`` is a Potential (theta = E#/E at time t) or a BlaschkeProduct.
    Returns None when the ratio does not trigger detection.
    """
    if not 0 < eps < eps0:
        raise ValueError(f"eps must lie in (0, {eps0})")
    if lemma1_ratio(source, t, x, y, opts) > 1 + eps:
        return Ball(complex(x), 4 * abs(y - x) / eps)
    return None


def lemma1_verify(source, t, ball: Ball, n_per_edge=64, opts=DEFAULT_OPTIONS):
    """True when the ball holds a zero of theta (a conjugated zero of E)."""
    if isinstance(source, BlaschkeProduct):
        return any(ball.contains(lam) for lam in source.zeros)
    # zeros of theta in the ball are conjugates of zeros of E in the lower
    # half-disc; count those along a polygonal half-disc contour
    k = 4 * n_per_edge
    ang = np.linspace(math.pi, 2 * math.pi, k + 1)[1:-1]
    r = ball.radius * (1 - 1e-9)
    arc = ball.center + r * np.exp(1j * ang)
    verts = [ball.center - r, *arc, ball.center + r]
    return contour_winding(source, t, verts, 8, opts) > 0


def _fit_phase(err_of_phase, phi0, n_scan=64, iters=60):
    """Minimise err(phi) over the circle: coarse scan, then golden section."""
    grid = phi0 + np.linspace(-math.pi, math.pi, n_scan, endpoint=False)
    errs = [err_of_phase(p) for p in grid]
    k = int(np.argmin(errs))
    step = 2 * math.pi / n_scan
    a, b = grid[k] - step, grid[k] + step
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = err_of_phase(c), err_of_phase(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = err_of_phase(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = err_of_phase(d)
    best = min((fc, c), (fd, d), (errs[k], grid[k]))
    return best[1], best[0]


def _box_zero_search(f, t, box, opts):
    x0, x1, _, _ = box.rect()
    return locate_zeros(f, t, (x0, x1, -box.half_width, 0.0), opts=opts)


def sine_fit(f: Potential, t, s, C, grid_n=16, w=None, opts=DEFAULT_OPTIONS):
    """Fit E(t, z) on Q(s, C/t) by alpha * gamma(t y) / sqrt(w(s)) * sin(t (z - z(t)))."""
    box = Box.scaled(s, C, t)
    zeros = _box_zero_search(f, t, box, opts)
    if not zeros:
        raise NoZeroInBox(f"no zero of E in Q({s}, {C}/{t})")
    zt = min(zeros, key=lambda z: (abs(z.real - s), -z.imag))
    y = -zt.imag
    gamma = GammaScale(t * y)
    if w is None:
        w = estimate_w(f, s, opts=opts).w
    pts = box.grid(grid_n)
    E = hb_arrays(f, t, pts, opts)[0]
    g = gamma.value / math.sqrt(w) * np.sin(t * (pts - zt))
    E_s = hb_arrays(f, t, np.array([complex(s)]), opts)[0][0]
    g_s = gamma.value / math.sqrt(w) * np.sin(t * (s - zt))
    phi0 = float(np.angle(E_s / g_s)) if g_s != 0 else 0.0
    phi, err = _fit_phase(lambda p: float(np.max(np.abs(E - np.exp(1j * p) * g))), phi0)
    alpha = complex(np.exp(1j * phi))
    report = DiagnosticReport("sine_fit")
    report.add("sup_error", err, math.inf, informational=True)
    report.data.update({"alpha": alpha, "zero_used": zt, "sup_error": err, "gamma": gamma,
                        "w": w, "scale": float(np.max(np.abs(E)))})
    return report


def exp_fit(f: Potential, t, s, D, grid_n=16, w=None, opts=DEFAULT_OPTIONS):
    """Fit E(t, z) on a zero-free box Q(s, D/t) by alpha / sqrt(w(s)) * exp(+-itz)."""
    box = Box.scaled(s, D, t)
    x0, x1, _, _ = box.rect()
    n = winding_count(f, t, (x0, x1, -box.half_width, 0.0), opts=opts)
    if n:
        raise ZeroInBox(f"Q({s}, {D}/{t}) contains {n} zero(s) of E")
    if w is None:
        w = estimate_w(f, s, opts=opts).w
    pts = box.grid(grid_n)
    E = hb_arrays(f, t, pts, opts)[0]
    E_s = hb_arrays(f, t, np.array([complex(s)]), opts)[0][0]
    fits = {}
    for sign in (-1, 1):
        g = np.exp(sign * 1j * t * pts) / math.sqrt(w)
        phi0 = float(np.angle(E_s * math.sqrt(w) * np.exp(-sign * 1j * t * s)))
        fits[sign] = _fit_phase(lambda p: float(np.max(np.abs(E - np.exp(1j * p) * g))), phi0)
    sign = min(fits, key=lambda k: (fits[k][1], k))
    phi, err = fits[sign]
    report = DiagnosticReport("exp_fit")
    report.add("sup_error", err, math.inf, informational=True)
    report.data.update({"alpha": complex(np.exp(1j * phi)), "sign": sign, "sup_error": err,
                        "sup_error_minus": fits[-1][1], "sup_error_plus": fits[1][1],
                        "c_abs": 1 / math.sqrt(w), "w": w})
    return report
