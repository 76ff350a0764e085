"""Conformal transplantation of boundary problems and harmonic measure.

A problem on a Jordan domain is pulled back to the unit disk through an
invertible analytic map with an explicit boundary correspondence, solved
there, and the solution is pushed back by composition.  Nontangential
approach is preserved at tangent points of the boundary, so the disk-side
boundary guarantees transfer.

Harmonic measure of a boundary arc set at an interior point is computed
geometrically: normalize the point to the origin with a disk automorphism
and read off the angular length of the transported arcs divided by 2 pi.
A Poisson-indicator quadrature is kept alongside as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import RHProblem, RHSolution, solve
from .boundary import UnimodularTrace
from .spectral import (AnalyticDiskFunction, BoundaryTrace, CircleGrid,
                       conjugate_spectrum, evaluate, schwarz_extend,
                       series_exp, spectrum_to_trace, trace_to_spectrum)

TWO_PI = 2.0 * np.pi

KIND_CLOSED_FORM = "analytic-closed-form"
KIND_POLYNOMIAL = "polynomial"
KIND_THEODORSEN = "theodorsen"

PARAM_ARCLENGTH = "arclength"
PARAM_POLAR = "polar"


class MapConvergenceError(RuntimeError):
    """An iterative map construction or inversion failed to converge."""


@dataclass(frozen=True, eq=False)
class ConformalMap:
    """Invertible analytic map between a Jordan domain and the disk.

    ``boundary_param[j]`` is the domain boundary parameter corresponding to
    the disk angle ``theta_grid[j]``; the table is strictly monotone modulo
    its period and is interpolated periodically and linearly.
    """

    kind: str
    to_disk: Callable
    from_disk: Callable
    theta_grid: np.ndarray
    boundary_param: np.ndarray
    param_kind: str
    param_period: float

    def __post_init__(self) -> None:
        th = np.asarray(self.theta_grid, dtype=float)
        bp = np.asarray(self.boundary_param, dtype=float)
        if th.shape != bp.shape or th.ndim != 1 or th.size < 8:
            raise ValueError("correspondence table malformed")
        if np.any(np.diff(bp) <= 0.0):
            raise ValueError("boundary correspondence must be strictly monotone")
        for arr in (th, bp):
            arr.setflags(write=False)
        object.__setattr__(self, "theta_grid", th)
        object.__setattr__(self, "boundary_param", bp)

    def param_at(self, theta) -> np.ndarray:
        """Domain boundary parameter at the given disk angles."""
        th = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        xp = np.append(self.theta_grid, TWO_PI)
        fp = np.append(self.boundary_param,
                       self.boundary_param[0] + self.param_period)
        return np.interp(th, xp, fp)

    def theta_at(self, param) -> np.ndarray:
        """Disk angle at the given domain boundary parameters."""
        base = self.boundary_param[0]
        p = np.mod(np.asarray(param, dtype=float) - base, self.param_period) + base
        xp = np.append(self.boundary_param,
                       self.boundary_param[0] + self.param_period)
        fp = np.append(self.theta_grid, TWO_PI)
        return np.mod(np.interp(p, xp, fp), TWO_PI)

    def roundtrip_defect(self, points) -> float:
        pts = np.asarray(points, dtype=np.complex128)
        return float(np.abs(self.from_disk(self.to_disk(pts)) - pts).max())


@dataclass(frozen=True, eq=False)
class JordanBoundary:
    """Closed curve sample table with its cumulative arc-length parameter."""

    points: np.ndarray
    s: np.ndarray
    total_length: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.complex128)
        s = np.asarray(self.s, dtype=float)
        if pts.ndim != 1 or pts.size < 3 or s.shape != pts.shape:
            raise ValueError("boundary table malformed")
        if s[0] != 0.0 or np.any(np.diff(s) <= 0.0) or self.total_length <= s[-1]:
            raise ValueError("arc-length parameter must increase from 0 to the total length")
        pts.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "s", s)

    def arclength_at_polar(self, tau) -> np.ndarray:
        """Arc length at the given polar angles (star-like boundaries only)."""
        ang = np.mod(np.angle(self.points), TWO_PI)
        order = np.argsort(ang)
        ang_sorted = ang[order]
        s_sorted = self.s[order]
        if np.any(np.diff(ang_sorted) <= 0.0):
            raise ValueError("boundary is not star-like in its polar angles")
        t = np.mod(np.asarray(tau, dtype=float), TWO_PI)
        xp = np.concatenate((ang_sorted, [ang_sorted[0] + TWO_PI]))
        fp = np.concatenate((s_sorted, [s_sorted[0] + self.total_length]))
        return np.mod(np.interp(t, xp, fp), self.total_length)


def _segment_intersections(pts: np.ndarray) -> bool:
    """True if any two non-adjacent closed-polyline segments cross."""
    n = pts.size
    a = pts
    b = np.roll(pts, -1)
    d = b - a
    i, j = np.triu_indices(n, k=2)
    # adjacent through the wraparound
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    # solve a_i + t d_i = a_j + u d_j
    cross = (d[i].real * d[j].imag - d[i].imag * d[j].real)
    rel = a[j] - a[i]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (rel.real * d[j].imag - rel.imag * d[j].real) / cross
        u = (rel.real * d[i].imag - rel.imag * d[i].real) / cross
    hit = (np.abs(cross) > 1e-15) & (t > 1e-12) & (t < 1 - 1e-12) \
        & (u > 1e-12) & (u < 1 - 1e-12)
    return bool(np.any(hit))


def natural_parameter(points: Sequence[complex], check_simple: bool = True) -> JordanBoundary:
    """Cumulative chord-length table of a closed curve sample.

    The last point is implicitly joined back to the first; the total length
    includes that closing chord.  Zero-length segments are rejected, and
    (for tables up to 4096 points) so are self-intersections at sample
    resolution.
    """
    pts = np.asarray(points, dtype=np.complex128)
    if pts.ndim != 1 or pts.size < 3:
        raise ValueError("need at least 3 boundary samples")
    chords = np.abs(np.diff(pts))
    closing = abs(pts[0] - pts[-1])
    if np.any(chords == 0.0) or closing == 0.0:
        raise ValueError("degenerate zero-length boundary segment")
    s = np.concatenate(([0.0], np.cumsum(chords)))
    total = float(s[-1] + closing)
    if check_simple and pts.size <= 4096 and _segment_intersections(pts):
        raise ValueError("boundary polyline is self-intersecting")
    return JordanBoundary(points=pts, s=s, total_length=total)


def boundary_from_radius(rho: Callable, m: int = 4096) -> JordanBoundary:
    """Sample a star-like boundary r = rho(tau) into an arc-length table."""
    tau = TWO_PI * np.arange(m) / m
    pts = rho(tau) * np.exp(1j * tau)
    return natural_parameter(pts, check_simple=False)


def identity_map(grid: CircleGrid) -> ConformalMap:
    """Disk to disk, boundary parameter = arc length = angle."""
    ident = lambda z: np.asarray(z, dtype=np.complex128)
    return ConformalMap(kind=KIND_CLOSED_FORM, to_disk=ident, from_disk=ident,
                        theta_grid=grid.theta.copy(), boundary_param=grid.theta.copy(),
                        param_kind=PARAM_ARCLENGTH, param_period=TWO_PI)


def polynomial_map(c: complex, grid: CircleGrid, newton_tol: float = 1e-12,
                   max_iter: int = 50) -> ConformalMap:
    """Map with from_disk(w) = w + c w^2, univalent for |c| < 1/2.

    The inverse is computed by Newton iteration from the starting guess
    w = z; the boundary parameter is the arc length of the image curve.
    """
    c = complex(c)
    if abs(c) >= 0.5:
        raise ValueError(f"|c| must be < 1/2 for univalence, got |c| = {abs(c)}")

    def from_disk(w):
        warr = np.asarray(w, dtype=np.complex128)
        return warr + c * warr * warr

    def to_disk(z):
        zarr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        w = zarr.copy()
        ok = False
        for _ in range(max_iter):
            fval = w + c * w * w - zarr
            if float(np.abs(fval).max()) < newton_tol:
                ok = True
                break
            w = w - fval / (1.0 + 2.0 * c * w)
        if not ok:
            worst = float(np.abs(w + c * w * w - zarr).max())
            raise MapConvergenceError(
                f"polynomial map inversion stalled at residual {worst:.3e}")
        return w if np.ndim(z) else complex(w[0])

    # arc length of theta -> e^{i theta} + c e^{2 i theta}
    th = grid.theta
    speed = np.abs(1.0 + 2.0 * c * np.exp(1j * th))
    speed_wrap = np.append(speed, speed[0])
    seg = 0.5 * grid.spacing * (speed_wrap[:-1] + speed_wrap[1:])
    s = np.concatenate(([0.0], np.cumsum(seg[:-1])))
    total = float(np.sum(seg))
    return ConformalMap(kind=KIND_POLYNOMIAL, to_disk=to_disk, from_disk=from_disk,
                        theta_grid=th.copy(), boundary_param=s,
                        param_kind=PARAM_ARCLENGTH, param_period=total)


def theodorsen_map(rho, grid: CircleGrid, tol: float = 1e-10, max_iter: int = 200,
                   newton_tol: float = 1e-12) -> ConformalMap:
    """Disk-to-star-like-domain map by the classical correspondence iteration.

    ``rho`` is the boundary radius as a callable of the polar angle, or an
    array of uniform samples.  Requires 0 < rho and sup |rho'/rho| < 1 (the
    contraction condition guaranteeing convergence).  The correspondence
    tau(theta) is iterated until the sup change is <= tol; non-convergence
    raises MapConvergenceError with the last residual.
    """
    if callable(rho):
        rho_fn = lambda t: np.asarray(rho(np.asarray(t, dtype=float)), dtype=float)
    else:
        samples = np.asarray(rho, dtype=float)
        if samples.ndim != 1 or samples.size < 8:
            raise ValueError("radius sample table too small")
        xp = np.linspace(0.0, TWO_PI, samples.size + 1)
        fp = np.append(samples, samples[0])
        rho_fn = lambda t: np.interp(np.mod(t, TWO_PI), xp, fp)

    probe = CircleGrid(max(grid.n, 1024)).theta
    rvals = rho_fn(probe)
    if np.any(rvals <= 0.0) or not np.all(np.isfinite(rvals)):
        raise ValueError("radius function must be positive and finite")
    drho = (np.roll(rvals, -1) - np.roll(rvals, 1)) / (2.0 * (probe[1] - probe[0]))
    eps_ratio = float(np.abs(drho / rvals).max())
    if eps_ratio >= 1.0:
        raise ValueError(
            f"radius function violates the star-likeness condition sup|rho'/rho| < 1 "
            f"(measured {eps_ratio:.3g})")

    th = grid.theta
    tau = th.copy()
    delta = np.inf
    for _ in range(max_iter):
        logr = BoundaryTrace(grid, np.log(rho_fn(tau)))
        conj = spectrum_to_trace(conjugate_spectrum(trace_to_spectrum(logr)))
        tau_new = th + conj.values
        delta = float(np.abs(tau_new - tau).max())
        tau = tau_new
        if delta <= tol:
            break
    else:
        raise MapConvergenceError(
            f"correspondence iteration did not converge; last change {delta:.3e}")
    if np.any(np.diff(tau) <= 0.0):
        raise MapConvergenceError("correspondence lost monotonicity")

    # log(F(w)/w) is analytic with boundary values log rho(tau) + i (tau - theta)
    log_series = schwarz_extend(BoundaryTrace(grid, np.log(rho_fn(tau))))
    exp_series = series_exp(log_series)
    F = AnalyticDiskFunction(np.concatenate(([0.0], exp_series.a)))
    Fp = F.derivative()

    def from_disk(w):
        warr = np.asarray(w, dtype=np.complex128)
        out = np.polyval(F.a[::-1], warr)
        return out if np.ndim(w) else complex(out)

    scale = float(np.exp(log_series.a[0].real))

    def to_disk(z, _tol=newton_tol, _maxit=100):
        zarr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        w = zarr / scale
        mag = np.abs(w)
        w = np.where(mag > 0.999, 0.999 * w / np.where(mag == 0, 1, mag), w)
        ok = False
        for _ in range(_maxit):
            fval = np.polyval(F.a[::-1], w) - zarr
            if float(np.abs(fval).max()) < _tol:
                ok = True
                break
            w = w - fval / np.polyval(Fp.a[::-1], w)
        if not ok:
            worst = float(np.abs(np.polyval(F.a[::-1], w) - zarr).max())
            raise MapConvergenceError(
                f"map inversion stalled at residual {worst:.3e}")
        return w if np.ndim(z) else complex(w[0])

    return ConformalMap(kind=KIND_THEODORSEN, to_disk=to_disk, from_disk=from_disk,
                        theta_grid=th.copy(), boundary_param=tau,
                        param_kind=PARAM_POLAR, param_period=TWO_PI)


def transport_problem(lam_of_s: Callable, phi_of_s: Callable, cmap: ConformalMap,
                      boundary: JordanBoundary | None, grid: CircleGrid,
                      declared_jumps: Sequence[float] = ()) -> RHProblem:
    """Pull boundary data given in the natural parameter back to the disk grid.

    ``lam_of_s`` and ``phi_of_s`` are callables of arc length on the domain
    boundary.  For maps whose correspondence is stored in the polar angle,
    the boundary table converts angle to arc length first.  Declared jumps
    are given as arc-length positions and transported the same way.
    """
    if cmap.theta_grid.size < grid.n:
        raise ValueError("correspondence table too coarse for the requested grid")
    param = cmap.param_at(grid.theta)
    if cmap.param_kind == PARAM_POLAR:
        if boundary is None:
            raise ValueError("polar-parameter maps need a boundary table for arc length")
        s = boundary.arclength_at_polar(param)
    else:
        s = param
    lam_vals = np.asarray(lam_of_s(s), dtype=np.complex128)
    phi_vals = np.asarray(phi_of_s(s), dtype=float)
    jumps = sorted(float(np.mod(cmap.theta_at(j), TWO_PI)) for j in declared_jumps)
    return RHProblem(lam=UnimodularTrace.from_values(grid, lam_vals),
                     phi=BoundaryTrace(grid, phi_vals),
                     declared_jumps=tuple(jumps))


@dataclass(frozen=True, eq=False)
class ComposedSolution:
    """Disk solution composed with the map: f_D(z) = f(to_disk(z))."""

    disk_solution: RHSolution
    cmap: ConformalMap

    def __call__(self, z):
        return evaluate(self.disk_solution.f, self.cmap.to_disk(z))


def solve_jordan(lam_of_s: Callable, phi_of_s: Callable, cmap: ConformalMap,
                 boundary: JordanBoundary | None, grid: CircleGrid,
                 route: str = "direct",
                 declared_jumps: Sequence[float] = ()):
    """Transport, solve on the disk, and compose back.

    Returns (composed, disk_solution).  Nontangential paths in the domain
    transform into nontangential paths in the disk at boundary tangent
    points, so the disk-side residual guarantees transfer.
    """
    problem = transport_problem(lam_of_s, phi_of_s, cmap, boundary, grid,
                                declared_jumps)
    disk_solution = solve(problem, route)
    return ComposedSolution(disk_solution, cmap), disk_solution


def _normalize_arcs(arcs) -> list:
    out = []
    for a, b in arcs:
        a, b = float(a), float(b)
        if b <= a:
            raise ValueError(f"arc ({a}, {b}) has nonpositive length")
        out.append((a, b))
    out.sort()
    for (_, e0), (s1, _) in zip(out, out[1:]):
        if s1 < e0:
            raise ValueError("arcs must be disjoint")
    return out


def harmonic_measure(arcs, z0: complex, cmap: ConformalMap | None = None) -> float:
    """Harmonic measure of a disjoint arc set at an interior point.

    Arcs are (start, end) intervals in the disk angle, or in the map's
    boundary parameter when ``cmap`` is given.  Disjointness is checked on
    the given interval values; wrap-around overlap past one period is the
    caller's responsibility.  The point is normalized to the origin by the
    automorphism T(w) = (w - w0)/(1 - conj(w0) w) and the measure is the
    total angular length of the transported arcs over 2 pi, which is also
    the value at z0 of the harmonic extension of the arc indicator.
    """
    arcs = _normalize_arcs(arcs)
    w0 = complex(cmap.to_disk(z0)) if cmap is not None else complex(z0)
    if abs(w0) >= 1.0 - 1e-9:
        raise ValueError("query point must be an interior point")
    period = cmap.param_period if cmap is not None else TWO_PI
    total = 0.0
    for a, b in arcs:
        if b - a >= period:
            total += TWO_PI
            continue
        if cmap is not None:
            ta, tb = float(cmap.theta_at(a)), float(cmap.theta_at(b))
        else:
            ta, tb = a, b
        za, zb = np.exp(1j * ta), np.exp(1j * tb)
        img_a = (za - w0) / (1.0 - np.conj(w0) * za)
        img_b = (zb - w0) / (1.0 - np.conj(w0) * zb)
        total += float(np.mod(np.angle(img_b) - np.angle(img_a), TWO_PI))
    return total / TWO_PI


def harmonic_measure_quadrature(arcs, z0: complex, cmap: ConformalMap | None = None,
                                nodes_per_arc: int = 32768) -> float:
    """Poisson-indicator oracle for :func:`harmonic_measure`.

    Trapezoidal quadrature of the Poisson kernel at to_disk(z0) over each
    transported arc, with exact endpoints.
    """
    arcs = _normalize_arcs(arcs)
    w0 = complex(cmap.to_disk(z0)) if cmap is not None else complex(z0)
    if abs(w0) >= 1.0 - 1e-9:
        raise ValueError("query point must be an interior point")
    period = cmap.param_period if cmap is not None else TWO_PI
    r, t0 = abs(w0), np.angle(w0)
    total = 0.0
    for a, b in arcs:
        if b - a >= period:
            ta, tb = 0.0, TWO_PI
        elif cmap is not None:
            ta, tb = float(cmap.theta_at(a)), float(cmap.theta_at(b))
            if tb <= ta:
                tb += TWO_PI
        else:
            ta, tb = a, b
        ts = np.linspace(ta, tb, nodes_per_arc + 1)
        kernel = (1.0 - r * r) / (1.0 - 2.0 * r * np.cos(ts - t0) + r * r)
        w = np.full(ts.size, ts[1] - ts[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        total += float(np.dot(w, kernel))
    return total / TWO_PI
