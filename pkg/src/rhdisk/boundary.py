"""Boundary data construction: principal arguments, the truncated singular
integral for the conjugate function, and the continuous primitive feeding
the derivative-of-Poisson Dirichlet route."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .spectral import BoundaryTrace, CircleGrid

TWO_PI = 2.0 * np.pi

# Allowed deviation of |lambda| from 1 before a trace stops being unimodular.
UNIMODULAR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class UnimodularTrace:
    """Complex boundary trace with |value| == 1 up to 1e-9 at every sample."""

    inner: BoundaryTrace

    def __post_init__(self) -> None:
        if self.inner.is_real:
            object.__setattr__(self, "inner",
                               BoundaryTrace(self.inner.grid,
                                             self.inner.values.astype(np.complex128)))
        mags = np.abs(self.inner.values)
        if np.any(mags == 0.0):
            raise ValueError("unimodular trace contains a zero-magnitude sample")
        worst = float(np.abs(mags - 1.0).max())
        if worst > UNIMODULAR_TOL:
            raise ValueError(f"trace is not unimodular: max | |v|-1 | = {worst:.3e}")

    @property
    def grid(self) -> CircleGrid:
        return self.inner.grid

    @property
    def values(self) -> np.ndarray:
        return self.inner.values

    @classmethod
    def from_values(cls, grid: CircleGrid, values) -> "UnimodularTrace":
        return cls(BoundaryTrace(grid, np.asarray(values, dtype=np.complex128)))


@dataclass(frozen=True)
class PiecewiseSpec:
    """Half-open arcs [start, end) covering [0, 2pi), each carrying a constant
    or a callable of the angle.  The concrete carrier for sampled piecewise
    boundary data; samples are right-continuous at arc starts."""

    pieces: tuple

    def __post_init__(self) -> None:
        pieces = tuple((float(s), float(e), v) for s, e, v in self.pieces)
        if not pieces:
            raise ValueError("piecewise spec needs at least one arc")
        pieces = tuple(sorted(pieces, key=lambda p: p[0]))
        if pieces[0][0] != 0.0 or pieces[-1][1] != TWO_PI:
            raise ValueError("arcs must cover [0, 2pi) exactly")
        for (s0, e0, _), (s1, _, _) in zip(pieces, pieces[1:]):
            if e0 != s1:
                raise ValueError("arcs must be disjoint and contiguous")
        for s, e, _ in pieces:
            if not 0.0 <= s < e <= TWO_PI:
                raise ValueError(f"bad arc [{s}, {e})")
        object.__setattr__(self, "pieces", pieces)

    def sample(self, grid: CircleGrid) -> np.ndarray:
        theta = grid.theta
        out = np.zeros(grid.n, dtype=np.complex128)
        for start, end, value in self.pieces:
            mask = (theta >= start) & (theta < end)
            if callable(value):
                out[mask] = value(theta[mask])
            else:
                out[mask] = value
        if np.all(out.imag == 0.0):
            return out.real.copy()
        return out

    def sample_trace(self, grid: CircleGrid) -> BoundaryTrace:
        return BoundaryTrace(grid, self.sample(grid))

    def jump_angles(self) -> tuple:
        """Arc endpoints, the natural candidates for declared discontinuities."""
        return tuple(s for s, _, _ in self.pieces)


def principal_arg(lam: UnimodularTrace) -> BoundaryTrace:
    """Principal argument alpha in (-pi, pi] with exp(i alpha) = lambda/|lambda|.

    Samples are renormalized to exact unit modulus first; the boundary case
    -1 maps to +pi.
    """
    vals = lam.values
    mags = np.abs(vals)
    if np.any(mags == 0.0):
        raise ValueError("cannot take the argument of a zero sample")
    alpha = np.angle(vals / mags)
    # atan2 can land on -pi when the imaginary part is a negative zero
    alpha = np.where(alpha <= -np.pi, np.pi, alpha)
    return BoundaryTrace(lam.grid, alpha)


def hilbert_singular(alpha: BoundaryTrace, eps: float) -> BoundaryTrace:
    """Truncated singular integral for the conjugate boundary function.

    For each grid point, trapezoidal quadrature over t in [eps, pi] of

        [alpha(theta - t) - alpha(theta + t)] / (2 tan(t/2)) / pi

    with off-grid values of alpha by periodic linear interpolation.  The
    integrand is simply truncated at eps (no extrapolation); refining eps is
    the caller's schedule.  Agrees with the spectral conjugate to
    O(eps + 1/n) for smooth data.
    """
    alpha.require_real("hilbert_singular")
    eps = float(eps)
    if not 0.0 < eps < np.pi / 4:
        raise ValueError(f"eps must lie in (0, pi/4), got {eps}")
    grid = alpha.grid
    n = grid.n
    step = np.pi / n  # half the grid spacing; keeps quadrature error subdominant
    m = int(np.ceil((np.pi - eps) / step))
    ts = np.linspace(eps, np.pi, m + 1)
    w = np.full(m + 1, ts[1] - ts[0])
    w[0] *= 0.5
    w[-1] *= 0.5

    theta = grid.theta
    xp = np.append(theta, TWO_PI)
    fp = np.append(alpha.values, alpha.values[0])
    beta = np.zeros(n)
    for t, wi in zip(ts, w):
        back = np.interp(np.mod(theta - t, TWO_PI), xp, fp)
        fwd = np.interp(np.mod(theta + t, TWO_PI), xp, fp)
        beta += wi * (back - fwd) / (2.0 * np.tan(0.5 * t))
    return BoundaryTrace(grid, beta / np.pi)


def lusin_primitive(phi: BoundaryTrace) -> tuple[BoundaryTrace, float]:
    """Continuous periodic primitive of ``phi`` minus its mean.

    Returns (Phi, mean) with Phi_j the cumulative trapezoid of (phi - mean)
    over [0, theta_j].  Subtracting the mean forces periodicity (a primitive
    of phi is periodic iff phi has mean zero); the mean is re-added
    downstream as an additive constant.
    """
    phi.require_real("lusin_primitive")
    mean = float(phi.values.mean())
    psi = phi.values - mean
    dth = phi.grid.spacing
    steps = 0.5 * dth * (psi[:-1] + psi[1:])
    Phi = np.concatenate(([0.0], np.cumsum(steps)))
    return BoundaryTrace(phi.grid, Phi), mean


def sample_function(grid: CircleGrid, fn: Callable[[np.ndarray], np.ndarray]) -> BoundaryTrace:
    """Sample a callable of the angle on the grid."""
    return BoundaryTrace(grid, np.asarray(fn(grid.theta)))


def circular_distance(theta, points: Sequence[float]) -> np.ndarray:
    """Distance on the circle from each angle to the nearest of ``points``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if len(points) == 0:
        return np.full(theta.shape, np.inf)
    pts = np.asarray(points, dtype=float)
    diff = np.angle(np.exp(1j * (theta[:, None] - pts[None, :])))
    return np.abs(diff).min(axis=1)
