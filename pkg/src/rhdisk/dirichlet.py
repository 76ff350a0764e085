"""Dirichlet problem on the disk, solved two ways.

The direct route extends the boundary data with the Poisson kernel
(spectrally).  The second route goes through the continuous primitive:
extend the primitive harmonically, then differentiate in the angle.  In
spectrum space the angular derivative is the exact multiplier i k, so the
only difference between the routes is the quadrature error of the
primitive itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boundary import lusin_primitive
from .spectral import (AnalyticDiskFunction, BoundaryTrace, CircleGrid,
                       angular_derivative, circle_trace, evaluate,
                       schwarz_extend)

ROUTE_DIRECT = "direct"
ROUTE_GEHRING = "gehring"


@dataclass(frozen=True, eq=False)
class HarmonicDiskFunction:
    """Harmonic function given as the real part of an analytic completion."""

    completion: AnalyticDiskFunction
    route: str

    def value(self, z):
        return evaluate(self.completion, z).real

    def circle_values(self, r: float, grid: CircleGrid) -> np.ndarray:
        return circle_trace(self.completion, r, grid).real

    def at_zero(self) -> float:
        return float(self.completion.a[0].real)


def solve_direct(phi: BoundaryTrace) -> HarmonicDiskFunction:
    """Poisson route: harmonic u with boundary values phi, u(0) = mean(phi)."""
    return HarmonicDiskFunction(schwarz_extend(phi), ROUTE_DIRECT)


def solve_gehring(phi: BoundaryTrace) -> HarmonicDiskFunction:
    """Primitive route: u = d/dtheta of the harmonic extension of the
    primitive of phi, plus the mean."""
    Phi, mean = lusin_primitive(phi)
    F = angular_derivative(schwarz_extend(Phi))
    return HarmonicDiskFunction(F.shifted_constant(mean), ROUTE_GEHRING)


def conjugate(u: HarmonicDiskFunction) -> HarmonicDiskFunction:
    """Harmonic conjugate v with u + iv analytic and v(0) = 0."""
    a = u.completion.a
    w = -1j * a
    w[0] = -1j * (a[0] - a[0].real)  # kills the constant when a_0 is real
    return HarmonicDiskFunction(AnalyticDiskFunction(w), u.route)


def hp_norm(u: HarmonicDiskFunction, p: float, radii: Sequence[float],
            grid: CircleGrid | None = None) -> float:
    """Max over the supplied radii of the grid p-mean on |z| = r.

    The p-mean at radius r is (sum_j |u(r e^{i theta_j})|^p dtheta)^(1/p).
    A finite radius schedule replaces the (uncomputable) supremum; the
    schedule is part of the reproducibility contract.
    """
    p = float(p)
    if p < 1.0:
        raise ValueError(f"hp_norm requires p >= 1, got {p}")
    radii = list(radii)
    if not radii:
        raise ValueError("hp_norm requires a nonempty radius schedule")
    if grid is None:
        n = max(64, 1 << int(np.ceil(np.log2(2 * u.completion.a.size))))
        grid = CircleGrid(n)
    best = 0.0
    for r in radii:
        if not 0.0 < r < 1.0:
            raise ValueError(f"radii must lie in (0, 1), got {r}")
        vals = u.circle_values(r, grid)
        best = max(best, float((np.sum(np.abs(vals) ** p) * grid.spacing) ** (1.0 / p)))
    return best
