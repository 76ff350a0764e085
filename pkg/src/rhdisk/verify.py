"""Boundary-limit verification.

Nontangential convergence is probed along finitely many Stolz-sector paths
per boundary vertex; the limit estimate is the value at the deepest path
point (no extrapolation, residual sequences are reported raw) and the
estimates from different paths are compared.  Agreement of several arcs is
the operational stand-in for a unique principal asymptotic value: when a
limit exists along one arc, pairwise-consistent cluster sets force
uniqueness outside a countable vertex set, so agreement across paths is
evidence, not proof, and is reported as such.

All numeric tolerances in this module are engineering defaults recorded
here (and in run manifests); they are not claims from the underlying
theory, which has no convergence rates at this generality.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .boundary import circular_distance
from .core import RHProblem, RHSolution
from .spectral import (EVAL_CEILING, AnalyticDiskFunction, circle_trace,
                       evaluate)

MIN_GAP = 2.0 ** -40

DEFAULT_GAPS = tuple(2.0 ** -k for k in range(4, 41, 4))
DEFAULT_APERTURES = (0.3, 0.6, 1.0)
DEFAULT_OFFSETS = (-0.9, 0.0, 0.9)
DEFAULT_AGREEMENT_TOL = 1e-8
MONOTONE_SLACK = 1.1  # "nonincreasing within 10%"


@dataclass(frozen=True)
class StolzPath:
    """Approach path inside the Stolz sector at a boundary vertex.

    ``aperture`` is the half-opening angle, ``side_offset`` in [-1, 1]
    selects a ray inside the sector (0 is radial), and ``gaps`` are the
    decreasing 1 - r values of the path points.
    """

    vertex: float
    aperture: float
    side_offset: float
    gaps: tuple

    def __post_init__(self) -> None:
        if not 0.0 < self.aperture < np.pi / 2:
            raise ValueError(f"aperture must lie in (0, pi/2), got {self.aperture}")
        if not -1.0 <= self.side_offset <= 1.0:
            raise ValueError(f"side offset must lie in [-1, 1], got {self.side_offset}")
        gaps = tuple(float(g) for g in self.gaps)
        if not gaps:
            raise ValueError("path needs at least one gap")
        if any(g < MIN_GAP or g > 0.5 for g in gaps):
            raise ValueError("gaps must lie in [2^-40, 0.5]")
        if any(b >= a for a, b in zip(gaps, gaps[1:])):
            raise ValueError("gaps must be strictly decreasing")
        object.__setattr__(self, "gaps", gaps)


def path_points(path: StolzPath) -> np.ndarray:
    """Points z_k = zeta (1 - g_k e^{i eta kappa}), projected into the disk.

    By construction arg(1 - conj(zeta) z_k) = eta * kappa, so the sector
    condition holds; points that land beyond the evaluation ceiling are
    pulled radially back onto it, which can only shrink the argument.
    """
    zeta = np.exp(1j * path.vertex)
    g = np.asarray(path.gaps, dtype=float)
    z = zeta * (1.0 - g * np.exp(1j * path.side_offset * path.aperture))
    mag = np.abs(z)
    over = mag > EVAL_CEILING
    if np.any(over):
        # shave a few ulps so rounding cannot push back over the ceiling
        scale = EVAL_CEILING * (1.0 - 1e-15) / np.where(over, mag, 1.0)
        z = np.where(over, z * scale, z)
    return z


@dataclass(frozen=True)
class PathEstimate:
    aperture: float
    side_offset: float
    estimate: complex
    residuals: tuple
    monotone: bool


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Per-path limit estimates at one vertex and their agreement."""

    vertex: float
    gaps: tuple
    paths: tuple
    agreement: float
    agreement_tol: float
    value: complex | None

    @property
    def agreed(self) -> bool:
        return self.value is not None

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "gaps": list(self.gaps),
            "agreement": self.agreement,
            "agreement_tol": self.agreement_tol,
            "value": None if self.value is None else [self.value.real, self.value.imag],
            "paths": [
                {
                    "aperture": p.aperture,
                    "side_offset": p.side_offset,
                    "estimate": [p.estimate.real, p.estimate.imag],
                    "residuals": list(p.residuals),
                    "monotone": p.monotone,
                }
                for p in self.paths
            ],
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def rows(self) -> list:
        out = []
        for p in self.paths:
            series = f"aperture={p.aperture:g},offset={p.side_offset:g}"
            for g, res in zip(self.gaps, p.residuals):
                out.append((series, g, res))
        return out

    def write_csv(self, path) -> None:
        _write_long_csv(path, self.rows())


def _as_evaluator(f) -> Callable:
    if isinstance(f, RHSolution):
        f = f.f
    if isinstance(f, AnalyticDiskFunction):
        return lambda z: evaluate(f, z)
    if callable(f):
        return f
    raise TypeError(f"cannot evaluate object of type {type(f).__name__}")


def _is_monotone(res: np.ndarray) -> bool:
    if res.size < 2:
        return True
    scale = max(1.0, float(res.max()))
    return bool(np.all(res[1:] <= MONOTONE_SLACK * res[:-1] + 1e-15 * scale))


def nt_limit(f, vertex: float, apertures: Sequence[float] = DEFAULT_APERTURES,
             offsets: Sequence[float] = DEFAULT_OFFSETS,
             gaps: Sequence[float] = DEFAULT_GAPS,
             agreement_tol: float = DEFAULT_AGREEMENT_TOL) -> ConvergenceReport:
    """Estimate the nontangential limit of ``f`` at a boundary vertex.

    ``f`` may be an analytic series, a solution object, or any callable on
    disk points.  One path per (aperture, offset) pair; the estimate is the
    deepest-point value and the report declares a principal value only when
    all per-path estimates agree within ``agreement_tol``.
    """
    apertures = list(apertures)
    offsets = list(offsets)
    gaps = tuple(float(g) for g in gaps)
    if not apertures or not offsets or not gaps:
        raise ValueError("nonempty aperture, offset and gap schedules required")
    fn = _as_evaluator(f)
    estimates = []
    paths = []
    for kappa in apertures:
        for eta in offsets:
            pts = path_points(StolzPath(vertex, kappa, eta, gaps))
            vals = np.asarray(fn(pts), dtype=np.complex128)
            est = complex(vals[-1])
            res = np.abs(vals - est)
            paths.append(PathEstimate(aperture=float(kappa), side_offset=float(eta),
                                      estimate=est,
                                      residuals=tuple(float(x) for x in res),
                                      monotone=_is_monotone(res[:-1])))
            estimates.append(est)
    est_arr = np.asarray(estimates)
    agreement = float(np.abs(est_arr[:, None] - est_arr[None, :]).max())
    value = complex(np.mean(est_arr)) if agreement <= agreement_tol else None
    return ConvergenceReport(vertex=float(vertex), gaps=gaps, paths=tuple(paths),
                             agreement=agreement, agreement_tol=float(agreement_tol),
                             value=value)


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Boundary-condition residual norms per evaluation radius.

    ``l1`` entries are mean absolute residuals over admitted grid points
    (a normalized discrete L1); ``linf`` entries are maxima.
    """

    radii: tuple
    l1: tuple
    linf: tuple
    admitted: int
    exclusion_radius: float

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "l1": list(self.l1),
            "linf": list(self.linf),
            "admitted": self.admitted,
            "exclusion_radius": self.exclusion_radius,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def rows(self) -> list:
        out = [("l1", r, v) for r, v in zip(self.radii, self.l1)]
        out += [("linf", r, v) for r, v in zip(self.radii, self.linf)]
        return out

    def write_csv(self, path) -> None:
        _write_long_csv(path, self.rows())

    def is_monotone(self, slack: float = MONOTONE_SLACK) -> dict:
        def mono(vals):
            v = np.asarray(vals)
            return bool(np.all(v[1:] <= slack * v[:-1] + 1e-15))
        return {"l1": mono(self.l1), "linf": mono(self.linf)}


def boundary_residual(sol, problem: RHProblem, r_schedule: Sequence[float],
                      exclusion_radius: float = 0.0) -> ResidualReport:
    """Per-radius residual |Re(conj(lambda_j) f(r e^{i theta_j})) - phi_j|.

    Grid points within ``exclusion_radius`` of a declared jump are
    excluded; an empty admitted set is rejected.  ``sol`` may be a solution
    object, an analytic series, or a callable (the latter allows exact
    evaluation of family solutions near the boundary).
    """
    if exclusion_radius < 0.0:
        raise ValueError("exclusion radius must be nonnegative")
    radii = [float(r) for r in r_schedule]
    if not radii:
        raise ValueError("empty radius schedule")
    grid = problem.grid
    dist = circular_distance(grid.theta, problem.declared_jumps)
    admitted = dist > exclusion_radius
    count = int(admitted.sum())
    if count == 0:
        raise ValueError("exclusion radius admits no grid points")

    series = None
    if isinstance(sol, RHSolution):
        series = sol.f
    elif isinstance(sol, AnalyticDiskFunction):
        series = sol
    fn = None if series is not None else _as_evaluator(sol)

    lam_conj = np.conj(problem.lam.values[admitted])
    phi = problem.phi.values[admitted]
    l1 = []
    linf = []
    for r in radii:
        if series is not None:
            vals = circle_trace(series, r, grid)[admitted]
        else:
            vals = np.asarray(fn(r * np.exp(1j * grid.theta[admitted])),
                              dtype=np.complex128)
        res = np.abs((lam_conj * vals).real - phi)
        l1.append(float(res.mean()))
        linf.append(float(res.max()))
    return ResidualReport(radii=tuple(radii), l1=tuple(l1), linf=tuple(linf),
                          admitted=count, exclusion_radius=float(exclusion_radius))


def _write_long_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("series", "x", "y"))
        for series, x, y in rows:
            writer.writerow((series, repr(float(x)), repr(float(y))))
