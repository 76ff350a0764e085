"""The main solver pipeline on the unit disk.

Given unimodular boundary coefficient lambda and real boundary data phi,
build

    alpha = principal argument of lambda,
    g     = analytic completion of the harmonic extension of alpha,
    A     = exp(i g),
    beta  = boundary trace of Im g (spectral conjugate of alpha),
    b     = phi * exp(beta),
    B     = analytic function with Re B -> b at the boundary,

and return f = A * B, which satisfies Re(conj(lambda) f) -> phi along
nontangential paths at almost every boundary point.  The homogeneous
problem has an infinite-dimensional solution family; Moebius-type kernel
atoms anchored at boundary points generate a checkable finite slice of it:
f = A (B + sum c_k C_k).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .boundary import UnimodularTrace, lusin_primitive, principal_arg
from .dirichlet import ROUTE_DIRECT
from .spectral import (AnalyticDiskFunction, BoundaryTrace, CircleGrid,
                       angular_derivative, circle_trace, conjugate_spectrum,
                       evaluate, schwarz_extend, series_exp, series_multiply,
                       spectrum_to_trace, trace_to_spectrum)

ROUTE_LUSIN = "lusin"
_ROUTES = (ROUTE_DIRECT, ROUTE_LUSIN)

# Radius at which the exponential-growth guard samples |g|.
_GROWTH_RADIUS = 1.0 - 2.0 ** -10
DEFAULT_GROWTH_BOUND = 50.0


class SolverOverflowError(RuntimeError):
    """The exponential of a constructed series would overflow."""


@dataclass(frozen=True, eq=False)
class RHProblem:
    """Boundary-value problem data on one grid, plus declared jump angles.

    Jumps are caller-supplied metadata, not auto-detected: detecting jumps
    of sampled measurable data is ill-posed, and the verifier needs honest
    exclusion zones.
    """

    lam: UnimodularTrace
    phi: BoundaryTrace
    declared_jumps: tuple = ()

    def __post_init__(self) -> None:
        if self.lam.grid.n != self.phi.grid.n:
            raise ValueError("lambda and phi must share one grid")
        self.phi.require_real("RHProblem data phi")
        jumps = tuple(float(j) for j in self.declared_jumps)
        if any(not 0.0 <= j < 2.0 * np.pi for j in jumps):
            raise ValueError("declared jumps must lie in [0, 2pi)")
        if list(jumps) != sorted(jumps):
            raise ValueError("declared jumps must be sorted")
        object.__setattr__(self, "declared_jumps", jumps)

    @property
    def grid(self) -> CircleGrid:
        return self.phi.grid


@dataclass(frozen=True, eq=False)
class RHSolution:
    """Solution f = A * B with its construction pieces.

    For family solutions the B slot holds B + sum c_k C_k, so the product
    identity f = A * B is preserved in coefficient space.
    """

    f: AnalyticDiskFunction
    A: AnalyticDiskFunction
    B: AnalyticDiskFunction
    alpha: BoundaryTrace
    beta: BoundaryTrace
    b_boundary: BoundaryTrace
    route: str


@dataclass(frozen=True, eq=False)
class NullFamily:
    """Kernel atoms C_k(z) = (zeta_k + z)/(zeta_k - z) at distinct anchors.

    Each generator is stored as a truncated geometric series (the
    coefficient-space representation used when composing solutions) and the
    anchors allow exact closed-form evaluation, which is the form that
    remains accurate arbitrarily close to the boundary.
    """

    generators: tuple
    anchors: tuple

    def __post_init__(self) -> None:
        anchors = tuple(float(a) for a in self.anchors)
        if len(anchors) != len(self.generators):
            raise ValueError("one anchor per generator required")
        pts = np.exp(1j * np.asarray(anchors))
        for i in range(len(anchors)):
            for j in range(i + 1, len(anchors)):
                if abs(pts[i] - pts[j]) < 1e-12:
                    raise ValueError("anchors must be pairwise distinct")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "generators", tuple(self.generators))

    def exact_value(self, k: int, z):
        """Closed-form C_k(z); valid on the whole open disk."""
        zeta = np.exp(1j * self.anchors[k])
        zarr = np.asarray(z, dtype=np.complex128)
        out = (zeta + zarr) / (zeta - zarr)
        return complex(out) if np.isscalar(z) or zarr.ndim == 0 else out


def build_A(lam: UnimodularTrace,
            growth_bound: float = DEFAULT_GROWTH_BOUND,
            degree: int | None = None):
    """First factor A = exp(i g) with g the completion of the argument data.

    Returns (A, alpha, beta) where beta is the boundary trace of Im g via
    the spectral conjugate.  Raises SolverOverflowError if max |g| sampled
    on the circle of radius 1 - 2^-10 exceeds ``growth_bound``.
    """
    alpha = principal_arg(lam)
    g = schwarz_extend(alpha, degree)
    gmax = float(np.abs(circle_trace(g, _GROWTH_RADIUS, lam.grid)).max())
    if gmax > growth_bound:
        raise SolverOverflowError(
            f"max |g| = {gmax:.3g} exceeds growth bound {growth_bound:.3g}")
    try:
        A = series_exp(AnalyticDiskFunction(1j * g.a))
    except OverflowError as exc:
        raise SolverOverflowError(str(exc)) from exc
    beta = spectrum_to_trace(conjugate_spectrum(trace_to_spectrum(alpha)))
    return A, alpha, beta


def build_B(phi: BoundaryTrace, beta: BoundaryTrace, route: str = ROUTE_DIRECT,
            growth_bound: float = DEFAULT_GROWTH_BOUND,
            degree: int | None = None):
    """Second factor: analytic B with Re B -> phi * exp(beta).

    DIRECT extends the boundary datum spectrally; LUSIN goes through the
    periodic primitive and the angular derivative.  Returns (B, b_boundary).
    Raises SolverOverflowError when max beta exceeds ``growth_bound`` (the
    datum phi * exp(beta) would blow up).
    """
    if route not in _ROUTES:
        raise ValueError(f"route must be one of {_ROUTES}, got {route!r}")
    phi.require_real("build_B data phi")
    beta.require_real("build_B data beta")
    if phi.grid.n != beta.grid.n:
        raise ValueError("phi and beta must share one grid")
    bmax = float(np.abs(beta.values).max())
    if bmax > growth_bound:
        raise SolverOverflowError(
            f"max |beta| = {bmax:.3g} exceeds growth bound {growth_bound:.3g}")
    b_boundary = BoundaryTrace(phi.grid, phi.values * np.exp(beta.values))
    if route == ROUTE_DIRECT:
        B = schwarz_extend(b_boundary, degree)
    else:
        Phi, mean = lusin_primitive(b_boundary)
        B = angular_derivative(schwarz_extend(Phi, degree)).shifted_constant(mean)
    return B, b_boundary


def solve(problem: RHProblem, route: str = ROUTE_DIRECT,
          growth_bound: float = DEFAULT_GROWTH_BOUND) -> RHSolution:
    """Run the full pipeline and return f = A * B with all components."""
    A, alpha, beta = build_A(problem.lam, growth_bound)
    B, b_boundary = build_B(problem.phi, beta, route, growth_bound)
    f = series_multiply(A, B, A.degree)
    return RHSolution(f=f, A=A, B=B, alpha=alpha, beta=beta,
                      b_boundary=b_boundary, route=route)


def null_generators(k_max: int, anchors: Sequence[float], degree: int = 511) -> NullFamily:
    """Moebius-type kernel atoms at the given boundary angles.

    C_k(z) = (zeta_k + z)/(zeta_k - z) = 1 + 2 sum_{j>=1} (conj(zeta_k) z)^j,
    zeta_k = exp(i anchor_k).  Re C_k is the Poisson kernel at zeta_k, so it
    has nontangential limit 0 at every boundary point other than zeta_k.
    The truncated series is trustworthy only for |z|^degree << 1; use
    NullFamily.exact_value near the boundary.
    """
    anchors = tuple(float(a) for a in anchors)
    if k_max != len(anchors):
        raise ValueError(f"k_max = {k_max} but {len(anchors)} anchors supplied")
    gens = []
    for a in anchors:
        conj_zeta = np.exp(-1j * a)
        coeff = 2.0 * conj_zeta ** np.arange(degree + 1)
        coeff[0] = 1.0
        gens.append(AnalyticDiskFunction(coeff))
    return NullFamily(generators=tuple(gens), anchors=anchors)


def solve_family(problem: RHProblem, coeffs: Sequence[float], family: NullFamily,
                 route: str = ROUTE_DIRECT,
                 growth_bound: float = DEFAULT_GROWTH_BOUND) -> RHSolution:
    """Family solution f = A (B + sum c_k C_k) for real coefficients c_k."""
    coeffs = [float(c) for c in coeffs]
    if len(coeffs) != len(family.generators):
        raise ValueError("one coefficient per generator required")
    base = solve(problem, route, growth_bound)
    degree = base.A.degree
    total = np.zeros(degree + 1, dtype=np.complex128)
    upto_b = min(degree + 1, base.B.a.size)
    total[:upto_b] += base.B.a[:upto_b]
    for c, gen in zip(coeffs, family.generators):
        upto = min(degree + 1, gen.a.size)
        total[:upto] += c * gen.a[:upto]
    B_shifted = AnalyticDiskFunction(total)
    f = series_multiply(base.A, B_shifted, degree)
    return RHSolution(f=f, A=base.A, B=B_shifted, alpha=base.alpha,
                      beta=base.beta, b_boundary=base.b_boundary, route=route)


def family_evaluator(A: AnalyticDiskFunction, B: AnalyticDiskFunction,
                     family: NullFamily, coeffs: Sequence[float]) -> Callable:
    """Exact-evaluation closure z -> A(z) (B(z) + sum c_k C_k(z)).

    Generators are evaluated in closed form, so the result stays accurate
    at radii where the truncated series representation has not converged.
    """
    coeffs = [float(c) for c in coeffs]
    if len(coeffs) != len(family.generators):
        raise ValueError("one coefficient per generator required")

    def _eval(z):
        zarr = np.asarray(z, dtype=np.complex128)
        acc = np.asarray(evaluate(B, zarr), dtype=np.complex128)
        for k, c in enumerate(coeffs):
            if c != 0.0:
                acc = acc + c * family.exact_value(k, zarr)
        out = np.asarray(evaluate(A, zarr), dtype=np.complex128) * acc
        return complex(out) if np.isscalar(z) or zarr.ndim == 0 else out

    return _eval
