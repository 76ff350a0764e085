"""Trigonometric spectrum engine for boundary traces on the unit circle.

Everything downstream (Dirichlet solvers, the boundary-value pipeline,
conformal transplantation) is built on four small value types:

* :class:`CircleGrid` -- a uniform angular grid theta_j = 2 pi j / n,
* :class:`BoundaryTrace` -- sampled boundary data (real or complex),
* :class:`FourierCoeffs` -- the discrete trigonometric spectrum of a trace,
* :class:`AnalyticDiskFunction` -- a truncated power series on the disk.

All values are immutable and all operations are pure functions, so
concurrent use is safe.  Batch evaluation keeps a fixed per-point
operation order (plain Horner / FFT synthesis), so results do not depend
on batching.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

# Interior evaluation is permitted up to this radius; the power series is
# too ill-conditioned to trust beyond it.
EVAL_CEILING = 1.0 - 2.0 ** -40

# Relative tolerance used when deciding that a synthesized trace is real.
_REAL_TOL = 1e-12


@dataclass(frozen=True)
class CircleGrid:
    """Uniform partition of [0, 2pi) into ``n`` angles, ``n`` a power of two."""

    n: int

    def __post_init__(self) -> None:
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1) != 0:
            raise ValueError(f"grid size must be a power of two >= 8, got {n!r}")

    @functools.cached_property
    def theta(self) -> np.ndarray:
        """Sample angles 2 pi j / n for j = 0 .. n-1."""
        th = 2.0 * np.pi * np.arange(self.n) / self.n
        th.setflags(write=False)
        return th

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.n


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Sampled boundary function on a :class:`CircleGrid`.

    A trace built from a floating array is tagged REAL and keeps a float64
    buffer, so its imaginary parts are zero exactly.  Complex input stays
    complex128.
    """

    grid: CircleGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        if v.dtype.kind in "fiu":
            v = v.astype(np.float64)
        elif v.dtype.kind == "c":
            v = v.astype(np.complex128)
        else:
            raise TypeError(f"trace values must be numeric, got dtype {v.dtype}")
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("trace contains non-finite samples")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def is_real(self) -> bool:
        return self.values.dtype.kind == "f"

    def require_real(self, what: str = "operation") -> None:
        if not self.is_real:
            raise ValueError(f"{what} requires a REAL trace")

    def mean(self) -> float | complex:
        m = self.values.mean()
        return float(m) if self.is_real else complex(m)


@dataclass(frozen=True, eq=False)
class FourierCoeffs:
    """Trigonometric spectrum of a length-``n`` trace.

    Coefficients are stored in FFT order; the represented frequencies are
    the integers k in [-n/2, n/2).  ``self[k]`` indexes by frequency.
    """

    n: int
    c: np.ndarray

    def __post_init__(self) -> None:
        CircleGrid(self.n)  # reuse the size validation
        c = np.asarray(self.c, dtype=np.complex128)
        if c.shape != (self.n,):
            raise ValueError(f"expected {self.n} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("spectrum contains non-finite coefficients")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def freqs(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)

    def __getitem__(self, k: int) -> complex:
        if not -self.n // 2 <= k < self.n // 2:
            raise IndexError(f"frequency {k} outside [-{self.n // 2}, {self.n // 2})")
        return complex(self.c[k % self.n])

    def hermitian_defect(self) -> float:
        """Largest violation of c[-k] == conj(c[k]) over representable pairs."""
        c = self.c
        defect = abs(c[0].imag)
        if self.n % 2 == 0:
            # the Nyquist coefficient has no positive partner; it must be real
            defect = max(defect, abs(c[self.n // 2].imag))
        k = np.arange(1, (self.n + 1) // 2)
        if k.size:
            defect = max(defect, float(np.abs(c[self.n - k] - np.conj(c[k])).max()))
        return float(defect)

    def is_hermitian(self, tol: float = 1e-9) -> bool:
        scale = max(1.0, float(np.abs(self.c).max()))
        return self.hermitian_defect() <= tol * scale

    def l2_norm(self) -> float:
        """Coefficient-space l2 norm, sqrt(sum |c_k|^2)."""
        return float(np.sqrt(np.sum(np.abs(self.c) ** 2)))


@dataclass(frozen=True, eq=False)
class AnalyticDiskFunction:
    """Truncated power series sum a_k z^k, evaluable for |z| <= 1 - 2^-40."""

    a: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=np.complex128)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("coefficient vector must be a nonempty 1-d array")
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite series coefficients")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def degree(self) -> int:
        return self.a.size - 1

    def __call__(self, z):
        return evaluate(self, z)

    def derivative(self) -> "AnalyticDiskFunction":
        if self.a.size == 1:
            return AnalyticDiskFunction(np.zeros(1, dtype=np.complex128))
        return AnalyticDiskFunction(self.a[1:] * np.arange(1, self.a.size))

    def shifted_constant(self, delta) -> "AnalyticDiskFunction":
        """Return the series with ``delta`` added to the constant term."""
        a = self.a.copy()
        a[0] += delta
        return AnalyticDiskFunction(a)


def trace_to_spectrum(t: BoundaryTrace) -> FourierCoeffs:
    """Forward transform: c[k] = (1/n) sum_j t_j exp(-i k theta_j)."""
    return FourierCoeffs(t.grid.n, np.fft.fft(t.values) / t.grid.n)


def spectrum_to_trace(c: FourierCoeffs, grid: CircleGrid | None = None) -> BoundaryTrace:
    """Inverse transform: t_j = sum_k c[k] exp(i k theta_j).

    A spectrum that is Hermitian to near machine precision synthesizes to a
    REAL trace (the residual imaginary parts are rounding noise and are
    dropped).
    """
    grid = grid if grid is not None else CircleGrid(c.n)
    if grid.n != c.n:
        raise ValueError("grid size does not match spectrum size")
    vals = np.fft.ifft(c.c) * c.n
    scale = max(1.0, float(np.abs(c.c).max()))
    if c.hermitian_defect() <= _REAL_TOL * scale:
        return BoundaryTrace(grid, vals.real)
    return BoundaryTrace(grid, vals)


def schwarz_extend(alpha: BoundaryTrace, degree: int | None = None) -> AnalyticDiskFunction:
    """Analytic completion of the Poisson extension of real boundary data.

    Returns g with a_0 = c[0] (real) and a_k = 2 c[k] for k >= 1, where c is
    the spectrum of ``alpha``.  Then Re g extends ``alpha`` harmonically and
    Im g(0) = 0.  The truncation degree defaults to n/2 - 1 (Nyquist).
    """
    alpha.require_real("schwarz_extend")
    n = alpha.grid.n
    if degree is None:
        degree = n // 2 - 1
    if not 0 <= degree <= n // 2 - 1:
        raise ValueError(f"degree must lie in [0, {n // 2 - 1}], got {degree}")
    c = np.fft.fft(alpha.values) / n
    a = np.zeros(degree + 1, dtype=np.complex128)
    a[0] = c[0].real
    if degree >= 1:
        a[1:] = 2.0 * c[1:degree + 1]
    return AnalyticDiskFunction(a)


def poisson_value(phi: BoundaryTrace, z: complex) -> float:
    """Poisson integral of real boundary data at one interior point.

    Direct trapezoidal quadrature of the kernel (1-r^2)/(1-2r cos(t-th)+r^2)
    on the grid.  This is the cross-check oracle for the spectral route; the
    two agree to ~1e-10 for smooth data as long as the kernel is resolved,
    i.e. (1-|z|) * n is not small.
    """
    phi.require_real("poisson_value")
    z = complex(z)
    r = abs(z)
    if r >= 1.0:
        raise ValueError(f"poisson_value requires |z| < 1, got |z| = {r}")
    t = phi.grid.theta
    kernel = (1.0 - r * r) / (1.0 - 2.0 * r * np.cos(np.angle(z) - t) + r * r)
    return float(np.mean(kernel * phi.values))


def conjugate_spectrum(u: FourierCoeffs) -> FourierCoeffs:
    """Harmonic-conjugate multiplier: v[k] = -i sign(k) u[k], v[0] = 0.

    Input must be Hermitian (the spectrum of a REAL trace); the output is
    Hermitian again.  The unpaired Nyquist mode is annihilated: its
    conjugate, sin(n theta / 2), vanishes at every grid point, so zero is
    the exact sampled value.
    """
    if not u.is_hermitian():
        raise ValueError("conjugate_spectrum requires a Hermitian spectrum")
    k = np.fft.fftfreq(u.n, 1.0 / u.n)
    mult = -1j * np.sign(k)
    mult[0] = 0.0
    if u.n % 2 == 0:
        mult[u.n // 2] = 0.0
    return FourierCoeffs(u.n, mult * u.c)


def angular_derivative(g: AnalyticDiskFunction) -> AnalyticDiskFunction:
    """Derivative in the polar angle: a_k -> i k a_k."""
    return AnalyticDiskFunction(1j * np.arange(g.a.size) * g.a)


def evaluate(f: AnalyticDiskFunction, z):
    """Horner evaluation of the series at points with |z| <= 1 - 2^-40."""
    zarr = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(zarr) > EVAL_CEILING):
        raise ValueError(f"evaluation requires |z| <= 1 - 2^-40, got max |z| = {np.abs(zarr).max()}")
    out = np.polyval(f.a[::-1], zarr)
    if np.isscalar(z) or zarr.ndim == 0:
        return complex(out)
    return out


def circle_trace(f: AnalyticDiskFunction, r: float, grid: CircleGrid) -> np.ndarray:
    """Values of the series at r e^{i theta_j} for every grid angle.

    FFT synthesis; exact (to rounding) for series of degree < n.
    """
    if not 0.0 <= r <= EVAL_CEILING:
        raise ValueError(f"radius must lie in [0, 1 - 2^-40], got {r}")
    if f.a.size > grid.n:
        raise ValueError("series degree exceeds grid resolution")
    buf = np.zeros(grid.n, dtype=np.complex128)
    buf[: f.a.size] = f.a * r ** np.arange(f.a.size)
    return np.fft.ifft(buf) * grid.n


def series_exp(g: AnalyticDiskFunction) -> AnalyticDiskFunction:
    """exp of a truncated power series, by the standard coefficient recurrence.

    With b = exp(g): b' = b g', so k b_k = sum_{j=1..k} j g_j b_{k-j}.  The
    result is the exact degree-m truncation of exp(g); analyticity is
    preserved under truncation.
    """
    a = g.a
    m = a.size - 1
    b = np.zeros(m + 1, dtype=np.complex128)
    b[0] = np.exp(a[0])
    jg = np.arange(m + 1) * a
    for k in range(1, m + 1):
        b[k] = np.dot(jg[1:k + 1], b[k - 1::-1][:k]) / k
    if not np.all(np.isfinite(b)):
        raise OverflowError("series_exp overflowed; input series too large")
    return AnalyticDiskFunction(b)


def series_multiply(f: AnalyticDiskFunction, g: AnalyticDiskFunction,
                    degree: int | None = None) -> AnalyticDiskFunction:
    """Cauchy product of two series, truncated to ``degree``.

    Defaults to the larger input degree.  Coefficients up to the truncation
    are the exact coefficients of the true product.
    """
    if degree is None:
        degree = max(f.degree, g.degree)
    prod = np.convolve(f.a, g.a)[: degree + 1]
    if prod.size < degree + 1:
        prod = np.pad(prod, (0, degree + 1 - prod.size))
    return AnalyticDiskFunction(prod)


