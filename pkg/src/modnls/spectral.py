"""Periodic grids, spectral transforms, the free propagator, and norm evaluators.

Everything here is a pure function of its inputs: grids and fields are
immutable value objects, and identical inputs produce bit-identical outputs
on one platform.  Spectral coefficients are Plancherel-normalized, so the
discrete L2 quadrature norm of a field equals the l2 norm of its
coefficients directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralError",
    "Grid",
    "Field",
    "SpectralField",
    "make_grid",
    "field_from_function",
    "transform",
    "inverse_transform",
    "free_propagate",
    "sobolev_norm",
    "lebesgue_norm",
    "spacetime_norm",
    "spacetime_norm_from_samples",
    "spectral_tail_mass",
    "spatial_tail_mass",
]


class SpectralError(ValueError):
    """Malformed grid, field, or norm arguments."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid on [-L, L)^d with its frequency lattice.

    Nodes are x_j = -L + 2*L*j/n per axis.  Frequencies are xi_k = (pi/L)*k
    for k in {-n/2, ..., n/2 - 1}, stored in FFT order so multipliers apply
    directly to raw FFT output.

    Attributes
    ----------
    d : spatial dimension (1 or 2)
    n : points per axis (power of two, >= 8)
    L : box half-length
    """

    d: int
    n: int
    L: float

    def __post_init__(self):
        if self.d not in (1, 2):
            raise SpectralError(f"spatial dimension must be 1 or 2, got {self.d}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 8 or not _is_power_of_two(int(self.n)):
            raise SpectralError(f"points per axis must be a power of two >= 8, got {self.n}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise SpectralError(f"box half-length must be positive, got {self.L}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "L", float(self.L))
        axis = -self.L + 2.0 * self.L * np.arange(self.n) / self.n
        xi_axis = 2.0 * np.pi * np.fft.fftfreq(self.n, d=2.0 * self.L / self.n)
        if self.d == 1:
            x = (axis,)
            xi = (xi_axis,)
        else:
            x = tuple(np.meshgrid(axis, axis, indexing="ij"))
            xi = tuple(np.meshgrid(xi_axis, xi_axis, indexing="ij"))
        xi_sq = sum(c * c for c in xi)
        for arr in (*x, *xi, xi_sq):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "xi_sq", xi_sq)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def cell(self) -> float:
        return self.dx**self.d

    @property
    def xi_max(self) -> float:
        """Largest frequency magnitude per axis, (pi/L)*(n/2)."""
        return (np.pi / self.L) * (self.n // 2)

    def __repr__(self) -> str:
        return f"Grid(d={self.d}, n={self.n}, L={self.L})"


def make_grid(d: int, n: int, L: float) -> Grid:
    """Build a periodic grid, rejecting invalid (d, n, L)."""
    return Grid(d, n, L)


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples of a function on the nodes of a periodic grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.shape != self.grid.shape:
            raise SpectralError(
                f"field values have shape {vals.shape}, expected {self.grid.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise SpectralError("field contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Plancherel-normalized spectral coefficients on a grid's frequency lattice."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if coeffs.shape != self.grid.shape:
            raise SpectralError(
                f"coefficients have shape {coeffs.shape}, expected {self.grid.shape}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)


def field_from_function(grid: Grid, fn) -> Field:
    """Sample fn(x_1, ..., x_d) on the grid nodes."""
    return Field(grid, fn(*grid.x))


def _plancherel_scale(grid: Grid) -> float:
    # quadrature L2 norm of samples == l2 norm of fft * scale
    return math.sqrt(grid.cell / grid.n**grid.d)


def transform(f: Field) -> SpectralField:
    """Forward transform with Plancherel normalization."""
    return SpectralField(f.grid, np.fft.fftn(f.values) * _plancherel_scale(f.grid))


def inverse_transform(F: SpectralField) -> Field:
    """Inverse of :func:`transform`."""
    return Field(F.grid, np.fft.ifftn(F.coeffs / _plancherel_scale(F.grid)))


def check_lattice_values(vals: np.ndarray, grid: Grid, name: str) -> np.ndarray:
    """Validate a multiplier sampled on the frequency lattice: real and finite."""
    vals = np.asarray(vals, dtype=np.float64)
    if vals.shape != grid.shape:
        raise SpectralError(
            f"symbol {name} evaluated to shape {vals.shape}, expected {grid.shape}"
        )
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = tuple(np.argwhere(bad)[0])
        xi_pt = tuple(float(grid.xi[a][idx]) for a in range(grid.d))
        raise SpectralError(f"symbol {name} is not finite at xi = {xi_pt}")
    return vals


def _multiplier_values(symbol, grid: Grid) -> np.ndarray:
    if hasattr(symbol, "on_grid"):
        return symbol.on_grid(grid)
    name = getattr(symbol, "name", getattr(symbol, "__name__", repr(symbol)))
    return check_lattice_values(symbol(*grid.xi), grid, name)


def free_propagate(f: Field, symbol, t: float) -> Field:
    """Exact solution of the free flow: u_hat(t) = exp(i*t*P(xi)) * u_hat(0).

    `symbol` is anything evaluable on the grid's frequency lattice (a catalog
    Symbol, or a plain callable of the frequency components).  The sign is
    fixed so that a constant multiplier c yields the global phase exp(i*c*t)
    and a linear multiplier c*xi translates the data to u0(x + c*t).
    """
    if not np.isfinite(t):
        raise SpectralError(f"propagation time must be finite, got {t}")
    if t == 0.0:
        return f
    pvals = _multiplier_values(symbol, f.grid)
    phase = np.exp(1j * t * pvals)
    return Field(f.grid, np.fft.ifftn(np.fft.fftn(f.values) * phase))


# relative size of the zero mode tolerated by negative-order homogeneous norms
_ZERO_MODE_RTOL = 1e-13


def sobolev_norm(f: Field, s: float, homogeneous: bool = False) -> float:
    """Sobolev norm of order s.

    Inhomogeneous weight (1 + |xi|^2)^s; homogeneous weight |xi|^(2s).  The
    homogeneous norm with s < 0 requires vanishing mean (zero mode), since
    the weight diverges there.
    """
    if not np.isfinite(s):
        raise SpectralError(f"regularity s must be finite, got {s}")
    c2 = np.abs(transform(f).coeffs) ** 2
    grid = f.grid
    if not homogeneous:
        return float(np.sqrt(np.sum((1.0 + grid.xi_sq) ** s * c2)))
    zero = (0,) * grid.d
    if s < 0:
        total = float(np.sum(c2))
        if c2[zero] > (_ZERO_MODE_RTOL**2) * total:
            raise SpectralError(
                "homogeneous norm with s < 0 requires the zero mode to vanish "
                f"(zero-mode mass fraction {c2[zero] / max(total, 1e-300):.3e})"
            )
    with np.errstate(divide="ignore"):
        w = grid.xi_sq**s
    w = np.array(w)
    w[zero] = 1.0 if s == 0 else 0.0
    return float(np.sqrt(np.sum(w * c2)))


def lebesgue_norm(f: Field, q: float) -> float:
    """Quadrature L^q norm; q = inf returns the max modulus."""
    if q == np.inf:
        return float(np.abs(f.values).max())
    if not q >= 1:
        raise SpectralError(f"Lebesgue exponent must be >= 1 or inf, got {q}")
    return float((np.sum(np.abs(f.values) ** q) * f.grid.cell) ** (1.0 / q))


def spacetime_norm_from_samples(times, lq_values, p: float) -> float:
    """Composite-trapezoid L^p-in-time norm of precomputed spatial norms."""
    if not (np.isfinite(p) and p >= 1):
        raise SpectralError(f"time exponent p must satisfy 1 <= p < inf, got {p}")
    times = np.asarray(times, dtype=np.float64)
    lq_values = np.asarray(lq_values, dtype=np.float64)
    if times.ndim != 1 or times.size < 2 or lq_values.shape != times.shape:
        raise SpectralError("need at least two time samples with matching norms")
    if np.any(np.diff(times) <= 0):
        raise SpectralError("snapshot times must be strictly increasing")
    return float(np.trapezoid(lq_values**p, times) ** (1.0 / p))


def spacetime_norm(snapshots, p: float, q: float) -> float:
    """L^p-in-time L^q-in-space norm of a time-sorted list of (t, Field)."""
    if len(snapshots) < 2:
        raise SpectralError("space-time norm needs at least two snapshots")
    times = [t for t, _ in snapshots]
    values = [lebesgue_norm(f, q) for _, f in snapshots]
    return spacetime_norm_from_samples(times, values, p)


def spectral_tail_mass(f: Field) -> float:
    """Fraction of the squared L2 mass in the top octave of frequencies."""
    with np.errstate(over="ignore"):
        c2 = np.abs(transform(f).coeffs) ** 2
    grid = f.grid
    cut = grid.xi_max / 2.0
    mask = np.abs(grid.xi[0]) >= cut
    for a in range(1, grid.d):
        mask = mask | (np.abs(grid.xi[a]) >= cut)
    total = float(np.sum(c2))
    if total == 0.0 or not math.isfinite(total):
        return 0.0
    return float(np.sum(c2[mask]) / total)


def spatial_tail_mass(f: Field) -> float:
    """Fraction of the squared L2 mass outside the half box |x|_inf <= L/2."""
    with np.errstate(over="ignore"):
        a2 = np.abs(f.values) ** 2
    grid = f.grid
    cut = grid.L / 2.0
    mask = np.abs(grid.x[0]) > cut
    for a in range(1, grid.d):
        mask = mask | (np.abs(grid.x[a]) > cut)
    total = float(np.sum(a2))
    if total == 0.0 or not math.isfinite(total):
        return 0.0
    return float(np.sum(a2[mask]) / total)
