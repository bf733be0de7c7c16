"""Uniform periodic grids on [-L, L), spectral calculus and quadrature.

The Fourier transform uses the unitary normalization

    f_hat(xi) = (2 pi)^(-1/2) * integral exp(-i xi x) f(x) dx,

discretized on the lattice xi_k = pi k / L, k = -n/2 .. n/2 - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate

from .errors import ContractError, NonIntegrableWeight, TruncationError

BOUNDARY_FRACTION = 0.05
BOUNDARY_RTOL = 1e-12
WEIGHT_DECAY_RTOL = 1e-8
# exp(709) is the largest finite double
_LOG_OVERFLOW = 700.0


@dataclass(frozen=True)
class SpatialGrid:
    n_points: int
    half_width: float

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ContractError(f"n_points must be a power of two >= 8, got {n!r}")
        if not self.half_width > 0:
            raise ContractError(f"half_width must be positive, got {self.half_width!r}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.half_width + self.dx * np.arange(self.n_points)
        x.flags.writeable = False
        return x

    @cached_property
    def xi(self) -> np.ndarray:
        """Frequencies in ascending order (the order returned by fourier_transform)."""
        k = np.arange(-self.n_points // 2, self.n_points // 2)
        xi = np.pi * k / self.half_width
        xi.flags.writeable = False
        return xi

    @cached_property
    def xi_fft(self) -> np.ndarray:
        """Frequencies in numpy FFT order."""
        xi = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
        xi.flags.writeable = False
        return xi

    @cached_property
    def _xi_deriv(self) -> np.ndarray:
        # Nyquist mode dropped for odd-order derivatives
        xi = self.xi_fft.copy()
        xi[self.n_points // 2] = 0.0
        return xi

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        return np.abs(self.x) >= (1.0 - BOUNDARY_FRACTION) * self.half_width

    def integrate(self, values: np.ndarray) -> complex | float:
        """Composite Simpson rule over one period (the node x = L closes the period)."""
        y = np.append(values, values[0])
        return integrate.simpson(y, dx=self.dx)


def make_grid(n_points: int, half_width: float) -> SpatialGrid:
    return SpatialGrid(n_points, float(half_width))


@dataclass(frozen=True)
class WaveField:
    grid: SpatialGrid
    t: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise ContractError(
                f"values must have shape ({self.grid.n_points},), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ContractError("wave field contains non-finite entries")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def from_function(cls, grid: SpatialGrid, func, t: float = 0.0) -> "WaveField":
        """Sample ``func(x)`` (or ``func(x, t)`` if it accepts two arguments)."""
        try:
            vals = func(grid.x, t)
        except TypeError:
            vals = func(grid.x)
        return cls(grid, t, np.broadcast_to(vals, grid.x.shape))

    def with_values(self, values, t: float | None = None) -> "WaveField":
        return WaveField(self.grid, self.t if t is None else t, values)

    def norm(self) -> float:
        return l2_norm(self)


@dataclass(frozen=True)
class Trajectory:
    grid: SpatialGrid
    times: np.ndarray
    fields: tuple

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if len(times) != len(self.fields):
            raise ContractError("times and fields must have equal length")
        if np.any(np.diff(times) <= 0):
            raise ContractError("trajectory times must be strictly increasing")
        if any(f.grid != self.grid for f in self.fields):
            raise ContractError("all fields must share the trajectory grid")
        times.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "fields", tuple(self.fields))

    def __len__(self):
        return len(self.fields)

    def __getitem__(self, i) -> WaveField:
        return self.fields[i]

    def values(self) -> np.ndarray:
        """All samples as a (n_times, n_points) array."""
        return np.stack([f.values for f in self.fields])


def check_boundary(f: WaveField, rtol: float = BOUNDARY_RTOL) -> None:
    """Raise TruncationError if |f| on the outer 5% of the half-width exceeds
    ``rtol`` times its maximum."""
    mag = np.abs(f.values)
    peak = mag.max()
    if peak == 0.0:
        return
    edge = mag[f.grid.boundary_mask].max()
    if edge > rtol * peak:
        raise TruncationError(
            f"boundary amplitude {edge / peak:.3e} (relative) exceeds {rtol:.0e}; "
            "enlarge the grid")


def fourier_transform(f: WaveField, check: bool = True) -> np.ndarray:
    """Sampled f_hat on ``f.grid.xi`` (ascending frequencies)."""
    if check:
        check_boundary(f)
    g = f.grid
    fhat = np.fft.fft(f.values) * np.exp(1j * g.xi_fft * g.half_width)
    fhat *= g.dx / math.sqrt(2.0 * math.pi)
    return np.fft.fftshift(fhat)


def inverse_fourier_transform(fhat: np.ndarray, grid: SpatialGrid, t: float = 0.0) -> WaveField:
    F = np.fft.ifftshift(np.asarray(fhat, dtype=complex))
    F = F * np.exp(-1j * grid.xi_fft * grid.half_width) * (math.sqrt(2.0 * math.pi) / grid.dx)
    return WaveField(grid, t, np.fft.ifft(F))


def spectral_multiply(f: WaveField, multiplier: np.ndarray) -> np.ndarray:
    """ifft(multiplier * fft(f)) with the multiplier given in FFT order."""
    return np.fft.ifft(multiplier * np.fft.fft(f.values))


def laplacian(f: WaveField, check: bool = True) -> WaveField:
    if check:
        check_boundary(f)
    return f.with_values(spectral_multiply(f, -f.grid.xi_fft**2))


def gradient(f: WaveField, check: bool = True) -> WaveField:
    if check:
        check_boundary(f)
    return f.with_values(spectral_multiply(f, 1j * f.grid._xi_deriv))


def inner(f: WaveField, g: WaveField) -> complex:
    """(f, g) = integral of f * conj(g)."""
    return complex(f.grid.integrate(f.values * np.conj(g.values)))


def l2_norm(f: WaveField) -> float:
    return math.sqrt(max(f.grid.integrate(np.abs(f.values) ** 2), 0.0))


def weighted_l2_norm(f: WaveField, a: float, b: float = 0.0, xi: float = 0.0,
                     decay_rtol: float = WEIGHT_DECAY_RTOL) -> float:
    """|| exp(a (x + b xi)^2) f ||_{L^2}.

    The integrand exp(2a(x + b xi)^2) |f|^2 is formed in log space; it must
    stay finite and fall below ``decay_rtol`` times its peak on the outer
    part of the grid, otherwise NonIntegrableWeight is raised.
    """
    g = f.grid
    mag = np.abs(f.values)
    with np.errstate(divide="ignore"):
        log_w = 2.0 * a * (g.x + b * xi) ** 2 + 2.0 * np.log(mag)
    peak = log_w.max()
    if not np.isfinite(peak):
        if peak == -np.inf:
            return 0.0
        raise NonIntegrableWeight("weighted integrand is not finite")
    if peak > _LOG_OVERFLOW:
        raise NonIntegrableWeight(f"weighted integrand overflows (log peak {peak:.1f})")
    edge = log_w[g.boundary_mask].max()
    if edge - peak > math.log(decay_rtol):
        raise NonIntegrableWeight(
            f"weighted integrand does not decay at the boundary "
            f"(relative size {math.exp(edge - peak):.3e})")
    w = np.exp(log_w)
    return math.sqrt(g.integrate(w))
