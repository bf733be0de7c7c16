"""Time evolution of u_t = i (u_xx + V u) on a periodic spectral grid.

Free flow is exact in Fourier space (u_hat_t = -i xi^2 u_hat). With a
potential we use Strang splitting: half a potential phase, a full free
step, half a potential phase, with time-dependent potentials frozen at the
midpoint of each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import closed_forms
from .errors import ContractError, UnstableWeighting
from .grid import SpatialGrid, Trajectory, WaveField, check_boundary, laplacian

# name -> (formula(x, t, **params), real-valued?, time-dependent?)
_REGISTRY: dict[str, tuple[Callable, bool, bool]] = {}


def register_potential(name: str, formula: Callable, real: bool, time_dependent: bool = True) -> None:
    _REGISTRY[name] = (formula, real, time_dependent)


def registered_potentials() -> list[str]:
    return sorted(_REGISTRY)


def _constant(x, t, value=1.0):
    return np.full(np.broadcast(x, t).shape, value, dtype=complex)


def _gaussian(x, t, amplitude=1.0, width=1.0):
    x, _ = np.broadcast_arrays(x, t)
    return amplitude * np.exp(-(x / width) ** 2)


def _oscillating(x, t, offset=0.0, amplitude=1.0, omega=1.0):
    _, t = np.broadcast_arrays(x, t)
    return offset + amplitude * np.sin(omega * t)


def _counterexample(x, t, k=2.0, n=1):
    return closed_forms.counterexample_V(x, t, k, n)


register_potential("constant", _constant, real=True, time_dependent=False)
register_potential("gaussian", _gaussian, real=True, time_dependent=False)
register_potential("oscillating", _oscillating, real=True)
register_potential("counterexample", _counterexample, real=False)


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """V(x, t): zero, a registered closed form, a wrapped callable, or samples on a grid."""

    kind: str
    name: str = ""
    params: dict = field(default_factory=dict)
    func: Callable | None = None
    values: np.ndarray | None = None
    times: np.ndarray | None = None
    real: bool = False
    time_dependent: bool = True

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls("zero", "zero", real=True, time_dependent=False)

    @classmethod
    def closed_form(cls, name: str, **params) -> "PotentialSpec":
        if name not in _REGISTRY:
            raise ContractError(f"unknown potential {name!r}; known: {registered_potentials()}")
        formula, real, time_dependent = _REGISTRY[name]
        real = real and all(np.isreal(v) for v in params.values())
        return cls("closed_form", name, dict(params), lambda x, t: formula(x, t, **params),
                   real=bool(real), time_dependent=time_dependent)

    @classmethod
    def from_callable(cls, func: Callable, name: str = "custom", real: bool = False,
                      time_dependent: bool = True) -> "PotentialSpec":
        return cls("closed_form", name, {}, func, real=real, time_dependent=time_dependent)

    @classmethod
    def sampled(cls, values, times=None) -> "PotentialSpec":
        """``values`` has shape (n_points,) or, with ``times``, (len(times), n_points)."""
        v = np.array(values, dtype=complex)
        if not np.all(np.isfinite(v)):
            raise ContractError("sampled potential must be finite")
        if times is not None:
            times = np.array(times, dtype=float)
            if v.ndim != 2 or v.shape[0] != len(times):
                raise ContractError("time-sampled potential needs shape (len(times), n_points)")
        elif v.ndim != 1:
            raise ContractError("static sampled potential must be 1-D")
        return cls("sampled", "sampled", values=v, times=times,
                   real=bool(np.all(v.imag == 0)), time_dependent=times is not None)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros(np.broadcast(x, t).shape, dtype=complex)
        if self.kind == "closed_form":
            return np.asarray(self.func(x, t), dtype=complex)
        return self._eval_sampled(x, float(t))

    def _eval_sampled(self, x, t):
        v = self.values
        if self.times is not None:
            j = int(np.clip(np.searchsorted(self.times, t) - 1, 0, len(self.times) - 2))
            t0, t1 = self.times[j], self.times[j + 1]
            w = np.clip((t - t0) / (t1 - t0), 0.0, 1.0)
            v = (1 - w) * v[j] + w * v[j + 1]
        if x.shape == v.shape:
            return v
        raise ContractError("sampled potential can only be evaluated on its own grid")

    def on_grid(self, grid: SpatialGrid, t: float) -> np.ndarray:
        return np.broadcast_to(self(grid.x, t), grid.x.shape)


@dataclass(frozen=True)
class EvolveConfig:
    dt: float
    scheme: str = "strang"  # "strang" or "exact_free"
    # relative boundary amplitude tolerated in outputs; splitting error
    # radiates across the whole grid at O(dt^2)
    boundary_rtol: float = 1e-5

    def __post_init__(self):
        if not self.dt > 0:
            raise ContractError(f"dt must be positive, got {self.dt}")
        if self.scheme not in ("strang", "exact_free"):
            raise ContractError(f"unknown scheme {self.scheme!r}")


def _free_multiplier(grid: SpatialGrid, delta_t: float) -> np.ndarray:
    return np.exp(-1j * grid.xi_fft**2 * delta_t)


def free_evolve_exact(u0: WaveField, delta_t: float) -> WaveField:
    """Exact free Schrödinger flow over ``delta_t`` (any sign)."""
    check_boundary(u0)
    if delta_t == 0:
        return u0
    out = np.fft.ifft(_free_multiplier(u0.grid, delta_t) * np.fft.fft(u0.values))
    result = u0.with_values(out, t=u0.t + delta_t)
    check_boundary(result)
    return result


def _step_sizes(gap: float, dt: float) -> list[float]:
    """Signed steps covering ``gap``: full steps of size dt plus a final partial one."""
    sign = 1.0 if gap >= 0 else -1.0
    gap = abs(gap)
    n_full = int(math.floor(gap / dt * (1 + 1e-12)))
    steps = [sign * dt] * n_full
    rest = gap - n_full * dt
    if rest > 1e-12 * dt:
        steps.append(sign * rest)
    return steps


def evolve(u0: WaveField, V: PotentialSpec, times, cfg: EvolveConfig) -> Trajectory:
    """Evolve ``u0`` and sample at ``times``.

    ``times`` run monotonically away from ``u0.t``, forward or backward;
    the returned trajectory is always ordered by increasing time.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ContractError("times must be a non-empty 1-D array")
    backward = times[-1] < u0.t
    rel = (u0.t - times) if backward else (times - u0.t)
    if np.any(np.diff(rel) <= 0) or rel[0] < -1e-14:
        raise ContractError("times must move strictly monotonically away from u0.t")
    if cfg.scheme == "exact_free" and not V.is_zero:
        raise ContractError("exact_free scheme requires the zero potential")
    check_boundary(u0)

    grid = u0.grid
    psi = u0.values.copy()
    t = u0.t
    fields = []
    kin_cache: dict[float, np.ndarray] = {}
    static_phase: dict[float, np.ndarray] = {}
    if not V.is_zero and not V.time_dependent:
        v_static = V.on_grid(grid, t)

    # overflow is reported below as UnstableWeighting
    with np.errstate(over="ignore", invalid="ignore"):
        for target in times:
            gap = target - t
            if cfg.scheme == "exact_free":
                if gap != 0:
                    psi = np.fft.ifft(_free_multiplier(grid, gap) * np.fft.fft(psi))
            else:
                for h in _step_sizes(gap, cfg.dt):
                    kin = kin_cache.get(h)
                    if kin is None:
                        kin = kin_cache[h] = _free_multiplier(grid, h)
                    if V.is_zero:
                        psi = np.fft.ifft(kin * np.fft.fft(psi))
                    else:
                        if V.time_dependent:
                            half = np.exp(0.5j * h * V.on_grid(grid, t + 0.5 * h))
                        else:
                            half = static_phase.get(h)
                            if half is None:
                                half = static_phase[h] = np.exp(0.5j * h * v_static)
                        psi = half * np.fft.ifft(kin * np.fft.fft(half * psi))
                    t += h
            t = float(target)
            if not np.all(np.isfinite(psi)):
                raise UnstableWeighting(f"non-finite field at t = {t}")
            f = WaveField(grid, t, psi)
            check_boundary(f, cfg.boundary_rtol)
            fields.append(f)
    if backward:
        return Trajectory(grid, times[::-1], tuple(fields[::-1]))
    return Trajectory(grid, times, tuple(fields))


def pde_residuals(u: Callable, V: PotentialSpec, sample_times, grid: SpatialGrid,
                  h_t: float = 1e-4) -> np.ndarray:
    """L^2 norm of u_t - i(u_xx + V u) at each sample time.

    ``u(x, t)`` is any solution oracle; u_t is a centered difference with
    step ``h_t`` and u_xx is spectral.
    """
    x = grid.x
    out = []
    for t in np.atleast_1d(np.asarray(sample_times, dtype=float)):
        up = np.broadcast_to(u(x, t + h_t), x.shape)
        um = np.broadcast_to(u(x, t - h_t), x.shape)
        f = WaveField(grid, t, np.broadcast_to(u(x, t), x.shape))
        dudt = (up - um) / (2.0 * h_t)
        res = dudt - 1j * (laplacian(f).values + V.on_grid(grid, t) * f.values)
        out.append(math.sqrt(grid.integrate(np.abs(res) ** 2)))
    return np.array(out)


def pde_residual(u: Callable, V: PotentialSpec, sample_times, grid: SpatialGrid,
                 h_t: float = 1e-4) -> float:
    return float(pde_residuals(u, V, sample_times, grid, h_t).max())
