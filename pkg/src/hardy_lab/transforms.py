"""Changes of variables that move a solution to the normalized problem on [-1, 1].

The chain is: parabolic rescaling of [0, T] to [0, 1], the conformal
(Appell) map that equalizes the Gaussian decay rates 1/beta^2 at t = 0 and
1/alpha^2 at t = 1, and the affine map of [0, 1] onto [-1, 1]. Each map
sends solutions of u_t = i(u_xx + V u) to solutions with a transformed V
and preserves the L^2 norm at corresponding times.

Only the space dimension n enters through the amplitude exponents; x is a
1-D coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .closed_forms import HardyConfig
from .errors import ContractError, DomainError
from .grid import Trajectory, laplacian
from .propagator import PotentialSpec

CLOSED_FORM = "closed-form"
INTERPOLATED = "trajectory-interpolated"


@dataclass(frozen=True)
class SolutionOracle:
    """u(x, t) for scalar t in ``valid_t`` and array x.

    ``error_bound`` estimates the sup-norm error of ``evaluate`` and
    ``residual_bound`` the L^2 size of the equation residual that the
    interpolation itself introduces (both zero for closed forms). The
    latter is first order in the sample spacing: the time derivative of a
    piecewise-linear interpolant is only first-order accurate.
    """

    evaluate: Callable
    valid_t: tuple[float, float]
    provenance: str = CLOSED_FORM
    error_bound: float = 0.0
    residual_bound: float = 0.0

    def __post_init__(self):
        lo, hi = map(float, self.valid_t)
        if not lo < hi:
            raise ContractError(f"empty interval {self.valid_t}")
        object.__setattr__(self, "valid_t", (lo, hi))

    def covers(self, lo: float, hi: float) -> bool:
        a, b = self.valid_t
        eps = 1e-12 * max(1.0, abs(a), abs(b))
        return a - eps <= lo and hi <= b + eps

    def __call__(self, x, t):
        t = float(t)
        if not self.covers(t, t):
            raise DomainError(f"t = {t} outside {self.valid_t}")
        lo, hi = self.valid_t
        return self.evaluate(np.asarray(x, dtype=float), min(max(t, lo), hi))

    @classmethod
    def closed_form(cls, func: Callable, valid_t) -> "SolutionOracle":
        return cls(func, tuple(valid_t), CLOSED_FORM)

    @classmethod
    def from_trajectory(cls, traj: Trajectory) -> "SolutionOracle":
        """Periodic cubic splines in x, linear interpolation in t.

        Outside [-L, L] the field is taken to be zero.
        """
        if len(traj) < 2:
            raise ContractError("need at least two time samples")
        g = traj.grid
        L = g.half_width
        xs = np.append(g.x, L)
        data = traj.values()
        splines = [CubicSpline(xs, np.append(v, v[0]), bc_type="periodic") for v in data]
        times = traj.times

        def evaluate(x, t):
            j = int(np.clip(np.searchsorted(times, t) - 1, 0, len(times) - 2))
            w = (t - times[j]) / (times[j + 1] - times[j])
            inside = np.abs(x) <= L
            xc = np.where(inside, x, 0.0)
            out = (1 - w) * splines[j](xc) + w * splines[j + 1](xc)
            return np.where(inside, out, 0.0)

        err, res = _interpolation_bounds(traj, splines)
        return cls(evaluate, (times[0], times[-1]), INTERPOLATED, err, res)


def _interpolation_bounds(traj: Trajectory, splines) -> tuple[float, float]:
    """(sup error, residual error) estimates.

    Space: spline vs spectral interpolant at cell midpoints (values) and
    spline vs spectral second derivative at the nodes (residual).
    Time: |u_tt| dt^2 / 8 (values) and ||u_tt|| dt / 2 (residual), with
    u_tt from second differences of the samples.
    """
    g = traj.grid
    shift = np.exp(0.5j * g.xi_fft * g.dx)
    mid = g.x + 0.5 * g.dx
    sup_x = res_x = 0.0
    for f, s in zip(traj.fields, splines):
        spec_mid = np.fft.ifft(shift * np.fft.fft(f.values))
        sup_x = max(sup_x, float(np.max(np.abs(s(mid) - spec_mid))))
        d2 = s(g.x, 2) - laplacian(f, check=False).values
        res_x = max(res_x, math.sqrt(g.integrate(np.abs(d2) ** 2)))
    sup_t = res_t = 0.0
    if len(traj) >= 3:
        data = traj.values()
        dt = np.diff(traj.times)
        utt = (data[2:] - data[1:-1]) / dt[1:, None] - (data[1:-1] - data[:-2]) / dt[:-1, None]
        utt /= 0.5 * (dt[1:] + dt[:-1])[:, None]
        h = dt.max()
        sup_t = float(np.max(np.abs(utt))) * h**2 / 8.0
        res_t = max(math.sqrt(g.integrate(np.abs(r) ** 2)) for r in utt) * h / 2.0
    return sup_x + sup_t, res_x + res_t


def _require(u: SolutionOracle, lo: float, hi: float) -> None:
    if not u.covers(lo, hi):
        raise DomainError(f"oracle valid on {u.valid_t}, need [{lo}, {hi}]")


def _wrap(V: PotentialSpec, func: Callable, name: str) -> PotentialSpec:
    if V.is_zero:
        return PotentialSpec.zero()
    if V.kind == "sampled":
        raise ContractError("transforms need a potential that can be evaluated off-grid")
    return PotentialSpec.from_callable(func, name=name, real=V.real,
                                       time_dependent=True)


def scale_solution(u: SolutionOracle, T: float, n: int = 1) -> SolutionOracle:
    """u_T(x, t) = T^(n/4) u(sqrt(T) x, T t) on [0, 1]."""
    if not T > 0:
        raise ContractError(f"T must be positive, got {T}")
    _require(u, 0.0, T)
    rt = math.sqrt(T)
    amp = T ** (n / 4)

    def evaluate(x, t):
        return amp * u(rt * x, T * t)

    # the residual of u_T is T times the rescaled residual of u in L^2
    return SolutionOracle(evaluate, (0.0, 1.0), u.provenance, amp * u.error_bound,
                          T * u.residual_bound)


def scale_potential(V: PotentialSpec, T: float) -> PotentialSpec:
    """V_T(x, t) = T V(sqrt(T) x, T t)."""
    rt = math.sqrt(T)
    return _wrap(V, lambda x, t: T * V(rt * np.asarray(x), T * t), f"scaled({V.name})")


def _appell_denominator(alpha: float, beta: float, t):
    return alpha * (1.0 - t) + beta * t


def appell(u: SolutionOracle, alpha: float, beta: float, n: int = 1) -> SolutionOracle:
    """Conformal map equalizing decay rates; u must be valid on [0, 1].

    u~(x, t) = (sqrt(ab)/p)^(n/2) u(sqrt(ab) x / p, b t / p) exp(-i (a - b) x^2 / (4 p)),
    p = a (1 - t) + b t.
    """
    if not (alpha > 0 and beta > 0):
        raise ContractError("alpha and beta must be positive")
    _require(u, 0.0, 1.0)
    r = math.sqrt(alpha * beta)

    def evaluate(x, t):
        p = _appell_denominator(alpha, beta, t)
        s = beta * t / p
        phase = np.exp(-1j * (alpha - beta) * x**2 / (4.0 * p))
        return (r / p) ** (n / 2) * u(r * x / p, s) * phase

    amp = (r / min(alpha, beta)) ** (n / 2)
    rate = alpha * beta / min(alpha, beta) ** 2  # max of ds/dt
    return SolutionOracle(evaluate, (0.0, 1.0), u.provenance, amp * u.error_bound,
                          rate * u.residual_bound)


def appell_time(t, alpha: float, beta: float):
    """The time s = b t / (a (1 - t) + b t) at which u~(t) samples u."""
    return beta * t / _appell_denominator(alpha, beta, t)


def appell_potential(V: PotentialSpec, alpha: float, beta: float, T: float = 1.0) -> PotentialSpec:
    """Potential for u~ built from u_T: (ab T / p^2) V(sqrt(ab T) x / p, b T t / p)."""
    r = math.sqrt(alpha * beta * T)

    def func(x, t):
        p = _appell_denominator(alpha, beta, t)
        return alpha * beta * T / p**2 * V(r * np.asarray(x) / p, beta * T * t / p)

    return _wrap(V, func, f"appell({V.name})")


def half_interval(u_tilde: SolutionOracle, n: int = 1) -> SolutionOracle:
    """v(x, t) = 2^(-n/4) u~(x / sqrt 2, (1 + t) / 2) on [-1, 1]."""
    _require(u_tilde, 0.0, 1.0)
    amp = 2.0 ** (-n / 4)
    r2 = math.sqrt(2.0)

    def evaluate(x, t):
        return amp * u_tilde(x / r2, 0.5 * (1.0 + t))

    return SolutionOracle(evaluate, (-1.0, 1.0), u_tilde.provenance, amp * u_tilde.error_bound,
                          0.5 * u_tilde.residual_bound)


def half_interval_potential(V_tilde: PotentialSpec) -> PotentialSpec:
    """(1/2) V~(x / sqrt 2, (1 + t) / 2)."""
    r2 = math.sqrt(2.0)
    return _wrap(V_tilde, lambda x, t: 0.5 * V_tilde(np.asarray(x) / r2, 0.5 * (1.0 + t)),
                 f"half({V_tilde.name})")


def reduction_chain(u: SolutionOracle, alpha: float, beta: float, T: float,
                    n: int = 1) -> tuple[SolutionOracle, float]:
    """scale, then appell, then half_interval. Returns (v, mu = T / (2 alpha beta))."""
    cfg = HardyConfig(alpha, beta, T)
    v = half_interval(appell(scale_solution(u, T, n), alpha, beta, n), n)
    return v, cfg.mu


def reduction_chain_potential(V: PotentialSpec, alpha: float, beta: float, T: float) -> PotentialSpec:
    return half_interval_potential(appell_potential(V, alpha, beta, T))


def pullback_weight(t, a_values, cfg: HardyConfig):
    """Carry a weight a(t) on [-1, 1] for v back to the original solution on [0, T].

    ||e^{a(t) x^2} v(t)|| = ||e^{w(s) x^2} u(s)|| with q = a(1 - t) + b(1 + t),
    s = b T (1 + t) / q and w = a(t) q^2 / (2 alpha beta T). Returns (s, w).
    """
    t = np.asarray(t, dtype=float)
    al, be, T = cfg.alpha, cfg.beta, cfg.T
    q = al * (1.0 - t) + be * (1.0 + t)
    s = be * T * (1.0 + t) / q
    return s, np.asarray(a_values, dtype=float) * q**2 / (2.0 * al * be * T)
