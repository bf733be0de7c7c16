"""Gaussian-conjugated Schrödinger operator and its convexity calculus.

Conjugating by the weight exp(a(t) (x + b(t))^2) gives

    e^W (d/dt - i d^2/dx^2) e^-W = d/dt - S - A

with S symmetric and A skew-symmetric (n = 1 throughout):

    S = -2i (2a (x + b) d/dx + a) + a_dot (x + b)^2 + 2 a b_dot (x + b)
    A = i (d^2/dx^2 + 4 a^2 (x + b)^2)

Spatial derivatives are spectral, integrals use the grid's Simpson rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ContractError, NonIntegrableWeight, NonpositiveF
from .grid import Trajectory, WaveField, gradient, inner, laplacian, weighted_l2_norm

N_DIM = 1


@dataclass(frozen=True)
class FrameCoefficients:
    """Weight a, drift b and time-change gamma (with derivatives) at one instant.

    gamma defaults to 1/a, the choice used by the convexity engine.
    """

    a: float
    a_dot: float = 0.0
    a_ddot: float = 0.0
    b: float = 0.0
    b_dot: float = 0.0
    b_ddot: float = 0.0
    gamma: float | None = None
    gamma_dot: float | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise ContractError(f"a must be positive, got {self.a}")
        if self.gamma is None:
            object.__setattr__(self, "gamma", 1.0 / self.a)
            if self.gamma_dot is None:
                object.__setattr__(self, "gamma_dot", -self.a_dot / self.a**2)
        if self.gamma_dot is None:
            object.__setattr__(self, "gamma_dot", 0.0)
        if not self.gamma > 0:
            raise ContractError(f"gamma must be positive, got {self.gamma}")


def F_general(fc: FrameCoefficients) -> float:
    """gamma (a'' + 32 a^3 - 3 a'^2 / (2a) - (a/2) (a'/a + gamma'/gamma)^2)."""
    a, ad, add, g, gd = fc.a, fc.a_dot, fc.a_ddot, fc.gamma, fc.gamma_dot
    return g * (add + 32 * a**3 - 1.5 * ad**2 / a - 0.5 * a * (ad / a + gd / g) ** 2)


def F_of(a, a_dot, a_ddot):
    """(a'' - 3 a'^2 / (2a) + 32 a^3) / a; vectorized."""
    a = np.asarray(a, dtype=float)
    return (a_ddot - 1.5 * np.asarray(a_dot) ** 2 / a + 32.0 * a**3) / a


def apply_S(f: WaveField, fc: FrameCoefficients) -> WaveField:
    y = f.grid.x + fc.b
    fx = gradient(f).values
    v = f.values
    out = (-2j * (2 * fc.a * y * fx + fc.a * N_DIM * v)
           + fc.a_dot * y**2 * v + 2 * fc.a * fc.b_dot * y * v)
    return f.with_values(out)


def apply_A(f: WaveField, fc: FrameCoefficients) -> WaveField:
    y = f.grid.x + fc.b
    return f.with_values(1j * (laplacian(f).values + 4 * fc.a**2 * y**2 * f.values))


def apply_S_t(f: WaveField, fc: FrameCoefficients) -> WaveField:
    """S with every coefficient replaced by its time derivative."""
    a, ad, add, b_dot, b_ddot = fc.a, fc.a_dot, fc.a_ddot, fc.b_dot, fc.b_ddot
    y = f.grid.x + fc.b
    fx = gradient(f).values
    v = f.values
    out = (-2j * (2 * ad * y * fx + 2 * a * b_dot * fx + ad * N_DIM * v)
           + (add * y**2 + 4 * ad * b_dot * y + 2 * a * b_ddot * y + 2 * a * b_dot**2) * v)
    return f.with_values(out)


def apply_commutator(f: WaveField, fc: FrameCoefficients) -> WaveField:
    """(S_t + [S, A]) f from its closed form (already commuted)."""
    a, ad, add = fc.a, fc.a_dot, fc.a_ddot
    bd, bdd = fc.b_dot, fc.b_ddot
    y = f.grid.x + fc.b
    v = f.values
    fx = gradient(f).values
    fxx = laplacian(f).values
    out = (-8 * a * fxx
           - 2j * ((4 * ad * y + 4 * a * bd) * fx + 2 * ad * N_DIM * v)
           + (add + 32 * a**3) * y**2 * v
           + (4 * ad * bd + 2 * a * bdd) * y * v
           + 2 * a * bd**2 * v)
    return f.with_values(out)


def commutator_form_identity(f: WaveField, fc: FrameCoefficients) -> tuple[float, float]:
    """Both sides of the quadratic-form identity for gamma S_t + gamma [S, A] + gamma' S.

    lhs is the form evaluated with the commutator formula; rhs is the
    completed-square expression

        int 8 gamma a |-i f' + (b'/2) f + (a'/(2a) + gamma'/(4 gamma)) (x + b) f|^2
        + int F(a, gamma) |x + b + a gamma b'' / F|^2 |f|^2
        - (gamma a b'')^2 / F * int |f|^2.
    """
    F = F_general(fc)
    if not F > 0:
        raise NonpositiveF(f"F(a, gamma) = {F:.6g} must be positive")
    a, g, gd = fc.a, fc.gamma, fc.gamma_dot
    lhs = g * inner(apply_commutator(f, fc), f) + gd * inner(apply_S(f, fc), f)

    grid = f.grid
    y = grid.x + fc.b
    v = f.values
    w = -1j * gradient(f).values + 0.5 * fc.b_dot * v + (fc.a_dot / (2 * a) + gd / (4 * g)) * y * v
    mass = np.abs(v) ** 2
    rhs = (8 * g * a * grid.integrate(np.abs(w) ** 2)
           + F * grid.integrate((y + a * g * fc.b_ddot / F) ** 2 * mass)
           - (g * a * fc.b_ddot) ** 2 / F * grid.integrate(mass))
    return float(lhs.real), float(np.real(rhs))


def weighted_field(u: WaveField, a: float, b: float = 0.0, xi: float = 0.0) -> WaveField:
    """f = exp(a (x + b xi)^2) u."""
    expo = a * (u.grid.x + b * xi) ** 2
    if expo.max() > 700.0:
        raise NonIntegrableWeight("weight overflows on this grid")
    return u.with_values(np.exp(expo) * u.values)


def conjugated_residual(f_prev: WaveField, f: WaveField, f_next: WaveField, h_t: float,
                        fc: FrameCoefficients) -> WaveField:
    """d/dt f - S f - A f with a centered time difference."""
    dfdt = (f_next.values - f_prev.values) / (2.0 * h_t)
    return f.with_values(dfdt - apply_S(f, fc).values - apply_A(f, fc).values)


def _as_path(p, times: np.ndarray) -> np.ndarray:
    if callable(p):
        return np.asarray(p(times), dtype=float) * np.ones_like(times)
    return np.broadcast_to(np.asarray(p, dtype=float), times.shape).astype(float)


def _time_derivative(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    if len(times) < 3:
        return np.gradient(values, times)
    return np.gradient(values, times, edge_order=2)


def theta_exponent(times, gamma) -> np.ndarray:
    """(int_t^d ds/gamma) / (int_c^d ds/gamma) on the sample times."""
    times = np.asarray(times, dtype=float)
    inv = 1.0 / _as_path(gamma, times)
    cum = integrate.cumulative_simpson(inv, x=times, initial=0.0)
    return (cum[-1] - cum) / cum[-1]


@dataclass(frozen=True)
class ConvexityDiagnostics:
    times: np.ndarray
    H: np.ndarray
    D: np.ndarray
    N: np.ndarray
    theta: np.ndarray

    @property
    def log_H(self) -> np.ndarray:
        return np.log(self.H)

    def interpolation_gap(self) -> np.ndarray:
        """theta log H(c) + (1 - theta) log H(d) - log H(t); non-negative under log-convexity."""
        L = self.log_H
        return self.theta * L[0] + (1.0 - self.theta) * L[-1] - L

    def second_differences(self) -> np.ndarray:
        """Second divided differences of log H at the interior samples."""
        L, t = self.log_H, self.times
        s1 = np.diff(L) / np.diff(t)
        return 2.0 * np.diff(s1) / (t[2:] - t[:-2])


def convexity_diagnostics(traj: Trajectory, a_path, b_path=0.0, xi: float = 0.0,
                          gamma_path=None) -> ConvexityDiagnostics:
    """H = ||e^{a (x + b xi)^2} u||^2, D = (S f, f), N = D / H and theta along ``traj``.

    Paths are scalars, arrays aligned with ``traj.times`` or callables of t;
    their time derivatives are centered differences (one-sided at the ends).
    gamma defaults to 1/a (to 1 where a vanishes).
    """
    times = traj.times
    a = _as_path(a_path, times)
    b = _as_path(b_path, times)
    a_dot = _time_derivative(a, times)
    b_dot = _time_derivative(b, times)
    if gamma_path is not None:
        gamma = _as_path(gamma_path, times)
    elif np.all(a > 0):
        gamma = 1.0 / a
    else:
        # unweighted samples: 1/a is undefined, use the uniform time change
        gamma = np.ones_like(times)

    H = np.empty(len(times))
    D = np.empty(len(times))
    for j, u in enumerate(traj.fields):
        H[j] = weighted_l2_norm(u, a[j], b[j], xi) ** 2
        f = weighted_field(u, a[j], b[j], xi)
        if a[j] > 0:
            fc = FrameCoefficients(a[j], a_dot[j], b=b[j] * xi, b_dot=b_dot[j] * xi)
            D[j] = inner(apply_S(f, fc), f).real
        else:
            # S reduces to multiplication by a' (x + b xi)^2
            D[j] = f.grid.integrate(a_dot[j] * (f.grid.x + b[j] * xi) ** 2 * np.abs(f.values) ** 2)
    return ConvexityDiagnostics(times, H, D, D / H, theta_exponent(times, gamma))


def free_wave_H(t, R: float, mu: float):
    """Closed-form ||e^{mu x^2} u_R(t)||^2 (n = 1) for mu below the integrability limit."""
    t = np.asarray(t, dtype=float)
    s = 1.0 + (R * t) ** 2
    rate = R / (2.0 * s) - 2.0 * mu
    if np.any(rate <= 0):
        raise NonIntegrableWeight("weight exceeds the Gaussian decay of u_R")
    return math.sqrt(math.pi) / np.sqrt(s * rate)
