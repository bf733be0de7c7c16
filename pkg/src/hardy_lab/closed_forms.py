"""Exact solutions, weights and potentials.

All functions are vectorized over numpy arrays. ``n`` (the space dimension)
only enters exponents; ``x`` is a 1-D coordinate (|x|^2 = x^2).
Complex powers use the principal branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ContractError, InvalidOrder, NoRealRoot, SingularKernel

# mu_of_R attains its maximum 1/8 at R = 1 (double root of 4 mu R^2 - R + 4 mu)
MU_MAX = 0.125


@dataclass(frozen=True)
class ExtremalParams:
    R: float
    n: int = 1

    def __post_init__(self):
        if not self.R > 0:
            raise ContractError(f"R must be positive, got {self.R}")
        if self.n < 1:
            raise ContractError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class HardyConfig:
    alpha: float
    beta: float
    T: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and self.T > 0):
            raise ContractError("alpha, beta and T must be positive")

    @property
    def mu(self) -> float:
        """Equal decay rate on [-1, 1] after the reduction chain."""
        return self.T / (2.0 * self.alpha * self.beta)

    @property
    def ratio(self) -> float:
        return self.T / (self.alpha * self.beta)


def u_R(x, t, R: float, n: int = 1):
    """Extremal free wave (R t - i)^(-n/2) exp(-(R - i R^2 t) x^2 / (4 (1 + R^2 t^2)))."""
    ExtremalParams(R, n)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    s = 1.0 + (R * t) ** 2
    return (R * t - 1j) ** (-n / 2) * np.exp(-(R - 1j * R**2 * t) * x**2 / (4.0 * s))


def weight_a_R(t, R: float):
    """R / (4 (1 + R^2 t^2))."""
    if not R > 0:
        raise ContractError(f"R must be positive, got {R}")
    t = np.asarray(t, dtype=float)
    return R / (4.0 * (1.0 + (R * t) ** 2))


def weight_a_R_derivatives(t, R: float):
    """(a, a_dot, a_ddot) of the extremal weight."""
    t = np.asarray(t, dtype=float)
    s = 1.0 + (R * t) ** 2
    a = R / (4.0 * s)
    a_dot = -(R**3) * t / (2.0 * s**2)
    a_ddot = -(R**3) / (2.0 * s**2) + 2.0 * R**5 * t**2 / s**3
    return a, a_dot, a_ddot


def mu_of_R(R: float) -> float:
    if not R > 0:
        raise ContractError(f"R must be positive, got {R}")
    return R / (4.0 * (1.0 + R * R))


def roots_of_mu(mu: float) -> tuple[float, float]:
    """Both roots of 4 mu R^2 - R + 4 mu = 0, smallest first."""
    if not mu > 0:
        raise ContractError(f"mu must be positive, got {mu}")
    disc = 1.0 - 64.0 * mu * mu
    if disc < 0:
        raise NoRealRoot(f"mu = {mu} > 1/8: discriminant {disc:.3g} < 0")
    sq = math.sqrt(disc)
    # product of roots is 1
    small = 8.0 * mu / (1.0 + sq)
    return small, 1.0 / small


def smallest_R(mu: float) -> float:
    return roots_of_mu(mu)[0]


def _check_order(k: float, n: int) -> None:
    if not k > n / 2:
        raise InvalidOrder(f"counterexample needs k > n/2, got k={k}, n={n}")


def counterexample_u(x, t, k: float, n: int = 1):
    """Smooth non-zero solution at the endpoint T/(alpha beta) = 1/4.

    (1 + i t)^(2k - n/2) (1 + x^2)^(-k) exp(-(1 - i t) x^2 / (4 (1 + t^2))).
    The time exponent is +2k - n/2; with -2k - n/2 the potential below is
    off by -4k/(1 + i t), which does not decay in x.
    """
    _check_order(k, n)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return ((1.0 + 1j * t) ** (2.0 * k - n / 2) * (1.0 + x**2) ** (-k)
            * np.exp(-(1.0 - 1j * t) * x**2 / (4.0 * (1.0 + t**2))))


def counterexample_V(x, t, k: float, n: int = 1):
    """Complex potential, |V| <~ 1 / (1 + x^2), for which counterexample_u solves the equation."""
    _check_order(k, n)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    r2 = x**2
    return (2.0 * k / (1.0 + 1j * t) + 2.0 * k * n - 4.0 * k * (1.0 + k) * r2 / (1.0 + r2)) / (1.0 + r2)


def theorem3_R(cfg: HardyConfig) -> float:
    """Smallest root of T/(alpha beta) = R / (2 (1 + R^2))."""
    if cfg.ratio > 0.25:
        raise NoRealRoot(f"T/(alpha beta) = {cfg.ratio} > 1/4")
    # same equation as mu = R/(4(1+R^2)) with mu = T/(2 alpha beta)
    return smallest_R(cfg.mu)


def theorem3_weight(t, cfg: HardyConfig):
    """Optimal interior Gaussian decay rate a(t) on [0, T]."""
    R = theorem3_R(cfg)
    al, be, T = cfg.alpha, cfg.beta, cfg.T
    t = np.asarray(t, dtype=float)
    p = al * t + be * (T - t)
    q = al * t - be * (T - t)
    return al * be * R * T / (2.0 * p**2 + 2.0 * R**2 * q**2)


def interior_minimum_criterion(cfg: HardyConfig) -> bool:
    """True iff 1/theorem3_weight attains its minimum strictly inside (0, T)."""
    R = theorem3_R(cfg)
    return abs(cfg.alpha - cfg.beta) < R**2 * (cfg.alpha + cfg.beta)


def hardy_extremal(y, beta: float, T: float):
    """exp(-(1/beta^2 + i/(4T)) y^2): initial data saturating T/(alpha beta) = 1/4."""
    y = np.asarray(y, dtype=float)
    return np.exp(-(1.0 / beta**2 + 1j / (4.0 * T)) * y**2)


def free_kernel(x, y, t: float, n: int = 1):
    """(4 pi i t)^(-n/2) exp(i |x - y|^2 / (4 t))."""
    if t == 0:
        raise SingularKernel("free kernel is singular at t = 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (4j * math.pi * t) ** (-n / 2) * np.exp(1j * (x - y) ** 2 / (4.0 * t))


def kernel_propagate(f_values, y, x, t: float, n: int = 1):
    """u(x, t) = integral K(x, y, t) f(y) dy by Simpson quadrature over the nodes ``y``.

    ``y`` must be uniformly spaced with f decaying at both ends.
    """
    y = np.asarray(y, dtype=float)
    f_values = np.asarray(f_values)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    K = free_kernel(x[:, None], y[None, :], t, n)
    return integrate.simpson(K * f_values[None, :], x=y, axis=1)


def gaussian_free_wave(x, t, width: float):
    """Free evolution of exp(-width x^2): (1 + 4 i width t)^(-1/2) exp(-width x^2 / (1 + 4 i width t))."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    z = 1.0 + 4j * width * t
    return z ** -0.5 * np.exp(-width * x**2 / z)
