"""Iterative improvement of even Gaussian weights on [-1, 1].

Starting from a_1 = mu, each step solves for a drift b_k with

    b_k'' = -2 c_k (16 c_k^-3 - c_k''),   b_k(-1) = b_k(1) = 0,   c_k = a_k^-1/2,

stops if 1 - a_k b_k <= 0 somewhere (the vanishing test), and otherwise
sets a_{k+1} = a_k / (1 - a_k b_k). The weight is stored as (c, c', c'')
and every derivative is propagated in closed form; the only numerics are
cumulative Simpson integrals on [0, 1], mirrored to [-1, 0].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import closed_forms
from .errors import ContractError, NegativeIntegrand, NonpositiveF, SingularRecursion

DEFAULT_N_TIME = 2001
DEFAULT_TOL = 1e-10
DEFAULT_K_MAX = 10_000
DEFAULT_A_CAP = 1e3
# sign checks are relative to the size of 32 c^-2
_SIGN_RTOL = 1e-12


def time_grid(n_time: int = DEFAULT_N_TIME) -> np.ndarray:
    if n_time < 201 or n_time % 2 == 0:
        raise ContractError(f"n_time must be odd and >= 201, got {n_time}")
    t = np.linspace(-1.0, 1.0, n_time)
    # exact mirror symmetry, t = 0 on the grid
    return 0.5 * (t - t[::-1])


@dataclass(frozen=True, eq=False)
class WeightState:
    t: np.ndarray
    c: np.ndarray
    c_dot: np.ndarray
    c_ddot: np.ndarray

    @property
    def mid(self) -> int:
        return len(self.t) // 2

    @property
    def a(self) -> np.ndarray:
        return self.c**-2

    @property
    def a_dot(self) -> np.ndarray:
        return -2.0 * self.c_dot * self.c**-3

    @property
    def a_ddot(self) -> np.ndarray:
        return -2.0 * self.c_ddot * self.c**-3 + 6.0 * self.c_dot**2 * self.c**-4

    @property
    def F(self) -> np.ndarray:
        """F(a) = 2 c^-1 (16 c^-3 - c'')."""
        return 2.0 / self.c * (16.0 * self.c**-3 - self.c_ddot)

    @property
    def mu(self) -> float:
        return float(self.a[-1])

    @property
    def a0(self) -> float:
        return float(self.a[self.mid])

    def invariants(self, tol: float = 1e-12) -> dict[str, bool]:
        a = self.a
        half = slice(self.mid, None)
        F = self.F[1:-1]
        return {
            "c_positive": bool(np.all(self.c > 0)),
            "a_even": bool(np.max(np.abs(a - a[::-1])) <= tol * np.max(a)),
            "endpoints_equal": bool(abs(a[0] - a[-1]) <= tol * np.max(a)),
            "c_dot_nonneg_on_0_1": bool(np.all(self.c_dot[half] >= -tol * np.max(np.abs(self.c_dot) + 1.0))),
            "F_positive_interior": bool(np.all(F > 0)),
        }


@dataclass(frozen=True, eq=False)
class DriftState:
    t: np.ndarray
    b: np.ndarray
    b_dot: np.ndarray
    b_ddot: np.ndarray


class Verdict(str, enum.Enum):
    CONVERGED = "converged"
    VANISHES_BY_TEST = "vanishes_by_test"
    VANISHES_BY_BLOWUP = "vanishes_by_blowup"
    INCONCLUSIVE = "inconclusive"

    @property
    def vanishes(self) -> bool:
        return self in (Verdict.VANISHES_BY_TEST, Verdict.VANISHES_BY_BLOWUP)


@dataclass(frozen=True, eq=False)
class IterationReport:
    verdict: Verdict
    k: int  # step at which the verdict was reached
    mu: float
    history: np.ndarray  # a_k(0), k = 1, 2, ...
    increments: np.ndarray  # sup |a_{k+1} - a_k|
    final_state: WeightState
    R: float | None = None
    R_from_limit: float | None = None
    iterations: int = field(default=0)


def initial_state(mu: float, n_time: int = DEFAULT_N_TIME) -> WeightState:
    """a_1 = mu: c constant = mu^-1/2."""
    if not mu > 0:
        raise ContractError(f"mu must be positive, got {mu}")
    t = time_grid(n_time)
    zero = np.zeros_like(t)
    return WeightState(t, np.full_like(t, mu**-0.5), zero, zero.copy())


def extremal_state(R: float, n_time: int = DEFAULT_N_TIME) -> WeightState:
    """State of a_R = R / (4 (1 + R^2 t^2)), for which c'' = 16 c^-3 exactly."""
    if not R > 0:
        raise ContractError(f"R must be positive, got {R}")
    t = time_grid(n_time)
    s = 1.0 + (R * t) ** 2
    c = 2.0 * np.sqrt(s / R)
    c_dot = 2.0 * R**1.5 * t / np.sqrt(s)
    c_ddot = 2.0 * R**1.5 / s**1.5
    return WeightState(t, c, c_dot, c_ddot)


def _cumulative(y: np.ndarray, h: float) -> np.ndarray:
    return integrate.cumulative_simpson(y, dx=h, initial=0.0)


def _even(half: np.ndarray) -> np.ndarray:
    return np.concatenate([half[:0:-1], half])


def _odd(half: np.ndarray) -> np.ndarray:
    return np.concatenate([-half[:0:-1], half])


def _integrand(w: WeightState) -> np.ndarray:
    """g = 2c (16 c^-3 - c'') = 32 c^-2 - 2 c c'' on [0, 1]."""
    m = w.mid
    c, cdd = w.c[m:], w.c_ddot[m:]
    return 32.0 * c**-2 - 2.0 * c * cdd


def _sign_floor(w: WeightState) -> float:
    return -_SIGN_RTOL * float(np.max(32.0 * w.c**-2))


def drift_from_weight(w: WeightState) -> DriftState:
    """b(t) = int_t^1 int_0^s g, b' = -int_0^t g, b'' = -g, evenly extended."""
    g = _integrand(w)
    if g.min() < _sign_floor(w):
        raise NegativeIntegrand(f"drift integrand min {g.min():.3e} < 0")
    h = float(w.t[1] - w.t[0])
    G = _cumulative(g, h)
    I = _cumulative(G, h)
    b = I[-1] - I
    return DriftState(w.t, _even(b), _odd(-G), _even(-g))


def drift_derivative_control_form(w: WeightState) -> np.ndarray:
    """b'(t) = -int_0^t (32 c^-2 + 2 c'^2) + (c^2)'(t) on [-1, 1].

    Equals drift_from_weight(w).b_dot analytically; used as a cross-check of
    the consistency between the stored c' and c''.
    """
    m = w.mid
    c, cd = w.c[m:], w.c_dot[m:]
    h = float(w.t[1] - w.t[0])
    half = -_cumulative(32.0 * c**-2 + 2.0 * cd**2, h) + 2.0 * c * cd
    return _odd(half)


def vanishing_test(w: WeightState, d: DriftState) -> bool:
    """True iff 1 - a b <= 0 somewhere on the grid."""
    return bool(np.min(1.0 - w.a * d.b) <= 0.0)


def next_weight(w: WeightState, d: DriftState) -> WeightState:
    """a_{k+1} = a_k / (1 - a_k b_k), i.e. c_{k+1}^2 = c_k^2 - b_k."""
    c, cd = w.c, w.c_dot
    b, bd = d.b, d.b_dot
    c2 = c**2 - b
    if c2.min() <= 0:
        raise SingularRecursion("c^2 - b <= 0; the vanishing test should have fired")
    c1 = np.sqrt(c2)
    cd1 = (2.0 * c * cd - bd) / (2.0 * c1)
    cdd1 = c1**-3 * (16.0 - 0.25 * bd**2 + c * cd * bd - cd**2 * b - 16.0 * c**-2 * b)
    return WeightState(w.t, c1, cd1, cdd1)


def solve_T(w: WeightState, d: DriftState | None = None) -> np.ndarray:
    """Solution of (T'/a)' = -b''^2 / F(a), T(+-1) = 0.

    With b'' = -g and F(a) = a g this is T(t) = int_t^1 a(s) int_0^s g/a,
    which stays defined (and zero) for the extremal family where F = 0.
    ``d`` is accepted for symmetry with the drift; T only needs the weight.
    """
    g = _integrand(w)
    if g.min() < _sign_floor(w):
        raise NonpositiveF(f"F(a) < 0 somewhere (min integrand {g.min():.3e})")
    m = w.mid
    a = w.a[m:]
    h = float(w.t[1] - w.t[0])
    J = _cumulative(a * _cumulative(g / a, h), h)
    return _even(J[-1] - J)


def limit_ode_residual(w: WeightState) -> float:
    """max over interior nodes of |c'' - 16 c^-3| using the stored c''."""
    inner = slice(1, -1)
    return float(np.max(np.abs(w.c_ddot[inner] - 16.0 * w.c[inner] ** -3)))


def iterate(mu: float, tol: float = DEFAULT_TOL, k_max: int = DEFAULT_K_MAX,
            a_cap: float = DEFAULT_A_CAP, n_time: int = DEFAULT_N_TIME) -> IterationReport:
    """Run the weight recursion from a_1 = mu until a verdict is reached."""
    w = initial_state(mu, n_time)
    history = [w.a0]
    increments = []

    def report(verdict, k, state, R=None, R_lim=None):
        return IterationReport(verdict, k, mu, np.array(history), np.array(increments),
                               state, R, R_lim, iterations=len(increments))

    for k in range(1, k_max + 1):
        d = drift_from_weight(w)
        if vanishing_test(w, d):
            return report(Verdict.VANISHES_BY_TEST, k, w)
        w_next = next_weight(w, d)
        history.append(w_next.a0)
        increments.append(float(np.max(np.abs(w_next.a - w.a))))
        w = w_next
        if w.a0 > a_cap:
            return report(Verdict.VANISHES_BY_BLOWUP, k, w)
        if increments[-1] < tol:
            R = closed_forms.smallest_R(mu) if mu <= closed_forms.MU_MAX else None
            return report(Verdict.CONVERGED, k, w, R, 4.0 * w.a0)
    return report(Verdict.INCONCLUSIVE, k_max, w)
