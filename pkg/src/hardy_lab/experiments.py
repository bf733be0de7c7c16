"""Named, configuration-driven numerical experiments.

Each scenario takes a flat parameter dict (defaults overridable by a
``key = value`` file or ``--set`` pairs), runs a set of checks and writes

    <out>/manifest.json   scenario, resolved parameters, files, checks, wall time
    <out>/checks.csv      name, t, value, target, tolerance, pass
    <out>/<table>.csv     scenario data (schemas in SCENARIOS[name].tables)

A check passes iff |value - target| <= tolerance. One-sided conditions are
expressed through a non-negative violation amount with target 0. Floats
are written with 17 significant digits so identical runs give identical
files.
"""

from __future__ import annotations

import ast
import csv
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import closed_forms as cf
from . import engine
from . import frame_operators as fo
from . import transforms as tr
from .errors import ContractError
from .grid import Trajectory, WaveField, fourier_transform, l2_norm, make_grid, weighted_l2_norm
from .propagator import EvolveConfig, PotentialSpec, evolve, pde_residual


class ConfigError(ContractError):
    """Unknown key, unparsable value or parameter outside its scenario's range."""


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    target: float
    tolerance: float
    t: float | None = None

    @property
    def passed(self) -> bool:
        return bool(abs(self.value - self.target) <= self.tolerance)

    def as_dict(self) -> dict:
        return {"name": self.name, "t": self.t, "value": self.value, "target": self.target,
                "tolerance": self.tolerance, "pass": self.passed}


def _check(name, value, target, tolerance, t=None) -> Check:
    return Check(name, float(value), float(target), float(tolerance), None if t is None else float(t))


def _at_most(name, value, bound, t=None) -> Check:
    """value in [0, bound]."""
    return _check(name, value, 0.0, bound, t)


def _violation(name, amount, tolerance, t=None) -> Check:
    return _check(name, max(0.0, float(amount)), 0.0, tolerance, t)


@dataclass
class Table:
    header: list[str]
    rows: list[list] = field(default_factory=list)

    def add(self, *row):
        self.rows.append(list(row))


@dataclass
class ScenarioResult:
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, Table] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    name: str
    summary: str
    defaults: dict
    runner: Callable
    tables: dict  # table name -> column description


@dataclass
class RunManifest:
    scenario: str
    parameters: dict
    seed: int
    files: list[str]
    checks: list[Check]
    wall_time: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"scenario": self.scenario, "parameters": self.parameters, "seed": self.seed,
                "files": self.files, "passed": self.passed,
                "checks": [c.as_dict() for c in self.checks], "wall_time": self.wall_time}


# ---------------------------------------------------------------- scenarios

def _classical_hardy(p, rng) -> ScenarioResult:
    beta = p["beta"]
    if not beta > 0:
        raise ConfigError("beta must be positive")
    grid = make_grid(p["n_points"], p["half_width"])
    f = WaveField.from_function(grid, lambda x: np.exp(-(x / beta) ** 2))
    fhat = fourier_transform(f)
    xi = grid.xi
    exact = beta / math.sqrt(2.0) * np.exp(-(beta * xi) ** 2 / 4.0)
    res = ScenarioResult()
    res.checks.append(_at_most("transform_max_error", np.max(np.abs(fhat - exact)), p["transform_tol"]))

    # |f_hat| ~ exp(-4 xi^2 / alpha^2), |f| ~ exp(-x^2 / beta^2): least-squares slopes in xi^2, x^2
    mag = np.abs(fhat)
    keep = mag > p["fit_floor"] * mag.max()
    slope_hat = np.polyfit(xi[keep] ** 2, np.log(mag[keep]), 1)[0]
    alpha = 2.0 / math.sqrt(-slope_hat)
    fx = np.abs(f.values)
    keep_x = fx > p["fit_floor"] * fx.max()
    beta_fit = 1.0 / math.sqrt(-np.polyfit(grid.x[keep_x] ** 2, np.log(fx[keep_x]), 1)[0])
    res.checks.append(_check("beta_detected", beta_fit, beta, p["tol"]))
    res.checks.append(_check("alpha_beta", alpha * beta_fit, 4.0, p["tol"]))

    table = Table(["xi", "abs_fhat", "exact"])
    for k in range(grid.n_points):
        table.add(xi[k], mag[k], exact[k])
    res.tables["transform"] = table
    return res


def _convexity_checks(res, table, source, traj, R, mu, tol):
    tag = f"{source}_R={R:g}"
    diag = fo.convexity_diagnostics(traj, mu)
    H_exact = fo.free_wave_H(traj.times, R, mu)
    res.checks.append(_at_most(f"H_rel_error_{tag}", np.max(np.abs(diag.H / H_exact - 1.0)), tol))
    res.checks.append(_violation(f"log_convexity_{tag}", -diag.second_differences().min(), tol))
    # constant weight: theta is linear in t and the gap is the chord defect
    gap = diag.interpolation_gap()
    res.checks.append(_violation(f"chord_{tag}", -gap.min(), tol))
    for j, t in enumerate(traj.times):
        table.add(source, R, mu, t, diag.H[j], H_exact[j], diag.log_H[j], gap[j])


def _free_convexity(p, rng) -> ScenarioResult:
    """Weighted norms of u_R are measured on two trajectories.

    The FFT-evolved field carries a round-off floor near 1e-16 of its peak,
    which e^{2 mu x^2} amplifies; close to the integrability limit the
    weighted integrand is then only resolvable on exact samples of u_R over
    a wide grid. The evolved trajectory is checked against those samples
    and its own weighted norms are measured at a smaller weight.
    """
    times = np.linspace(-1.0, 1.0, p["n_times"])
    wide = make_grid(p["n_points"], p["half_width"])
    narrow = make_grid(p["n_points_evolved"], p["half_width_evolved"])
    res = ScenarioResult()
    table = Table(["source", "R", "mu", "t", "H", "H_exact", "log_H", "interpolation_gap"])
    for R in p["R"]:
        u0 = WaveField(narrow, -1.0, cf.u_R(narrow.x, -1.0, R))
        evolved = evolve(u0, PotentialSpec.zero(), times, EvolveConfig(dt=1.0, scheme="exact_free"))
        err = max(np.max(np.abs(u.values - cf.u_R(narrow.x, u.t, R))) for u in evolved.fields)
        res.checks.append(_at_most(f"transport_error_R={R:g}", err, p["transport_tol"]))
        _convexity_checks(res, table, "evolved", evolved, R,
                          p["evolved_mu_factor"] * cf.mu_of_R(R), p["convexity_tol"])

        sampled = Trajectory(wide, times, tuple(WaveField(wide, t, cf.u_R(wide.x, t, R))
                                                for t in times))
        _convexity_checks(res, table, "sampled", sampled, R,
                          p["mu_factor"] * cf.mu_of_R(R), p["convexity_tol"])
    res.tables["log_convexity"] = table
    return res


def _iterate(p, rng) -> ScenarioResult:
    res = ScenarioResult()
    verdicts = Table(["mu", "verdict", "k", "R", "R_from_limit", "a_limit_0"])
    history = Table(["mu", "k", "a_k_0"])
    for mu in p["mu"]:
        rep = engine.iterate(mu, p["tol"], p["k_max"], p["a_cap"], p["n_time"])
        nan = float("nan")
        verdicts.add(mu, rep.verdict.value, rep.k, rep.R if rep.R is not None else nan,
                     rep.R_from_limit if rep.R_from_limit is not None else nan, rep.final_state.a0)
        for k, a0 in enumerate(rep.history, start=1):
            history.add(mu, k, a0)
        res.checks.append(_violation(f"history_increasing_mu={mu:g}", -np.diff(rep.history).min(initial=np.inf), 0.0))
        if mu <= cf.MU_MAX:
            R_star = cf.smallest_R(mu)
            converged = rep.verdict is engine.Verdict.CONVERGED
            res.checks.append(_check(f"converged_mu={mu:g}", float(converged), 1.0, 0.0))
            if converged:
                res.checks.append(_check(f"R_mu={mu:g}", rep.R, R_star, p["R_tol"]))
                res.checks.append(_check(f"R_from_limit_mu={mu:g}", rep.R_from_limit, R_star, p["R_tol"]))
                res.checks.append(_check(f"a_limit_0_mu={mu:g}", rep.final_state.a0, R_star / 4.0,
                                         p["a_tol"]))
        else:
            res.checks.append(_check(f"vanishes_mu={mu:g}", float(rep.verdict.vanishes), 1.0, 0.0))
            if 16.0 * mu * mu >= 1.0:  # 1 - a_1(0) b_1(0) = 1 - 16 mu^2 <= 0
                res.checks.append(_check(f"k_mu={mu:g}", rep.k, 1.0, 0.0))
    res.tables["verdicts"] = verdicts
    res.tables["history"] = history
    return res


def _sharpness(p, rng) -> ScenarioResult:
    res = ScenarioResult()
    table = Table(["R", "mu", "t", "a_limit", "a_R_star"])
    for R in p["R"]:
        mu = cf.mu_of_R(R)
        R_star = cf.smallest_R(mu)
        res.checks.append(_check(f"smallest_root_R={R:g}", R_star, min(R, 1.0 / R), 1e-12))
        rep = engine.iterate(mu, p["tol"], p["k_max"], p["a_cap"], p["n_time"])
        res.checks.append(_check(f"converged_R={R:g}", float(rep.verdict is engine.Verdict.CONVERGED),
                                 1.0, 0.0))
        w = rep.final_state
        a_star = cf.weight_a_R(w.t, R_star)
        res.checks.append(_at_most(f"sup_error_R={R:g}", np.max(np.abs(w.a - a_star)), p["a_tol"]))
        res.checks.append(_check(f"R_from_limit_R={R:g}", 4.0 * w.a0, R_star, p["R_tol"]))
        res.checks.append(_at_most(f"limit_ode_residual_R={R:g}", engine.limit_ode_residual(w),
                                   p["ode_tol"]))
        stride = max(1, len(w.t) // 100)
        for j in range(0, len(w.t), stride):
            table.add(R, mu, w.t[j], w.a[j], a_star[j])
    res.tables["limits"] = table
    return res


def _counterexample(p, rng) -> ScenarioResult:
    k, n = p["k"], p["n"]
    if n != 1:
        raise ConfigError("only n = 1 is supported")
    cf.counterexample_V(0.0, 0.0, k, n)  # contract check: k > n/2
    grid = make_grid(p["n_points"], p["half_width"])
    V = PotentialSpec.closed_form("counterexample", k=k, n=n)
    res = ScenarioResult()

    def u(x, t):
        return cf.counterexample_u(x, t, k, n)

    table = Table(["t", "residual"])
    worst = 0.0
    for t in np.linspace(-1.0, 1.0, p["n_times"]):
        r = pde_residual(u, V, [t], grid)
        worst = max(worst, r)
        table.add(t, r)
    res.tables["residuals"] = table
    res.checks.append(_at_most("pde_residual", worst, p["residual_tol"]))

    # ||e^{x^2/8} u(+-1)||^2 = 2^(2k - n/2) * int (1 + x^2)^(-2k) dx
    exact = math.sqrt(2.0 ** (2 * k - n / 2) * math.sqrt(math.pi)
                      * math.gamma(2 * k - 0.5) / math.gamma(2 * k))
    for t in (-1.0, 1.0):
        f = WaveField(grid, t, u(grid.x, t))
        val = weighted_l2_norm(f, 0.125)
        res.checks.append(_check("endpoint_weighted_norm", val, exact, p["norm_rtol"] * exact, t))

    # |V| (1 + x^2) <= 2k + 2kn + 4k(1 + k) for real t
    bound = 2 * k + 2 * k * n + 4 * k * (1 + k)
    scan = max(np.max((1 + grid.x**2) * np.abs(V(grid.x, t)))
               for t in np.linspace(-1.0, 1.0, p["n_times"]))
    res.checks.append(_violation("weighted_potential_bound", scan - bound, 0.0))

    # Strang evolution from t = -1
    u0 = WaveField(grid, -1.0, u(grid.x, -1.0))
    traj = evolve(u0, V, [1.0], EvolveConfig(p["dt"]))
    diff = traj[0].values - u(grid.x, 1.0)
    err = math.sqrt(grid.integrate(np.abs(diff) ** 2))
    res.checks.append(_at_most("evolve_l2_error", err, p["evolve_tol"], 1.0))
    return res


def _appell_check(p, rng) -> ScenarioResult:
    al, be, gam, width = p["alpha"], p["beta"], p["gamma"], p["width"]
    grid = make_grid(p["n_points"], p["half_width"])
    zero = PotentialSpec.zero()
    u = tr.SolutionOracle.closed_form(lambda x, t: cf.gaussian_free_wave(x, t, width), (0.0, 1.0))
    ut = tr.appell(u, al, be)
    res = ScenarioResult()
    table = Table(["t", "s", "lhs", "rhs"])
    for t in p["t_norm"]:
        s = float(tr.appell_time(t, al, be))
        lhs = weighted_l2_norm(WaveField(grid, t, ut(grid.x, t)), gam)
        w = gam * al * be / (al * s + be * (1 - s)) ** 2
        rhs = weighted_l2_norm(WaveField(grid, s, u(grid.x, s)), w)
        table.add(t, s, lhs, rhs)
        res.checks.append(_at_most("norm_identity_rel_error", abs(lhs / rhs - 1.0), p["norm_rtol"], t))
        res.checks.append(_check("l2_preserved", l2_norm(WaveField(grid, t, ut(grid.x, t))),
                                 l2_norm(WaveField(grid, s, u(grid.x, s))), p["l2_tol"], t))
    res.tables["norm_identity"] = table

    interior = np.linspace(0.1, 0.9, 5)
    res.checks.append(_at_most("appell_residual", pde_residual(ut, zero, interior, grid),
                               p["residual_tol"]))
    same = tr.appell(u, al, al)
    diff = max(np.max(np.abs(same(grid.x, t) - u(grid.x, t))) for t in (0.0, 0.5, 1.0))
    res.checks.append(_at_most("equal_rates_identity", diff, 1e-12))

    T = p["T"]
    u_long = tr.SolutionOracle.closed_form(lambda x, t: cf.gaussian_free_wave(x, t, width), (0.0, T))
    v, mu = tr.reduction_chain(u_long, al, be, T)
    res.checks.append(_check("chain_mu", mu, T / (2 * al * be), 1e-15))
    res.checks.append(_at_most("chain_residual", pde_residual(v, zero, 2 * interior - 1, grid),
                               p["residual_tol"]))
    return res


def _random_test_function(grid, rng) -> WaveField:
    vals = np.zeros(grid.n_points, dtype=complex)
    for _ in range(3):
        c = rng.normal() + 1j * rng.normal()
        w = rng.uniform(0.5, 2.0)
        x0 = rng.uniform(-2.0, 2.0)
        k0 = rng.uniform(-2.0, 2.0)
        vals += c * np.exp(-w * (grid.x - x0) ** 2 + 1j * k0 * grid.x)
    return WaveField(grid, 0.0, vals)


def _random_frame(rng) -> fo.FrameCoefficients:
    a = rng.uniform(0.05, 0.5)
    a_dot = rng.uniform(-0.5, 0.5)
    gamma = rng.uniform(0.5, 2.0)
    gamma_dot = rng.uniform(-1.0, 1.0)
    # a_ddot chosen so that F(a, gamma) = gamma * margin > 0
    margin = rng.uniform(0.1, 1.0)
    a_ddot = margin - 32 * a**3 + 1.5 * a_dot**2 / a + 0.5 * a * (a_dot / a + gamma_dot / gamma) ** 2
    b, b_dot, b_ddot = rng.uniform(-1.0, 1.0, size=3)
    return fo.FrameCoefficients(a, a_dot, a_ddot, b, b_dot, b_ddot, gamma, gamma_dot)


def _lemma3_identity(p, rng) -> ScenarioResult:
    grid = make_grid(p["n_points"], p["half_width"])
    res = ScenarioResult()
    table = Table(["trial", "lhs", "rhs", "rel_error"])
    for j in range(p["n_trials"]):
        f = _random_test_function(grid, rng)
        fc = _random_frame(rng)
        lhs, rhs = fo.commutator_form_identity(f, fc)
        rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
        table.add(j, lhs, rhs, rel)
        res.checks.append(_at_most(f"identity_trial_{j}", rel, p["rtol"]))
    res.tables["trials"] = table

    mu = p["mu"]
    f = WaveField.from_function(grid, lambda x: np.exp(-x**2))
    lhs, rhs = fo.commutator_form_identity(f, fo.FrameCoefficients(mu))
    target = 8.0 * math.sqrt(math.pi / 2.0) * (1.0 + mu**2)
    res.checks.append(_check("constant_gaussian_lhs", lhs, target, p["constant_tol"]))
    res.checks.append(_check("constant_gaussian_rhs", rhs, target, p["constant_tol"]))
    return res


def _theorem3_weight(p, rng) -> ScenarioResult:
    al_list, be_list, T_list = p["alpha"], p["beta"], p["T"]
    if not len(al_list) == len(be_list) == len(T_list):
        raise ConfigError("alpha, beta and T lists must have equal length")
    res = ScenarioResult()
    table = Table(["case", "t", "a", "inv_a"])
    for j, (al, be, T) in enumerate(zip(al_list, be_list, T_list)):
        cfg = cf.HardyConfig(al, be, T)
        R = cf.theorem3_R(cfg)
        tag = f"case{j}"
        res.checks.append(_check(f"{tag}_a(0)", cf.theorem3_weight(0.0, cfg), 1 / be**2, 1e-12))
        res.checks.append(_check(f"{tag}_a(T)", cf.theorem3_weight(T, cfg), 1 / al**2, 1e-12))

        t = np.linspace(0.0, T, p["n_t"])
        inv = 1.0 / cf.theorem3_weight(t, cfg)
        h = t[1] - t[0]
        d2 = (inv[2:] - 2 * inv[1:-1] + inv[:-2]) / h**2
        exact_d2 = 4.0 * ((al - be) ** 2 + R**2 * (al + be) ** 2) / (al * be * R * T)
        res.checks.append(_at_most(f"{tag}_inv_a_curvature_rel_error",
                                   np.max(np.abs(d2 / exact_d2 - 1.0)), p["curvature_rtol"]))
        jmin = int(np.argmin(inv))
        interior = 0 < jmin < len(t) - 1
        res.checks.append(_check(f"{tag}_interior_minimum", float(interior),
                                 float(cf.interior_minimum_criterion(cfg)), 0.0))

        s_grid = np.linspace(-1.0, 1.0, p["n_t"])
        s, w = tr.pullback_weight(s_grid, cf.weight_a_R(s_grid, R), cfg)
        res.checks.append(_at_most(f"{tag}_pullback_error",
                                   np.max(np.abs(w - cf.theorem3_weight(s, cfg))), 1e-12))
        for i in range(0, len(t), max(1, len(t) // 50)):
            table.add(j, t[i], 1 / inv[i], inv[i])
    res.tables["weights"] = table
    return res


SCENARIOS: dict[str, Scenario] = {}


def _register(name, summary, defaults, runner, tables):
    SCENARIOS[name] = Scenario(name, summary, defaults, runner, tables)


_register("classical-hardy", "Gaussian transform pair and detection of alpha * beta = 4",
          dict(beta=2.0, n_points=1024, half_width=20.0, fit_floor=1e-10, tol=1e-6,
               transform_tol=1e-10),
          _classical_hardy, {"transform": "xi, abs_fhat, exact"})
_register("free-convexity", "log-convexity of ||e^{mu x^2} u_R(t)||^2 for the free extremal wave",
          dict(R=(0.5, 1.0), mu_factor=0.9, n_points=2048, half_width=64.0, n_times=41,
               evolved_mu_factor=0.05, n_points_evolved=1024, half_width_evolved=20.0,
               transport_tol=1e-8, convexity_tol=1e-8),
          _free_convexity,
          {"log_convexity": "source, R, mu, t, H, H_exact, log_H, interpolation_gap"})
_register("iterate", "weight recursion a_{k+1} = a_k / (1 - a_k b_k): histories and verdicts",
          dict(mu=(0.05, 0.1, 0.2, 0.3), tol=engine.DEFAULT_TOL, k_max=engine.DEFAULT_K_MAX,
               a_cap=engine.DEFAULT_A_CAP, n_time=engine.DEFAULT_N_TIME, R_tol=1e-3, a_tol=1e-4),
          _iterate, {"verdicts": "mu, verdict, k, R, R_from_limit, a_limit_0",
                     "history": "mu, k, a_k_0"})
_register("sharpness", "engine limits against the extremal family across R",
          dict(R=(0.25, 0.5, 2.0), tol=engine.DEFAULT_TOL, k_max=engine.DEFAULT_K_MAX,
               a_cap=engine.DEFAULT_A_CAP, n_time=engine.DEFAULT_N_TIME, a_tol=1e-4, R_tol=1e-3,
               ode_tol=1e-4),
          _sharpness, {"limits": "R, mu, t, a_limit, a_R_star"})
_register("counterexample", "endpoint solution with a complex potential: residual, norms, bounds",
          dict(k=2.0, n=1, n_points=1024, half_width=20.0, n_times=21, residual_tol=1e-5,
               norm_rtol=1e-6, dt=2.5e-4, evolve_tol=1e-5),
          _counterexample, {"residuals": "t, residual"})
_register("appell-check", "conformal map: norm identity and solution preservation",
          dict(alpha=1.0, beta=2.0, gamma=0.05, width=0.25, T=1.0, t_norm=(0.0, 0.5, 1.0),
               n_points=2048, half_width=40.0, norm_rtol=1e-6, l2_tol=1e-8, residual_tol=1e-5),
          _appell_check, {"norm_identity": "t, s, lhs, rhs"})
_register("lemma3-identity", "randomized trials of the commutator quadratic-form identity",
          dict(n_trials=5, mu=0.125, n_points=512, half_width=16.0, rtol=1e-6, constant_tol=1e-8),
          _lemma3_identity, {"trials": "trial, lhs, rhs, rel_error"})
_register("theorem3-weight", "optimal interior weight: endpoints, convexity of 1/a, interior minimum",
          dict(alpha=(1.0, 1.0, 1.0, 1.0), beta=(2.0, 1.0, 10.0, 2.0), T=(0.2, 0.2, 0.2, 0.45), n_t=2001,
               curvature_rtol=1e-6),
          _theorem3_weight, {"weights": "case, t, a, inv_a"})


# ---------------------------------------------------------------- config

def _coerce(key: str, raw, default):
    if isinstance(raw, str):
        try:
            raw = ast.literal_eval(raw.strip())
        except (ValueError, SyntaxError):
            raise ConfigError(f"cannot parse value for {key!r}: {raw!r}") from None
    try:
        if isinstance(default, tuple):
            items = raw if isinstance(raw, (list, tuple)) else (raw,)
            return tuple(float(v) for v in items)
        if isinstance(default, bool):
            return bool(raw)
        if isinstance(default, int):
            if float(raw) != int(raw):
                raise ConfigError(f"{key!r} must be an integer, got {raw!r}")
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None
    return raw


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def parse_set(pairs) -> dict[str, str]:
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def resolve_parameters(name: str, overrides: dict) -> dict:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; known: {sorted(SCENARIOS)}")
    defaults = SCENARIOS[name].defaults
    unknown = sorted(set(overrides) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown keys for {name}: {unknown}")
    params = dict(defaults)
    for key, raw in overrides.items():
        params[key] = _coerce(key, raw, defaults[key])
    return params


def split_overrides(names, overrides: dict) -> dict[str, dict]:
    """Route ``key`` or ``scenario.key`` overrides to the scenarios that define them."""
    routed = {n: {} for n in names}
    for key, value in overrides.items():
        if "." in key:
            scen, sub = key.split(".", 1)
            if scen not in routed:
                raise ConfigError(f"override {key!r} targets a scenario not being run")
            routed[scen][sub] = value
            continue
        hit = [n for n in names if key in SCENARIOS[n].defaults]
        if not hit:
            raise ConfigError(f"no selected scenario has a parameter {key!r}")
        for n in hit:
            routed[n][key] = value
    return routed


# ---------------------------------------------------------------- output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _plot_script(name: str, tables: dict[str, Table]) -> str:
    lines = ["# plots for the " + name + " scenario; run with python from this directory",
             "import csv", "import matplotlib.pyplot as plt", ""]
    for tname, table in tables.items():
        x, ys = table.header[0], table.header[1:]
        lines += [f"with open({tname + '.csv'!r}) as fh:",
                  "    rows = list(csv.DictReader(fh))",
                  "fig, ax = plt.subplots()"]
        for y in ys:
            lines += ["try:",
                      f"    ax.plot([float(r[{x!r}]) for r in rows], [float(r[{y!r}]) for r in rows],"
                      f" '.', label={y!r})",
                      "except ValueError:",
                      "    pass"]
        lines += [f"ax.set_xlabel({x!r})", "ax.legend()", f"fig.savefig({tname + '.png'!r})", ""]
    return "\n".join(lines)


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    return v


def run_scenario(name: str, overrides: dict | None = None, out_dir: str | None = None,
                 seed: int = 0, emit_plots: bool = False) -> RunManifest:
    """Run one scenario; write its files under ``out_dir`` when given."""
    params = resolve_parameters(name, overrides or {})
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    result = SCENARIOS[name].runner(params, rng)
    wall = time.perf_counter() - start
    files = []
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        rows = [[c.name, c.t, c.value, c.target, c.tolerance, c.passed] for c in result.checks]
        write_csv(os.path.join(out_dir, "checks.csv"),
                  ["name", "t", "value", "target", "tolerance", "pass"], rows)
        files.append("checks.csv")
        for tname, table in result.tables.items():
            write_csv(os.path.join(out_dir, tname + ".csv"), table.header, table.rows)
            files.append(tname + ".csv")
        if emit_plots:
            with open(os.path.join(out_dir, "plot.py"), "w", encoding="utf-8") as fh:
                fh.write(_plot_script(name, result.tables))
            files.append("plot.py")
        files.append("manifest.json")
    manifest = RunManifest(name, {k: _jsonable(v) for k, v in params.items()}, seed, files,
                           result.checks, wall)
    if out_dir is not None:
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest.as_dict(), fh, indent=2)
            fh.write("\n")
    return manifest
