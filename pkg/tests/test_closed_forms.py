import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardy_lab import closed_forms as cf
from hardy_lab.errors import ContractError, InvalidOrder, NoRealRoot, SingularKernel
from hardy_lab.grid import WaveField, make_grid, weighted_l2_norm
from hardy_lab.propagator import PotentialSpec, free_evolve_exact, pde_residual


def test_u_R_origin():
    assert cf.u_R(0.0, 0.0, 1.0) == pytest.approx(np.exp(1j * np.pi / 4), abs=1e-15)


def test_u_R_modulus():
    x = np.linspace(-5, 5, 11)
    for R, t, n in [(1.0, 0.3, 1), (0.5, -1.0, 1), (2.0, 0.7, 3)]:
        s = 1 + R**2 * t**2
        np.testing.assert_allclose(np.abs(cf.u_R(x, t, R, n)) ** 2,
                                   s ** (-n / 2) * np.exp(-R * x**2 / (2 * s)), rtol=1e-13)


def test_u_R_is_free_wave():
    g = make_grid(1024, 20.0)
    r = pde_residual(lambda x, t: cf.u_R(x, t, 1.0), PotentialSpec.zero(), [-0.5, 0.0, 0.8], g)
    assert r < 1e-6


def test_extremal_params():
    with pytest.raises(ContractError):
        cf.ExtremalParams(0.0)
    with pytest.raises(ContractError):
        cf.ExtremalParams(1.0, 0)


def test_weight_a_R_values():
    assert cf.weight_a_R(0.0, 1.0) == 0.25
    assert cf.weight_a_R(1.0, 1.0) == 0.125 == cf.mu_of_R(1.0)
    for R in (0.3, 1.0, 4.0):
        assert cf.weight_a_R(-1.0, R) == pytest.approx(cf.mu_of_R(R), rel=1e-15)
        assert cf.weight_a_R(1.0, R) == pytest.approx(cf.mu_of_R(R), rel=1e-15)
    with pytest.raises(ContractError):
        cf.weight_a_R(0.0, -1.0)


def test_weight_derivatives_against_differences():
    t = np.linspace(-1, 1, 201)
    h = 1e-5
    for R in (0.5, 1.0, 2.0):
        a, ad, add = cf.weight_a_R_derivatives(t, R)
        np.testing.assert_allclose(ad, (cf.weight_a_R(t + h, R) - cf.weight_a_R(t - h, R)) / (2 * h),
                                   atol=1e-8)
        fd2 = (cf.weight_a_R(t + 1e-4, R) - 2 * a + cf.weight_a_R(t - 1e-4, R)) / 1e-8
        np.testing.assert_allclose(add, fd2, atol=1e-5)


def test_limit_ode_finite_differences():
    t = np.linspace(-1, 1, 201)
    h = 2e-3
    for R in (0.5, 1.0, 2.0):
        A = [cf.weight_a_R(t + j * h, R) for j in (-2, -1, 0, 1, 2)]
        ad = (A[0] - 8 * A[1] + 8 * A[3] - A[4]) / (12 * h)
        add = (-A[0] + 16 * A[1] - 30 * A[2] + 16 * A[3] - A[4]) / (12 * h**2)
        res = add - 1.5 * ad**2 / A[2] + 32 * A[2] ** 3
        assert np.max(np.abs(res)) < 1e-8
        # closed-form derivatives: exact to round-off
        a, ad, add = cf.weight_a_R_derivatives(t, R)
        assert np.max(np.abs(add - 1.5 * ad**2 / a + 32 * a**3)) < 1e-8


def test_c_R_ode():
    t = np.linspace(-1, 1, 101)
    for R in (0.5, 2.0):
        a, ad, add = cf.weight_a_R_derivatives(t, R)
        c = a**-0.5
        cdd = -0.5 * add * a**-1.5 + 0.75 * ad**2 * a**-2.5
        np.testing.assert_allclose(cdd, 16 * c**-3, rtol=1e-12)


def test_mu_and_roots():
    assert cf.mu_of_R(1.0) == 0.125
    small, large = cf.roots_of_mu(0.1)
    assert small == pytest.approx(0.5, abs=1e-15) and large == pytest.approx(2.0, abs=1e-14)
    assert cf.smallest_R(0.1) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(NoRealRoot):
        cf.smallest_R(0.2)
    with pytest.raises(ContractError):
        cf.smallest_R(0.0)
    assert cf.smallest_R(0.125) == 1.0


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 0.125))
def test_smallest_root_roundtrip(mu):
    small, large = cf.roots_of_mu(mu)
    assert cf.mu_of_R(small) == pytest.approx(mu, rel=1e-12, abs=1e-12)
    assert small <= 1.0 <= large


def test_counterexample_values():
    assert cf.counterexample_V(0.0, 0.0, 1, 1) == pytest.approx(4 + 0j)
    for k, n in [(0.4, 1), (0.5, 1), (1, 2)]:
        with pytest.raises(InvalidOrder):
            cf.counterexample_u(0.0, 0.0, k, n)
        with pytest.raises(InvalidOrder):
            cf.counterexample_V(0.0, 0.0, k, n)


@pytest.mark.parametrize("k", [1, 2, 3.5])
def test_counterexample_solves(k):
    g = make_grid(1024, 20.0)
    V = PotentialSpec.closed_form("counterexample", k=k, n=1)
    r = pde_residual(lambda x, t: cf.counterexample_u(x, t, k), V, np.linspace(-1, 1, 9), g)
    assert r < 1e-5


def test_counterexample_potential_bounded():
    x = np.linspace(-20, 20, 4001)
    scan = max(np.max((1 + x**2) * np.abs(cf.counterexample_V(x, t, 2))) for t in np.linspace(-1, 1, 41))
    assert np.isfinite(scan) and scan <= 2 * 2 + 2 * 2 + 4 * 2 * 3


def test_counterexample_endpoint_norm():
    g = make_grid(1024, 20.0)
    k = 2
    # ||e^{x^2/8} u(+-1)||^2 = 2^(2k - 1/2) int (1 + x^2)^(-2k) = 2^(7/2) * 5 pi / 16
    exact = math.sqrt(2**3.5 * 5 * math.pi / 16)
    for t in (-1.0, 1.0):
        f = WaveField(g, t, cf.counterexample_u(g.x, t, k))
        assert weighted_l2_norm(f, 0.125) == pytest.approx(exact, rel=1e-6)


def test_interior_weight_examples():
    cfg = cf.HardyConfig(1.0, 2.0, 0.3)
    assert cf.theorem3_weight(0.0, cfg) == pytest.approx(1 / 4, abs=1e-12)
    assert cf.theorem3_weight(0.3, cfg) == pytest.approx(1.0, abs=1e-12)
    eq = cf.HardyConfig(1.5, 1.5, 0.4)
    R = cf.theorem3_R(eq)
    assert cf.theorem3_weight(0.2, eq) == pytest.approx(R / (2 * 0.4), rel=1e-14)
    assert cf.theorem3_R(cf.HardyConfig(1.0, 1.0, 0.25)) == 1.0
    with pytest.raises(NoRealRoot):
        cf.theorem3_R(cf.HardyConfig(1.0, 1.0, 0.3))
    with pytest.raises(ContractError):
        cf.HardyConfig(0.0, 1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.01, 1.0))
def test_interior_weight_endpoints(alpha, beta, frac):
    T = frac * 0.25 * alpha * beta
    cfg = cf.HardyConfig(alpha, beta, T)
    assert cf.theorem3_weight(0.0, cfg) == pytest.approx(1 / beta**2, rel=1e-12)
    assert cf.theorem3_weight(T, cfg) == pytest.approx(1 / alpha**2, rel=1e-12)


@pytest.mark.parametrize("alpha, beta, T", [(1, 2, 0.2), (1, 2, 0.45), (1, 1, 0.2), (1, 10, 0.2),
                                            (3, 1, 0.7), (2, 2.5, 1.2)])
def test_interior_minimum(alpha, beta, T):
    cfg = cf.HardyConfig(alpha, beta, T)
    t = np.linspace(0, T, 4001)
    inv = 1 / cf.theorem3_weight(t, cfg)
    assert np.all(np.diff(inv, 2) > 0)
    j = int(np.argmin(inv))
    assert (0 < j < len(t) - 1) == cf.interior_minimum_criterion(cfg)


def test_hardy_extremal_modulus():
    y = np.linspace(-3, 3, 13)
    beta, T = 2.0, 1.0  # beta^2 = 4T
    np.testing.assert_allclose(np.abs(cf.hardy_extremal(y, beta, T)), np.exp(-y**2 / beta**2), rtol=1e-14)


def test_kernel_matches_multiplier():
    g = make_grid(1024, 20.0)
    u0 = WaveField.from_function(g, lambda x: np.exp(-x**2))
    ref = free_evolve_exact(u0, 0.5)
    x = g.x[::16]
    via_kernel = cf.kernel_propagate(u0.values, g.x, x, 0.5)
    assert np.max(np.abs(via_kernel - ref.values[::16])) < 1e-6
    assert np.max(np.abs(ref.values - cf.gaussian_free_wave(g.x, 0.5, 1.0))) < 1e-12


def test_kernel_mass():
    # a wide Gaussian is propagated with modulus close to 1 near the origin
    y = np.linspace(-60, 60, 24001)
    eps = 1e-2
    val = cf.kernel_propagate(np.exp(-eps * y**2), y, [0.0], 1.0)[0]
    assert abs(val - cf.gaussian_free_wave(0.0, 1.0, eps)) < 1e-6
    assert abs(abs(val) - 1) < 1e-3
    with pytest.raises(SingularKernel):
        cf.free_kernel(0.0, 0.0, 0.0)
