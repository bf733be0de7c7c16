import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardy_lab import closed_forms as cf
from hardy_lab import engine as eng
from hardy_lab.errors import ContractError, NegativeIntegrand, NonpositiveF, SingularRecursion
from hardy_lab.frame_operators import F_of


def test_time_grid():
    t = eng.time_grid(201)
    assert t[0] == -1.0 and t[-1] == 1.0 and t[100] == 0.0
    np.testing.assert_array_equal(t, -t[::-1])
    for bad in (200, 101):
        with pytest.raises(ContractError):
            eng.time_grid(bad)


def test_initial_state():
    w = eng.initial_state(0.1, 201)
    np.testing.assert_allclose(w.a, 0.1, rtol=1e-15)
    assert w.mu == pytest.approx(0.1) and w.a0 == pytest.approx(0.1)
    np.testing.assert_allclose(w.F, 32 * 0.01, rtol=1e-14)
    with pytest.raises(ContractError):
        eng.initial_state(0.0)


def test_extremal_state_matches_closed_form():
    w = eng.extremal_state(1.5)
    a, ad, add = cf.weight_a_R_derivatives(w.t, 1.5)
    np.testing.assert_allclose(w.a, a, rtol=1e-14)
    np.testing.assert_allclose(w.a_dot, ad, atol=1e-14)
    np.testing.assert_allclose(w.a_ddot, add, atol=1e-13)
    assert eng.limit_ode_residual(w) < 1e-13
    assert np.max(np.abs(w.F)) < 1e-12


@pytest.mark.parametrize("mu", [0.05, 0.1, 0.2])
def test_drift_constant_weight(mu):
    # g = 32 mu, b = 16 mu (1 - t^2)
    w = eng.initial_state(mu)
    d = eng.drift_from_weight(w)
    t = w.t
    np.testing.assert_allclose(d.b, 16 * mu * (1 - t**2), atol=1e-13)
    np.testing.assert_allclose(d.b_dot, -32 * mu * t, atol=1e-13)
    np.testing.assert_allclose(d.b_ddot, -32 * mu, rtol=1e-14)
    np.testing.assert_allclose(eng.drift_derivative_control_form(w), d.b_dot, atol=1e-13)


def test_drift_examples():
    d = eng.drift_from_weight(eng.initial_state(0.1))
    mid = len(d.t) // 2
    assert d.b[mid] == pytest.approx(1.6, abs=1e-10)
    assert d.b_dot[-1] == pytest.approx(-3.2, abs=1e-10)
    assert d.b[0] == d.b[-1] == 0.0


def test_drift_control_form_along_iteration():
    w = eng.initial_state(0.1)
    for _ in range(4):
        d = eng.drift_from_weight(w)
        np.testing.assert_allclose(eng.drift_derivative_control_form(w), d.b_dot, atol=1e-9)
        w = eng.next_weight(w, d)


@pytest.mark.parametrize("mu, vanishes", [(0.1, False), (0.2, False), (0.26, True), (0.3, True)])
def test_vanishing_test_first_step(mu, vanishes):
    # 1 - 16 mu^2 (1 - t^2) <= 0 somewhere iff 16 mu^2 >= 1
    w = eng.initial_state(mu)
    assert eng.vanishing_test(w, eng.drift_from_weight(w)) is vanishes


def test_next_weight_examples():
    mu = 0.1
    w = eng.initial_state(mu)
    w2 = eng.next_weight(w, eng.drift_from_weight(w))
    t = w.t
    q = 1 - 16 * mu**2 * (1 - t**2)
    a2 = mu / q
    assert w2.a0 == pytest.approx(0.1 / 0.84, rel=1e-13)
    np.testing.assert_allclose(w2.a, a2, rtol=1e-13)
    np.testing.assert_allclose(w2.a_dot, -mu * 32 * mu**2 * t / q**2, atol=1e-12)
    add = -32 * mu**3 / q**2 + 2 * mu * (32 * mu**2 * t) ** 2 / q**3
    np.testing.assert_allclose(w2.a_ddot, add, atol=1e-12)
    assert w2.mu == pytest.approx(mu, rel=1e-14)


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_extremal_fixed_point(R):
    w = eng.extremal_state(R)
    w2 = eng.next_weight(w, eng.drift_from_weight(w))
    assert np.max(np.abs(w2.a - w.a)) < 1e-14
    np.testing.assert_allclose(w2.c_ddot, w.c_ddot, atol=1e-13)


def test_solve_T_constant_weight_equals_drift():
    w = eng.initial_state(0.1)
    d = eng.drift_from_weight(w)
    np.testing.assert_allclose(eng.solve_T(w, d), d.b, atol=1e-13)


def test_solve_T_extremal_is_zero():
    assert np.max(np.abs(eng.solve_T(eng.extremal_state(1.0)))) < 1e-12


def test_solve_T_satisfies_ode():
    # (T'/a)' = -b''^2 / F(a) on a non-constant iterate
    w = eng.initial_state(0.1)
    w = eng.next_weight(w, eng.drift_from_weight(w))
    d = eng.drift_from_weight(w)
    T = eng.solve_T(w, d)
    t = w.t
    lhs = np.gradient(np.gradient(T, t, edge_order=2) / w.a, t, edge_order=2)
    rhs = -d.b_ddot**2 / F_of(w.a, w.a_dot, w.a_ddot)
    assert np.max(np.abs(lhs - rhs)[5:-5]) < 1e-4 * np.max(np.abs(rhs))
    assert T[0] == T[-1] == 0.0


def test_limit_residual_example():
    assert eng.limit_ode_residual(eng.initial_state(0.1)) == pytest.approx(16 * 0.1**1.5, rel=1e-12)
    assert abs(16 * 0.1**1.5 - 0.50596) < 1e-5


@pytest.mark.parametrize("mu", [0.05, 0.1])
def test_iterate_converges_to_extremal(mu):
    rep = eng.iterate(mu)
    assert rep.verdict is eng.Verdict.CONVERGED and not rep.verdict.vanishes
    R = cf.smallest_R(mu)
    assert rep.R == pytest.approx(R)
    assert rep.R_from_limit == pytest.approx(R, abs=1e-6)
    t = rep.final_state.t
    assert np.max(np.abs(rep.final_state.a - cf.weight_a_R(t, R))) < 1e-6
    assert eng.limit_ode_residual(rep.final_state) < 1e-6
    assert np.all(np.diff(rep.history) > 0)
    assert rep.iterations == len(rep.increments) == len(rep.history) - 1


@pytest.mark.parametrize("mu, k", [(0.2, 2), (0.3, 1), (0.5, 1)])
def test_iterate_vanishes(mu, k):
    rep = eng.iterate(mu)
    assert rep.verdict is eng.Verdict.VANISHES_BY_TEST and rep.verdict.vanishes
    assert rep.k == k
    assert rep.R is None


def test_iterate_inconclusive_and_blowup():
    assert eng.iterate(0.1, k_max=3).verdict is eng.Verdict.INCONCLUSIVE
    assert eng.iterate(0.2, a_cap=0.21).verdict is eng.Verdict.VANISHES_BY_BLOWUP


@settings(max_examples=10, deadline=None)
@given(st.floats(0.02, 0.12))
def test_iterates_keep_invariants(mu):
    w = eng.initial_state(mu, 401)
    prev = w.a
    for _ in range(5):
        inv = w.invariants(1e-10)
        assert all(inv.values()), inv
        d = eng.drift_from_weight(w)
        assert not eng.vanishing_test(w, d)
        w = eng.next_weight(w, d)
        # monotone improvement with fixed endpoints
        assert np.all(w.a >= prev - 1e-14)
        assert w.mu == pytest.approx(mu, rel=1e-12)
        prev = w.a


def test_errors():
    t = eng.time_grid(201)
    c = np.full_like(t, 2.0)
    bad = eng.WeightState(t, c, np.zeros_like(t), np.full_like(t, 10.0))
    with pytest.raises(NegativeIntegrand):
        eng.drift_from_weight(bad)
    with pytest.raises(NonpositiveF):
        eng.solve_T(bad)
    w = eng.initial_state(0.3, 201)
    with pytest.raises(SingularRecursion):
        eng.next_weight(w, eng.drift_from_weight(w))
    with pytest.raises(ContractError):
        eng.iterate(0.1, n_time=2000)
