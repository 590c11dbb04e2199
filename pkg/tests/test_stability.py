import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecodyn.equilibria import Equilibrium, EquilibriumFamily, Family, enumerate_equilibria
from ecodyn.errors import WrongFamily
from ecodyn.model import jacobian
from ecodyn.presets import PRESET_PARAMS
from ecodyn.stability import (
    TOL_EIG,
    Verdict,
    average_lyapunov_pi,
    classify,
    e5_conditions,
    e6_conditions,
    global_stability_check,
    lyapunov_form,
    persistence_conditions,
    routh_hurwitz,
    routh_hurwitz_coefficients,
    verdict_from_eigenvalues,
)

from conftest import model_params

S1, S2, S3, S4 = (PRESET_PARAMS[k] for k in ("S1", "S2", "S3", "S4"))


def branch(params, tag, x):
    """The computed branch of ``tag`` whose prey coordinate is closest to ``x``."""
    cands = [e for e in enumerate_equilibria(params) if e.tag is tag]
    return min(cands, key=lambda e: abs(e.state[0] - x))


def by_tag(params, tag):
    return next(e for e in enumerate_equilibria(params) if e.tag is tag)


def test_verdict_rule():
    assert verdict_from_eigenvalues([-1, -2, -3]) is Verdict.STABLE
    assert verdict_from_eigenvalues([-1, -2, 1e-3]) is Verdict.UNSTABLE
    assert verdict_from_eigenvalues([-1, -2, complex(0.5 * TOL_EIG, 3)]) is Verdict.MARGINAL
    assert verdict_from_eigenvalues([-1, complex(-0.5 * TOL_EIG, 1), 5]) is Verdict.UNSTABLE


def test_origin_eigenvalues_are_growth_rates():
    r = classify(by_tag(S3, Family.E0), S3)
    assert sorted(v.real for v in r.eigenvalues) == sorted([S3.a1, S3.a2, S3.a3])
    assert all(v.imag == 0 for v in r.eigenvalues)
    assert r.verdict is Verdict.UNSTABLE


def test_e1_has_prey_growth_eigenvalue():
    r = classify(by_tag(S1, Family.E1), S1)
    assert any(abs(v - S1.a1) < 1e-12 for v in r.eigenvalues)
    assert r.verdict is Verdict.UNSTABLE


def test_s1_interior_stable():
    r = classify(branch(S1, Family.ESTAR, 56.43), S1)
    assert r.verdict is Verdict.STABLE
    assert r.condition_flags == {"routh_hurwitz": True}


def test_routh_hurwitz_s1_reference_values():
    rh = routh_hurwitz(branch(S1, Family.ESTAR, 56.43), S1)
    assert rh.A1 == pytest.approx(4.3463, abs=1e-3)
    assert rh.A2 == pytest.approx(2.7135, abs=1e-3)
    assert rh.A3 == pytest.approx(4.8600, abs=1e-3)
    assert rh.A1A2_minus_A3 == pytest.approx(6.9339, abs=1e-3)
    assert rh.satisfied


def test_routh_hurwitz_s4_middle_branch_fails():
    # the table's unstable third interior point sits at x = 33.12
    rh = routh_hurwitz(branch(S4, Family.ESTAR, 33.12), S4)
    assert not rh.satisfied
    assert classify(branch(S4, Family.ESTAR, 33.12), S4).verdict is Verdict.UNSTABLE


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=9, max_size=9))
def test_routh_hurwitz_coefficients_are_trace_and_determinant(entries):
    J = np.array(entries).reshape(3, 3)
    rh = routh_hurwitz_coefficients(J)
    assert rh.A1 == pytest.approx(-np.trace(J), rel=1e-10, abs=1e-10 * 50)
    assert rh.A3 == pytest.approx(-np.linalg.det(J), rel=1e-10, abs=1e-9 * 50**3)
    np.testing.assert_allclose(np.poly(J), [1, rh.A1, rh.A2, rh.A3], rtol=1e-9, atol=1e-9 * 50**3)


def test_wrong_family():
    e0 = by_tag(S1, Family.E0)
    for fn in (e5_conditions, e6_conditions, routh_hurwitz):
        with pytest.raises(WrongFamily):
            fn(e0, S1)
    with pytest.raises(WrongFamily):
        lyapunov_form(1.0, e0, S1)


def test_e5_conditions_s3_reference():
    c = e5_conditions(branch(S3, Family.E5, 0.3585), S3)
    assert c.lhs1 == pytest.approx(5.0000, rel=1e-3)
    assert c.rhs1 == pytest.approx(0.02563, rel=1e-3)
    assert c.rhs2 == pytest.approx(10.4237, rel=1e-3)
    # c3*y5/(x5 + k2) evaluates to a2*c3/c2; the reference value 12.6285 equals c1*y5/(x5 + k2)
    assert c.lhs2 == pytest.approx(S3.a2 * S3.c3 / S3.c2, rel=1e-12)
    assert not c.holds


def test_e5_conditions_s2_and_s1():
    c2 = e5_conditions(branch(S2, Family.E5, 3.75), S2)
    assert c2.lhs1 > c2.rhs1 and c2.lhs2 < c2.rhs2 and not c2.holds
    c1 = e5_conditions(branch(S1, Family.E5, 0.516), S1)
    assert c1.lhs1 == pytest.approx(S1.a1, rel=1e-12)
    assert not c1.holds


def test_e6_conditions_s3_reference():
    c = e6_conditions(branch(S3, Family.E6, 6244), S3)
    assert c.lhs1 == pytest.approx(5.0000, rel=1e-3)
    assert c.rhs1 == pytest.approx(3.7557, rel=1e-3)
    assert c.lhs2 == pytest.approx(206.614, rel=1e-3)
    assert c.rhs2 == pytest.approx(7.8, rel=1e-3)
    assert c.holds


def test_e6_conditions_s1_s2():
    assert not e6_conditions(branch(S1, Family.E6, 59.98), S1).holds
    assert e6_conditions(branch(S2, Family.E6, 57.7), S2).holds


@pytest.mark.parametrize("params, tag, x", [(S3, Family.E6, 6244), (S2, Family.E6, 57.7)])
def test_planar_conditions_agree_with_eigenvalues(params, tag, x):
    e = branch(params, tag, x)
    r = classify(e, params)
    assert r.condition_flags["holds"]
    assert r.verdict is Verdict.STABLE


def test_lyapunov_form_entries():
    e = branch(S1, Family.ESTAR, 56.43)
    x = 1.5
    q = lyapunov_form(x, e, S1)
    assert q.B == S1.c2 / (x + S1.k2) and q.C == S1.c3 / (x + S1.k2)
    assert q.P1 == q.A
    assert q.P2 == pytest.approx(q.A * q.B - q.H**2, rel=1e-14)
    assert q.P3 == pytest.approx(np.linalg.det(q.matrix()), rel=1e-9, abs=1e-18)
    # x * x* < k1 here, so A exceeds b1
    assert x * e.state[0] < S1.k1 and q.A >= S1.b1


def test_lyapunov_minors_at_s1_interior():
    e = branch(S1, Family.ESTAR, 56.43)
    q = lyapunov_form(e.state[0], e, S1)
    assert q.P1 == pytest.approx(0.07055043022105885, rel=1e-9)
    assert q.P2 == pytest.approx(1.0384865119465573e-04, rel=1e-9)
    assert q.P3 == pytest.approx(-4.729695051529392e-06, rel=1e-7)


def test_global_check_single_sample_uses_equilibrium_prey():
    e = branch(S1, Family.ESTAR, 56.43)
    q = lyapunov_form(e.state[0], e, S1)
    g = global_stability_check(e, S1, n_samples=1)
    assert g.holds_on_grid == (q.P1 > 0 and q.P2 > 0 and q.P3 > 0)


def test_global_check_s1_regression():
    e = branch(S1, Family.ESTAR, 56.43)
    g = global_stability_check(e, S1, x_max=60.0, n_samples=1000)
    assert g.holds_on_grid is False
    assert g.first_failure_x == 0.0


def test_global_check_failure_persists_on_refined_grid():
    e = branch(S1, Family.ESTAR, 56.43)
    coarse = global_stability_check(e, S1, x_max=60.0, n_samples=11)
    fine = global_stability_check(e, S1, x_max=60.0, n_samples=101)  # contains the coarse grid
    assert not coarse.holds_on_grid and not fine.holds_on_grid
    assert fine.first_failure_x <= coarse.first_failure_x


@settings(max_examples=100, deadline=None)
@given(model_params(), st.floats(0, 1e4))
def test_lyapunov_yz_block_is_never_positive_definite(P, x):
    # B*C - F^2 = -(c2 - c3)^2 / (4 (x + k2)^2) <= 0
    e = Equilibrium(EquilibriumFamily(Family.ESTAR), (1.0, 1.0, 1.0), True, 0.0)
    q = lyapunov_form(x, e, P)
    assert q.B * q.C - q.F**2 <= 1e-15 * q.F**2
    assert q.B > 0 and q.C > 0


def test_pi_at_boundary_points():
    g = (1.0, 1.0, 1.0)
    P = S1
    assert average_lyapunov_pi((0, 0, 0), P, g) == pytest.approx(P.a1 + P.a2 + P.a3, rel=1e-15)
    assert average_lyapunov_pi((P.a1 / P.b1, 0, 0), P, g) == pytest.approx(P.a2 + P.a3, rel=1e-12)
    e3 = by_tag(P, Family.E3)
    gam = (0.3, 2.0, 1.7)
    assert average_lyapunov_pi(e3.state, P, gam) == pytest.approx(0.3 * P.a1, rel=1e-9)


def test_pi_rejects_nonpositive_weights():
    with pytest.raises(ValueError):
        average_lyapunov_pi((1, 1, 1), S1, (1, 0, 1))


@settings(max_examples=200, deadline=None)
@given(model_params(),
       st.tuples(*[st.floats(0, 1e3)] * 3),
       st.tuples(*[st.floats(0.01, 10)] * 3),
       st.tuples(*[st.floats(0.01, 10)] * 3))
def test_pi_is_linear_in_weights(P, s, g, h):
    gh = tuple(a + b for a, b in zip(g, h))
    lhs = average_lyapunov_pi(s, P, gh)
    rhs = average_lyapunov_pi(s, P, g) + average_lyapunov_pi(s, P, h)
    scale = sum(abs(v) for v in (average_lyapunov_pi(s, P, g), average_lyapunov_pi(s, P, h)))
    assert lhs == pytest.approx(rhs, abs=1e-12 * max(scale, 1.0))


def test_persistence_s1():
    r = persistence_conditions(S1)
    assert S1.a2 * S1.c3 / S1.a3 == pytest.approx(1482)
    assert S1.c2 + S1.k2 * S1.theta == pytest.approx(16.962)
    assert r.cond1 is True
    assert S1.a3 * S1.c2 == pytest.approx(0.00985) and S1.a2 * S1.c3 == pytest.approx(7.41)
    assert r.cond2 is False
    assert r.cond3 is False
    assert set(r.pi_values) == {"E0", "E1", "E2", "E3", "E4", "E5^I", "E6^I"}
    assert r.pi_values["E0"] == pytest.approx(S1.a1 + S1.a2 + S1.a3)


def test_persistence_margins_vanish_at_planar_equilibria():
    # the second inequality of conditions 3 and 4 is f1/x evaluated at E5/E6
    for P in (S1, S3, S4):
        r = persistence_conditions(P)
        for key, m in r.margins.items():
            if key.startswith(("cond3[", "cond4b[")):
                assert abs(m) < 1e-9 * P.a1 * max(1.0, P.c3 * P.k1 * 1e8)


def test_persistence_not_evaluable_without_branches():
    eqs = [e for e in enumerate_equilibria(S1) if e.tag not in (Family.E5, Family.E6)]
    r = persistence_conditions(S1, equilibria=eqs)
    assert r.cond3 is None and r.cond4 is None


@settings(max_examples=300, deadline=None)
@given(model_params())
def test_conditions_one_and_two_are_exclusive(P):
    r = persistence_conditions(P, equilibria=[])
    assert not (r.cond1 and r.cond2)


def test_classify_eigen_sum_and_product():
    for P in PRESET_PARAMS.values():
        for e in enumerate_equilibria(P):
            if not e.feasible:
                continue
            r = classify(e, P)
            J = jacobian(e.state, P)
            ev = np.array(r.eigenvalues)
            assert ev.sum().real == pytest.approx(np.trace(J), rel=1e-10, abs=1e-12)
            assert abs(ev.sum().imag) <= 1e-12 * max(1.0, np.abs(ev).max())
            assert np.prod(ev).real == pytest.approx(np.linalg.det(J), rel=1e-10, abs=1e-12)
