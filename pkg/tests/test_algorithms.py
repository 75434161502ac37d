import warnings

import numpy as np
import pytest

from comonotone import (
    AlgoParams, CountingOperator, StoppingRule, example1, example2, initial_state,
    run, step_hppa, step_ins, step_ohm, step_ipa, validate_params,
)
from comonotone.algorithms import ohm_theta
from comonotone.exceptions import Divergence
from comonotone.operators import DenseLinearOperator

REFERENCE = AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0)
START = np.array([1.0, 1.0])


def test_ins_first_step_oracle():
    # x_1 = x_0 = (1,1): d = 0, so x_2 = x_1 - 4 * A_2(1,1) = (1,1) - 4*(10/13, 2/13)
    op = example2().operator
    s = step_ins(initial_state(START), REFERENCE, op)
    assert s.n == 2
    np.testing.assert_allclose(s.x_cur, [-27 / 13, 5 / 13], atol=1e-14)
    np.testing.assert_allclose(s.x_prev, START)


def test_ins_second_step_by_hand():
    op = example2().operator
    p = REFERENCE
    s1 = initial_state(START)
    s2 = step_ins(s1, p, op)
    s3 = step_ins(s2, p, op)
    d = s2.x_cur - s2.x_prev
    z = s2.x_cur + (2 / p.gamma) * d
    y = s2.x_cur + (1 - p.alpha / 2) * d
    np.testing.assert_allclose(s3.x_cur, y - (p.beta / 2) * op.yosida(p.eta, z), atol=1e-14)


def test_ipa_first_step_oracle():
    # y_1 = (1,1); J_3 = (1/29)[[-1,-12],[12,-1]]; x_2 = (2/3) y + (1/3) J_3 y
    op = example2().operator
    s = step_ipa(initial_state(START, with_y=True), REFERENCE, op)
    np.testing.assert_allclose(s.x_cur, [15 / 29, 23 / 29], atol=1e-14)
    np.testing.assert_allclose(s.y_prev, START)


def test_ipa_needs_y():
    with pytest.raises(ValueError):
        step_ipa(initial_state(START), REFERENCE, example2().operator)


def test_hppa_first_step_oracle():
    op = example2().operator
    np.testing.assert_allclose(step_hppa(START, START, 2.0, 1, op), [3 / 13, 11 / 13], atol=1e-14)


def test_ohm_first_step_oracle():
    # theta = 2/3, T(1,1) = (1,1) + 1.5*(J(1,1) - (1,1)) = (-17/13, 7/13)
    op = example2().operator
    assert ohm_theta(2.0, -0.5) == pytest.approx(2 / 3)
    assert ohm_theta(2.0, 0.0) == 0.5
    np.testing.assert_allclose(step_ohm(START, START, 1, 2.0, op), [-2 / 13, 10 / 13], atol=1e-14)


def test_validate_reference_params():
    rep = validate_params(REFERENCE, -0.5)
    assert rep.ok
    assert "PASS" in str(rep)


def test_validate_alpha_fail_names_condition():
    rep = validate_params(AlgoParams(9.0, 4.0, 7.0, 2.0), -0.5)
    assert not rep.ok
    assert rep.failed() == ["alpha > gamma + 2"]


def test_validate_eta_boundary():
    rep = validate_params(AlgoParams(10.0, 4.0, 7.0, 1.0), -0.5)
    assert "eta > max(-2*rho, 0)" in rep.failed()
    assert validate_params(AlgoParams(15.0, 10.0, 10.0, 2.0), 0.0).ok


def test_one_resolvent_per_iteration():
    p = example2()
    for method in ("ins", "ipa", "hppa", "ohm"):
        op = CountingOperator(p.operator)
        log = run(method, op, REFERENCE, START, StoppingRule(max_iter=25))
        assert len(log) == 25
        assert op.counts["resolvent"] == 25, method


@pytest.mark.parametrize("method", ["ins", "ipa", "hppa", "ohm"])
def test_compiled_matches_reference(method):
    p = example2()
    rule = StoppingRule(target_tol=1e-7, max_iter=3000)
    fast = run(method, p, REFERENCE, START, rule, fast=True)
    slow = run(method, p, REFERENCE, START, rule, fast=False)
    assert fast.stop_reason == slow.stop_reason
    np.testing.assert_array_equal(fast.n, slow.n)
    np.testing.assert_allclose(fast.err, slow.err, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(fast.yosida, slow.yosida, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(fast.iterates, slow.iterates, rtol=1e-9, atol=1e-15)
    if method == "ins":
        np.testing.assert_allclose(fast.energy, slow.energy, rtol=1e-9)


def test_row_layout():
    log = run("ins", example2(), REFERENCE, START, StoppingRule(max_iter=3))
    np.testing.assert_array_equal(log.n, [1, 2, 3])
    assert log.diff[0] == 0.0
    assert log.err[0] == pytest.approx(np.sqrt(2))
    assert log.yosida[0] == pytest.approx(np.hypot(10, 2) / 13)
    # omega_1 = beta * A_2(1,1) = (40/13, 8/13)
    assert log.omega_norm[0] == pytest.approx(np.hypot(40, 8) / 13)
    np.testing.assert_allclose(log.iterates[1], [-27 / 13, 5 / 13])
    assert np.isnan(log.yosida_jump[-1])


def test_stop_rules():
    p = example2()
    log = run("ins", p, REFERENCE, START, StoppingRule(target_tol=1e-7))
    assert log.stop_reason == "target-tol"
    assert log.err[-1] <= 1e-7 < log.err[-2]
    log = run("ins", p, REFERENCE, START, StoppingRule(residual_tol=1e-6))
    assert log.stop_reason == "residual-tol"
    assert log.yosida[-1] <= 1e-6
    log = run("ohm", p, REFERENCE, START, StoppingRule(max_iter=10))
    assert (log.stop_reason, len(log)) == ("max-iter", 10)


def test_target_rule_needs_zero():
    op = DenseLinearOperator(example2().operator.matrix)
    with pytest.raises(ValueError):
        run("ins", op, REFERENCE, START, StoppingRule(target_tol=1e-7))


def test_invalid_params_warn_but_run():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        log = run("ins", example2(), AlgoParams(9.0, 4.0, 7.0, 2.0), START,
                  StoppingRule(max_iter=5))
    assert not log.params_ok
    assert any("alpha > gamma + 2" in str(x.message) for x in w)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@pytest.mark.parametrize("fast", [True, False])
def test_divergence_reported(fast):
    # an absurd step length overflows within a few iterations
    op = DenseLinearOperator(example2().operator.matrix, rho=-0.5, zero=[0, 0])
    with pytest.raises(Divergence):
        run("ins", op, AlgoParams(3.0, 1e200, 0.5, 2.0), START, StoppingRule(max_iter=50),
            fast=fast)


def test_unknown_method():
    with pytest.raises(ValueError):
        run("newton", example2(), REFERENCE, START)


def test_example1_converges():
    p = example1()
    log = run("ins", p, p.recommended_params, [1.0, -10.0, -20.0], StoppingRule(target_tol=1e-6))
    assert log.stop_reason == "target-tol"
