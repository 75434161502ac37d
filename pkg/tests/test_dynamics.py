import numpy as np
import pytest
from scipy.integrate import solve_ivp

from comonotone import AlgoParams, IntegratorConfig, example1, example2, integrate_damped, integrate_ds
from comonotone.dynamics import OdeState, field_damped, field_ds
from comonotone.exceptions import DimensionMismatch, NonpositiveTime, StepSizeUnderflow
from comonotone.ode import dopri5
from comonotone.operators import DenseLinearOperator

EX2_ODE = AlgoParams(alpha=5.0, beta=2.0, gamma=2.5, eta=2.0)


def zero_problem(dim=2):
    return DenseLinearOperator(np.zeros((dim, dim)), rho=0.0, zero=np.zeros(dim))


def closed_form(t, x0, v0, alpha, t0):
    """x' = v0 (t0/t)^alpha for x'' + (alpha/t) x' = 0."""
    t = np.asarray(t, dtype=float)[..., None]
    x0, v0 = np.asarray(x0), np.asarray(v0)
    x = x0 + v0 * t0**alpha * (t ** (1 - alpha) - t0 ** (1 - alpha)) / (1 - alpha)
    return x, v0 * (t0 / t) ** alpha


def test_field_ds_oracle():
    # t=2, x=(1,0), x'=0: y' = -(4/2) A_2(1,0) = -2 * (6/13, -4/13)
    op = example2().operator
    p = AlgoParams(alpha=5.0, beta=4.0, gamma=2.5, eta=2.0)
    s = field_ds(2.0, OdeState(np.array([1.0, 0.0]), np.zeros(2)), p, op)
    np.testing.assert_allclose(s.x, [0, 0])
    np.testing.assert_allclose(s.y, [-12 / 13, 8 / 13], atol=1e-15)


def test_field_ds_rejects_nonpositive_time():
    with pytest.raises(NonpositiveTime):
        field_ds(0.0, OdeState(np.zeros(2), np.zeros(2)), EX2_ODE, example2().operator)
    with pytest.raises(NonpositiveTime):
        IntegratorConfig(t0=0.0)


def test_field_damped_oracle():
    op = example2().operator
    x, y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    s = field_damped(1.0, OdeState(x, y), 3.0, 0.5, op)
    w = x + 0.5 * y
    np.testing.assert_allclose(s.y, -3.0 * y - op.matrix @ w)
    with pytest.raises(DimensionMismatch):
        field_damped(1.0, OdeState(np.zeros(3), np.zeros(3)), 3.0, 0.5, op)


def test_zero_operator_closed_form():
    cfg = IntegratorConfig(t0=0.1, t_end=100.0)
    traj = integrate_ds(zero_problem(), EX2_ODE, [1.0, -2.0], [1.0, 1.0], cfg)
    x, v = closed_form(traj.t, [1.0, -2.0], [1.0, 1.0], 5.0, 0.1)
    rel = np.abs(traj.x[-1] - x[-1]) / np.abs(x[-1])
    assert rel.max() <= 10 * cfg.rel_tol
    np.testing.assert_allclose(traj.xdot, v, rtol=1e-4, atol=1e-9)


def test_grid_endpoints():
    g = IntegratorConfig(t0=0.1, t_end=100.0, sample_count=7).grid()
    assert g[0] == 0.1 and g[-1] == 100.0
    assert np.all(np.diff(np.log(g)) > 0)


def test_dopri5_matches_scipy():
    op = example2().operator
    p = EX2_ODE

    def f(t, u):
        s = field_ds(t, OdeState(u[:2], u[2:]), p, op)
        return np.concatenate([s.x, s.y])

    t_eval = np.geomspace(0.1, 100, 50)
    u0 = np.array([10.0, -10.0, 1.0, 1.0])
    ours = dopri5(f, 0.1, u0, 100.0, t_eval, rtol=1e-10, atol=1e-12)
    ref = solve_ivp(f, (0.1, 100.0), u0, method="DOP853", t_eval=t_eval, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(ours.y, ref.y.T, rtol=1e-7, atol=1e-9)


def test_dopri5_order_fixed_step():
    f = lambda t, y: np.array([y[1], -y[0]])  # noqa: E731
    errs, steps = [], []
    for k in range(2, 7):
        h = 2.0**-k
        s = dopri5(f, 0.0, [1.0, 0.0], 10.0, [10.0], rtol=1e3, atol=1e3, max_step=h, first_step=h)
        errs.append(abs(s.y[-1, 0] - np.cos(10.0)))
        steps.append(s.accepted_steps)
    assert np.polyfit(np.log(steps), np.log(errs), 1)[0] <= -4.5


def test_dopri5_underflow():
    # blow-up at t = 1 forces ever smaller steps
    with pytest.raises(StepSizeUnderflow):
        dopri5(lambda t, y: y**2, 0.0, [1.0], 2.0, [2.0], rtol=1e-10, atol=1e-12)


def test_dopri5_bad_eval_grid():
    with pytest.raises(ValueError):
        dopri5(lambda t, y: -y, 0.0, [1.0], 1.0, [0.5, 0.2])


def test_trajectory_channels_example2():
    traj = integrate_ds(example2(), EX2_ODE, [10.0, -10.0], [1.0, 1.0])
    i = traj.at(10.0)
    assert traj.t[i] == pytest.approx(10.0, rel=0.02)
    np.testing.assert_allclose(traj.t_xdot, traj.t * np.linalg.norm(traj.xdot, axis=1))
    # residual is A_eta at the extrapolated point
    z = traj.x[i] + (traj.t[i] / EX2_ODE.gamma) * traj.xdot[i]
    np.testing.assert_allclose(traj.residual[i], example2().operator.yosida(2.0, z))
    assert np.all(np.isfinite(traj.energy))


def test_damped_monotone_example():
    traj = integrate_damped(example1(), 15.0, 10.0, [1.0, -10.0, -20.0], [1.0, 1.0, 1.0])
    assert np.all(np.isnan(traj.energy))
    assert traj.err[-1] < traj.err[0]


def test_energy_disabled_outside_range():
    p = AlgoParams(alpha=3.0, beta=1.0, gamma=5.0, eta=2.0)  # gamma > alpha - 1
    traj = integrate_ds(example2(), p, [1.0, 1.0], [0.0, 0.0], IntegratorConfig(t_end=1.0))
    assert np.all(np.isnan(traj.energy))
