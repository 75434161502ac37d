from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from comonotone import (
    AlgoParams, StoppingRule, continuous_energy, discrete_energy, example2, fit_rate,
    rate_slope, run, summability_report,
)
from comonotone.diagnostics import (
    discrete_energy_records, discrete_summary, monotone_violations, omega,
)
from comonotone.exceptions import BOutOfRange, InsufficientData

REFERENCE = AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0)


def test_discrete_energy_by_hand():
    # e=(1,2), d=(1,1), v=2e-2d=(0,2): 2 + 0.5*2*3*5 + 0.5*9*4*2 = 2 + 15 + 36
    assert discrete_energy(2.0, [0, 0], 4, [1, 2], [0, 1], 6.0) == pytest.approx(53.0)


def test_continuous_energy_by_hand():
    # v=(1,0)+2*(0,1): 0.5*5 + 0.5*1*2*1
    assert continuous_energy(1.0, [0, 0], 2.0, [1, 0], [0, 1], 4.0) == pytest.approx(3.5)


def test_energy_b_range():
    with pytest.raises(BOutOfRange):
        discrete_energy(9.5, [0, 0], 4, [1, 2], [0, 1], 10.0)
    with pytest.raises(BOutOfRange):
        continuous_energy(-0.1, [0, 0], 1.0, [1, 0], [0, 1], 4.0)


def test_omega_first_row():
    w = omega(1, [1, 1], [1, 1], REFERENCE, example2().operator)
    np.testing.assert_allclose(w, [40 / 13, 8 / 13], atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(
    alpha=st.floats(3.0, 30.0),
    frac=st.floats(0.0, 1.0),
    n=st.integers(1, 10**6),
    vals=st.lists(st.floats(-100, 100), min_size=6, max_size=6),
)
def test_discrete_energy_nonnegative(alpha, frac, n, vals):
    # each term is a square times a nonnegative weight for b in [0, alpha-1]
    b = frac * (alpha - 1.0)
    e = discrete_energy(b, vals[:2], n, vals[2:4], vals[4:], alpha)
    assert e >= -1e-9 * (1 + abs(e))


def test_fit_rate_power_laws():
    n = np.arange(1, 2001, dtype=float)
    assert fit_rate(n, 1 / n**2).slope == pytest.approx(-2.0, abs=1e-10)
    assert fit_rate(n, np.full_like(n, 3.0)).slope == pytest.approx(0.0, abs=1e-10)
    rep = fit_rate(n, 1 / n**2)
    assert rep.conforms()
    assert rep.terminal_scaled_residual == pytest.approx(1 / 2000)


def test_fit_rate_errors():
    with pytest.raises(InsufficientData):
        fit_rate(np.arange(1, 10.0), np.ones(9))
    with pytest.raises(InsufficientData):
        fit_rate([], [])
    with pytest.raises(ValueError):
        fit_rate(np.arange(1, 100.0), np.ones(99), window_fraction=0.0)


def test_fit_rate_drops_zeros():
    n = np.arange(1, 500, dtype=float)
    r = 1 / n
    r[::7] = 0.0
    assert fit_rate(n, r).slope == pytest.approx(-1.0, abs=1e-10)


def test_summability_apery():
    n = np.arange(1, 200001, dtype=float)
    fake = SimpleNamespace(n=n, diff=1 / n**2, yosida=1 / n**2, yosida_jump=np.zeros_like(n))
    rep = summability_report(fake)
    # sum 1/n^3 = 1.2020569...
    assert rep.diff_sums[-1] == pytest.approx(1.2020569, abs=1e-6)
    assert rep.flatness["jump"] == 0.0
    assert rep.max_flatness < 1e-9


def test_monotone_violations():
    v = [5.0, 4.0, 4.5, 3.0, 3.0]
    assert list(monotone_violations(v, [1, 2, 3, 4, 5], 0, 1e-12)) == [1]
    assert list(monotone_violations(v, [1, 2, 3, 4, 5], 2, 1e-12)) == []


def test_discrete_records_match_log_energy():
    log = run("ins", example2(), REFERENCE, [1.0, 1.0], StoppingRule(max_iter=40))
    recs = discrete_energy_records(log, [0.0, 0.0])
    np.testing.assert_allclose([r.eps_b for r in recs], log.energy, rtol=1e-12)
    assert recs[0].omega_norm == pytest.approx(np.hypot(40, 8) / 13)
    log = run("ins", example2(), REFERENCE, [1.0, 1.0], StoppingRule(max_iter=4), store_iterates=False)
    with pytest.raises(InsufficientData):
        discrete_energy_records(log, [0.0, 0.0])


def test_rate_slope_on_run():
    log = run("ins", example2(), REFERENCE, [1.0, 1.0], StoppingRule(target_tol=1e-7))
    assert rate_slope(log, "diff").slope <= -0.9
    assert rate_slope(log, "yosida").slope <= -0.9
    with pytest.raises(ValueError):
        rate_slope(log, "energy")
    s = discrete_summary(log)
    assert s["energy_violations"] == 0
    assert s["stop_reason"] == "target-tol"
