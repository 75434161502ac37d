import numpy as np
import pytest

from comonotone import (
    comonotone_modulus, example1, example2, load_problem, property_suite,
    random_cohypomonotone, random_spd,
)
from comonotone.exceptions import ConfigError, InfeasibleTarget
from comonotone.problems import dump_problem, get_problem


def test_example1_is_psd():
    a = example1().operator.matrix
    assert np.linalg.eigvalsh(0.5 * (a + a.T)).min() >= -1e-9
    assert np.allclose(a, a.T)
    assert example1().rho == 0.0


def test_example2_modulus():
    p = example2()
    assert comonotone_modulus(p.operator.matrix) == pytest.approx(-0.5, abs=1e-10)
    np.testing.assert_array_equal(p.zero, [0.0, 0.0])


@pytest.mark.parametrize("factory", [example1, example2])
def test_declared_zero(factory):
    p = factory()
    assert np.linalg.norm(p.operator.apply(p.zero)) <= 1e-12


@pytest.mark.parametrize("rho", [-0.9, -0.5, -0.1])
def test_cohypomonotone_hits_target(rho):
    for seed in range(5):
        p = random_cohypomonotone(6, rho, seed)
        assert p.rho == pytest.approx(rho, abs=1e-10)
        assert p.rho > -1.0


def test_cohypomonotone_same_family_as_example2():
    # a single block at modulus -1/2 is a scaled rotation, like example 2
    a = random_cohypomonotone(2, -0.5, seed=3).operator.matrix
    assert a[0, 0] == pytest.approx(a[1, 1])
    assert a[0, 1] == pytest.approx(-a[1, 0])
    assert comonotone_modulus(a) == pytest.approx(-0.5, abs=1e-10)


def test_cohypomonotone_infeasible():
    for bad in (0.0, 0.3, -1.0, -2.0, np.nan):
        with pytest.raises(InfeasibleTarget):
            random_cohypomonotone(4, bad, 0)
    with pytest.raises(ValueError):
        random_cohypomonotone(3, -0.5, 0)


def test_generators_deterministic():
    np.testing.assert_array_equal(random_spd(5, 7).operator.matrix, random_spd(5, 7).operator.matrix)
    a = random_cohypomonotone(4, -0.3, 11).operator.matrix
    np.testing.assert_array_equal(a, random_cohypomonotone(4, -0.3, 11).operator.matrix)
    assert not np.array_equal(a, random_cohypomonotone(4, -0.3, 12).operator.matrix)


def test_generated_pass_property_suite():
    for seed in range(3):
        for p in (random_spd(4, seed), random_cohypomonotone(4, -0.7, seed)):
            for rep in property_suite(p.operator, 2.0, sample_count=200, seed=seed):
                assert rep.ok, f"{p.name}: {rep}"


def test_get_problem():
    assert get_problem("example2").name == "example2"
    assert get_problem("random_spd", seed=1, dim=4).dim == 4
    assert get_problem("random_cohypomonotone", dim=4, rho=-0.2).rho == pytest.approx(-0.2)
    with pytest.raises(ConfigError):
        get_problem("example9")


def test_problem_file_roundtrip(tmp_path):
    p = random_cohypomonotone(4, -0.4, 2)
    dump_problem(p, tmp_path / "p.txt")
    q = load_problem(tmp_path / "p.txt")
    np.testing.assert_array_equal(q.operator.matrix, p.operator.matrix)
    assert q.rho == p.rho
    assert q.name == p.name


def test_problem_file_by_hand(tmp_path):
    f = tmp_path / "rot.txt"
    f.write_text("# scaled rotation\ndim 2\nrho -0.5\n-0.4 0.8\n-0.8 -0.4\n")
    q = load_problem(f)
    assert q.name == "rot"
    np.testing.assert_allclose(q.operator.resolvent(2.0, [1, 0]), [1 / 13, 8 / 13])


@pytest.mark.parametrize("text", [
    "2\n1 0\n0 1\n",                    # no dim header
    "dim 2\n1 0\n",                     # too few rows
    "dim 2\n1 0\n0 x\n",                # not a number
    "dim 2\nzero 1 1\n1 0\n0 1\n",      # declared zero is wrong
])
def test_problem_file_errors(tmp_path, text):
    f = tmp_path / "bad.txt"
    f.write_text(text)
    with pytest.raises(ConfigError):
        load_problem(f)
    with pytest.raises(ConfigError):
        load_problem(tmp_path / "missing.txt")
