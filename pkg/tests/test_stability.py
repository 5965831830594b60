import numpy as np
import pytest

from memslab import PreconditionError, build_radial, principal_eigenpair
from memslab.profiles import constant_profile, power_profile
from memslab.solver import StatePair, minimal_solve
from memslab.stability import (
    EigenResult,
    classify,
    coupling_weights,
    eigen_ratio_check,
    linearized_eigen,
    scalar_linearized_eigenvalue,
    stability_inequality_gap,
    write_eigen_csv,
)


@pytest.fixture(scope="module")
def disk():
    return build_radial(2, 1.0, 256)


@pytest.fixture(scope="module")
def one(disk):
    return constant_profile(disk, 1.0)


@pytest.fixture(scope="module")
def zero_state(disk):
    return StatePair(u=np.zeros(disk.n_nodes), v=np.zeros(disk.n_nodes))


@pytest.fixture(scope="module")
def mu1(disk):
    return principal_eigenpair(disk.operator, disk).value


class TestLinearizedEigen:
    def test_uncoupled_reduces_to_dirichlet_eigenpair(self, disk, one, zero_state, mu1):
        res = linearized_eigen(disk, one, one, 0.0, 0.0, zero_state)
        assert res.nu1 == pytest.approx(mu1, abs=1e-7)
        psi1 = principal_eigenpair(disk.operator, disk).vector
        assert np.max(np.abs(res.phi1 - psi1)) < 1e-6
        assert np.max(np.abs(res.phi2 - psi1)) < 1e-6

    @pytest.mark.parametrize("t", [0.1, 0.5, 1.5])
    def test_zero_state_shifts_by_twice_t(self, disk, one, zero_state, mu1, t):
        res = linearized_eigen(disk, one, one, t, t, zero_state)
        assert res.nu1 == pytest.approx(mu1 - 2.0 * t, abs=1e-6)

    def test_zero_state_asymmetric_closed_form(self, disk, one, zero_state, mu1):
        # nu1 = mu1 - 2 sqrt(lam mu), phi2/phi1 = sqrt(mu/lam) at the zero state
        lam, mu = 0.8, 0.2
        res = linearized_eigen(disk, one, one, lam, mu, zero_state)
        assert res.nu1 == pytest.approx(mu1 - 2.0 * np.sqrt(lam * mu), abs=1e-6)
        ratio = res.phi2 / res.phi1
        np.testing.assert_allclose(ratio, np.sqrt(mu / lam), atol=1e-5)

    def test_minimal_branch_is_stable(self, disk, one):
        out = minimal_solve(disk, one, one, 0.4, 0.4)
        res = linearized_eigen(disk, one, one, 0.4, 0.4, out.state)
        assert res.nu1 > 0
        assert np.all(res.phi1 > 0) and np.all(res.phi2 > 0)
        assert res.phi1.max() == 1.0

    def test_block_residual_contract(self, disk, one):
        out = minimal_solve(disk, one, one, 0.5, 0.3)
        res = linearized_eigen(disk, one, one, 0.5, 0.3, out.state)
        a12, a21 = coupling_weights(one, one, 0.5, 0.3, out.state)
        op = disk.operator
        r1 = op.apply(res.phi1) - a12 * res.phi2 - res.nu1 * res.phi1
        r2 = op.apply(res.phi2) - a21 * res.phi1 - res.nu1 * res.phi2
        total = np.max(np.abs(r1)) + np.max(np.abs(r2))
        assert total <= 1e-6 * (1.0 + abs(res.nu1))

    def test_scalar_consistency(self, disk, one):
        # symmetric data: block eigenvalue equals the scalar linearized one
        out = minimal_solve(disk, one, one, 0.5, 0.5)
        res = linearized_eigen(disk, one, one, 0.5, 0.5, out.state)
        weight, _ = coupling_weights(one, one, 0.5, 0.5, out.state)
        nu_scalar = scalar_linearized_eigenvalue(disk, weight)
        assert res.nu1 == pytest.approx(nu_scalar, abs=1e-8)

    def test_monotone_loss_of_stability(self, disk, one):
        nus = []
        for lam in (0.3, 0.55, 0.75):
            out = minimal_solve(disk, one, one, lam, lam)
            nus.append(linearized_eigen(disk, one, one, lam, lam, out.state).nu1)
        assert nus[0] > nus[1] > nus[2]


class TestClassify:
    def test_bands(self):
        phi = np.ones(4)
        assert classify(EigenResult(nu1=5.8, phi1=phi, phi2=phi, iterations=1)) == "stable"
        assert classify(EigenResult(nu1=1e-9, phi1=phi, phi2=phi, iterations=1)) == "semi-stable"
        assert classify(EigenResult(nu1=-0.3, phi1=phi, phi2=phi, iterations=1)) == "unstable"


class TestEigenRatio:
    def test_symmetric_case(self, disk, one):
        out = minimal_solve(disk, one, one, 0.5, 0.5)
        res = linearized_eigen(disk, one, one, 0.5, 0.5, out.state)
        assert eigen_ratio_check(res, 0.5, 0.5) >= -1e-6

    def test_asymmetric_minimal_solution(self, disk, one):
        lam, mu = 0.6, 0.3
        out = minimal_solve(disk, one, one, lam, mu)
        res = linearized_eigen(disk, one, one, lam, mu, out.state)
        assert eigen_ratio_check(res, lam, mu) >= -1e-6

    def test_zero_state_ratio_is_one(self, disk, one, zero_state):
        res = linearized_eigen(disk, one, one, 0.4, 0.4, zero_state)
        np.testing.assert_allclose(res.phi2 / res.phi1, 1.0, atol=1e-6)

    def test_requires_mu_below_lam(self, disk, one, zero_state):
        res = linearized_eigen(disk, one, one, 0.3, 0.6, zero_state)
        with pytest.raises(PreconditionError):
            eigen_ratio_check(res, 0.3, 0.6)


class TestStabilityInequality:
    def test_zero_field(self, disk, one, zero_state):
        gap = stability_inequality_gap(
            disk, one, one, 0.5, 0.5, zero_state, np.zeros(disk.n_nodes)
        )
        assert gap == 0.0

    def test_zero_state_eigenfield_closed_form(self, disk, one, zero_state, mu1):
        t = 0.4
        psi1 = principal_eigenpair(disk.operator, disk).vector
        gap = stability_inequality_gap(disk, one, one, t, t, zero_state, psi1)
        expected = (mu1 - 2.0 * t) * float(np.dot(disk.weights, psi1**2))
        assert gap == pytest.approx(expected, rel=1e-9)

    def test_nonnegative_at_stable_state(self, disk, one, rng):
        out = minimal_solve(disk, one, one, 0.5, 0.5)
        r = disk.radii / disk.radius
        for _ in range(20):
            c, s = rng.uniform(0.0, 0.8), rng.uniform(0.1, 0.4)
            phi = (1.0 - r**2) * np.exp(-(((r - c) / s) ** 2))
            gap = stability_inequality_gap(disk, one, one, 0.5, 0.5, out.state, phi)
            norm2 = float(np.dot(disk.weights, phi * phi))
            assert gap >= -1e-8 * norm2

    def test_requires_constant_profiles(self, disk, zero_state):
        fpow = power_profile(disk, 1.0)
        with pytest.raises(PreconditionError):
            stability_inequality_gap(
                disk, fpow, fpow, 0.3, 0.3, zero_state, np.zeros(disk.n_nodes)
            )


def test_eigen_csv(disk, one, zero_state, tmp_path):
    res = linearized_eigen(disk, one, one, 0.2, 0.2, zero_state)
    path = tmp_path / "eig.csv"
    write_eigen_csv(path, disk, res, fingerprint="beef")
    lines = path.read_text().splitlines()
    assert lines[0] == "# config_fingerprint: beef"
    assert lines[1] == "r,phi1,phi2"
    assert len(lines) == 2 + disk.n_nodes
