import math

import numpy as np
import pytest
from scipy.special import jn_zeros

from memslab import (
    ConfigurationError,
    build_radial,
    build_rect,
    integrate,
    principal_eigenpair,
    solve_poisson,
    unit_ball_volume,
)


class TestQuadrature:
    @pytest.mark.parametrize(
        "dim,radius,nodes,volume",
        [
            (1, 1.0, 64, 2.0),
            (2, 1.0, 256, math.pi),
            (3, 1.5, 128, 4.0 / 3.0 * math.pi * 1.5**3),
            (8, 1.0, 512, math.pi**4 / 24.0),  # closed-form 8-ball volume
        ],
    )
    def test_weights_sum_to_volume(self, dim, radius, nodes, volume):
        mesh = build_radial(dim, radius, nodes)
        assert mesh.weights.sum() == pytest.approx(volume, rel=1e-10)
        assert mesh.volume == pytest.approx(volume, rel=1e-12)

    @pytest.mark.parametrize("lx,ly,nx,ny", [(1.0, 1.0, 64, 64), (2.0, 1.0, 128, 64)])
    def test_rect_weights(self, lx, ly, nx, ny):
        mesh = build_rect(lx, ly, nx, ny)
        assert mesh.weights.sum() == pytest.approx(lx * ly, rel=1e-10)

    def test_radii_strictly_increasing(self):
        mesh = build_radial(3, 2.0, 64)
        assert np.all(np.diff(mesh.radii) > 0)
        assert mesh.radii[0] == 0.0
        assert mesh.radii[-1] < mesh.radius

    def test_integrate_constants(self, disk256):
        assert integrate(disk256, np.ones(disk256.n_nodes)) == pytest.approx(
            math.pi, rel=1e-10
        )
        assert integrate(disk256, np.zeros(disk256.n_nodes)) == 0.0

    def test_integrate_eigenfunction_closed_form(self, interval256):
        # int_{-1}^{1} cos(pi x / 2) dx = 4 / pi
        pair = principal_eigenpair(interval256.operator, interval256)
        assert integrate(interval256, pair.vector) == pytest.approx(
            4.0 / math.pi, rel=1e-3
        )


class TestValidation:
    @pytest.mark.parametrize(
        "args",
        [(0, 1.0, 64), (2, -1.0, 64), (2, 1.0, 8), (2, 0.0, 64)],
    )
    def test_bad_radial(self, args):
        with pytest.raises(ConfigurationError):
            build_radial(*args)

    @pytest.mark.parametrize(
        "args",
        [(0.0, 1.0, 64, 64), (1.0, 1.0, 8, 64), (1.0, -2.0, 64, 64)],
    )
    def test_bad_rect(self, args):
        with pytest.raises(ConfigurationError):
            build_rect(*args)


class TestOperator:
    def test_rect_matrix_exactly_symmetric(self, square64):
        a = square64.operator.matrix
        assert abs(a - a.T).max() == 0.0

    def test_radial_symmetric_in_quadrature_inner_product(self, disk256):
        k = disk256.operator.symmetric_form
        assert abs(k - k.T).max() == 0.0

    def test_action_on_ones(self, disk256):
        # zero in the deep interior, nonnegative near the boundary
        action = disk256.operator.apply(np.ones(disk256.n_nodes))
        assert np.max(np.abs(action[:-1])) <= 1e-9
        assert action[-1] > 0

    def test_origin_row_matches_regularity_limit(self):
        # first row must be the one-sided limit 2N (u0 - u1) / h^2
        for dim in (1, 2, 3, 8):
            mesh = build_radial(dim, 1.0, 32)
            a = mesh.operator.matrix.tocsr()
            h = mesh.spacing
            assert a[0, 0] == pytest.approx(2.0 * dim / h**2, rel=1e-12)
            assert a[0, 1] == pytest.approx(-2.0 * dim / h**2, rel=1e-12)

    def test_inverse_positivity(self, disk256, rng):
        # (-Lap)^(-1) maps nonnegative nonzero fields to strictly positive ones
        for _ in range(5):
            rhs = np.zeros(disk256.n_nodes)
            idx = rng.integers(0, disk256.n_nodes, size=3)
            rhs[idx] = rng.uniform(0.5, 2.0, size=3)
            u = solve_poisson(disk256.operator, rhs)
            assert np.all(u > 0)

    def test_positive_definite(self, disk256):
        assert principal_eigenpair(disk256.operator, disk256).value > 0


class TestPoisson:
    def test_zero_rhs(self, disk256):
        u = solve_poisson(disk256.operator, np.zeros(disk256.n_nodes))
        assert np.all(u == 0.0)

    def test_quadratic_solution_disk(self, disk256):
        # -Lap (1 - r^2) = 4 in two dimensions
        u = solve_poisson(disk256.operator, np.full(disk256.n_nodes, 4.0))
        err = np.max(np.abs(u - (1.0 - disk256.radii**2)))
        assert err < 5e-5  # O(h^2) at n = 256

    def test_eigen_relation(self, disk256):
        pair = principal_eigenpair(disk256.operator, disk256)
        u = solve_poisson(disk256.operator, pair.value * pair.vector)
        assert np.max(np.abs(u - pair.vector)) < 1e-7

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_second_order_convergence(self, dim):
        errors = []
        for n in (128, 256, 512):
            mesh = build_radial(dim, 1.0, n)
            u = solve_poisson(mesh.operator, np.full(n, 2.0 * dim))
            errors.append(np.max(np.abs(u - (1.0 - mesh.radii**2))))
        for coarse, fine in zip(errors, errors[1:]):
            assert 3.5 <= coarse / fine <= 4.5

    def test_rect_manufactured_solution(self, square64):
        gx, gy = np.meshgrid(square64.xs, square64.ys, indexing="ij")
        exact = (np.sin(np.pi * gx) * np.sin(np.pi * gy)).ravel()
        u = solve_poisson(square64.operator, 2.0 * np.pi**2 * exact)
        assert np.max(np.abs(u - exact)) < 5e-4


class TestEigenpair:
    def test_interval(self, interval256):
        pair = principal_eigenpair(interval256.operator, interval256)
        assert pair.value == pytest.approx(math.pi**2 / 4.0, rel=0.005)

    def test_disk(self, disk256):
        pair = principal_eigenpair(disk256.operator, disk256)
        assert pair.value == pytest.approx(float(jn_zeros(0, 1)[0] ** 2), rel=0.005)

    def test_square(self, square64):
        pair = principal_eigenpair(square64.operator, square64)
        assert pair.value == pytest.approx(2.0 * math.pi**2, rel=0.005)

    def test_normalization_positivity_residual(self, disk256):
        pair = principal_eigenpair(disk256.operator, disk256)
        assert pair.vector.max() == 1.0
        assert np.all(pair.vector > 0)
        res = disk256.operator.apply(pair.vector) - pair.value * pair.vector
        assert np.max(np.abs(res)) <= 1e-8 * pair.value


def test_volume_helper():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)
    assert unit_ball_volume(8) == pytest.approx(math.pi**4 / 24.0)
