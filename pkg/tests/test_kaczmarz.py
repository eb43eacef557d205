import numpy as np
import pytest

from jointkaczmarz import (AugmentedRowState, ContractError, DegenerateHyperplaneError,
                           project_hyperplane, project_nonneg, regularized_row_update,
                           soft_threshold, solve_regularized_lsq)
from jointkaczmarz.kaczmarz import check_order


class TestProjectHyperplane:
    def test_point_on_hyperplane_unchanged(self):
        a = np.array([1.0, 2.0, -1.0])
        z = np.array([1.0, 1.0, 1.0])
        np.testing.assert_array_equal(project_hyperplane(z, a, a @ z), z)

    def test_unit_axis(self):
        np.testing.assert_array_equal(project_hyperplane(np.zeros(2), np.array([1.0, 0.0]), 1.0),
                                      [1.0, 0.0])

    def test_complex_feasibility(self, rng):
        for _ in range(10):
            a = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            b = complex(rng.standard_normal(), rng.standard_normal())
            zp = project_hyperplane(z, a, b)
            assert abs(np.sum(a * zp) - b) < 1e-12

    def test_zero_normal(self):
        with pytest.raises(DegenerateHyperplaneError):
            project_hyperplane(np.zeros(2), np.zeros(2), 1.0)


class TestRegularizedRowUpdate:
    def test_eta_zero_is_projection(self):
        s = regularized_row_update(AugmentedRowState.zeros(2, 1), np.array([1.0, 0.0]), 1.0,
                                   0, eta=0.0, tau=1.0)
        np.testing.assert_array_equal(s.z, [1.0, 0.0])
        np.testing.assert_array_equal(s.v, [0.0])

    def test_eta_one_hand_step(self):
        # shared factor (1 - 0 - 0) / (1 + 1) = 0.5
        s = regularized_row_update(AugmentedRowState.zeros(2, 1), np.array([1.0, 0.0]), 1.0,
                                   0, eta=1.0, tau=1.0)
        np.testing.assert_array_equal(s.z, [0.5, 0.0])
        np.testing.assert_array_equal(s.v, [0.5])

    def test_tau_zero_is_identity(self, rng):
        st = AugmentedRowState(rng.standard_normal(3), rng.standard_normal(2))
        s = regularized_row_update(st, rng.standard_normal(3), 2.0, 1, eta=0.7, tau=0.0)
        np.testing.assert_array_equal(s.z, st.z)
        np.testing.assert_array_equal(s.v, st.v)

    def test_pure(self):
        st = AugmentedRowState.zeros(2, 1)
        regularized_row_update(st, np.array([1.0, 1.0]), 1.0, 0, eta=1.0, tau=1.0)
        assert not np.any(st.z) and not np.any(st.v)

    def test_degenerate(self):
        with pytest.raises(DegenerateHyperplaneError):
            regularized_row_update(AugmentedRowState.zeros(2, 1), np.zeros(2), 1.0, 0, 0.0, 1.0)


class TestProjections:
    def test_nonneg(self):
        np.testing.assert_array_equal(project_nonneg(np.array([-1.0, 2.0])), [0.0, 2.0])
        x = np.array([0.0, 3.0, 1e-300])
        np.testing.assert_array_equal(project_nonneg(x), x)
        assert project_nonneg(np.array([0.5 - 0.2j]))[0] == 0.5
        assert project_nonneg(np.array([0.5 - 0.2j])).dtype == np.float64

    def test_soft_threshold(self):
        assert soft_threshold(np.array([0.5]), 0.2)[0] == pytest.approx(0.3, abs=1e-16)
        assert soft_threshold(np.array([-0.1]), 0.2)[0] == 0.0
        assert soft_threshold(np.array([-0.5]), 0.2)[0] == pytest.approx(-0.3, abs=1e-16)
        x = np.array([-2.0, 0.0, 1.5])
        np.testing.assert_array_equal(soft_threshold(x, 0.0), x)
        with pytest.raises(ContractError):
            soft_threshold(x, -1.0)


class TestSolveRegularizedLsq:
    @pytest.mark.parametrize("eta", [0.3, 1.0])
    def test_matches_direct_minimizer(self, rng, eta, backend):
        A = rng.standard_normal((12, 8))
        b = rng.standard_normal(12)
        z0 = rng.standard_normal(8)
        z = solve_regularized_lsq(A, b, eta, 4000, z0=z0, backend=backend).z
        # minimizer of |Az - b|^2 + eta^2 |z - z0|^2
        direct = np.linalg.solve(A.T @ A + eta ** 2 * np.eye(8), A.T @ b + eta ** 2 * z0)
        np.testing.assert_allclose(z, direct, rtol=1e-8, atol=1e-10)

    def test_complex_matches_direct_minimizer(self, rng, backend):
        A = rng.standard_normal((10, 6)) + 1j * rng.standard_normal((10, 6))
        b = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        z = solve_regularized_lsq(A, b, 0.5, 4000, backend=backend).z
        AH = A.conj().T
        direct = np.linalg.solve(AH @ A + 0.25 * np.eye(6), AH @ b)
        np.testing.assert_allclose(z, direct, rtol=1e-8, atol=1e-10)

    def test_sweep_equals_row_updates(self, rng, backend):
        A = rng.standard_normal((5, 4))
        b = rng.standard_normal(5)
        st = AugmentedRowState.zeros(4, 5)
        for _ in range(3):
            for k in range(5):
                st = regularized_row_update(st, A[k], b[k], k, 0.4, 1.3)
        out = solve_regularized_lsq(A, b, 0.4, 3, tau=1.3, backend=backend)
        np.testing.assert_allclose(out.z, st.z, rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(out.v, st.v, rtol=1e-14, atol=1e-14)

    def test_custom_order(self, rng):
        A = rng.standard_normal((4, 3))
        b = rng.standard_normal(4)
        st = AugmentedRowState.zeros(3, 4)
        for k in (2, 0, 3, 1):
            st = regularized_row_update(st, A[k], b[k], k, 0.5, 1.0)
        out = solve_regularized_lsq(A, b, 0.5, 1, order=[2, 0, 3, 1])
        np.testing.assert_allclose(out.z, st.z, rtol=1e-14)

    def test_bad_order(self):
        with pytest.raises(ContractError):
            check_order([0, 0, 1], 3)
