import numpy as np
import pytest

from jointkaczmarz import ContractError, RegParams, c_sweep, eval_c_objective, solve_c
from jointkaczmarz.image import StopReason


def _params(alpha=0.0, lam=0.0):
    return RegParams(alpha=alpha, lam=lam, gamma=0.0, mu=0.0)


class TestCSweep:
    def test_single_row_projection(self, backend):
        c, v = c_sweep(np.zeros(2), np.zeros(1), np.array([[1.0, 0.0]]), np.array([2.0]),
                       0.0, 1.0, backend=backend)
        assert 2.0 - c[0] == 0.0

    def test_two_row_hand_instance(self, backend):
        # row 0: factor (1 - 0 - 0) / (1 + 1) = 0.5      -> c = (0.5, 0),   v0 = 0.5
        # row 1: factor (2 - 0.5 - 0) / (1 + 2) = 0.5    -> c = (1.0, 0.5), v1 = 0.5
        S = np.array([[1.0, 0.0], [1.0, 1.0]])
        c, v = c_sweep(np.zeros(2), np.zeros(2), S, np.array([1.0, 2.0]), 1.0, 1.0,
                       backend=backend)
        np.testing.assert_array_equal(c, [1.0, 0.5])
        np.testing.assert_array_equal(v, [0.5, 0.5])

    def test_tau_zero(self, rng, backend):
        S = rng.standard_normal((3, 3))
        c0, v0 = rng.standard_normal(3), rng.standard_normal(3)
        c, v = c_sweep(c0, v0, S, rng.standard_normal(3), 0.5, 0.0, backend=backend)
        np.testing.assert_array_equal(c, c0)
        np.testing.assert_array_equal(v, v0)

    def test_inputs_not_modified(self):
        c0, v0 = np.zeros(2), np.zeros(2)
        c_sweep(c0, v0, np.eye(2), np.ones(2), 0.5, 1.0)
        assert not np.any(c0) and not np.any(v0)


class TestSolveC:
    def test_recovers_nonnegative_truth(self, rng, backend):
        S = rng.standard_normal((10, 10)) + 4 * np.eye(10)
        c_star = rng.random(10) + 0.1
        rep = solve_c(S, S @ c_star, _params(), 5000, track_objective=False, backend=backend)
        err = np.linalg.norm(rep.c_final - np.linalg.solve(S, S @ c_star))
        assert err / np.linalg.norm(c_star) < 1e-6
        assert rep.sweeps_run == 5000 and rep.converged_by is StopReason.SWEEP_LIMIT

    def test_large_threshold_gives_zero(self, rng):
        S = rng.standard_normal((6, 6))
        rep = solve_c(S, S @ rng.random(6), _params(lam=1e6), 20)
        assert not np.any(rep.c_final)

    def test_zero_sweeps(self, rng):
        rep = solve_c(rng.standard_normal((4, 4)), rng.standard_normal(4), _params(), 0)
        assert not np.any(rep.c_final) and rep.sweeps_run == 0

    def test_output_is_real_nonnegative(self, rng, backend):
        S = rng.standard_normal((8, 5)) + 1j * rng.standard_normal((8, 5))
        u = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        c = solve_c(S, u, _params(0.01, 0.01), 30, backend=backend).c_final
        assert c.dtype == np.float64 and np.all(c >= 0)

    def test_objective_trace(self, rng):
        S = rng.standard_normal((8, 8)) + 3 * np.eye(8)
        u = S @ rng.random(8)
        p = _params(1e-3, 1e-3)
        rep = solve_c(S, u, p, 10)
        assert len(rep.per_sweep_objective) == 10
        assert rep.per_sweep_objective[-1] == pytest.approx(
            eval_c_objective(rep.c_final, S, u, p).total, rel=1e-14)

    def test_tracking_does_not_change_result(self, rng):
        S = rng.standard_normal((8, 6))
        u = rng.standard_normal(8)
        p = _params(0.1, 0.01)
        a = solve_c(S, u, p, 25, track_objective=True).c_final
        b = solve_c(S, u, p, 25, track_objective=False).c_final
        np.testing.assert_array_equal(a, b)

    def test_change_stop(self, rng, backend):
        S = rng.standard_normal((10, 10)) + 4 * np.eye(10)
        u = S @ (rng.random(10) + 0.1)
        rep = solve_c(S, u, _params(), 10000, stop_rel_change=1e-10, track_objective=False,
                      backend=backend)
        assert rep.converged_by is StopReason.REL_CHANGE and rep.sweeps_run < 10000
        rep = solve_c(S, u, _params(), 10000, stop_abs_change=1e-9, backend=backend)
        assert rep.converged_by is StopReason.ABS_CHANGE

    def test_contract_violations(self, rng):
        S = rng.standard_normal((3, 3))
        with pytest.raises(ContractError):
            solve_c(S, np.zeros(4), _params(), 1)
        with pytest.raises(ContractError):
            solve_c(S, np.zeros(3), _params(), 1, tau=2.0)
        with pytest.raises(ContractError):
            solve_c(S, np.zeros(3), _params(), 1, c0=-np.ones(3))
