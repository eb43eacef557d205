import numpy as np
import pytest

from conftest import random_instance, row_minimizers
from jointkaczmarz import (ContractError, ProblemInstance, ProjectionMap, RegParams,
                           SSolveState, eval_s_objective, generate_instance, s_sweep_by_c,
                           s_sweep_by_calib, solve_s)


class TestSweepByC:
    def test_zero_image_keeps_S(self, rng):
        st = SSolveState.start(rng.standard_normal((3, 4)), 2)
        out = s_sweep_by_c(st, np.zeros(4), np.ones(3), gamma_eff=0.5, tau=1.0)
        np.testing.assert_array_equal(out.S, st.S)
        # auxiliaries still move: v_k += g * (u_k - g v_k) / g^2
        np.testing.assert_allclose(out.v, np.full(3, 2.0))

    def test_consistent_fixed_point(self, rng):
        S = rng.standard_normal((3, 4))
        c = rng.random(4)
        st = SSolveState.start(S, 2)
        out = s_sweep_by_c(st, c, S @ c, 0.7, 1.0)
        np.testing.assert_allclose(out.S, S, rtol=0, atol=1e-15)

    def test_hand_instance(self, backend):
        # factor (4 - 3 - 0) / (1 + 2) = 1/3
        st = SSolveState.start(np.array([[1.0, 2.0]]), 1)
        out = s_sweep_by_c(st, np.array([1.0, 1.0]), np.array([4.0]), 1.0, 1.0,
                           backend=backend)
        np.testing.assert_allclose(out.S, [[4 / 3, 7 / 3]], rtol=1e-15)
        np.testing.assert_allclose(out.v, [1 / 3], rtol=1e-15)
        assert st.S[0, 0] == 1.0


class TestSweepByCalib:
    Q11 = ProjectionMap.from_dense(np.array([[1.0], [1.0]]))

    def test_consistent_fixed_point(self, rng):
        S = rng.standard_normal((3, 4))
        q = ProjectionMap.from_dense(np.array([[1.0, 0], [1, 0], [0, 1], [0, 1]]))
        out = s_sweep_by_calib(SSolveState.start(S, 2), q, S @ q.to_dense(), 0.5, 0.5, 1.0)
        np.testing.assert_allclose(out.S, S, rtol=0, atol=1e-15)
        assert np.max(np.abs(out.w)) < 1e-15

    def test_mu_zero_keeps_S_and_drains_w(self):
        st = SSolveState(np.array([[1.0, 2.0]]), np.zeros(1), np.array([[0.8]]))
        out = s_sweep_by_calib(st, self.Q11, np.array([[5.0]]), 1.0, 0.0, 1.0)
        np.testing.assert_array_equal(out.S, st.S)
        assert out.w[0, 0] == 0.0

    def test_hand_instance(self, backend):
        # factor (1 * (5 - 3) - 0) / (1 + 1 * 2) = 2/3
        st = SSolveState.start(np.array([[1.0, 2.0]]), 1)
        out = s_sweep_by_calib(st, self.Q11, np.array([[5.0]]), 1.0, 1.0, 1.0, backend=backend)
        np.testing.assert_allclose(out.S, [[5 / 3, 8 / 3]], rtol=1e-15)
        np.testing.assert_allclose(out.w, [[2 / 3]], rtol=1e-15)


class TestSolveS:
    def test_zero_sweeps(self):
        inst = generate_instance(10, 0.1, 2)
        rep = solve_s(inst, inst.c_true, RegParams(0, 0, 1, 1), 0)
        np.testing.assert_array_equal(rep.state.S, inst.s_mod)

    def test_consistent_data_fixed_point(self, rng):
        S = rng.standard_normal((6, 8))
        q = ProjectionMap.from_dense(np.kron(np.eye(4), np.ones((2, 1))))
        c = rng.random(8)
        inst = ProblemInstance(S, S @ q.to_dense(), q, S @ c)
        rep = solve_s(inst, c, RegParams(0, 0, 0.5, 2.0), 50)
        np.testing.assert_allclose(rep.state.S, S, rtol=0, atol=1e-13)

    @pytest.mark.parametrize("complex_", [False, True])
    def test_matches_row_oracle(self, rng, backend, complex_):
        inst = random_instance(rng, 2, 4, 2, complex_=complex_)
        c = rng.random(4)
        p = RegParams(alpha=0, lam=0, gamma=0.5, mu=1.0)
        S = solve_s(inst, c, p, 10000, track_objective=False, backend=backend).state.S
        oracle = row_minimizers(inst, c, p)
        for k in range(2):
            assert np.linalg.norm(S[k] - oracle[k]) / np.linalg.norm(oracle[k]) < 1e-5

    def test_objective_trace_nonincreasing_at_the_end(self, rng):
        inst = random_instance(rng, 4, 8, 4)
        c = rng.random(8)
        p = RegParams(0, 0, 1.0, 1.0)
        rep = solve_s(inst, c, p, 200)
        assert len(rep.objective_trace) == 200
        assert rep.objective_trace[-1] <= rep.objective_trace[0]
        assert rep.objective_trace[-1] == pytest.approx(
            eval_s_objective(rep.state.S, c, inst.u, inst, p).total, rel=1e-14)

    def test_complex_data_needs_complex_start(self, rng):
        inst = random_instance(rng, 2, 4, 2, complex_=True)
        with pytest.raises(ContractError, match="complex"):
            solve_s(inst, rng.random(4), RegParams(0, 0, 1, 1), 1, S0=np.zeros((2, 4)))

    def test_rejects_complex_image(self, rng):
        inst = random_instance(rng, 2, 4, 2)
        with pytest.raises(ContractError, match="real"):
            solve_s(inst, np.ones(4) + 0j, RegParams(0, 0, 1, 1), 1)
