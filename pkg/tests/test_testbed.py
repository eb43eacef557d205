import numpy as np
import pytest

from jointkaczmarz import (ContractError, NoiseSpec, PhantomSpec, apply_projection,
                           build_projection_map, build_true_operator, generate_instance,
                           make_phantom, perturb_gaussian, validate_instance)
from jointkaczmarz.testbed import standard_normals, sub_seeds


class TestTrueOperator:
    def test_small(self):
        np.testing.assert_array_equal(build_true_operator(1), [[1.0]])
        np.testing.assert_array_equal(build_true_operator(3),
                                      [[1, 0, 0], [1, 1, 0], [1, 1, 1]])

    def test_count(self):
        assert build_true_operator(50).sum() == 50 * 51 / 2

    def test_invalid(self):
        with pytest.raises(ContractError):
            build_true_operator(0)


class TestProjectionMap:
    def test_m4(self):
        np.testing.assert_array_equal(build_projection_map(4).to_dense(),
                                      [[1, 0], [1, 0], [0, 1], [0, 1]])

    def test_m2(self):
        np.testing.assert_array_equal(build_projection_map(2).to_dense(), [[1], [1]])

    def test_column_sums(self):
        np.testing.assert_array_equal(build_projection_map(50).to_dense().sum(axis=0),
                                      np.full(25, 2.0))

    def test_odd_rejected(self):
        with pytest.raises(ContractError):
            build_projection_map(5)


class TestPhantom:
    def test_default(self):
        c = make_phantom()
        assert c.sum() == 14.0
        assert np.count_nonzero(c) == 16
        assert np.all(c >= 0)
        assert c[42] == 1.5 and c[10] == 1.0 and c[34] == 0.5 and c[35] == 0.0

    def test_custom_all_ones(self):
        c = make_phantom(PhantomSpec(M=6, kind="custom", breakpoints=[0, 6], heights=[1.0]))
        np.testing.assert_array_equal(c, np.ones(6))

    def test_rescaled(self):
        c = make_phantom(PhantomSpec(M=100))
        assert c.shape == (100,) and np.count_nonzero(c) == 32

    @pytest.mark.parametrize("kw", [
        dict(kind="custom", breakpoints=[0, 3], heights=[-1.0]),
        dict(kind="custom", breakpoints=[0, 9], heights=[1.0]),
        dict(kind="custom", breakpoints=[0, 3], heights=[0.0]),
        dict(kind="other"),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ContractError):
            make_phantom(PhantomSpec(M=6, **kw))


class TestNoise:
    def test_sigma_zero_is_identity(self, rng):
        x = rng.standard_normal((3, 3))
        np.testing.assert_array_equal(perturb_gaussian(x, NoiseSpec(0.0, 5)), x)

    def test_deterministic(self):
        a = perturb_gaussian(np.zeros((4, 4)), NoiseSpec(0.1, 9))
        b = perturb_gaussian(np.zeros((4, 4)), NoiseSpec(0.1, 9))
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, perturb_gaussian(np.zeros((4, 4)), NoiseSpec(0.1, 10)))

    def test_statistics(self):
        noise = perturb_gaussian(np.zeros((200, 200)), NoiseSpec(0.05, 1))
        assert abs(noise.mean()) < 0.002
        assert abs(noise.std() - 0.05) < 0.003

    def test_box_muller_stream(self):
        # independent re-derivation from the raw PCG64 uniforms
        u = np.random.Generator(np.random.PCG64(3)).random(6)
        r = np.sqrt(-2 * np.log(1 - u[0::2]))
        expect = np.ravel(np.column_stack([r * np.cos(2 * np.pi * u[1::2]),
                                           r * np.sin(2 * np.pi * u[1::2])]))
        np.testing.assert_allclose(standard_normals(5, 3), expect[:5], rtol=1e-14)

    def test_row_major_order(self):
        z = standard_normals(6, 4)
        np.testing.assert_array_equal(perturb_gaussian(np.zeros((2, 3)), NoiseSpec(1.0, 4)),
                                      z.reshape(2, 3))

    def test_complex_target(self):
        z = standard_normals(4, 4)
        out = perturb_gaussian(np.zeros(2, dtype=complex), NoiseSpec(1.0, 4))
        np.testing.assert_array_equal(out, z[0::2] + 1j * z[1::2])

    def test_sub_seeds_independent_and_stable(self):
        a, b = sub_seeds(1)
        assert a != b and sub_seeds(1) == [a, b]


class TestGenerateInstance:
    def test_noiseless(self):
        inst = generate_instance(20, 0.0, 1)
        np.testing.assert_array_equal(inst.s_mod, inst.s_true)
        np.testing.assert_array_equal(inst.u, inst.s_true @ inst.c_true)

    def test_default_instance(self):
        inst = generate_instance(50, 0.05, 1)
        assert validate_instance(inst).ok
        rel = np.linalg.norm(inst.s_mod - inst.s_true) / np.linalg.norm(inst.s_true)
        expected = 0.05 * 50 / np.linalg.norm(inst.s_true)
        assert rel == pytest.approx(expected, rel=0.05)
        np.testing.assert_array_equal(inst.s_calib, apply_projection(inst.s_true, inst.q))
        assert inst.sigma == 0.05 and inst.seed == 1

    def test_operator_and_data_noise_independent(self):
        inst = generate_instance(50, 0.05, 1)
        eta = (inst.s_mod - inst.s_true).ravel()
        xi = inst.u - inst.s_true @ inst.c_true
        assert not np.allclose(eta[:50], xi)

    def test_phantom_size_mismatch(self):
        with pytest.raises(ContractError):
            generate_instance(20, 0.0, 1, PhantomSpec(M=10))
