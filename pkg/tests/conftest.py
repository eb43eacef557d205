"""Shared fixtures and the acceptance summary printed at the end of the run."""

import numpy as np
import pytest

from jointkaczmarz import ProblemInstance, ProjectionMap
from jointkaczmarz._backend import get_kernels

ACCEPTANCE_LINES = []


def record_acceptance(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def _available_backends():
    names = ["python"]
    try:
        get_kernels("cython")
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


BACKENDS = _available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_instance(rng, K, M, N, complex_=False):
    """Random instance with a block-summing projection map (M divisible by N)."""
    rows_per_col = M // N
    q = ProjectionMap((M, N), indptr=np.arange(0, M + 1, rows_per_col),
                      indices=np.arange(M), data=np.ones(M))

    def draw(*shape):
        x = rng.standard_normal(shape)
        if complex_:
            x = x + 1j * rng.standard_normal(shape)
        return x

    return ProblemInstance(s_mod=draw(K, M), s_calib=draw(K, N), q=q, u=draw(K))


def row_minimizers(instance, c, params):
    """Per-row minimizer from the dense normal equations.

    Row k minimizes |S_k c - u_k|^2 + g^2 |S_k - S_mod,k|^2 + m^2 |S_k Q - S_cal,k|^2,
    i.e. (c c^T + g^2 I + m^2 Q Q^T) S_k^T = c u_k + g^2 S_mod,k^T + m^2 Q S_cal,k^T.
    """
    Q = instance.q.to_dense()
    g2, m2 = params.gamma_eff ** 2, params.mu_eff ** 2
    M = Q.shape[0]
    A = np.outer(c, c) + g2 * np.eye(M) + m2 * Q @ Q.T
    rhs = (np.outer(c, instance.u) + g2 * instance.s_mod.T + m2 * Q @ instance.s_calib.T)
    return np.linalg.solve(A, rhs).T
