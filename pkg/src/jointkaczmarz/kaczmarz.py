"""Row-action building blocks.

The single-step functions here are the reference semantics; the sweep
loops used by the solvers live in the compiled kernels (or their
pure-Python fallback) and apply exactly the same update.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels
from .errors import ContractError, DegenerateHyperplaneError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentedRowState:
    """Primary unknown ``z`` and the auxiliary vector ``v`` (one entry per row)."""

    z: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros(cls, n_unknowns, n_rows, dtype=np.float64):
        return cls(np.zeros(n_unknowns, dtype=dtype), np.zeros(n_rows, dtype=dtype))


def cyclic_order(n):
    """Visit order ``0, 1, ..., n-1`` for one sweep."""
    return np.arange(n, dtype=np.intp)


def check_order(order, n):
    order = np.ascontiguousarray(order, dtype=np.intp)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ContractError(f"row order must visit each of the {n} rows exactly once")
    return order


def project_hyperplane(z, a, b):
    """Orthogonal projection of ``z`` onto ``{x : sum_m a_m x_m = b}``."""
    z = np.asarray(z)
    a = np.asarray(a)
    if z.shape != a.shape or z.ndim != 1:
        raise ContractError(f"shape mismatch: z {z.shape}, a {a.shape}")
    norm2 = float(np.vdot(a, a).real)
    if norm2 == 0.0:
        raise DegenerateHyperplaneError("hyperplane normal is zero")
    return z - (a @ z - b) / norm2 * np.conj(a)


def regularized_row_update(state, row, rhs, k, eta, tau):
    """One step of the regularized Kaczmarz iteration on row ``k``.

    Both ``z`` and ``v[k]`` move by the same factor
    ``tau * (rhs - row @ z - eta * v[k]) / (eta**2 + |row|**2)``, computed
    once from the pre-update state. With ``eta = 0`` this is the classical
    relaxed projection onto the row's hyperplane.
    """
    row = np.asarray(row)
    if eta < 0:
        raise ContractError(f"eta must be >= 0, got {eta}")
    denom = eta * eta + float(np.vdot(row, row).real)
    if denom == 0.0:
        raise DegenerateHyperplaneError(f"row {k} is zero and eta = 0")
    step = tau * (rhs - row @ state.z - eta * state.v[k]) / denom
    z = state.z + step * np.conj(row)
    v = state.v.astype(np.result_type(state.v, step), copy=True)
    v[k] += eta * step
    return AugmentedRowState(z, v)


def project_nonneg(c):
    """Real part, clamped at zero."""
    return np.maximum(np.real(np.asarray(c)), 0.0).astype(np.float64)


def soft_threshold(c, lam):
    """Entrywise shrinkage ``(c - lam)_+ - (-c - lam)_+``."""
    if lam < 0:
        raise ContractError(f"threshold must be >= 0, got {lam}")
    c = np.asarray(c, dtype=np.float64)
    return np.maximum(c - lam, 0.0) - np.maximum(-c - lam, 0.0)


def row_norms2(S):
    S = np.asarray(S)
    if np.iscomplexobj(S):
        return np.ascontiguousarray(np.sum(S.real ** 2 + S.imag ** 2, axis=1))
    return np.ascontiguousarray(np.sum(S * S, axis=1))


def solve_regularized_lsq(A, b, eta, n_sweeps, tau=1.0, z0=None, order=None,
                          backend=None):
    """Minimize ``|Az - b|^2 + eta^2 |z - z0|^2`` by cyclic row updates.

    Runs the iteration from ``v = 0`` and ``z = z0`` (zero by default),
    which is equivalent to solving the consistent augmented system
    ``[eta I, A] (v, z - z0) = b - A z0`` for its minimum-norm solution.

    Returns:
        The final ``AugmentedRowState`` (``z`` already includes ``z0``).
    """
    A = np.asarray(A)
    dtype = np.complex128 if (np.iscomplexobj(A) or np.iscomplexobj(b)
                              or np.iscomplexobj(z0)) else np.float64
    A = np.ascontiguousarray(A, dtype=dtype)
    K, M = A.shape
    b = np.ascontiguousarray(b, dtype=dtype)
    z = np.zeros(M, dtype=dtype) if z0 is None else np.array(z0, dtype=dtype)
    v = np.zeros(K, dtype=dtype)
    order = cyclic_order(K) if order is None else check_order(order, K)
    norms = row_norms2(A)
    kern = get_kernels(backend)
    skipped = 0
    for _ in range(int(n_sweeps)):
        skipped += kern.c_sweep(A, b, z, v, norms, float(eta), float(tau), order)
    if skipped:
        log.warning("skipped %d degenerate row updates", skipped)
    return AugmentedRowState(z, v)
