"""Shared domain types and the regularization-parameter substitution.

Images, system matrices and measurements are plain numpy arrays:
images are real ``float64`` vectors of length M, system matrices are
``float64`` or ``complex128`` arrays of shape (K, M), measurements are
vectors of length K with the same dtype as the matrix they belong to.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ContractError, ParameterDomainError


class ScalarField(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def of(cls, array):
        return cls.COMPLEX if np.iscomplexobj(array) else cls.REAL

    @property
    def dtype(self):
        return np.complex128 if self is ScalarField.COMPLEX else np.float64


def _frozen(array, dtype=None):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def as_matrix(S):
    """Return ``S`` as a C-contiguous float64/complex128 2-D array."""
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] < 1 or S.shape[1] < 1:
        raise ContractError(f"system matrix must be 2-D and nonempty, got shape {S.shape}")
    dtype = np.complex128 if np.iscomplexobj(S) else np.float64
    S = np.ascontiguousarray(S, dtype=dtype)
    if not np.all(np.isfinite(S)):
        raise ContractError("system matrix has non-finite entries")
    return S


class ProjectionMap:
    """Sparse real M x N matrix stored column-wise (CSC layout).

    Right-multiplying a system matrix by it maps high-resolution columns to
    low-resolution calibration columns.
    """

    __slots__ = ("shape", "indptr", "indices", "data")

    def __init__(self, shape, indptr, indices, data):
        M, N = (int(d) for d in shape)
        indptr = np.asarray(indptr, dtype=np.intp)
        indices = np.asarray(indices, dtype=np.intp)
        data = np.asarray(data, dtype=np.float64)
        if M < 1 or N < 1:
            raise ContractError(f"projection map shape must be positive, got {(M, N)}")
        if indptr.shape != (N + 1,) or indptr[0] != 0 or indptr[-1] != len(indices):
            raise ContractError("malformed column pointer array")
        if len(indices) != len(data):
            raise ContractError("indices and values differ in length")
        if len(indices) and (indices.min() < 0 or indices.max() >= M):
            raise ContractError("row index out of range")
        if not np.all(np.isfinite(data)):
            raise ContractError("projection map has non-finite values")
        for n in range(N):
            if not np.any(data[indptr[n]:indptr[n + 1]] != 0):
                raise ContractError(f"projection map column {n} has no nonzero entry")
        self.shape = (M, N)
        self.indptr = _frozen(indptr)
        self.indices = _frozen(indices)
        self.data = _frozen(data)

    @classmethod
    def from_dense(cls, Q):
        Q = np.asarray(Q)
        if np.iscomplexobj(Q):
            if np.any(Q.imag != 0):
                raise ContractError("projection map must be real")
            Q = Q.real
        Q = np.asarray(Q, dtype=np.float64)
        if Q.ndim != 2:
            raise ContractError(f"projection map must be 2-D, got shape {Q.shape}")
        indptr = [0]
        indices, data = [], []
        for n in range(Q.shape[1]):
            rows = np.flatnonzero(Q[:, n])
            indices.extend(rows)
            data.extend(Q[rows, n])
            indptr.append(len(indices))
        return cls(Q.shape, indptr, indices, data)

    def to_dense(self):
        Q = np.zeros(self.shape)
        for n in range(self.shape[1]):
            sl = slice(self.indptr[n], self.indptr[n + 1])
            Q[self.indices[sl], n] = self.data[sl]
        return Q

    def column(self, n):
        """Return ``(row_indices, values)`` of column ``n``."""
        sl = slice(self.indptr[n], self.indptr[n + 1])
        return self.indices[sl], self.data[sl]

    @property
    def nnz(self):
        return len(self.data)

    def __eq__(self, other):
        if not isinstance(other, ProjectionMap):
            return NotImplemented
        return (self.shape == other.shape
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"ProjectionMap(shape={self.shape}, nnz={self.nnz})"


@dataclass(frozen=True)
class RegParams:
    """Regularization weights of the joint functional.

    ``alpha``, ``lam``, ``gamma`` and ``mu`` weight the image l2 penalty, the
    image l1 penalty, the distance to the modeled matrix and the calibration
    mismatch. The solvers work with the effective weights
    ``alpha_eff = sqrt(alpha / 2)`` (likewise for gamma and mu) that enter the
    squared-residual form of the per-block objectives.
    """

    alpha: float
    lam: float
    gamma: float
    mu: float

    def __post_init__(self):
        for name in ("alpha", "lam", "gamma", "mu"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)):
                raise ParameterDomainError(f"{name} must be a real number, got {value!r}")
            value = float(value)
            if not math.isfinite(value) or value < 0:
                raise ParameterDomainError(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)

    @property
    def alpha_eff(self):
        return math.sqrt(self.alpha / 2)

    @property
    def gamma_eff(self):
        return math.sqrt(self.gamma / 2)

    @property
    def mu_eff(self):
        return math.sqrt(self.mu / 2)


def map_paper_params(alpha, lam, gamma, mu):
    """Build :class:`RegParams`, validating the raw weights."""
    return RegParams(alpha=alpha, lam=lam, gamma=gamma, mu=mu)


@dataclass(frozen=True)
class KaczmarzSchedule:
    outer_iterations: int = 100
    c_sweeps_per_outer: int = 500
    s_sweeps_per_outer: int = 300
    relaxation_tau: float = 1.0
    stop_rel_change: Optional[float] = None

    def __post_init__(self):
        for name in ("outer_iterations", "c_sweeps_per_outer", "s_sweeps_per_outer"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise ContractError(f"{name} must be an integer >= 0, got {value!r}")
            object.__setattr__(self, name, int(value))
        tau = float(self.relaxation_tau)
        if not 0.0 < tau < 2.0:
            raise ContractError(f"relaxation_tau outside (0,2): {tau}")
        object.__setattr__(self, "relaxation_tau", tau)
        if self.stop_rel_change is not None and not self.stop_rel_change > 0:
            raise ContractError(f"stop_rel_change must be > 0, got {self.stop_rel_change}")


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """One experiment: modeled and calibration matrices, data and truth.

    ``s_true`` and ``c_true`` are only present for synthetic instances.
    Arrays are copied and made read-only on construction.
    """

    s_mod: np.ndarray
    s_calib: np.ndarray
    q: ProjectionMap
    u: np.ndarray
    s_true: Optional[np.ndarray] = None
    c_true: Optional[np.ndarray] = None
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("s_mod", "s_calib", "u", "s_true"):
            value = getattr(self, name)
            if value is not None:
                value = np.asarray(value)
                dtype = np.complex128 if np.iscomplexobj(value) else np.float64
                object.__setattr__(self, name, _frozen(value, dtype))
        if self.c_true is not None:
            c = np.asarray(self.c_true)
            if np.iscomplexobj(c):
                raise ContractError("c_true must be real")
            object.__setattr__(self, "c_true", _frozen(c, np.float64))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def field(self):
        return ScalarField.of(self.s_mod)

    @property
    def dims(self):
        """``(K, M, N)``."""
        return self.s_mod.shape[0], self.s_mod.shape[1], self.s_calib.shape[1]

    @property
    def is_synthetic(self):
        return self.s_true is not None and self.c_true is not None


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def _shape_of(a):
    return None if a is None else tuple(np.shape(a))


def validate_instance(instance):
    """Check dimensional and field consistency of a :class:`ProblemInstance`.

    Violations are returned in the report rather than raised.
    """
    out = []
    s_mod = np.asarray(instance.s_mod)
    s_calib = np.asarray(instance.s_calib)
    u = np.asarray(instance.u)
    if s_mod.ndim != 2 or s_calib.ndim != 2 or u.ndim != 1:
        out.append(f"array rank: s_mod {s_mod.shape}, s_calib {s_calib.shape}, u {u.shape}")
        return ValidationReport(out)
    K, M = s_mod.shape
    Mq, Nq = instance.q.shape
    if K < 1 or M < 1:
        out.append(f"empty system matrix: s_mod is {K}x{M}")
    if s_calib.shape[0] != K:
        out.append(f"calib row mismatch: s_calib has {s_calib.shape[0]} rows, s_mod has {K}")
    if s_calib.shape[1] != Nq:
        out.append(f"calib/Q column mismatch: s_calib has {s_calib.shape[1]} columns, Q has {Nq}")
    if Mq != M:
        out.append(f"Q row mismatch: Q has {Mq} rows, s_mod has {M} columns")
    if u.shape[0] != K:
        out.append(f"measurement length: u has {u.shape[0]} entries, expected {K}")
    arrays = {"s_mod": s_mod, "s_calib": s_calib, "u": u}
    if instance.s_true is not None:
        arrays["s_true"] = np.asarray(instance.s_true)
        if arrays["s_true"].shape != (K, M):
            out.append(f"s_true shape: {arrays['s_true'].shape}, expected {(K, M)}")
    if instance.c_true is not None:
        c = np.asarray(instance.c_true)
        if c.shape != (M,):
            out.append(f"c_true length: {_shape_of(c)}, expected {(M,)}")
        if np.iscomplexobj(c):
            out.append("c_true must be real")
        elif not np.all(np.isfinite(c)):
            out.append("c_true has non-finite entries")
    if (instance.s_true is None) != (instance.c_true is None):
        out.append("synthetic truth: s_true and c_true must be given together")
    fields = {name: ScalarField.of(a) for name, a in arrays.items()}
    if len(set(fields.values())) > 1:
        desc = ", ".join(f"{k}={v.value}" for k, v in fields.items())
        out.append(f"scalar field mismatch: {desc}")
    for name, a in arrays.items():
        if not np.all(np.isfinite(a)):
            out.append(f"{name} has non-finite entries")
    if not (math.isfinite(instance.sigma) and instance.sigma >= 0):
        out.append(f"sigma must be finite and >= 0, got {instance.sigma}")
    if not 0 <= instance.seed < 2**64:
        out.append(f"seed outside the unsigned 64-bit range: {instance.seed}")
    return ValidationReport(out)
