"""System-matrix reconstruction for a fixed image.

Rows of ``S`` are independent: each row is pulled toward the measured
value ``u_k`` along the image and toward the calibration row through the
columns of ``Q``, with the distance to ``S_mod`` (or the warm start) as
the Tikhonov term.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List

import numpy as np

from ._backend import get_kernels
from .errors import ContractError
from .operators import eval_s_objective

log = logging.getLogger(__name__)


@dataclass
class SSolveState:
    S: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def start(cls, S0, n_calib):
        S = np.array(S0, dtype=np.complex128 if np.iscomplexobj(S0) else np.float64,
                     order="C", copy=True)
        K = S.shape[0]
        return cls(S, np.zeros(K, dtype=S.dtype), np.zeros((K, n_calib), dtype=S.dtype))

    def copy(self):
        return replace(self, S=self.S.copy(), v=self.v.copy(), w=self.w.copy())


@dataclass
class SSolveReport:
    state: SSolveState
    objective_trace: List[float] = field(default_factory=list)
    skipped: int = 0


def _as(x, dtype):
    return np.ascontiguousarray(x, dtype=dtype)


def _image(c, M):
    c = np.asarray(c)
    if np.iscomplexobj(c):
        raise ContractError("image must be real")
    c = _as(c, np.float64)
    if c.shape != (M,):
        raise ContractError(f"image has shape {c.shape}, expected ({M},)")
    return c


def s_sweep_by_c(state, c, u, gamma_eff, tau, backend=None):
    """One pass over all rows enforcing ``S_k c = u_k``; returns a new state."""
    out = state.copy()
    K, M = out.S.shape
    u = _as(u, out.S.dtype)
    if u.shape != (K,):
        raise ContractError(f"measurement has shape {u.shape}, expected ({K},)")
    if get_kernels(backend).s_sweep_by_c(out.S, out.v, _image(c, M), u, float(gamma_eff),
                                         float(tau)):
        log.warning("image is zero and gamma_eff = 0; sweep by c skipped")
    return out


def s_sweep_by_calib(state, Q, S_calib, gamma_eff, mu_eff, tau, backend=None):
    """One pass over all rows and calibration columns; returns a new state."""
    out = state.copy()
    K, M = out.S.shape
    S_calib = _as(S_calib, out.S.dtype)
    if Q.shape[0] != M or S_calib.shape != (K, Q.shape[1]) or out.w.shape != S_calib.shape:
        raise ContractError(f"inconsistent shapes: S {out.S.shape}, Q {Q.shape}, "
                            f"S_calib {S_calib.shape}")
    skipped = get_kernels(backend).s_sweep_by_calib(
        out.S, out.w, Q.indptr, Q.indices, Q.data, S_calib,
        float(gamma_eff), float(mu_eff), float(tau))
    if skipped:
        log.warning("skipped %d degenerate calibration updates", skipped)
    return out


def solve_s(instance, c, params, n_sweeps, tau=1.0, S0=None, track_objective=True,
            backend=None):
    """Reconstruct the system matrix for a fixed image.

    One sweep is a pass enforcing the measurement followed by a full pass
    over the calibration columns. The iteration starts at ``S0`` (default
    ``instance.s_mod``) with zero auxiliaries.

    Returns:
        SSolveReport with the final state and, if tracked, the system-matrix
        sub-objective after each sweep.
    """
    if not 0.0 < tau < 2.0:
        raise ContractError(f"relaxation_tau outside (0,2): {tau}")
    if int(n_sweeps) != n_sweeps or n_sweeps < 0:
        raise ContractError(f"n_sweeps must be an integer >= 0, got {n_sweeps}")
    K, M, N = instance.dims
    start = instance.s_mod if S0 is None else S0
    if np.shape(start) != (K, M):
        raise ContractError(f"initial matrix has shape {np.shape(start)}, expected {(K, M)}")
    state = SSolveState.start(start, N)
    dtype = state.S.dtype
    if dtype != np.complex128 and (np.iscomplexobj(instance.u)
                                   or np.iscomplexobj(instance.s_calib)):
        raise ContractError("complex data with a real system matrix")
    c = _image(c, M)
    u = _as(instance.u, dtype)
    S_calib = _as(instance.s_calib, dtype)
    q = instance.q
    kern = get_kernels(backend)
    g, m, t = params.gamma_eff, params.mu_eff, float(tau)

    trace = []
    sk_c = sk_q = 0
    if track_objective:
        for _ in range(int(n_sweeps)):
            a, b = kern.s_cycles(state.S, state.v, state.w, c, u, q.indptr, q.indices,
                                 q.data, S_calib, g, m, t, 1)
            sk_c += a
            sk_q += b
            trace.append(eval_s_objective(state.S, c, instance.u, instance, params).total)
    else:
        sk_c, sk_q = kern.s_cycles(state.S, state.v, state.w, c, u, q.indptr, q.indices,
                                   q.data, S_calib, g, m, t, int(n_sweeps))
    if sk_c:
        log.warning("image is zero and gamma_eff = 0; skipped %d sweeps by c", sk_c)
    if sk_q:
        log.warning("skipped %d degenerate calibration updates", sk_q)
    return SSolveReport(state=state, objective_trace=trace, skipped=int(sk_c + sk_q))
