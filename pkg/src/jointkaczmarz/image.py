"""Image reconstruction for a fixed system matrix.

Each cycle is one regularized Kaczmarz sweep over all measurement rows,
followed by projection onto the nonnegative reals and soft thresholding.
The iteration starts from ``c = 0`` and ``v = 0``.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ._backend import get_kernels
from .errors import ContractError
from .kaczmarz import check_order, cyclic_order, row_norms2
from .model import as_matrix
from .operators import eval_c_objective

log = logging.getLogger(__name__)


class StopReason(enum.Enum):
    SWEEP_LIMIT = "sweep_limit"
    ABS_CHANGE = "abs_change"
    REL_CHANGE = "rel_change"


_REASONS = {0: StopReason.SWEEP_LIMIT, 1: StopReason.ABS_CHANGE, 2: StopReason.REL_CHANGE}


@dataclass
class CSolveReport:
    c_final: np.ndarray
    sweeps_run: int
    converged_by: StopReason
    per_sweep_objective: List[float] = field(default_factory=list)
    skipped_rows: int = 0


def _working_arrays(S, u):
    S = as_matrix(S)
    u = np.asarray(u)
    dtype = np.complex128 if (np.iscomplexobj(S) or np.iscomplexobj(u)) else np.float64
    S = np.ascontiguousarray(S, dtype=dtype)
    u = np.ascontiguousarray(u, dtype=dtype)
    if u.shape != (S.shape[0],):
        raise ContractError(f"measurement has shape {u.shape}, expected ({S.shape[0]},)")
    return S, u


def c_sweep(c, v, S, u, alpha_eff, tau, order=None, backend=None):
    """Apply one sweep of the image update and return the new ``(c, v)``.

    ``c`` may be complex during the sweep; no projection or thresholding
    is applied here.
    """
    S, u = _working_arrays(S, u)
    K, M = S.shape
    c = np.array(c, dtype=S.dtype)
    v = np.array(v, dtype=S.dtype)
    if c.shape != (M,) or v.shape != (K,):
        raise ContractError(f"c must have length {M} and v length {K}")
    order = cyclic_order(K) if order is None else check_order(order, K)
    skipped = get_kernels(backend).c_sweep(S, u, c, v, row_norms2(S), float(alpha_eff),
                                           float(tau), order)
    if skipped:
        log.warning("skipped %d degenerate rows", skipped)
    return c, v


def solve_c(S, u, params, n_sweeps, tau=1.0, stop_abs_change=None,
            stop_rel_change=None, order=None, track_objective=True, c0=None,
            backend=None):
    """Reconstruct a nonnegative image for a fixed system matrix.

    Args:
        S: (K, M) system matrix, real or complex.
        u: length-K measurement.
        params: :class:`~jointkaczmarz.model.RegParams`; uses ``alpha_eff``
            and ``lam``.
        n_sweeps: maximum number of sweep/project/threshold cycles.
        tau: relaxation parameter in (0, 2).
        stop_abs_change, stop_rel_change: optional change-based stops,
            checked after every cycle.
        track_objective: record the image sub-objective after each cycle.
            Costs roughly one extra matrix-vector product per cycle.
        c0: optional nonnegative starting image. The default (zero) is the
            prescribed initialization; ``v`` always starts at zero.

    Returns:
        CSolveReport
    """
    if not 0.0 < tau < 2.0:
        raise ContractError(f"relaxation_tau outside (0,2): {tau}")
    if int(n_sweeps) != n_sweeps or n_sweeps < 0:
        raise ContractError(f"n_sweeps must be an integer >= 0, got {n_sweeps}")
    S, u = _working_arrays(S, u)
    K, M = S.shape
    order = cyclic_order(K) if order is None else check_order(order, K)
    kern = get_kernels(backend)
    norms = row_norms2(S)
    if c0 is None:
        prev = np.zeros(M)
    else:
        prev = np.array(c0, dtype=np.float64)
        if prev.shape != (M,) or np.any(prev < 0):
            raise ContractError(f"c0 must be a nonnegative vector of length {M}")
    c = prev.astype(S.dtype)
    v = np.zeros(K, dtype=S.dtype)
    abs_tol = float(stop_abs_change or 0.0)
    rel_tol = float(stop_rel_change or 0.0)
    eta, lam = params.alpha_eff, params.lam

    trace = []
    reason = 0
    skipped = 0
    if track_objective:
        done = 0
        while done < n_sweeps:
            ran, reason, sk = kern.c_cycles(S, u, c, v, norms, eta, lam, float(tau), order,
                                            1, abs_tol, rel_tol, prev)
            done += ran
            skipped += sk
            trace.append(eval_c_objective(prev, S, u, params).total)
            if reason:
                break
    else:
        done, reason, skipped = kern.c_cycles(S, u, c, v, norms, eta, lam, float(tau),
                                              order, int(n_sweeps), abs_tol, rel_tol, prev)
    if skipped:
        log.warning("skipped %d degenerate row updates", skipped)
    return CSolveReport(c_final=prev, sweeps_run=int(done), converged_by=_REASONS[reason],
                        per_sweep_objective=trace, skipped_rows=int(skipped))
