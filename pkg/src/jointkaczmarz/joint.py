"""Alternating minimization over the image and the system matrix."""

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ContractError
from .image import solve_c
from .metrics import l2_error
from .model import validate_instance
from .operators import FunctionalValue, eval_joint
from .system import solve_s


@dataclass(frozen=True)
class OuterRecord:
    outer_index: int
    c: np.ndarray
    objective: FunctionalValue
    l2_error: Optional[float]
    wall_ms: float
    S: Optional[np.ndarray] = None


@dataclass
class JointHistory:
    """Per-outer-iteration records plus the first and last system matrices.

    ``initial_objective`` is the joint functional at ``(0, S_mod)``.
    """

    initial_objective: FunctionalValue
    records: List[OuterRecord] = field(default_factory=list)
    S_first: Optional[np.ndarray] = None
    S_last: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def c_final(self):
        return self.records[-1].c if self.records else None


class JointSolveError(RuntimeError):
    """A joint solve failed part-way; ``history`` holds the completed iterations."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def convergence_check(history, max_outer, rel_change=None):
    """Decide whether the outer loop should continue.

    Returns:
        ``("continue", None)`` or ``("stop", reason)`` with reason
        ``"sweep_limit"`` or ``"rel_change"``.
    """
    if len(history) >= max_outer:
        return "stop", "sweep_limit"
    if rel_change is not None and len(history) >= 2:
        cur, prev = history[-1].c, history[-2].c
        denom = max(float(np.linalg.norm(prev)), 1e-30)
        if float(np.linalg.norm(cur - prev)) / denom < rel_change:
            return "stop", "rel_change"
    return "continue", None


def solve_joint(instance, params, schedule, snapshot_S=False, warm_start_c=False,
                reset_S=True, backend=None):
    """Alternate image and system-matrix solves.

    Every outer iteration runs the image solve against the current system
    matrix (from ``c = 0``), then the system-matrix solve against the new
    image. Each system-matrix solve starts from ``S_mod`` with zero
    auxiliaries, so it minimizes the system-matrix block for the current
    image exactly. ``reset_S=False`` instead warm-starts from the previous
    outer iterate; with fresh auxiliaries that converges to a problem
    anchored at the previous ``S`` rather than at ``S_mod``.

    Args:
        snapshot_S: keep a copy of ``S`` in every record, not only the
            first and last.
        warm_start_c: start each image solve from the previous outer
            iterate instead of zero.

    Raises:
        JointSolveError: wraps any failure, carrying the partial history.
    """
    report = validate_instance(instance)
    if not report.ok:
        raise ContractError("invalid instance: " + "; ".join(report.violations))

    S = np.array(instance.s_mod, copy=True)
    c = None
    tau = schedule.relaxation_tau
    history = JointHistory(initial_objective=eval_joint(np.zeros(S.shape[1]), S, instance,
                                                        params))
    try:
        while convergence_check(history, schedule.outer_iterations,
                                schedule.stop_rel_change)[0] == "continue":
            t0 = time.perf_counter()
            c = solve_c(S, instance.u, params, schedule.c_sweeps_per_outer, tau=tau,
                        track_objective=False, backend=backend,
                        c0=c if warm_start_c else None).c_final
            S0 = instance.s_mod if reset_S else S
            S = solve_s(instance, c, params, schedule.s_sweeps_per_outer, tau=tau, S0=S0,
                        track_objective=False, backend=backend).state.S
            objective = eval_joint(c, S, instance, params)
            if not np.isfinite(objective.total):
                raise FloatingPointError("joint objective became non-finite")
            err = None if instance.c_true is None else l2_error(c, instance.c_true)
            k = len(history)
            history.records.append(OuterRecord(
                outer_index=k, c=_frozen(c), objective=objective, l2_error=err,
                wall_ms=(time.perf_counter() - t0) * 1e3,
                S=_frozen(S) if snapshot_S else None))
            if k == 0:
                history.S_first = _frozen(S)
            history.S_last = _frozen(S)
    except Exception as exc:
        raise JointSolveError(f"joint solve failed after {len(history)} outer iterations: "
                              f"{exc}", history) from exc
    return history
