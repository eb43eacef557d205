"""Regularization-parameter grid sweeps and best-parameter selection.

Four reconstruction methods are compared on one fixed instance:

* ``joint``: alternating image / system-matrix reconstruction,
* ``c_with_Seps``: image only, using the noisy modeled matrix,
* ``c_with_Strue``: image only, using the true matrix (synthetic only),
* ``c_with_Scalib``: image only on the coarse grid using the calibration
  matrix; the result is lifted to the fine grid as ``Q @ c`` (each coarse
  value copied to the fine cells it covers) before scoring.

Image-only methods run one image solve of ``c_sweeps_per_outer`` cycles and
ignore ``gamma`` and ``mu`` (recorded as 0).
"""

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import ContractError, EmptySelectionError
from .image import solve_c
from .joint import solve_joint
from .metrics import data_residual, empirical_rate, l2_error, ssim_1d, SsimOptions
from .model import KaczmarzSchedule, RegParams, validate_instance
from .operators import eval_c_objective
from .testbed import generate_instance

log = logging.getLogger(__name__)

METHODS = ("joint", "c_with_Seps", "c_with_Strue", "c_with_Scalib")


def powers_of_two(lo, hi):
    """``[2**-lo, ..., 2**-hi]``."""
    return [2.0 ** -i for i in range(lo, hi + 1)]


@dataclass(frozen=True)
class GridSpec:
    gamma_list: Sequence[float]
    mu_list: Sequence[float]
    alpha_list: Sequence[float]
    lambda_list: Sequence[float]
    methods: Sequence[str] = ("joint",)

    def __post_init__(self):
        for name in ("gamma_list", "mu_list", "alpha_list", "lambda_list", "methods"):
            values = tuple(getattr(self, name))
            if not values:
                raise ContractError(f"{name} must not be empty")
            if len(set(values)) != len(values):
                raise ContractError(f"{name} contains duplicates")
            object.__setattr__(self, name, values)
        for name in ("gamma_list", "mu_list", "alpha_list", "lambda_list"):
            for x in getattr(self, name):
                if not (math.isfinite(x) and x >= 0):
                    raise ContractError(f"{name} entries must be finite and >= 0, got {x}")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ContractError(f"unknown methods: {sorted(unknown)}")

    @classmethod
    def full(cls, methods=("joint",)):
        """Full grid: 19 x 19 x 9 x 12 joint combinations."""
        return cls(powers_of_two(0, 18), powers_of_two(0, 18), powers_of_two(10, 18),
                   powers_of_two(1, 12), methods)

    @classmethod
    def reduced(cls, methods=("joint", "c_with_Seps")):
        """3 x 3 x 3 x 3 subset of the full grid."""
        return cls([1.0, 2.0 ** -2, 2.0 ** -4], [1.0, 2.0 ** -2, 2.0 ** -4],
                   [2.0 ** -12, 2.0 ** -15, 2.0 ** -18], [2.0 ** -4, 2.0 ** -8, 2.0 ** -12],
                   methods)


def enumerate_grid(spec):
    """All ``(method, RegParams)`` combinations in canonical order."""
    out = []
    for method in spec.methods:
        if method == "joint":
            for g, m, a, lam in itertools.product(spec.gamma_list, spec.mu_list,
                                                  spec.alpha_list, spec.lambda_list):
                out.append((method, RegParams(alpha=a, lam=lam, gamma=g, mu=m)))
        else:
            for a, lam in itertools.product(spec.alpha_list, spec.lambda_list):
                out.append((method, RegParams(alpha=a, lam=lam, gamma=0.0, mu=0.0)))
    return out


@dataclass
class SweepRecord:
    index: int
    method: str
    gamma: float
    mu: float
    alpha: float
    lam: float
    seed: int
    outer_iters: int
    l2_error: float = math.nan
    ssim: float = math.nan
    data_residual: float = math.nan
    J_final: float = math.nan
    wall_ms: float = 0.0
    status: str = "ok"
    c: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def ok(self):
        return self.status == "ok"

    @property
    def params(self):
        return RegParams(alpha=self.alpha, lam=self.lam, gamma=self.gamma, mu=self.mu)


def run_method(instance, method, params, schedule, reset_S=True, backend=None):
    """Run one reconstruction.

    Returns:
        ``(c, S_used, c_fine, J_final, outer_iters)`` where ``c`` lives on the
        grid of ``S_used`` and ``c_fine`` on the fine grid.
    """
    tau = schedule.relaxation_tau
    if method == "joint":
        hist = solve_joint(instance, params, schedule, reset_S=reset_S, backend=backend)
        if not len(hist):
            c = np.zeros(instance.dims[1])
            return c, np.asarray(instance.s_mod), c, hist.initial_objective.total, 0
        return hist.c_final, hist.S_last, hist.c_final, hist[-1].objective.total, len(hist)
    if method == "c_with_Seps":
        S = instance.s_mod
    elif method == "c_with_Strue":
        if instance.s_true is None:
            raise ContractError("c_with_Strue needs a synthetic instance")
        S = instance.s_true
    elif method == "c_with_Scalib":
        S = instance.s_calib
    else:
        raise ContractError(f"unknown method {method!r}")
    c = solve_c(S, instance.u, params, schedule.c_sweeps_per_outer, tau=tau,
                track_objective=False, backend=backend).c_final
    J = eval_c_objective(c, S, instance.u, params).total
    c_fine = instance.q.to_dense() @ c if method == "c_with_Scalib" else c
    return c, S, c_fine, J, 1


def _run_one(instance, index, method, params, schedule, reset_S, backend, keep_c):
    rec = SweepRecord(index=index, method=method, gamma=params.gamma, mu=params.mu,
                      alpha=params.alpha, lam=params.lam, seed=instance.seed, outer_iters=0)
    t0 = time.perf_counter()
    try:
        c, S_used, c_fine, J, outer = run_method(instance, method, params, schedule,
                                                 reset_S=reset_S, backend=backend)
        rec.outer_iters = outer
        rec.J_final = float(J)
        rec.data_residual = data_residual(S_used, c, instance.u)
        if instance.c_true is not None:
            rec.l2_error = l2_error(c_fine, instance.c_true)
            rec.ssim = ssim_1d(c_fine, instance.c_true, SsimOptions())
        values = [rec.J_final, rec.data_residual]
        if instance.c_true is not None:
            values += [rec.l2_error, rec.ssim]
        if not all(math.isfinite(x) for x in values):
            raise FloatingPointError("non-finite metric")
        if keep_c:
            rec.c = np.asarray(c_fine)
    except Exception as exc:  # failed runs are recorded, not raised
        log.warning("run %d (%s) failed: %s", index, method, exc)
        rec.status = f"failed: {exc}"
    rec.wall_ms = (time.perf_counter() - t0) * 1e3
    return rec


def run_sweep(instance, spec, schedule, workers=1, reset_S=True, keep_c=False,
              backend=None, progress=None):
    """Run every grid combination on one fixed instance.

    Runs are independent; with ``workers > 1`` they execute on a thread pool
    (the compiled kernels release the GIL). Records are returned in
    combination order regardless of scheduling.
    """
    report = validate_instance(instance)
    if not report.ok:
        raise ContractError("invalid instance: " + "; ".join(report.violations))
    combos = enumerate_grid(spec)

    def task(item):
        i, (method, params) = item
        rec = _run_one(instance, i, method, params, schedule, reset_S, backend, keep_c)
        if progress is not None:
            progress(rec)
        return rec

    if workers <= 1:
        records = [task(item) for item in enumerate(combos)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(task, enumerate(combos)))
    records.sort(key=lambda r: r.index)
    return records


def _metric_value(rec, metric):
    if metric == "l2":
        return rec.l2_error
    if metric == "one_minus_ssim":
        return 1.0 - rec.ssim
    raise ContractError(f"unknown metric {metric!r}")


def select_best(records, metric="l2"):
    """Pick the record minimizing ``metric`` ("l2" or "one_minus_ssim").

    Ties are broken by ``(gamma, mu, alpha, lam)`` ascending, then method.

    Returns:
        ``(best_record, ranked_records)``
    """
    usable = [r for r in records if r.ok and math.isfinite(_metric_value(r, metric))]
    if not usable:
        raise EmptySelectionError("no successful record to select from")
    ranked = sorted(usable, key=lambda r: (_metric_value(r, metric), r.gamma, r.mu, r.alpha,
                                           r.lam, r.method))
    return ranked[0], ranked


def best_by_method(records, metric="l2"):
    """``{method: best record}`` for every method with a successful record."""
    out = {}
    for method in METHODS:
        subset = [r for r in records if r.method == method]
        if subset:
            try:
                out[method] = select_best(subset, metric)[0]
            except EmptySelectionError:
                pass
    return out


@dataclass
class RateResult:
    noise_levels: List[float]
    discrepancies: List[float]
    slope: float
    per_seed: List[List[float]]


def rate_experiment(M=50, sigma0=0.08, n_levels=5, seeds=(1, 2, 3), gamma=1.0,
                    mu_ratio=1.0, lam_ratio=2.0 ** -4, schedule=None, backend=None):
    """Empirical convergence rate of the data discrepancy.

    At each level the per-entry noise of both the operator and the data is
    ``sigma = sigma0 / 2**i``; the noise magnitude is ``delta + eps = 2 sigma``
    and the parameters follow ``alpha = delta + eps`` with ``mu`` and ``lam``
    at fixed ratios to ``alpha`` and ``gamma`` fixed. The discrepancy is
    ``|S c - S_true c_true|`` for the joint reconstruction, median over seeds.
    """
    schedule = schedule or KaczmarzSchedule(20, 500, 300)
    levels, discs, per_seed = [], [], []
    for i in range(n_levels):
        sigma = sigma0 / 2 ** i
        noise = 2 * sigma
        params = RegParams(alpha=noise, lam=lam_ratio * noise, gamma=gamma,
                           mu=mu_ratio * noise)
        vals = []
        for seed in seeds:
            inst = generate_instance(M, sigma, seed)
            hist = solve_joint(inst, params, schedule, backend=backend, reset_S=True)
            u_true = inst.s_true @ inst.c_true
            vals.append(data_residual(hist.S_last, hist.c_final, u_true))
        levels.append(noise)
        discs.append(float(np.median(vals)))
        per_seed.append(vals)
    slope = empirical_rate(list(zip(levels, discs)))
    return RateResult(levels, discs, slope, per_seed)
