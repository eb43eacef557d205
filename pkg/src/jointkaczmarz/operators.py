"""Forward operator, resolution reduction, and objective evaluation."""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError


@dataclass(frozen=True)
class FunctionalValue:
    """Objective value with its individual terms.

    Unused terms are zero. ``total`` is the sum of the five parts.
    """

    total: float
    data_term: float = 0.0
    model_term: float = 0.0
    calib_term: float = 0.0
    l2_term: float = 0.0
    l1_term: float = 0.0

    @classmethod
    def from_terms(cls, **terms):
        terms = {k: float(v) for k, v in terms.items()}
        return cls(total=sum(terms.values()), **terms)


def _sqnorm(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return float(np.sum(x.real ** 2 + x.imag ** 2))
    return float(np.sum(x * x))


def apply_forward(S, c):
    """Return the measurement ``S @ c``."""
    S = np.asarray(S)
    c = np.asarray(c)
    if S.ndim != 2 or c.ndim != 1 or S.shape[1] != c.shape[0]:
        raise ContractError(f"cannot apply {S.shape} operator to vector of shape {c.shape}")
    return S @ c


def apply_projection(S, Q):
    """Return ``S @ Q`` for a sparse :class:`~jointkaczmarz.model.ProjectionMap`.

    Costs O(K * nnz(Q)).
    """
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[1] != Q.shape[0]:
        raise ContractError(f"cannot project {S.shape} matrix with Q of shape {Q.shape}")
    out = np.zeros((S.shape[0], Q.shape[1]), dtype=np.result_type(S.dtype, np.float64))
    for n in range(Q.shape[1]):
        idx, vals = Q.column(n)
        out[:, n] = S[:, idx] @ vals
    return out


def _check_dims(c, S, u):
    if np.shape(S)[1] != np.shape(c)[0] or np.shape(S)[0] != np.shape(u)[0]:
        raise ContractError(
            f"inconsistent shapes: S {np.shape(S)}, c {np.shape(c)}, u {np.shape(u)}")


def eval_joint(c, S, instance, params):
    """Evaluate the joint functional at ``(c, S)``.

    ``1/2 |Sc - u|^2 + gamma/2 |S - S_mod|_F^2 + mu/2 |SQ - S_calib|_F^2
    + alpha |c|_2^2 + lam |c|_1``. No extra penalty on ``S`` is applied.
    """
    c = np.asarray(c, dtype=np.float64)
    _check_dims(c, S, instance.u)
    if np.shape(S) != instance.s_mod.shape:
        raise ContractError(f"S has shape {np.shape(S)}, s_mod has {instance.s_mod.shape}")
    return FunctionalValue.from_terms(
        data_term=0.5 * _sqnorm(apply_forward(S, c) - instance.u),
        model_term=0.5 * params.gamma * _sqnorm(np.asarray(S) - instance.s_mod),
        calib_term=0.5 * params.mu * _sqnorm(apply_projection(S, instance.q) - instance.s_calib),
        l2_term=params.alpha * _sqnorm(c),
        l1_term=params.lam * float(np.sum(np.abs(c))),
    )


def eval_c_objective(c, S, u, params):
    """Image sub-objective ``|Sc - u|^2 + alpha_eff^2 |c|_2^2 + lam |c|_1``."""
    c = np.asarray(c, dtype=np.float64)
    _check_dims(c, S, u)
    return FunctionalValue.from_terms(
        data_term=_sqnorm(apply_forward(S, c) - np.asarray(u)),
        l2_term=params.alpha_eff ** 2 * _sqnorm(c),
        l1_term=params.lam * float(np.sum(np.abs(c))),
    )


def eval_s_objective(S, c, u, instance, params):
    """System-matrix sub-objective.

    ``|Sc - u|^2 + gamma_eff^2 |S - S_mod|_F^2 + mu_eff^2 |SQ - S_calib|_F^2``.
    """
    c = np.asarray(c, dtype=np.float64)
    _check_dims(c, S, u)
    return FunctionalValue.from_terms(
        data_term=_sqnorm(apply_forward(S, c) - np.asarray(u)),
        model_term=params.gamma_eff ** 2 * _sqnorm(np.asarray(S) - instance.s_mod),
        calib_term=params.mu_eff ** 2 * _sqnorm(apply_projection(S, instance.q) - instance.s_calib),
    )
