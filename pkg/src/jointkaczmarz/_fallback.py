"""Pure-Python versions of the row-action kernels.

Signatures and in-place semantics match :mod:`jointkaczmarz._kernels`.
Used when the compiled extension is unavailable or when the
``JOINTKACZMARZ_BACKEND=python`` environment variable is set.
"""

import math

import numpy as np


def c_sweep(S, u, c, v, rownorm2, eta, tau, order):
    skipped = 0
    for k in order:
        denom = eta * eta + rownorm2[k]
        if denom == 0.0:
            skipped += 1
            continue
        row = S[k]
        step = tau * (u[k] - row @ c - eta * v[k]) / denom
        c += step * np.conj(row)
        v[k] += eta * step
    return skipped


def c_cycles(S, u, c, v, rownorm2, eta, lam, tau, order, n_sweeps,
             abs_tol, rel_tol, prev):
    skipped = 0
    done = 0
    reason = 0
    for _ in range(n_sweeps):
        skipped += c_sweep(S, u, c, v, rownorm2, eta, tau, order)
        x = np.maximum(c.real, 0.0)
        x = np.maximum(x - lam, 0.0) - np.maximum(-x - lam, 0.0)
        c[:] = x
        diff = math.sqrt(float(np.sum((x - prev) ** 2)))
        prev_norm = math.sqrt(float(np.sum(prev * prev)))
        prev[:] = x
        done += 1
        if abs_tol > 0.0 and diff < abs_tol:
            reason = 1
            break
        if rel_tol > 0.0 and diff / max(prev_norm, 1e-30) < rel_tol:
            reason = 2
            break
    return done, reason, skipped


def _s_by_c(S, v, c, u, eta, tau, denom):
    for k in range(S.shape[0]):
        step = tau * (u[k] - S[k] @ c - eta * v[k]) / denom
        S[k] += step * c
        v[k] += eta * step


def _s_by_calib(S, w, indptr, indices, qdata, Scal, eta, mu, tau):
    skipped = 0
    N = Scal.shape[1]
    cols = [(indices[indptr[n]:indptr[n + 1]], qdata[indptr[n]:indptr[n + 1]])
            for n in range(N)]
    for k in range(S.shape[0]):
        row = S[k]
        for n, (idx, q) in enumerate(cols):
            denom = eta * eta + mu * mu * float(q @ q)
            if denom == 0.0:
                skipped += 1
                continue
            step = tau * (mu * (Scal[k, n] - row[idx] @ q) - eta * w[k, n]) / denom
            row[idx] += step * mu * q
            w[k, n] += eta * step
    return skipped


def s_sweep_by_c(S, v, c, u, eta, tau):
    denom = eta * eta + float(c @ c)
    if denom == 0.0:
        return 1
    _s_by_c(S, v, c, u, eta, tau, denom)
    return 0


def s_sweep_by_calib(S, w, indptr, indices, qdata, Scal, eta, mu, tau):
    return _s_by_calib(S, w, indptr, indices, qdata, Scal, eta, mu, tau)


def s_cycles(S, v, w, c, u, indptr, indices, qdata, Scal, eta, mu, tau,
             n_pairs):
    denom = eta * eta + float(c @ c)
    skipped_c = skipped_q = 0
    for _ in range(n_pairs):
        if denom == 0.0:
            skipped_c += 1
        else:
            _s_by_c(S, v, c, u, eta, tau, denom)
        skipped_q += _s_by_calib(S, w, indptr, indices, qdata, Scal,
                                 eta, mu, tau)
    return skipped_c, skipped_q
