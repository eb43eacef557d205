# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled row-action kernels.

Every routine mutates its array arguments in place and mirrors the
signature of the matching function in :mod:`jointkaczmarz._fallback`.
The GIL is released for the duration of each sweep, so independent
solves can share a thread pool.
"""

from libc.math cimport sqrt

ctypedef fused scalar_t:
    double
    double complex


cdef inline scalar_t _conj(scalar_t x) noexcept nogil:
    if scalar_t is double:
        return x
    else:
        return x.conjugate()


cdef Py_ssize_t _c_sweep(const scalar_t[:, ::1] S, const scalar_t[::1] u, scalar_t[::1] c,
                         scalar_t[::1] v, const double[::1] rownorm2,
                         double eta, double tau,
                         const Py_ssize_t[::1] order) noexcept nogil:
    cdef Py_ssize_t K = order.shape[0]
    cdef Py_ssize_t M = S.shape[1]
    cdef Py_ssize_t j, k, m, skipped = 0
    cdef double denom
    cdef scalar_t acc, step
    for j in range(K):
        k = order[j]
        denom = eta * eta + rownorm2[k]
        if denom == 0.0:
            skipped += 1
            continue
        acc = 0
        for m in range(M):
            acc = acc + S[k, m] * c[m]
        step = tau * (u[k] - acc - eta * v[k]) / denom
        for m in range(M):
            c[m] = c[m] + step * _conj(S[k, m])
        v[k] = v[k] + eta * step
    return skipped


def c_sweep(const scalar_t[:, ::1] S, const scalar_t[::1] u, scalar_t[::1] c,
            scalar_t[::1] v, const double[::1] rownorm2, double eta,
            double tau, const Py_ssize_t[::1] order):
    """One regularized Kaczmarz pass over the rows listed in ``order``.

    Returns the number of rows skipped because their denominator vanished.
    """
    cdef Py_ssize_t skipped
    with nogil:
        skipped = _c_sweep(S, u, c, v, rownorm2, eta, tau, order)
    return skipped


def c_cycles(const scalar_t[:, ::1] S, const scalar_t[::1] u, scalar_t[::1] c,
             scalar_t[::1] v, const double[::1] rownorm2, double eta,
             double lam, double tau, const Py_ssize_t[::1] order,
             Py_ssize_t n_sweeps, double abs_tol, double rel_tol,
             double[::1] prev):
    """Sweep, clamp to the nonnegative reals, soft-threshold; repeat.

    ``prev`` must hold the current real iterate on entry and holds the
    final one on exit. ``abs_tol``/``rel_tol`` <= 0 disable the
    change-based stops. Returns ``(sweeps_run, reason, skipped)`` with
    reason 0 for the sweep limit, 1 for absolute and 2 for relative change.
    """
    cdef Py_ssize_t M = c.shape[0]
    cdef Py_ssize_t it, m, skipped = 0, done = 0
    cdef int reason = 0
    cdef double x, diff2, prev2
    with nogil:
        for it in range(n_sweeps):
            skipped += _c_sweep(S, u, c, v, rownorm2, eta, tau, order)
            diff2 = 0.0
            prev2 = 0.0
            for m in range(M):
                if scalar_t is double:
                    x = c[m]
                else:
                    x = c[m].real
                # after the clamp, soft thresholding is max(x - lam, 0)
                if x < 0.0:
                    x = 0.0
                if x > lam:
                    x = x - lam
                elif x < -lam:
                    x = x + lam
                else:
                    x = 0.0
                c[m] = x
                diff2 = diff2 + (x - prev[m]) * (x - prev[m])
                prev2 = prev2 + prev[m] * prev[m]
                prev[m] = x
            done = it + 1
            if abs_tol > 0.0 and sqrt(diff2) < abs_tol:
                reason = 1
                break
            if rel_tol > 0.0 and sqrt(diff2) / max(sqrt(prev2), 1e-30) < rel_tol:
                reason = 2
                break
    return done, reason, skipped


cdef void _s_by_c(scalar_t[:, ::1] S, scalar_t[::1] v, const double[::1] c,
                  const scalar_t[::1] u, double eta, double tau,
                  double denom) noexcept nogil:
    cdef Py_ssize_t K = S.shape[0]
    cdef Py_ssize_t M = S.shape[1]
    cdef Py_ssize_t k, m
    cdef scalar_t acc, step
    for k in range(K):
        acc = 0
        for m in range(M):
            acc = acc + S[k, m] * c[m]
        step = tau * (u[k] - acc - eta * v[k]) / denom
        for m in range(M):
            S[k, m] = S[k, m] + step * c[m]
        v[k] = v[k] + eta * step


cdef Py_ssize_t _s_by_calib(scalar_t[:, ::1] S, scalar_t[:, ::1] w,
                            const Py_ssize_t[::1] indptr,
                            const Py_ssize_t[::1] indices,
                            const double[::1] qdata, const scalar_t[:, ::1] Scal,
                            double eta, double mu, double tau) noexcept nogil:
    cdef Py_ssize_t K = S.shape[0]
    cdef Py_ssize_t N = Scal.shape[1]
    cdef Py_ssize_t k, n, p, skipped = 0
    cdef double qn2, denom
    cdef scalar_t acc, step
    for k in range(K):
        for n in range(N):
            qn2 = 0.0
            for p in range(indptr[n], indptr[n + 1]):
                qn2 = qn2 + qdata[p] * qdata[p]
            denom = eta * eta + mu * mu * qn2
            if denom == 0.0:
                skipped += 1
                continue
            acc = 0
            for p in range(indptr[n], indptr[n + 1]):
                acc = acc + S[k, indices[p]] * qdata[p]
            step = tau * (mu * (Scal[k, n] - acc) - eta * w[k, n]) / denom
            for p in range(indptr[n], indptr[n + 1]):
                S[k, indices[p]] = S[k, indices[p]] + step * mu * qdata[p]
            w[k, n] = w[k, n] + eta * step
    return skipped


def s_sweep_by_c(scalar_t[:, ::1] S, scalar_t[::1] v, const double[::1] c,
                 const scalar_t[::1] u, double eta, double tau):
    """Row-wise projection of ``S`` onto ``S_k c = u_k``.

    Returns 1 if the whole sweep was skipped (degenerate denominator).
    """
    cdef Py_ssize_t m
    cdef double denom = eta * eta
    for m in range(c.shape[0]):
        denom += c[m] * c[m]
    if denom == 0.0:
        return 1
    with nogil:
        _s_by_c(S, v, c, u, eta, tau, denom)
    return 0


def s_sweep_by_calib(scalar_t[:, ::1] S, scalar_t[:, ::1] w,
                     const Py_ssize_t[::1] indptr, const Py_ssize_t[::1] indices,
                     const double[::1] qdata, const scalar_t[:, ::1] Scal,
                     double eta, double mu, double tau):
    """Row-wise projections of ``S`` onto ``mu S_k Q_n = mu Scal_kn``.

    Returns the number of skipped (row, column) updates.
    """
    cdef Py_ssize_t skipped
    with nogil:
        skipped = _s_by_calib(S, w, indptr, indices, qdata, Scal, eta, mu, tau)
    return skipped


def s_cycles(scalar_t[:, ::1] S, scalar_t[::1] v, scalar_t[:, ::1] w,
             const double[::1] c, const scalar_t[::1] u,
             const Py_ssize_t[::1] indptr, const Py_ssize_t[::1] indices,
             const double[::1] qdata, const scalar_t[:, ::1] Scal,
             double eta, double mu, double tau, Py_ssize_t n_pairs):
    """``n_pairs`` repetitions of (sweep by c, sweep by calibration).

    Returns ``(skipped_c_sweeps, skipped_calib_updates)``.
    """
    cdef Py_ssize_t it, m, skipped_c = 0, skipped_q = 0
    cdef double denom = eta * eta
    for m in range(c.shape[0]):
        denom += c[m] * c[m]
    with nogil:
        for it in range(n_pairs):
            if denom == 0.0:
                skipped_c += 1
            else:
                _s_by_c(S, v, c, u, eta, tau, denom)
            skipped_q += _s_by_calib(S, w, indptr, indices, qdata, Scal,
                                     eta, mu, tau)
    return skipped_c, skipped_q
