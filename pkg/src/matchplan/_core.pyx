# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Same functions and contracts as ``matchplan._core_py``; that module is the
reference and documents the shared data layout.  Results may differ from the
reference only in floating-point summation order.
"""

import numpy as np

from libc.math cimport HUGE_VAL

cimport numpy as cnp

cnp.import_array()


def poisson_binomial_pmf(probs):
    """PMF of a sum of independent Bernoulli(p_k), by sequential convolution."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t size = p.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pmf_arr = np.zeros(size + 1, dtype=np.float64)
    cdef double[::1] pmf = pmf_arr
    cdef double[::1] pv = p
    cdef Py_ssize_t k, t
    cdef double pk
    pmf[0] = 1.0
    with nogil:
        for k in range(size):
            pk = pv[k]
            for t in range(k + 1, 0, -1):
                pmf[t] = pmf[t] * (1.0 - pk) + pmf[t - 1] * pk
            pmf[0] *= 1.0 - pk
    return pmf_arr


def match_expectations(flat_probs, offsets, q):
    """Expected match probability per supplier from per-chooser pick probs."""
    cdef double[::1] fp = np.ascontiguousarray(flat_probs, dtype=np.float64)
    cdef cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef Py_ssize_t n = qv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j, lo, hi, size, k, t, maxlen = 0
    for j in range(n):
        size = off[j + 1] - off[j]
        if size > maxlen:
            maxlen = size
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pmf_arr = np.zeros(maxlen + 1, dtype=np.float64)
    cdef double[::1] pmf = pmf_arr
    cdef double pk, acc, qj
    with nogil:
        for j in range(n):
            lo = off[j]
            hi = off[j + 1]
            size = hi - lo
            if size == 0:
                continue
            for t in range(size + 1):
                pmf[t] = 0.0
            pmf[0] = 1.0
            for k in range(size):
                pk = fp[lo + k]
                for t in range(k + 1, 0, -1):
                    pmf[t] = pmf[t] * (1.0 - pk) + pmf[t - 1] * pk
                pmf[0] *= 1.0 - pk
            qj = qv[j]
            acc = 0.0
            for t in range(1, size + 1):
                acc += pmf[t] * (t / (t + qj))
            out[j] = acc
    return out_arr


cdef inline Py_ssize_t _bisect_right(double[::1] cum, Py_ssize_t lo, Py_ssize_t hi, double u) noexcept nogil:
    # First absolute index in [lo, hi) whose entry exceeds u, else hi.
    cdef Py_ssize_t l = lo, h = hi, mid
    while l < h:
        mid = (l + h) >> 1
        if cum[mid] <= u:
            l = mid + 1
        else:
            h = mid
    return l


def mc_accumulate(cum_flat, ids_flat, offsets, n, q, u):
    """Rao-Blackwellized Monte Carlo block: sample picks, integrate acceptances."""
    cdef double[::1] cum = np.ascontiguousarray(cum_flat, dtype=np.float64)
    cdef cnp.int64_t[::1] ids = np.ascontiguousarray(ids_flat, dtype=np.int64)
    cdef cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef double[:, ::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t trials = uu.shape[0]
    cdef Py_ssize_t m = uu.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] totals_arr = np.zeros(trials, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] per_arr = np.zeros(nn, dtype=np.float64)
    cdef double[::1] tot = totals_arr
    cdef double[::1] per = per_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts_arr = np.zeros(nn, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef Py_ssize_t t, i, j, lo, hi, idx
    cdef double cnt, ratio
    with nogil:
        for t in range(trials):
            for j in range(nn):
                counts[j] = 0
            for i in range(m):
                lo = off[i]
                hi = off[i + 1]
                if hi == lo:
                    continue
                idx = _bisect_right(cum, lo, hi, uu[t, i])
                if idx < hi:
                    counts[ids[idx]] += 1
            for j in range(nn):
                if counts[j] > 0:
                    cnt = <double> counts[j]
                    ratio = cnt / (cnt + qv[j])
                    tot[t] += ratio
                    per[j] += ratio
    return totals_arr, per_arr


def mc_accumulate_raw(cum_flat, ids_flat, offsets, n, q, u, u2):
    """Two-stage Monte Carlo block: also flip the supplier acceptance coins."""
    cdef double[::1] cum = np.ascontiguousarray(cum_flat, dtype=np.float64)
    cdef cnp.int64_t[::1] ids = np.ascontiguousarray(ids_flat, dtype=np.int64)
    cdef cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef double[:, ::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[:, ::1] uu2 = np.ascontiguousarray(u2, dtype=np.float64)
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t trials = uu.shape[0]
    cdef Py_ssize_t m = uu.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] totals_arr = np.zeros(trials, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] per_arr = np.zeros(nn, dtype=np.float64)
    cdef double[::1] tot = totals_arr
    cdef double[::1] per = per_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts_arr = np.zeros(nn, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef Py_ssize_t t, i, j, lo, hi, idx
    cdef double cnt, ratio
    with nogil:
        for t in range(trials):
            for j in range(nn):
                counts[j] = 0
            for i in range(m):
                lo = off[i]
                hi = off[i + 1]
                if hi == lo:
                    continue
                idx = _bisect_right(cum, lo, hi, uu[t, i])
                if idx < hi:
                    counts[ids[idx]] += 1
            for j in range(nn):
                if counts[j] > 0:
                    cnt = <double> counts[j]
                    ratio = cnt / (cnt + qv[j])
                    if uu2[t, j] < ratio:
                        tot[t] += 1.0
                        per[j] += 1.0
    return totals_arr, per_arr


def oracle_scan(pmat, q, m):
    """Exhaustive scan over all menu profiles; returns (best value, profile).

    Enumeration order, tie-breaking, and the closed-form handling of the last
    customer match the reference implementation.
    """
    cdef double[:, ::1] P = np.ascontiguousarray(pmat, dtype=np.float64)
    cdef Py_ssize_t mm = m
    cdef Py_ssize_t nmenus = P.shape[0]
    cdef Py_ssize_t n = P.shape[1]
    if mm == 0:
        return 0.0, np.zeros(0, dtype=np.int64)

    t_col = np.arange(mm + 1, dtype=np.float64)[:, None]
    q_row = np.ascontiguousarray(q, dtype=np.float64)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio_arr = np.ascontiguousarray(np.where(t_col > 0, t_col / (t_col + q_row), 0.0))
    gain_arr = np.ascontiguousarray(ratio_arr[1:] - ratio_arr[:-1])
    cdef double[:, ::1] ratio = ratio_arr
    cdef double[:, ::1] gain = gain_arr

    cdef cnp.ndarray[cnp.int64_t, ndim=1] digits_arr = np.zeros(max(mm - 1, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] digits = digits_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] best_arr = np.zeros(mm, dtype=np.int64)
    cdef cnp.int64_t[::1] best = best_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dp_arr = np.zeros((mm, n), dtype=np.float64)
    cdef double[:, ::1] dp = dp_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bvec_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] bvec = bvec_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] evec_arr = np.zeros(nmenus, dtype=np.float64)
    cdef double[::1] evec = evec_arr

    cdef Py_ssize_t n_prefix = nmenus ** (mm - 1)
    cdef double tie_eps = 1e-12 * max(1.0, <double> mm)
    cdef double best_val = -HUGE_VAL
    cdef Py_ssize_t L, pos, t, j, b, b_best, d
    cdef double pj, base, acc, val, val_best
    with nogil:
        for L in range(n_prefix):
            for t in range(mm):
                for j in range(n):
                    dp[t, j] = 0.0
            for j in range(n):
                dp[0, j] = 1.0
            for pos in range(mm - 1):
                d = digits[pos]
                for j in range(n):
                    pj = P[d, j]
                    for t in range(mm - 1, 0, -1):
                        dp[t, j] = dp[t, j] * (1.0 - pj) + dp[t - 1, j] * pj
                    dp[0, j] *= 1.0 - pj

            base = 0.0
            for t in range(mm):
                for j in range(n):
                    base += dp[t, j] * ratio[t, j]
            for j in range(n):
                acc = 0.0
                for t in range(mm):
                    acc += dp[t, j] * gain[t, j]
                bvec[j] = acc

            val_best = -HUGE_VAL
            for b in range(nmenus):
                acc = 0.0
                for j in range(n):
                    acc += P[b, j] * bvec[j]
                evec[b] = base + acc
                if evec[b] > val_best:
                    val_best = evec[b]
            b_best = 0
            for b in range(nmenus):
                if evec[b] > val_best - tie_eps:
                    b_best = b
                    break
            val = evec[b_best]

            if val > best_val + tie_eps:
                best_val = val
                for pos in range(mm - 1):
                    best[pos] = digits[pos]
                best[mm - 1] = b_best

            # odometer: advance the prefix, last customer varying fastest
            pos = mm - 2
            while pos >= 0:
                digits[pos] += 1
                if digits[pos] < nmenus:
                    break
                digits[pos] = 0
                pos -= 1
    return best_val, best_arr
