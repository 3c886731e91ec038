# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled qubit kernels.

Lockstep twin of ``_pure.py``: same operations in the same order against the
same libm, compiled with floating-point contraction disabled, so results are
bit-identical to the fallback.  Edit the two files together or not at all.
"""

from libc.math cimport sin, cos, sqrt, M_PI
from libc.stdlib cimport malloc, free

BACKEND = "cython"

cdef double _GOLDEN = (sqrt(5.0) - 1.0) / 2.0
cdef double _PI = M_PI
cdef double _TWO_PI = 2.0 * M_PI


def qubit_fold(double a0x, double a0y, double a0z,
               double wtx, double wty, double wtz,
               double[::1] thetas, double[::1] phis):
    """Fold b -> (b.w)w over spherical directions; return 0.5*(1 + b.w_T)."""
    cdef Py_ssize_t i, n = thetas.shape[0]
    cdef double bx = a0x
    cdef double by = a0y
    cdef double bz = a0z
    cdef double st, wx, wy, wz, d
    for i in range(n):
        st = sin(thetas[i])
        wx = st * cos(phis[i])
        wy = st * sin(phis[i])
        wz = cos(thetas[i])
        d = bx * wx + by * wy + bz * wz
        bx = d * wx
        by = d * wy
        bz = d * wz
    return 0.5 * (1.0 + (bx * wtx + by * wty + bz * wtz))


cdef inline double _slice_val(double t, bint is_theta, double other,
                              double bx, double by, double bz,
                              double px, double py, double pz,
                              double r) noexcept nogil:
    # Objective restricted to one angular coordinate of one direction:
    # 0.5*(1 + (b.w)(w.p) r) with prefix Bloch b, partner p, suffix product r.
    cdef double theta, phi, st, wx, wy, wz, d, e
    if is_theta:
        theta = t
        phi = other
    else:
        theta = other
        phi = t
    st = sin(theta)
    wx = st * cos(phi)
    wy = st * sin(phi)
    wz = cos(theta)
    d = bx * wx + by * wy + bz * wz
    e = wx * px + wy * py + wz * pz
    return 0.5 * (1.0 + d * e * r)


cdef struct _ImproveOut:
    double t
    double f
    long long evals


cdef _ImproveOut _improve(double t_cur, double f_cur, bint is_theta, double other,
                          double lo, double hi, int steps, bint wrap, double gtol,
                          double bx, double by, double bz,
                          double px, double py, double pz,
                          double r) noexcept nogil:
    # Coarse scan over the coordinate's domain, then golden-section
    # refinement inside the bracketing cell; returns the best point seen.
    cdef _ImproveOut out
    cdef double best_t = t_cur
    cdef double best_f = f_cur
    cdef double h = (hi - lo) / steps
    cdef int npts = steps if wrap else steps + 1
    cdef int j
    cdef double t, ft, a, b, x1, x2, f1, f2
    cdef long long evals
    for j in range(npts):
        t = lo + h * j
        ft = _slice_val(t, is_theta, other, bx, by, bz, px, py, pz, r)
        if ft > best_f:
            best_t = t
            best_f = ft
    a = best_t - h
    b = best_t + h
    if not wrap:
        if a < lo:
            a = lo
        if b > hi:
            b = hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = _slice_val(x1, is_theta, other, bx, by, bz, px, py, pz, r)
    f2 = _slice_val(x2, is_theta, other, bx, by, bz, px, py, pz, r)
    evals = npts + 2
    if f1 > best_f:
        best_t = x1
        best_f = f1
    if f2 > best_f:
        best_t = x2
        best_f = f2
    while (b - a) > gtol:
        if f1 < f2:
            a = x1
            x1 = x2
            f1 = f2
            x2 = a + _GOLDEN * (b - a)
            f2 = _slice_val(x2, is_theta, other, bx, by, bz, px, py, pz, r)
            evals += 1
            if f2 > best_f:
                best_t = x2
                best_f = f2
        else:
            b = x2
            x2 = x1
            f2 = f1
            x1 = b - _GOLDEN * (b - a)
            f1 = _slice_val(x1, is_theta, other, bx, by, bz, px, py, pz, r)
            evals += 1
            if f1 > best_f:
                best_t = x1
                best_f = f1
    out.t = best_t
    out.f = best_f
    out.evals = evals
    return out


def sweep_pass(double a0x, double a0y, double a0z,
               double wtx, double wty, double wtz,
               double[::1] thetas, double[::1] phis,
               int theta_steps, int phi_steps, double golden_tol):
    """One in-place coordinate-ascent sweep over all (theta_i, phi_i).

    Coordinates are visited in index order, theta before phi.  Each
    coordinate move is accepted only if it strictly improves the slice
    objective, so the sweep never decreases the objective.  Returns
    ``(objective_after_sweep, slice_evaluations)``.
    """
    cdef Py_ssize_t n = thetas.shape[0]
    if n == 0:
        return 0.0, 0
    cdef double* wxs = <double*> malloc(3 * n * sizeof(double))
    if wxs == NULL:
        raise MemoryError()
    cdef double* wys = wxs + n
    cdef double* wzs = wxs + 2 * n
    cdef Py_ssize_t i, j
    cdef double st, bx, by, bz, px, py, pz, r, th, ph, f_cur, d
    cdef long long evals = 0
    cdef double j_last = 0.0
    cdef _ImproveOut res
    try:
        for i in range(n):
            st = sin(thetas[i])
            wxs[i] = st * cos(phis[i])
            wys[i] = st * sin(phis[i])
            wzs[i] = cos(thetas[i])
        bx = a0x
        by = a0y
        bz = a0z
        for i in range(n):
            if i < n - 1:
                px = wxs[i + 1]
                py = wys[i + 1]
                pz = wzs[i + 1]
                r = 1.0
                for j in range(i + 1, n - 1):
                    r *= wxs[j] * wxs[j + 1] + wys[j] * wys[j + 1] + wzs[j] * wzs[j + 1]
                r *= wxs[n - 1] * wtx + wys[n - 1] * wty + wzs[n - 1] * wtz
            else:
                px = wtx
                py = wty
                pz = wtz
                r = 1.0
            th = thetas[i]
            ph = phis[i]
            f_cur = _slice_val(th, True, ph, bx, by, bz, px, py, pz, r)
            evals += 1
            res = _improve(th, f_cur, True, ph, 0.0, _PI, theta_steps,
                           False, golden_tol, bx, by, bz, px, py, pz, r)
            th = res.t
            f_cur = res.f
            evals += res.evals
            res = _improve(ph, f_cur, False, th, 0.0, _TWO_PI, phi_steps,
                           True, golden_tol, bx, by, bz, px, py, pz, r)
            ph = res.t
            f_cur = res.f
            evals += res.evals
            thetas[i] = th
            phis[i] = ph
            st = sin(th)
            wxs[i] = st * cos(ph)
            wys[i] = st * sin(ph)
            wzs[i] = cos(th)
            d = bx * wxs[i] + by * wys[i] + bz * wzs[i]
            bx = d * wxs[i]
            by = d * wys[i]
            bz = d * wzs[i]
            j_last = f_cur
    finally:
        free(wxs)
    return j_last, evals


def grid_scan(double a0x, double a0y, double a0z,
              double wtx, double wty, double wtz,
              double[::1] wxs, double[::1] wys, double[::1] wzs,
              Py_ssize_t m, long long total):
    """Exhaustively evaluate all ``total = len(wxs)**m`` direction tuples.

    Tuples are enumerated in lexicographic (odometer) order over candidate
    indices, and ties keep the first maximizer, so the reported index is the
    lexicographically smallest argmax.  Returns ``(best, best_index, total)``.
    """
    cdef Py_ssize_t n_cand = wxs.shape[0]
    cdef Py_ssize_t* digits = <Py_ssize_t*> malloc(m * sizeof(Py_ssize_t))
    if digits == NULL:
        raise MemoryError()
    cdef double best = -1.0
    cdef long long best_k = 0
    cdef long long k
    cdef Py_ssize_t j, jj, c
    cdef double bx, by, bz, d, val
    try:
        for j in range(m):
            digits[j] = 0
        for k in range(total):
            bx = a0x
            by = a0y
            bz = a0z
            for j in range(m):
                c = digits[j]
                d = bx * wxs[c] + by * wys[c] + bz * wzs[c]
                bx = d * wxs[c]
                by = d * wys[c]
                bz = d * wzs[c]
            val = 0.5 * (1.0 + (bx * wtx + by * wty + bz * wtz))
            if val > best:
                best = val
                best_k = k
            jj = m - 1
            while jj >= 0:
                digits[jj] += 1
                if digits[jj] == n_cand:
                    digits[jj] = 0
                    jj -= 1
                else:
                    break
    finally:
        free(digits)
    return best, best_k, total
