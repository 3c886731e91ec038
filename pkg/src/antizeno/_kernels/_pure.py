"""Pure-Python fallback for the hot qubit kernels.

This module mirrors ``_native.pyx`` operation for operation.  The extension
is compiled with floating-point contraction disabled, so both backends
execute the same IEEE-754 arithmetic against the same libm and produce
bit-identical results; the backend choice never changes any output.

Edit the two files together or not at all.
"""

from __future__ import annotations

import math

BACKEND = "python"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_PI = math.pi
_TWO_PI = 2.0 * math.pi


def qubit_fold(a0x, a0y, a0z, wtx, wty, wtz, thetas, phis):
    """Fold b -> (b.w)w over spherical directions; return 0.5*(1 + b.w_T)."""
    bx = a0x
    by = a0y
    bz = a0z
    for i in range(len(thetas)):
        st = math.sin(thetas[i])
        wx = st * math.cos(phis[i])
        wy = st * math.sin(phis[i])
        wz = math.cos(thetas[i])
        d = bx * wx + by * wy + bz * wz
        bx = d * wx
        by = d * wy
        bz = d * wz
    return 0.5 * (1.0 + (bx * wtx + by * wty + bz * wtz))


def _slice_val(t, is_theta, other, bx, by, bz, px, py, pz, r):
    # Objective restricted to one angular coordinate of one direction:
    # 0.5*(1 + (b.w)(w.p) r) with prefix Bloch b, partner p, suffix product r.
    if is_theta:
        theta = t
        phi = other
    else:
        theta = other
        phi = t
    st = math.sin(theta)
    wx = st * math.cos(phi)
    wy = st * math.sin(phi)
    wz = math.cos(theta)
    d = bx * wx + by * wy + bz * wz
    e = wx * px + wy * py + wz * pz
    return 0.5 * (1.0 + d * e * r)


def _improve(t_cur, f_cur, is_theta, other, lo, hi, steps, wrap, gtol,
             bx, by, bz, px, py, pz, r):
    # Coarse scan over the coordinate's domain, then golden-section
    # refinement inside the bracketing cell; returns the best point seen.
    best_t = t_cur
    best_f = f_cur
    h = (hi - lo) / steps
    npts = steps if wrap else steps + 1
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
    return best_t, best_f, evals


def sweep_pass(a0x, a0y, a0z, wtx, wty, wtz, thetas, phis,
               theta_steps, phi_steps, golden_tol):
    """One in-place coordinate-ascent sweep over all (theta_i, phi_i).

    Coordinates are visited in index order, theta before phi.  Each
    coordinate move is accepted only if it strictly improves the slice
    objective, so the sweep never decreases the objective.  Returns
    ``(objective_after_sweep, slice_evaluations)``.
    """
    n = len(thetas)
    wxs = [0.0] * n
    wys = [0.0] * n
    wzs = [0.0] * n
    for i in range(n):
        st = math.sin(thetas[i])
        wxs[i] = st * math.cos(phis[i])
        wys[i] = st * math.sin(phis[i])
        wzs[i] = math.cos(thetas[i])
    bx = a0x
    by = a0y
    bz = a0z
    evals = 0
    j_last = 0.0
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
        th, f_cur, ev = _improve(th, f_cur, True, ph, 0.0, _PI, theta_steps,
                                 False, golden_tol, bx, by, bz, px, py, pz, r)
        evals += ev
        ph, f_cur, ev = _improve(ph, f_cur, False, th, 0.0, _TWO_PI, phi_steps,
                                 True, golden_tol, bx, by, bz, px, py, pz, r)
        evals += ev
        thetas[i] = th
        phis[i] = ph
        st = math.sin(th)
        wxs[i] = st * math.cos(ph)
        wys[i] = st * math.sin(ph)
        wzs[i] = math.cos(th)
        d = bx * wxs[i] + by * wys[i] + bz * wzs[i]
        bx = d * wxs[i]
        by = d * wys[i]
        bz = d * wzs[i]
        j_last = f_cur
    return j_last, evals


def grid_scan(a0x, a0y, a0z, wtx, wty, wtz, wxs, wys, wzs, m, total):
    """Exhaustively evaluate all ``total = len(wxs)**m`` direction tuples.

    Tuples are enumerated in lexicographic (odometer) order over candidate
    indices, and ties keep the first maximizer, so the reported index is the
    lexicographically smallest argmax.  Returns ``(best, best_index, total)``.
    """
    n_cand = len(wxs)
    digits = [0] * m
    best = -1.0
    best_k = 0
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
    return best, best_k, total
