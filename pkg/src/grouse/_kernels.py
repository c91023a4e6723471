"""Compiled inner loops for the tracker hot path.

All matrices are float64, row-major (C order). Kept free of Python objects so
that one GROUSE step costs O(nd + |omega| d^2) with a small constant.
"""
import numpy as np
from numba import njit

RANK_RTOL = 1e-10

# status codes returned by grouse_update
UPDATED = 0
TOO_FEW_SAMPLES = 1
RANK_DEFICIENT = 2
NEGLIGIBLE_RESIDUAL = 3
NORM_DRIFT = 4
NON_FINITE = 5


@njit(cache=True)
def _exact_lsq(A, b):
    m, d = A.shape
    if m == 0:
        return np.zeros(d), False
    w, _, _, sv = np.linalg.lstsq(A, b, RANK_RTOL)
    if sv.shape[0] < d or sv[0] == 0.0:
        return w, False
    return w, sv[sv.shape[0] - 1] > RANK_RTOL * sv[0]


@njit(cache=True)
def masked_lsq(A, b):
    """Least squares min ||A a - b|| via Householder QR.

    Returns (w, rank_ok). When the cheap conditioning bound from the
    triangular factor cannot certify full rank, falls back to an SVD solve,
    which decides rank_ok exactly and yields the minimum-norm minimizer.
    """
    m, d = A.shape
    if m < d:
        return _exact_lsq(A, b)
    Q = A.copy()
    y = b.copy()
    for k in range(d):
        s = 0.0
        for i in range(k, m):
            s += Q[i, k] * Q[i, k]
        nrm = np.sqrt(s)
        if nrm == 0.0:
            return _exact_lsq(A, b)
        akk = Q[k, k]
        alpha = -nrm if akk >= 0.0 else nrm
        v0 = akk - alpha
        vtv = v0 * v0 + s - akk * akk
        Q[k, k] = v0
        for j in range(k + 1, d):
            dot = 0.0
            for i in range(k, m):
                dot += Q[i, k] * Q[i, j]
            f = 2.0 * dot / vtv
            for i in range(k, m):
                Q[i, j] -= f * Q[i, k]
        dot = 0.0
        for i in range(k, m):
            dot += Q[i, k] * y[i]
        f = 2.0 * dot / vtv
        for i in range(k, m):
            y[i] -= f * Q[i, k]
        Q[k, k] = alpha

    # sigma_min / sigma_max >= 1 / (||R||_F ||R^-1||_F)
    rf = 0.0
    for i in range(d):
        for j in range(i, d):
            rf += Q[i, j] * Q[i, j]
    rinv = np.zeros((d, d))
    for j in range(d):
        rinv[j, j] = 1.0 / Q[j, j]
        for i in range(j - 1, -1, -1):
            s = 0.0
            for k in range(i + 1, j + 1):
                s += Q[i, k] * rinv[k, j]
            rinv[i, j] = -s / Q[i, i]
    rif = 0.0
    for i in range(d):
        for j in range(i, d):
            rif += rinv[i, j] * rinv[i, j]
    bound = 1.0 / np.sqrt(rf * rif)
    if not bound > RANK_RTOL:
        return _exact_lsq(A, b)

    w = np.zeros(d)
    for i in range(d):
        s = 0.0
        for j in range(i, d):
            s += rinv[i, j] * y[j]
        w[i] = s
    return w, True


@njit(cache=True)
def gather_rows(U, idx):
    m = idx.shape[0]
    d = U.shape[1]
    out = np.empty((m, d))
    for i in range(m):
        for j in range(d):
            out[i, j] = U[idx[i], j]
    return out


@njit(cache=True)
def grouse_update(U, idx, vals, eta, min_count, residual_tol, skip_rank_deficient):
    """One GROUSE step on U in place.

    Returns (status, w, p_norm, r_norm, v_norm, sigma). U is modified only
    when status == UPDATED.
    """
    n, d = U.shape
    m = idx.shape[0]
    vv = 0.0
    for i in range(m):
        vv += vals[i] * vals[i]
    v_norm = np.sqrt(vv)
    w = np.zeros(d)
    if not np.isfinite(v_norm):
        return NON_FINITE, w, 0.0, 0.0, v_norm, 0.0
    if m == 0:
        return TOO_FEW_SAMPLES, w, 0.0, 0.0, 0.0, 0.0

    UO = gather_rows(U, idx)
    w, rank_ok = masked_lsq(UO, vals)

    p = np.zeros(n)
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += U[i, j] * w[j]
        p[i] = s
    r = np.empty(m)
    rr = 0.0
    for i in range(m):
        r[i] = vals[i] - p[idx[i]]
        rr += r[i] * r[i]
    pp = 0.0
    for i in range(n):
        pp += p[i] * p[i]
    ww = 0.0
    for j in range(d):
        ww += w[j] * w[j]
    r_norm = np.sqrt(rr)
    p_norm = np.sqrt(pp)
    w_norm = np.sqrt(ww)
    sigma = r_norm * p_norm

    if not m > min_count:
        return TOO_FEW_SAMPLES, w, p_norm, r_norm, v_norm, sigma
    if not rank_ok and skip_rank_deficient:
        return RANK_DEFICIENT, w, p_norm, r_norm, v_norm, sigma
    if abs(p_norm - w_norm) > 1e-6 * w_norm:
        return NORM_DRIFT, w, p_norm, r_norm, v_norm, sigma
    if not sigma > residual_tol * vv:
        return NEGLIGIBLE_RESIDUAL, w, p_norm, r_norm, v_norm, sigma

    theta = sigma * eta
    a = (np.cos(theta) - 1.0) / p_norm
    b = np.sin(theta) / r_norm
    wt = np.empty(d)
    for j in range(d):
        wt[j] = w[j] / w_norm
    for i in range(n):
        ap = a * p[i]
        for j in range(d):
            U[i, j] += ap * wt[j]
    for i in range(m):
        br = b * r[i]
        row = idx[i]
        for j in range(d):
            U[row, j] += br * wt[j]
    return UPDATED, w, p_norm, r_norm, v_norm, sigma
