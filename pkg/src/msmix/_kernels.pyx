# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot batched kernels.

Element-wise mirrors of msmix._kernels_py: the implicit pressure solve and
the chi normalisation root, both one-sided Newton iterations on convex
residuals in logarithmic variables.  See the fallback module for the
algorithmic notes; iteration rules here are kept identical so the two
backends agree to rounding.
"""

from libc.math cimport exp, fabs, log

import numpy as np

cimport numpy as cnp

from .errors import NoConvergence, NonpositiveDensity

BACKEND_NAME = "compiled"

cdef double LN8 = log(8.0)
cdef int KIND_LOG = 0


cdef inline void _gp_dgpdt_one(long kind, const double* pr, double p, double t,
                               double* gp_out, double* dgp_out) noexcept nogil:
    # pr layout: [p0, vbar0, t0, t1, y0, kappa, d1]; second output is the
    # log-pressure derivative g' * l'(t), which never overflows.
    cdef double gp, u, width, y1, ell, ellp
    if kind == KIND_LOG:
        gp = pr[0] * pr[1] / p
        gp_out[0] = gp
        dgp_out[0] = -gp
        return
    u = t - pr[2]
    width = pr[3] - pr[2]
    if t <= pr[2]:
        ell = pr[4] - u
        ellp = -1.0
    elif t >= pr[3]:
        y1 = pr[4] - width + pr[5] * width * width
        ell = y1 + pr[6] * (t - pr[3])
        ellp = pr[6]
    else:
        ell = pr[4] - u + pr[5] * u * u
        ellp = -1.0 + 2.0 * pr[5] * u
    gp = exp(ell)
    gp_out[0] = gp
    dgp_out[0] = gp * ellp


cdef inline double _vol_row(const long* kind, const double* params, int pw,
                            const double* rho, int nsp, double t,
                            double* dvol) noexcept nogil:
    cdef double p = exp(t)
    cdef double vol = 0.0, dv = 0.0, gp = 0.0, dgp = 0.0
    cdef int j
    for j in range(nsp):
        _gp_dgpdt_one(kind[j], params + j * pw, p, t, &gp, &dgp)
        vol += gp * rho[j]
        dv += dgp * rho[j]
    dvol[0] = dv
    return vol


def pressure_batch(cnp.ndarray[long, ndim=1] kind,
                   cnp.ndarray[double, ndim=2] params,
                   rho_in, double tol=1e-12, int max_iter=200):
    """Solve sum_j g_j'(p) rho_j = 1 row-wise; returns pressures, shape (n,)."""
    cdef cnp.ndarray[double, ndim=2] rho = np.ascontiguousarray(rho_in, dtype=np.float64)
    if rho.ndim != 2:
        raise ValueError("rho must have shape (n, N)")
    if not np.all(np.isfinite(rho)) or np.any(rho < 0.0) or np.any(np.asarray(rho).sum(axis=1) <= 0.0):
        raise NonpositiveDensity("densities must be finite, nonnegative, with positive total")
    cdef int n = rho.shape[0]
    cdef int nsp = rho.shape[1]
    cdef int pw = params.shape[1]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double* pr = &params[0, 0]
    cdef long* kd = &kind[0]
    cdef double t, f, dvol, start, worst
    cdef int i, it, ok
    cdef double logp0 = log(params[0, 0])
    worst = 0.0
    ok = 1
    with nogil:
        for i in range(n):
            t = logp0
            f = _vol_row(kd, pr, pw, &rho[i, 0], nsp, t, &dvol) - 1.0
            if f > 0.0:
                start = t
                for it in range(700):
                    start = t
                    t += LN8
                    f = _vol_row(kd, pr, pw, &rho[i, 0], nsp, t, &dvol) - 1.0
                    if f <= 0.0:
                        break
                else:
                    ok = 0
                    break
            else:
                for it in range(700):
                    t -= LN8
                    f = _vol_row(kd, pr, pw, &rho[i, 0], nsp, t, &dvol) - 1.0
                    if f > 0.0:
                        break
                else:
                    ok = 0
                    break
                start = t
            t = start
            for it in range(max_iter):
                f = _vol_row(kd, pr, pw, &rho[i, 0], nsp, t, &dvol) - 1.0
                if fabs(f) <= tol:
                    break
                t -= f / dvol
            else:
                ok = 0
                if fabs(f) > worst:
                    worst = fabs(f)
                break
            out[i] = exp(t)
    if not ok:
        raise NoConvergence("pressure iteration failed", residual=worst)
    return out


def chi_root_batch(log_a_in, cnp.ndarray[double, ndim=1] m,
                   double tol=1e-13, int max_iter=200):
    """Solve logsumexp(log_a + m*t) = 0 row-wise; returns t = ln(chi)."""
    cdef cnp.ndarray[double, ndim=2] log_a = np.ascontiguousarray(log_a_in, dtype=np.float64)
    if log_a.ndim != 2:
        raise ValueError("log_a must have shape (n, N)")
    if np.any(np.all(np.isneginf(log_a), axis=1)):
        raise NonpositiveDensity("all coefficients vanish in a chi equation")
    cdef int n = log_a.shape[0]
    cdef int nsp = log_a.shape[1]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double min_m = np.min(m)
    cdef double* mm = &m[0]
    cdef double t, zmax, z, sw, swm, lval, step, s
    cdef int i, j, it, ok
    ok = 1
    with nogil:
        for i in range(n):
            # s = logsumexp(log_a) gives the Lemma bracket [min(0, -s/min_m), max(...)]
            zmax = log_a[i, 0]
            for j in range(1, nsp):
                if log_a[i, j] > zmax:
                    zmax = log_a[i, j]
            s = 0.0
            for j in range(nsp):
                s += exp(log_a[i, j] - zmax)
            s = zmax + log(s)
            t = -s / min_m
            if t < 0.0:
                t = 0.0
            for it in range(max_iter):
                zmax = log_a[i, 0] + mm[0] * t
                for j in range(1, nsp):
                    z = log_a[i, j] + mm[j] * t
                    if z > zmax:
                        zmax = z
                sw = 0.0
                swm = 0.0
                for j in range(nsp):
                    z = exp(log_a[i, j] + mm[j] * t - zmax)
                    sw += z
                    swm += mm[j] * z
                lval = zmax + log(sw)
                step = lval * sw / swm
                t -= step
                if fabs(lval) <= tol or fabs(step) <= 2e-15 * (1.0 + fabs(t)):
                    break
            else:
                ok = 0
                break
            out[i] = t
    if not ok:
        raise NoConvergence("chi iteration exceeded max_iter")
    return out
