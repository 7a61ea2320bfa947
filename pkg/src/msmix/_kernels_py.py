"""Pure-numpy implementations of the hot batched kernels.

Two iterative solves dominate the runtime of both the simulator and the
randomized verification sweeps: the implicit pressure equation
sum_i g_i'(p) * rho_i = 1 and the normalisation root
sum_j a_j * chi**m_j = 1.  Both are solved here in logarithmic variables,
where the residuals are convex and a one-sided Newton iteration converges
monotonically without damping:

* pressure: f(t) = sum_j rho_j * g_j'(exp(t)) - 1 is decreasing and convex
  in t = ln p (each ln g' is piecewise concave-free: affine or convex
  quadratic), so Newton from any point with f > 0 stays on that side;
* chi: L(t) = logsumexp(log_a + m*t) is increasing and convex in t = ln chi,
  so Newton descends monotonically from the upper Lemma bound.

The compiled extension mirrors these routines element-wise; this module is
the import-time fallback and the reference in the backend-agreement tests.
"""

import math

import numpy as np

from .errors import NoConvergence, NonpositiveDensity
from .gibbs import LAW_BLENDED, LAW_LOG

BACKEND_NAME = "python"

_LN8 = math.log(8.0)


def _gp_dgpdt(kind, params, p, t):
    """g' and its log-pressure derivative g' * l'(t); overflow-safe."""
    p0, vbar0, t0, t1, y0, kappa, d1 = params
    if kind == LAW_LOG:
        gp = p0 * vbar0 / p
        return gp, -gp
    u = t - t0
    width = t1 - t0
    y1 = y0 - width + kappa * width * width
    ell = np.where(t <= t0, y0 - u, np.where(t >= t1, y1 + d1 * (t - t1), y0 - u + kappa * u * u))
    ellp = np.where(t <= t0, -1.0, np.where(t >= t1, d1, -1.0 + 2.0 * kappa * u))
    gp = np.exp(ell)
    return gp, gp * ellp


def _volume(kind, params, rho, t):
    """V(p, rho) and dV/dt at p = exp(t), for active rows."""
    p = np.exp(t)
    vol = np.zeros_like(t)
    dvol = np.zeros_like(t)
    for j in range(rho.shape[1]):
        gp, dgp = _gp_dgpdt(kind[j], params[j], p, t)
        vol += gp * rho[:, j]
        dvol += dgp * rho[:, j]
    return vol, dvol


def pressure_batch(kind, params, rho, tol=1e-12, max_iter=200):
    """Solve sum_j g_j'(p) rho_j = 1 row-wise; returns pressures, shape (n,)."""
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 2:
        raise ValueError("rho must have shape (n, N)")
    if not np.all(np.isfinite(rho)) or np.any(rho < 0.0) or np.any(rho.sum(axis=1) <= 0.0):
        raise NonpositiveDensity("densities must be finite, nonnegative, with positive total")
    n = rho.shape[0]
    p0 = params[0][0]
    t = np.full(n, math.log(p0))
    f, _ = _volume(kind, params, rho, t)
    f -= 1.0

    # Walk each row to a point with f > 0 at most one octave step below the
    # root: upward rows remember their last positive point, downward rows
    # stop at the first one.
    start = t.copy()
    idx = np.where(f > 0.0)[0]
    for _ in range(700):
        if idx.size == 0:
            break
        start[idx] = t[idx]
        t[idx] += _LN8
        fi, _ = _volume(kind, params, rho[idx], t[idx])
        idx = idx[fi - 1.0 > 0.0]
    else:
        raise NoConvergence("pressure bracket expansion failed (upward)")
    idx = np.where(f <= 0.0)[0]
    for _ in range(700):
        if idx.size == 0:
            break
        t[idx] -= _LN8
        fi, _ = _volume(kind, params, rho[idx], t[idx])
        done = fi - 1.0 > 0.0
        start[idx[done]] = t[idx[done]]
        idx = idx[~done]
    else:
        raise NoConvergence("pressure bracket expansion failed (downward)")

    t = start
    active = np.arange(n)
    for _ in range(max_iter):
        vol, dvol = _volume(kind, params, rho[active], t[active])
        f = vol - 1.0
        keep = np.abs(f) > tol
        if not keep.any():
            return np.exp(t)
        sub = active[keep]
        t[sub] -= (f[keep] / dvol[keep])
        active = sub
    vol, _ = _volume(kind, params, rho[active], t[active])
    raise NoConvergence(
        "pressure iteration exceeded max_iter",
        best=np.exp(t),
        residual=float(np.abs(vol - 1.0).max()),
    )


def chi_root_batch(log_a, m, tol=1e-13, max_iter=200):
    """Solve logsumexp(log_a + m*t) = 0 row-wise; returns t = ln(chi)."""
    log_a = np.asarray(log_a, dtype=float)
    m = np.asarray(m, dtype=float)
    if log_a.ndim != 2:
        raise ValueError("log_a must have shape (n, N)")
    if np.any(np.all(np.isneginf(log_a), axis=1)):
        raise NonpositiveDensity("all coefficients vanish in a chi equation")

    s = _logsumexp(log_a)
    t = np.maximum(0.0, -s / m.min())
    active = np.arange(log_a.shape[0])
    for _ in range(max_iter):
        z = log_a[active] + np.outer(t[active], m)
        zmax = z.max(axis=1)
        w = np.exp(z - zmax[:, None])
        sw = w.sum(axis=1)
        lval = zmax + np.log(sw)
        lslope = (w @ m) / sw
        step = lval / lslope
        keep = (np.abs(lval) > tol) & (np.abs(step) > 2e-15 * (1.0 + np.abs(t[active])))
        t[active] -= step
        if not keep.any():
            return t
        active = active[keep]
    raise NoConvergence("chi iteration exceeded max_iter", best=t)


def _logsumexp(z):
    zmax = np.max(z, axis=1)
    zmax = np.where(np.isfinite(zmax), zmax, 0.0)
    return zmax + np.log(np.exp(z - zmax[:, None]).sum(axis=1))
