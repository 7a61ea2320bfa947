"""Pressure-parametrized change of variables on the state space.

Every interior state rho splits uniquely into a pressure s and a normalized
state w on the reference hypersurface

    S0 = { w > 0 : vbar0 . w = 1 },

connected by the explicit curve family

    X_k(s, w) = m_k a_k chi^{m_k} / sum_i g_i'(s) m_i a_i chi^{m_i},
    a_k = x_k(w) * exp(m_k (g_k(p0) - g_k(s))),

where chi is the unique positive root of sum_j a_j chi^{m_j} = 1.  The
curves follow the kernel direction of the free-energy Hessian, are
parametrized by pressure (p(X(s, w)) = s identically), and leave the
projection of the potentials onto {ones}^perp invariant, which is what
makes w a useful parabolic variable.

All exponentials are assembled in log space with the chi equation solved in
t = ln chi, so the maps stay finite across extreme pressure decades; the
products a_k chi^{m_k} themselves always lie in (0, 1].
"""

from typing import NamedTuple

import numpy as np

from . import _backend, thermo
from .errors import NoConvergence, NonpositiveDensity
from .thermo import SpeciesSet

__all__ = [
    "ChartPoint",
    "chi_root",
    "forward_chart",
    "inverse_chart",
    "quotients",
    "quotients_from_state",
    "pressure_of_density",
    "reduced_potential",
]


class ChartPoint(NamedTuple):
    s: float
    w: np.ndarray


def require_normalized(sp: SpeciesSet, w, tol=1e-12):
    w = np.asarray(w, dtype=float)
    flat = w[None, :] if w.ndim == 1 else w
    if np.any(flat <= 0.0):
        raise NonpositiveDensity("w must be strictly positive")
    defect = np.abs(flat @ sp.vbar0_vec - 1.0).max()
    if defect > tol:
        raise ValueError(f"w is off the reference surface by {defect:.3e}")
    return w


def normalize_to_surface(sp: SpeciesSet, w):
    """Rescale a positive vector onto the reference hypersurface."""
    w = np.asarray(w, dtype=float)
    return w / (w @ sp.vbar0_vec)


def chi_root(a, m, tol=1e-13):
    """Unique positive root chi of sum_j a_j chi^{m_j} = 1.

    Satisfies the two-sided bound
    min(1, 1/|a|_1)**(1/min m) <= chi <= max(1, 1/|a|_1)**(1/min m).
    """
    a = np.asarray(a, dtype=float)
    m = np.asarray(m, dtype=float)
    if np.any(a < 0.0) or a.max() <= 0.0:
        raise ValueError("coefficients must be nonnegative with positive sum")
    with np.errstate(divide="ignore"):
        log_a = np.log(a)
    t = _backend.chi_root_batch(log_a[None, :], m, tol=tol)
    return float(np.exp(t[0]))


def _delta_g(sp: SpeciesSet, s):
    """g(p0) - g(s) per species, shape (n, N)."""
    return sp.g_all(np.full_like(np.asarray(s, dtype=float), sp.p0)) - sp.g_all(s)


def forward_chart_batch(sp: SpeciesSet, s, w):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    w = np.asarray(w, dtype=float)
    w = w[None, :] if w.ndim == 1 else w
    _, xw, _, _ = thermo.fractions_batch(sp, w)
    log_a = np.log(xw) + sp.m * _delta_g(sp, s)
    t = _backend.chi_root_batch(log_a, sp.m)
    v = np.exp(log_a + np.outer(t, sp.m))          # a_k chi^{m_k}, sums to 1
    denom = np.einsum("nj,nj->n", sp.gp_all(s), sp.m * v)
    return sp.m * v / denom[:, None]


def forward_chart(sp: SpeciesSet, s: float, w):
    """The state X(s, w) at pressure s on the curve through w."""
    if s <= 0.0:
        raise NonpositiveDensity("pressure parameter must be positive")
    w = require_normalized(sp, w)
    return forward_chart_batch(sp, np.array([s]), w[None, :])[0]


def inverse_chart_batch(sp: SpeciesSet, rho, p=None):
    rho = np.asarray(rho, dtype=float)
    rho = rho[None, :] if rho.ndim == 1 else rho
    if p is None:
        p = thermo.pressure_batch(sp, rho)
    _, x, _, _ = thermo.fractions_batch(sp, rho)
    log_b = np.log(x) - sp.m * _delta_g(sp, p)
    t = _backend.chi_root_batch(log_b, sp.m)
    vb = np.exp(log_b + np.outer(t, sp.m))
    denom = np.einsum("j,nj->n", sp.vbar0_vec * sp.m, vb)
    return p, sp.m * vb / denom[:, None]


def inverse_chart(sp: SpeciesSet, rho) -> ChartPoint:
    """Chart coordinates (s, w) of an interior state."""
    p, w = inverse_chart_batch(sp, np.asarray(rho, dtype=float)[None, :])
    return ChartPoint(float(p[0]), w[0])


def log_quotient_envelopes(sp: SpeciesSet, s):
    """Logarithms of the explicit envelopes bounding X_k(s, w) / w_k.

    Returns (log_upper, log_lower), each of shape (n, N); the bounds depend
    on s only.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    dg = _delta_g(sp, s)
    mdg = sp.m * dg
    gp = sp.gp_all(s)
    m_ratio = sp.m.max() / sp.m.min()
    base_up = np.log(sp.m.max() * sp.vbar0_vec.max() / sp.m.min()) - np.log(gp.min(axis=1))
    tail_up = m_ratio * np.maximum(0.0, -mdg.min(axis=1))
    log_upper = base_up[:, None] + mdg + tail_up[:, None]
    base_lo = np.log(sp.m.min() * sp.vbar0_vec.min() / sp.m.max()) - np.log(gp.max(axis=1))
    lse = _logsumexp(mdg)
    tail_lo = m_ratio * np.minimum(0.0, -lse)
    log_lower = base_lo[:, None] + mdg + tail_lo[:, None]
    return log_upper, log_lower


def _logsumexp(z):
    zmax = z.max(axis=1)
    return zmax + np.log(np.exp(z - zmax[:, None]).sum(axis=1))


def quotients(sp: SpeciesSet, s: float, w):
    """Per-species quotients F_k = X_k(s, w) / w_k and their s-envelopes.

    Returns (F, F_upper, F_lower) with F_lower <= F <= F_upper entrywise.
    """
    w = require_normalized(sp, w)
    x = forward_chart(sp, s, w)
    log_up, log_lo = log_quotient_envelopes(sp, np.array([s]))
    return x / w, np.exp(log_up[0]), np.exp(log_lo[0])


def quotients_from_state(sp: SpeciesSet, rho):
    """The quotients rho_i / w_i expressed through (p, x) of the state itself.

    Evaluates the equivalent pressure-composition form of F rather than
    dividing by the inverse chart; used for cross-checking and by the
    friction scaling.
    """
    rho = np.asarray(rho, dtype=float)
    rho2 = rho[None, :] if rho.ndim == 1 else rho
    p = thermo.pressure_batch(sp, rho2)
    _, x, _, _ = thermo.fractions_batch(sp, rho2)
    f = fquotient_px_batch(sp, p, x)
    return f[0] if rho.ndim == 1 else f


def fquotient_px_batch(sp: SpeciesSet, p, x):
    """F as a function of pressure and number fractions, shape (n, N).

    Finite also on boundary compositions (zero entries in x allowed).
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    x = np.asarray(x, dtype=float)
    x = x[None, :] if x.ndim == 1 else x
    dg = _delta_g(sp, p)
    with np.errstate(divide="ignore"):
        log_b = np.log(x) - sp.m * dg
    t = _backend.chi_root_batch(log_b, sp.m)
    vb = np.exp(log_b + np.outer(t, sp.m))         # b_k chi^{m_k}, sums to 1
    numer = np.einsum("j,nj->n", sp.vbar0_vec * sp.m, vb)
    denom = np.einsum("nj,nj->n", sp.gp_all(p), sp.m * x)
    ratio = np.exp(sp.m * (t[:, None] - dg))       # exp(-m dg) chi^m = vb / x
    return numer[:, None] / (denom[:, None] * ratio)


def reduced_potential(sp: SpeciesSet, w):
    """Potentials of the normalized state: g(p0) + ln(x(w)) / m.

    Through the chart invariance these carry all information about the
    potentials of X(s, w) transverse to the ones-direction.
    """
    w = require_normalized(sp, w)
    flat = w[None, :] if w.ndim == 1 else w
    _, x, _, _ = thermo.fractions_batch(sp, flat)
    out = sp.g_all(np.full(flat.shape[0], sp.p0)) + np.log(x) / sp.m
    return out[0] if w.ndim == 1 else out


def pressure_of_density(sp: SpeciesSet, varrho: float, w, tol=1e-10, max_iter=200):
    """The pressure s at which the curve through w reaches total density varrho.

    Strictly increasing in varrho; solved by bracketed Newton on
    X(s, w) . ones = varrho with the exact curve-tangent slope.
    """
    if not varrho > 0.0:
        raise NonpositiveDensity("total density must be positive")
    w = require_normalized(sp, w)
    w2 = w[None, :]

    def total(s):
        return float(forward_chart_batch(sp, np.array([s]), w2)[0].sum())

    s_lo = s_hi = sp.p0
    t_lo = t_hi = total(sp.p0)
    for _ in range(400):
        if t_lo < varrho:
            break
        s_lo /= 8.0
        t_lo = total(s_lo)
    else:
        raise NoConvergence("no lower pressure bracket for the density")
    for _ in range(400):
        if t_hi > varrho:
            break
        s_hi *= 8.0
        t_hi = total(s_hi)
    else:
        raise NoConvergence("no upper pressure bracket for the density")

    s = np.sqrt(s_lo * s_hi)
    for _ in range(max_iter):
        x = forward_chart_batch(sp, np.array([s]), w2)[0]
        tot = float(x.sum())
        if abs(tot - varrho) <= tol * varrho:
            return s
        if tot < varrho:
            s_lo = s
        else:
            s_hi = s
        slope = float(thermo.kernel_direction(sp, x).sum()) / tot
        cand = s - (tot - varrho) / slope
        s = cand if s_lo < cand < s_hi else np.sqrt(s_lo * s_hi)
    raise NoConvergence("pressure_of_density did not converge", best=s)


def integrate_chart_ode(sp: SpeciesSet, s_target, w, n_steps=512):
    """RK4 integration of the chart curves; an oracle, not a production path.

    Integrates dX/ds = u(X) / (X . ones) from (p0, w) to s_target in
    log-spaced pressure steps, batched over rows of (s_target, w).
    """
    s_target = np.atleast_1d(np.asarray(s_target, dtype=float))
    w = np.asarray(w, dtype=float)
    w = w[None, :] if w.ndim == 1 else w
    lnr = np.log(s_target / sp.p0)

    def rhs(xi, x):
        s = sp.p0 * np.exp(xi * lnr)
        u = thermo.kernel_direction_batch(sp, x)
        return (u / x.sum(axis=1)[:, None]) * (s * lnr)[:, None]

    x = w.copy()
    h = 1.0 / n_steps
    for k in range(n_steps):
        xi = k * h
        k1 = rhs(xi, x)
        k2 = rhs(xi + 0.5 * h, x + 0.5 * h * k1)
        k3 = rhs(xi + 0.5 * h, x + 0.5 * h * k2)
        k4 = rhs(xi + h, x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x
