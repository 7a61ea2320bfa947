"""Friction laws, the singular flux matrix, and its generalized inverse.

Pairwise friction coefficients f_ik close the diffusion system

    B(rho) J = -d,   b_ik = -f_ik y_i (i != k),   b_ii = sum_{j!=i} f_ij y_j,

whose matrix is singular with left kernel {ones} and right kernel {y}.  The
unique solution with vanishing column sums is obtained through the bordered
matrix B_alpha = B + alpha * y (x) ones, whose inverse differs from the
generalized (Drazin/group) inverse of B exactly by (1/alpha) y (x) ones, so
the solution is independent of alpha.

At low pressure the friction is tied to the singular scaling sigma_ik(p, x)
built from the chart quotients; the implemented law

    f_ik = f_c * (psi(p) * sigma_ik + (1 - psi(p)))

with a C2 smoothstep psi equal to 1 below (1 - switch_width) * p1 and 0
above p1 is the minimal construction with two-sided sigma bounds below p1
and constant bounds above.  The sandwich constants f0..f3 are measured on a
sampling of the switching band at construction and stored with a safety
margin, so the certificates checked by the verification harness are
concrete numbers rather than assumptions.
"""

from dataclasses import dataclass, field

import numpy as np

from . import chart, thermo
from .errors import NonpositiveDensity, SingularBeyondKernel
from .numerics import min_symmetric_eigenvalue
from .thermo import SpeciesSet

__all__ = [
    "FrictionModel",
    "sigma",
    "friction",
    "build_B",
    "driving_forces",
    "solve_flux",
    "drazin_apply",
    "onsager_matrix",
    "regularized_onsager",
    "dissipation_and_bounds",
]


def sigma_batch(sp: SpeciesSet, p, x):
    """Singular friction scaling sigma_ik, shape (n, N, N)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    x = np.asarray(x, dtype=float)
    x = x[None, :] if x.ndim == 1 else x
    dg = sp.g_all(np.full(p.shape, sp.p0)) - sp.g_all(p)
    with np.errstate(divide="ignore"):
        log_x = np.log(x)
    log_b = log_x - sp.m * dg
    t = chart._backend.chi_root_batch(log_b, sp.m)
    vb = np.exp(log_b + np.outer(t, sp.m))             # x e^{-m dg} chi^m
    q = np.exp(sp.m * (dg - t[:, None]))               # e^{m dg} chi^{-m}
    mx = np.einsum("j,nj->n", sp.m, x)
    mgx = np.einsum("nj,nj->n", sp.gp_all(p), sp.m * x)
    top = np.einsum("j,nj->n", sp.vbar0_vec * sp.m, vb)
    bot = np.einsum("j,nj->n", sp.m, x * q)
    s0 = (mx / mgx) * (top / bot)
    return s0[:, None, None] * np.einsum("ni,nk->nik", q, q)


def sigma(sp: SpeciesSet, p: float, x):
    """Singular scaling sigma_ik(p, x); symmetric, positive, diagonal unused."""
    if p <= 0.0:
        raise NonpositiveDensity("pressure must be positive")
    return sigma_batch(sp, np.array([p]), np.asarray(x, dtype=float)[None, :])[0]


def sigma_chart_form(sp: SpeciesSet, p: float, x):
    """sigma expressed through the chart quotients; consistency oracle."""
    x = np.asarray(x, dtype=float)
    f = chart.fquotient_px_batch(sp, np.array([p]), x[None, :])[0]
    mx = sp.m @ x
    return np.einsum("i,k->ik", f, f) * mx / (f @ (sp.m * x))


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0)


@dataclass(frozen=True, eq=False)
class FrictionModel:
    """Pairwise friction law with a low-pressure singular regime.

    The switch psi blends from the singular branch (p below
    (1 - switch_width) * p1) to the constant plateau f_c (p above p1).
    ``constant`` selects the diagnostic law f == f_c at all pressures,
    deliberately violating the low-pressure bounds.
    """

    species: SpeciesSet
    f_c: float = 1.0
    p1: float = 0.25
    switch_width: float = 0.5
    constant: bool = False
    f0: float = field(init=False)
    f1: float = field(init=False)
    f2: float = field(init=False)
    f3: float = field(init=False)
    sigma_band: tuple = field(init=False)

    def __post_init__(self):
        if self.f_c <= 0.0 or self.p1 <= 0.0:
            raise ValueError("f_c and p1 must be positive")
        if not 0.0 < self.switch_width < 1.0:
            raise ValueError("switch_width must lie in (0, 1)")
        sp = self.species
        n = sp.n_species
        rng = np.random.default_rng(20230917)
        comps = [np.full(n, 1.0 / n)]
        comps.extend(np.eye(n))
        for i in range(n):
            for k in range(i + 1, n):
                mid = np.zeros(n)
                mid[i] = mid[k] = 0.5
                comps.append(mid)
        comps.append(rng.dirichlet(np.ones(n), size=256))
        comps = np.vstack([np.atleast_2d(c) for c in comps])
        band = np.geomspace((1.0 - self.switch_width) * self.p1, self.p1, 48)
        lo, hi = np.inf, -np.inf
        off = ~np.eye(n, dtype=bool)
        for p in band:
            s = sigma_batch(sp, np.full(comps.shape[0], p), comps)
            vals = s[:, off]
            lo = min(lo, float(vals.min()))
            hi = max(hi, float(vals.max()))
        object.__setattr__(self, "sigma_band", (lo, hi))
        # Factor-4 margin over the sampled band extremes keeps the stored
        # sandwich constants valid on unseen compositions.
        object.__setattr__(self, "f0", self.f_c * min(1.0, 1.0 / (4.0 * hi)))
        object.__setattr__(self, "f1", self.f_c * max(1.0, 4.0 / lo))
        object.__setattr__(self, "f2", self.f_c)
        object.__setattr__(self, "f3", self.f_c)

    def psi(self, p):
        lo = (1.0 - self.switch_width) * self.p1
        return 1.0 - _smoothstep((np.asarray(p, dtype=float) - lo) / (self.p1 - lo))


def friction_batch(model: FrictionModel, p, x):
    p = np.atleast_1d(np.asarray(p, dtype=float))
    x = np.asarray(x, dtype=float)
    x = x[None, :] if x.ndim == 1 else x
    n = model.species.n_species
    out = np.full((p.size, n, n), model.f_c)
    if model.constant:
        return out
    psi = model.psi(p)
    active = psi > 0.0
    if np.any(active):
        s = sigma_batch(model.species, p[active], x[active])
        pa = psi[active][:, None, None]
        out[active] = model.f_c * (pa * s + (1.0 - pa))
    return out


def friction(model: FrictionModel, p: float, x):
    """Friction coefficient matrix f_ik(p, x); diagonal unused."""
    if p <= 0.0:
        raise NonpositiveDensity("pressure must be positive")
    return friction_batch(model, np.array([p]), np.asarray(x, dtype=float)[None, :])[0]


def build_B_batch(sp: SpeciesSet, rho, model: FrictionModel, p=None, f=None):
    rho = np.asarray(rho, dtype=float)
    rho = rho[None, :] if rho.ndim == 1 else rho
    y, x, _, _ = thermo.fractions_batch(sp, rho)
    if f is None:
        if p is None:
            p = thermo.pressure_batch(sp, rho)
        f = friction_batch(model, p, x)
    n = sp.n_species
    ii = np.arange(n)
    f_off = f.copy()
    f_off[:, ii, ii] = 0.0
    b = -f_off * y[:, :, None]
    b[:, ii, ii] = np.einsum("nij,nj->ni", f_off, y)
    return b


def build_B(sp: SpeciesSet, rho, model: FrictionModel):
    """Flux matrix B(rho); left kernel {ones}, right kernel {y}."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise NonpositiveDensity("state must lie in the open positive cone")
    return build_B_batch(sp, rho[None, :], model)[0]


def driving_forces(sp: SpeciesSet, rho, grad_mu, b=None):
    """d_i = rho_i sum_k (delta_ik - y_k)(grad mu_k - b_k); columns sum to zero."""
    rho = np.asarray(rho, dtype=float)
    grad_mu = np.asarray(grad_mu, dtype=float)
    if b is None:
        b = np.zeros_like(grad_mu)
    y, _, _, _ = thermo.fractions_batch(sp, rho[None, :])
    force = grad_mu - np.asarray(b, dtype=float)
    return rho[:, None] * (force - y[0] @ force)


def solve_flux(B, d, y, alpha=None):
    """Solve B J = -d for the unique J with vanishing column sums.

    Requires column sums of d to vanish (to 1e-10 relative); uses the
    bordered matrix B + alpha * y (x) ones with alpha = trace(B)/N by
    default.  The result is independent of alpha.
    """
    B = np.asarray(B, dtype=float)
    d = np.asarray(d, dtype=float)
    y = np.asarray(y, dtype=float)
    colsum = np.abs(d.sum(axis=0)).max()
    if colsum > 1e-10 * (1.0 + np.abs(d).max()):
        raise ValueError(f"driving-force columns must sum to zero, defect {colsum:.3e}")
    if alpha is None:
        alpha = np.trace(B) / B.shape[0]
    try:
        j = np.linalg.solve(B + alpha * np.outer(y, np.ones(B.shape[0])), -d)
    except np.linalg.LinAlgError as exc:
        raise SingularBeyondKernel("bordered flux matrix is singular") from exc
    return j


def drazin_apply(B, y, rhs, alpha=None):
    """Apply the generalized inverse of B to columns of rhs."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    if alpha is None:
        alpha = np.trace(B) / n
    try:
        z = np.linalg.solve(B + alpha * np.outer(y, np.ones(n)), rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularBeyondKernel("bordered flux matrix is singular") from exc
    return z - np.outer(y, np.ones(n) @ np.asarray(rhs, dtype=float)) / alpha


def onsager_matrix_batch(sp: SpeciesSet, rho, model: FrictionModel, p=None):
    rho = np.asarray(rho, dtype=float)
    rho = rho[None, :] if rho.ndim == 1 else rho
    if p is None:
        p = thermo.pressure_batch(sp, rho)
    y, _, _, _ = thermo.fractions_batch(sp, rho)
    b = build_B_batch(sp, rho, model, p=p)
    n = sp.n_species
    alpha = np.einsum("nii->n", b) / n
    bordered = b + alpha[:, None, None] * np.einsum("ni,k->nik", y, np.ones(n))
    ii = np.arange(n)
    rdiag = np.zeros_like(b)
    rdiag[:, ii, ii] = rho
    try:
        z = np.linalg.solve(bordered, rdiag)
    except np.linalg.LinAlgError as exc:
        raise SingularBeyondKernel("bordered flux matrix is singular") from exc
    return z - np.einsum("ni,nk->nik", y, rho) / alpha[:, None, None]


def onsager_matrix(sp: SpeciesSet, rho, model: FrictionModel):
    """M = B^D R: symmetric positive semidefinite with kernel {ones}."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0.0):
        raise NonpositiveDensity("state must lie in the open positive cone")
    return onsager_matrix_batch(sp, rho[None, :], model)[0]


def regularized_onsager(M, sigma_reg: float):
    """M + sigma * I, strictly positive definite for sigma > 0."""
    if sigma_reg < 0.0:
        raise ValueError("sigma_reg must be nonnegative")
    M = np.asarray(M, dtype=float)
    return M + sigma_reg * np.eye(M.shape[0])


def projector(y):
    """P(y) = I - ones (x) y."""
    y = np.asarray(y, dtype=float)
    return np.eye(y.size) - np.outer(np.ones(y.size), y)


def dissipation_and_bounds(sp: SpeciesSet, rho, model: FrictionModel, grad_mu, b=None):
    """Diffusive dissipation and the two pressure-regime certificates.

    Returns (zeta, cert_low, cert_normal) where

    * zeta = -J : (grad mu - b) is the entropy production, nonnegative;
    * cert_low = lambda_min(B^D R - (1/f1) P^T W P), the low-pressure
      matrix certificate (meaningful for p <= p1);
    * cert_normal = (2/f2) |rho| zeta - |J|^2, the plateau-regime flux
      bound (meaningful for p > p1).
    """
    rho = np.asarray(rho, dtype=float)
    grad_mu = np.asarray(grad_mu, dtype=float)
    if b is None:
        b = np.zeros_like(grad_mu)
    y, _, _, _ = thermo.fractions_batch(sp, rho[None, :])
    y = y[0]
    bm = build_B(sp, rho, model)
    d = driving_forces(sp, rho, grad_mu, b)
    j = solve_flux(bm, d, y)
    force = grad_mu - np.asarray(b, dtype=float)
    zeta = -float(np.sum(j * force))

    m_ons = onsager_matrix(sp, rho, model)
    _, w = chart.inverse_chart(sp, rho)
    p_mat = projector(y)
    low = m_ons - (p_mat.T * w) @ p_mat / model.f1
    cert_low = min_symmetric_eigenvalue(0.5 * (low + low.T))
    cert_normal = (2.0 / model.f2) * float(np.linalg.norm(rho)) * zeta - float(np.sum(j * j))
    return zeta, cert_low, cert_normal


def dissipation_from_wgrad(sp: SpeciesSet, model: FrictionModel, s: float, w, grad_w):
    """Dissipation driven by a prescribed gradient of the normalized state.

    grad_w (shape (N, k)) must be tangent to the reference surface
    (vbar0 . columns = 0).  The potential gradient consistent with it is
    D2h(w) grad_w up to the ones-direction, which the kinetic matrix
    annihilates.  Returns (zeta, bound_state, bound_uniform) where both
    bounds are rigorous lower bounds for zeta in the low-pressure regime:

    * bound_state = (1/(4 f1)) (w . ones) sum_i yhat_i(w) |grad mu^w_i|^2,
      the state-dependent chain through the weighted projection;
    * bound_uniform = (c2 / f1) |grad_w|^2 with the conservative constant
      c2 = robust_chain_constant(sp).
    """
    w = chart.require_normalized(sp, w)
    grad_w = np.asarray(grad_w, dtype=float)
    tangency = np.abs(sp.vbar0_vec @ grad_w).max()
    if tangency > 1e-10 * (1.0 + np.abs(grad_w).max()):
        raise ValueError(f"grad_w is not tangent to the surface, defect {tangency:.3e}")
    rho = chart.forward_chart(sp, s, w)
    grad_mu = thermo.hessian(sp, w) @ grad_w
    zeta, _, _ = dissipation_and_bounds(sp, rho, model, grad_mu)

    yw, _, _, _ = thermo.fractions_batch(sp, w[None, :])
    grad_muw = grad_mu  # identical modulo the ones-direction
    bound_state = (w.sum() / (4.0 * model.f1)) * float(
        np.sum(yw[0][:, None] * grad_muw * grad_muw))
    c2 = robust_chain_constant(sp)
    bound_uniform = (c2 / model.f1) * float(np.sum(grad_w * grad_w))
    return zeta, bound_state, bound_uniform


def robust_chain_constant(sp: SpeciesSet) -> float:
    """Conservative constant c2 in zeta >= (c2/f1) |grad w|^2.

    Derived from the chain through the square-root composition variables
    a_i = sqrt(m_i x_i(w)), for which w_i = a_i^2 / (vbar0 . a^2): bounding
    the Jacobian dw/da by its row/column sums gives |grad w| <= c |grad a|
    with a constant depending only on the masses and reference volumes.
    """
    v = sp.vbar0_vec
    m = sp.m
    n = sp.n_species
    vmin, vmax = float(v.min()), float(v.max())
    mmin, mmax = float(m.min()), float(m.max())
    q_min = vmin * mmin
    row = (2.0 / np.sqrt(q_min)) * (1.0 / np.sqrt(vmin) + np.sqrt(v.sum()) / vmin)
    col = (2.0 / np.sqrt(q_min * vmin)) * (1.0 + n * vmax / vmin)
    c1 = row * col
    return 1.0 / (vmax * mmax ** 3 * c1)
