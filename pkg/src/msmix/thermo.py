"""Ideal-mixture equilibrium thermodynamics.

A mixture of N species is described by the vector rho of partial mass
densities.  The pressure is defined implicitly by the volume identity
sum_i g_i'(p) rho_i = 1, the chemical potentials split into a pressure part
and a mixing part,

    mu_i = g_i(p(rho)) + ln(x_i(rho)) / m_i,

and the free energy density h(rho) = rho . mu - p(rho) satisfies the Euler
identity by construction.  The Hessian of h, its closed-form inverse, and
the direction u solving D2h(rho) u = ones are the workhorses of the chart
and transport modules.

Temperature is constant and scaled out: k_B * theta = 1, and the mixing
entropy carries unit prefactor with zero per-species offsets.

Public functions take a single state vector of shape (N,); the *_batch
variants operate on stacks of states, shape (n, N), and are what the
simulator and the verification sweeps call.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import NoConvergence, NonpositiveDensity, ZeroTotalDensity
from .gibbs import PARAM_WIDTH, BlendedLaw, LogLaw

__all__ = [
    "SpeciesSet",
    "fractions",
    "pressure",
    "pressure_gradient",
    "chem_potentials",
    "free_energy",
    "hessian",
    "hessian_inverse",
    "kernel_direction",
    "dual_state",
]


@dataclass(frozen=True, eq=False)
class SpeciesSet:
    """Immutable description of the species: masses, Gibbs laws, reference.

    All laws must share the reference pressure p0.  vbar0_vec holds the
    reference volumes g_i'(p0).  Instances are safe to share across threads.
    """

    m: np.ndarray
    laws: tuple
    p0: float
    vbar0_vec: np.ndarray = field(init=False)
    _kind: np.ndarray = field(init=False)
    _params: np.ndarray = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "laws", tuple(self.laws))
        if m.ndim != 1 or m.size != len(self.laws):
            raise ValueError("m and laws must have matching length")
        if np.any(m <= 0.0):
            raise ValueError("elementary masses must be positive")
        for law in self.laws:
            if abs(law.p0 - self.p0) > 1e-15 * self.p0:
                raise ValueError("all laws must share the reference pressure p0")
        kind = np.array([law.kind for law in self.laws], dtype=np.int64)
        params = np.zeros((len(self.laws), PARAM_WIDTH))
        for j, law in enumerate(self.laws):
            params[j] = law.pack()
        object.__setattr__(self, "_kind", kind)
        object.__setattr__(self, "_params", np.ascontiguousarray(params))
        object.__setattr__(self, "vbar0_vec", np.array([law.gp(self.p0) for law in self.laws], dtype=float))

    @property
    def n_species(self) -> int:
        return self.m.size

    @property
    def all_log(self) -> bool:
        return all(isinstance(law, LogLaw) for law in self.laws)

    @property
    def alpha_max(self) -> float:
        alphas = [law.alpha for law in self.laws if isinstance(law, BlendedLaw)]
        return max(alphas) if alphas else float("inf")

    @property
    def beta(self) -> float:
        """Shared lower power-regime exponent, the smallest alpha_i."""
        alphas = [law.alpha for law in self.laws if isinstance(law, BlendedLaw)]
        return min(alphas) if alphas else float("inf")

    def g_all(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return np.stack([law.g(p) for law in self.laws], axis=-1)

    def gp_all(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return np.stack([law.gp(p) for law in self.laws], axis=-1)

    def gpp_all(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return np.stack([law.gpp(p) for law in self.laws], axis=-1)


def _as_states(rho):
    rho = np.asarray(rho, dtype=float)
    if rho.ndim == 1:
        return rho[None, :], True
    return rho, False


def _require_interior(rho):
    if not np.all(np.isfinite(rho)) or np.any(rho <= 0.0):
        raise NonpositiveDensity("state must lie in the open positive cone")


def fractions_batch(sp: SpeciesSet, rho):
    rho, _ = _as_states(rho)
    varrho = rho.sum(axis=1)
    if np.any(varrho <= 0.0):
        raise ZeroTotalDensity("total mass density must be positive")
    y = rho / varrho[:, None]
    per_mass = rho / sp.m
    n = per_mass.sum(axis=1)
    x = per_mass / n[:, None]
    return y, x, n, varrho


def fractions(sp: SpeciesSet, rho):
    """Mass fractions y, number fractions x, number density n, total varrho."""
    y, x, n, varrho = fractions_batch(sp, np.asarray(rho, dtype=float)[None, :])
    return y[0], x[0], float(n[0]), float(varrho[0])


def pressure_batch(sp: SpeciesSet, rho, tol=1e-12):
    # Zero entries are admitted here (the volume identity only needs a
    # positive total); the potential-level functions require interior states.
    rho, _ = _as_states(rho)
    return _backend.pressure_batch(sp._kind, sp._params, rho, tol=tol)


def pressure(sp: SpeciesSet, rho) -> float:
    """The pressure p(rho) solving sum_i g_i'(p) rho_i = 1."""
    return float(pressure_batch(sp, np.asarray(rho, dtype=float)[None, :])[0])


def log_pressure_closed_form(sp: SpeciesSet, rho):
    """Closed form p = p0 * sum_i vbar0_i rho_i, valid for all-log laws."""
    if not sp.all_log:
        raise ValueError("closed form requires logarithmic laws for every species")
    rho, scalar = _as_states(rho)
    p = sp.p0 * rho @ sp.vbar0_vec
    return float(p[0]) if scalar else p


def pressure_gradient_batch(sp: SpeciesSet, rho, p=None):
    rho, _ = _as_states(rho)
    if p is None:
        p = pressure_batch(sp, rho)
    gp = sp.gp_all(p)
    vp = np.einsum("nj,nj->n", sp.gpp_all(p), rho)
    return -gp / vp[:, None]


def pressure_gradient(sp: SpeciesSet, rho):
    """Gradient of the pressure with respect to the partial densities."""
    return pressure_gradient_batch(sp, np.asarray(rho, dtype=float)[None, :])[0]


def chem_potentials_batch(sp: SpeciesSet, rho, p=None):
    rho, _ = _as_states(rho)
    _require_interior(rho)
    if p is None:
        p = pressure_batch(sp, rho)
    _, x, _, _ = fractions_batch(sp, rho)
    return sp.g_all(p) + np.log(x) / sp.m


def chem_potentials(sp: SpeciesSet, rho):
    """mu_i = g_i(p(rho)) + ln(x_i)/m_i."""
    return chem_potentials_batch(sp, np.asarray(rho, dtype=float)[None, :])[0]


def free_energy_batch(sp: SpeciesSet, rho, p=None):
    # Zero components are admitted with the usual x ln x -> 0 convention;
    # h extends continuously to the boundary of the cone.
    rho, _ = _as_states(rho)
    if p is None:
        p = pressure_batch(sp, rho)
    _, x, _, _ = fractions_batch(sp, rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        mixing = np.where(rho > 0.0, rho * np.log(x) / sp.m, 0.0)
    return np.einsum("nj,nj->n", rho, sp.g_all(p)) + mixing.sum(axis=1) - p


def free_energy(sp: SpeciesSet, rho) -> float:
    """Helmholtz free energy density h(rho) = rho . mu - p."""
    return float(free_energy_batch(sp, np.asarray(rho, dtype=float)[None, :])[0])


def hessian_batch(sp: SpeciesSet, rho, p=None):
    rho, _ = _as_states(rho)
    _require_interior(rho)
    if p is None:
        p = pressure_batch(sp, rho)
    _, x, n, _ = fractions_batch(sp, rho)
    gp = sp.gp_all(p)
    vp = np.einsum("nj,nj->n", sp.gpp_all(p), rho)
    minv = 1.0 / sp.m
    mix = (np.einsum("j,k->jk", minv, minv)[None, :, :]
           * (np.eye(sp.n_species)[None, :, :] / x[:, None, :] - 1.0)
           / n[:, None, None])
    press = -np.einsum("nj,nk->njk", gp, gp) / vp[:, None, None]
    return mix + press


def hessian(sp: SpeciesSet, rho):
    """Hessian D2h(rho) of the free energy, symmetric positive definite."""
    return hessian_batch(sp, np.asarray(rho, dtype=float)[None, :])[0]


def hessian_inverse_batch(sp: SpeciesSet, rho, p=None):
    rho, _ = _as_states(rho)
    _require_interior(rho)
    if p is None:
        p = pressure_batch(sp, rho)
    gp = sp.gp_all(p)                      # V_rho at the solved pressure
    vp = np.einsum("nj,nj->n", sp.gpp_all(p), rho)
    mrho = sp.m * rho
    lam = np.einsum("nj,nj->n", gp * gp, mrho) - vp
    cross = np.einsum("nj,nk->njk", mrho * gp, rho)
    diag = np.zeros((rho.shape[0], sp.n_species, sp.n_species))
    ii = np.arange(sp.n_species)
    diag[:, ii, ii] = mrho
    return diag - cross - cross.transpose(0, 2, 1) + lam[:, None, None] * np.einsum("nj,nk->njk", rho, rho)


def hessian_inverse(sp: SpeciesSet, rho):
    """Closed-form inverse of the free-energy Hessian."""
    return hessian_inverse_batch(sp, np.asarray(rho, dtype=float)[None, :])[0]


def kernel_direction_batch(sp: SpeciesSet, rho, p=None):
    rho, _ = _as_states(rho)
    _require_interior(rho)
    if p is None:
        p = pressure_batch(sp, rho)
    gp = sp.gp_all(p)
    varrho = rho.sum(axis=1)
    vp = np.einsum("nj,nj->n", sp.gpp_all(p), rho)
    a = np.einsum("nj,nj->n", gp * (varrho[:, None] * gp - 1.0), rho * sp.m) - varrho * vp
    return rho * (sp.m * (1.0 - varrho[:, None] * gp) + a[:, None])


def kernel_direction(sp: SpeciesSet, rho):
    """The direction u(rho) solving D2h(rho) u = ones."""
    return kernel_direction_batch(sp, np.asarray(rho, dtype=float)[None, :])[0]


def dual_state(sp: SpeciesSet, mu, tol=1e-9, max_iter=400):
    """Invert the potential map: find rho with grad h(rho) = mu.

    Damped Newton on the residual grad h(rho) - mu, using the closed-form
    Hessian inverse for the step and halving it until the residual norm
    decreases.  Iterates are floored at 1e-300 to stay inside the cone.
    """
    mu = np.asarray(mu, dtype=float)
    rho = 1.0 / (sp.n_species * sp.vbar0_vec)   # reference state at p0
    res = chem_potentials(sp, rho) - mu
    norm = float(np.linalg.norm(res))
    for _ in range(max_iter):
        if float(np.abs(res).max()) <= tol:
            return rho
        step = -hessian_inverse(sp, rho) @ res
        lam = 1.0
        for _ in range(60):
            if np.any(rho + lam * step <= 0.0):
                lam *= 0.5
                continue
            cand = np.maximum(rho + lam * step, 1e-300)
            cand_res = chem_potentials(sp, cand) - mu
            cand_norm = float(np.linalg.norm(cand_res))
            if cand_norm < norm:
                rho, res, norm = cand, cand_res, cand_norm
                break
            lam *= 0.5
        else:
            raise NoConvergence("dual_state line search stalled", best=rho, residual=norm)
    raise NoConvergence("dual_state exceeded max_iter", best=rho, residual=norm)
