"""Per-species Gibbs energy laws.

Two constructions are provided.  ``LogLaw`` is the purely logarithmic law

    g(p) = g0 + p0 * vbar0 * ln(p / p0),

whose volume g'(p) = p0*vbar0/p is exactly inversely proportional to
pressure.  ``BlendedLaw`` keeps the logarithmic behaviour below a threshold
``m0`` and crosses over, C1 in the volume, to a sublinear power regime
g(p) ~ p**(1/alpha) above ``m1``.  The crossover is built in log-log
coordinates: with t = ln p and l(t) = ln g'(p), the slope of l is -1 on the
log branch and 1/alpha - 1 on the power branch, and interpolates linearly
in between (the cubic Hermite blend with mean-slope secant, which
degenerates to a quadratic l).  Since l' < 0 everywhere, g' > 0 and g'' < 0
hold on all of (0, inf).

On the power branch the integration constant is fixed to zero so that
g(p) = alpha * p * g'(p) exactly; on the middle branch g is recovered by
Gauss-Legendre quadrature of g' (the integrand exp(l(t) + t) is a Gaussian
bump in t, integrated to machine accuracy by a single high-order panel).
"""

import math
from dataclasses import dataclass, field

import numpy as np

# Law kind tags shared with the compiled kernels.
LAW_LOG = 0
LAW_BLENDED = 1

# Packed parameter layout, one row per species:
#   [p0, vbar0, t0, t1, y0, kappa, d1]
# For LAW_LOG only the first two entries are meaningful.
PARAM_WIDTH = 7

_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


@dataclass(frozen=True)
class LogLaw:
    g0: float
    vbar0: float
    p0: float

    def __post_init__(self):
        if self.vbar0 <= 0.0 or self.p0 <= 0.0:
            raise ValueError("vbar0 and p0 must be positive")

    kind = LAW_LOG

    def g(self, p):
        return self.g0 + self.p0 * self.vbar0 * np.log(np.asarray(p, dtype=float) / self.p0)

    def gp(self, p):
        return self.p0 * self.vbar0 / np.asarray(p, dtype=float)

    def gpp(self, p):
        p = np.asarray(p, dtype=float)
        return -self.p0 * self.vbar0 / (p * p)

    def a4_constants(self):
        c = self.p0 * self.vbar0
        return c, c

    def pack(self):
        return np.array([self.p0, self.vbar0, 0.0, 0.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True)
class BlendedLaw:
    vbar0: float
    p0: float
    alpha: float
    m0: float
    m1: float
    # filled in __post_init__
    t0: float = field(init=False)
    t1: float = field(init=False)
    y0: float = field(init=False)
    y1: float = field(init=False)
    d1: float = field(init=False)
    kappa: float = field(init=False)
    g_m1: float = field(init=False)
    g_m0: float = field(init=False)

    kind = LAW_BLENDED

    def __post_init__(self):
        if self.vbar0 <= 0.0 or self.p0 <= 0.0:
            raise ValueError("vbar0 and p0 must be positive")
        if self.alpha <= 1.0:
            raise ValueError("alpha must exceed 1")
        if not (self.p0 <= self.m0 < self.m1):
            raise ValueError("need p0 <= m0 < m1")
        t0 = math.log(self.m0)
        t1 = math.log(self.m1)
        width = t1 - t0
        d1 = 1.0 / self.alpha - 1.0
        object.__setattr__(self, "t0", t0)
        object.__setattr__(self, "t1", t1)
        object.__setattr__(self, "d1", d1)
        # l(t0) continues the log branch g'(p) = vbar0*p0/p.
        y0 = math.log(self.vbar0 * self.p0 / self.m0)
        object.__setattr__(self, "y0", y0)
        kappa = (d1 + 1.0) / (2.0 * width)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "y1", y0 - width + kappa * width * width)
        g_m1 = self.alpha * self.m1 * math.exp(self.y1)
        object.__setattr__(self, "g_m1", g_m1)
        object.__setattr__(self, "g_m0", g_m1 - self._mid_integral(np.array([t0]))[0])

    def _ell(self, t):
        u = t - self.t0
        mid = self.y0 - u + self.kappa * u * u
        low = self.y0 - u
        high = self.y1 + self.d1 * (t - self.t1)
        return np.where(t <= self.t0, low, np.where(t >= self.t1, high, mid))

    def _ellp(self, t):
        u = t - self.t0
        return np.where(t <= self.t0, -1.0, np.where(t >= self.t1, self.d1, -1.0 + 2.0 * self.kappa * u))

    def _mid_integral(self, t):
        # int_t^t1 exp(l(tau) + tau) dtau for t in [t0, t1]; the linear parts
        # of l cancel against tau, leaving a pure exp(kappa*u^2) integrand.
        lo = t - self.t0
        hi = self.t1 - self.t0
        half = 0.5 * (hi - lo)
        centre = 0.5 * (hi + lo)
        nodes = centre[..., None] + half[..., None] * _GL_X
        vals = np.exp(self.kappa * nodes * nodes)
        return math.exp(self.y0 + self.t0) * half * (vals @ _GL_W)

    def g(self, p):
        p = np.asarray(p, dtype=float)
        t = np.log(p)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty_like(t)
        low = t <= self.t0
        high = t >= self.t1
        mid = ~(low | high)
        if np.any(low):
            out[low] = self.g_m0 + self.p0 * self.vbar0 * (t[low] - self.t0)
        if np.any(high):
            th = t[high]
            out[high] = self.alpha * np.exp(th + self.y1 + self.d1 * (th - self.t1))
        if np.any(mid):
            out[mid] = self.g_m1 - self._mid_integral(t[mid])
        return out[0] if scalar else out

    def gp(self, p):
        return np.exp(self._ell(np.log(np.asarray(p, dtype=float))))

    def gpp(self, p):
        p = np.asarray(p, dtype=float)
        t = np.log(p)
        return np.exp(self._ell(t)) * self._ellp(t) / p

    @property
    def g0(self):
        """Reference value g(p0); fixed by the power-branch normalisation."""
        return float(self.g(self.p0))

    def a4_constants(self):
        c = self.p0 * self.vbar0
        return c, c

    def pack(self):
        return np.array([self.p0, self.vbar0, self.t0, self.t1, self.y0, self.kappa, self.d1])


def check_assumptions(law, beta=None, n_grid=400):
    """Grid checks of the structural assumptions on a Gibbs law.

    Verifies positivity/concavity of g on a log-spaced pressure grid over
    16 decades around p0, the low-pressure bound c1 <= p*g'(p) <= c2 below
    m0, and (for blended laws) the power-regime sandwich
    beta*p*g'(p) <= g(p) <= alpha*p*g'(p) above m1.  Returns the worst
    relative defect found (negative means all checks hold with margin).
    """
    p0 = law.p0
    grid = np.geomspace(1e-8 * p0, 1e8 * p0, n_grid)
    gp = law.gp(grid)
    gpp = law.gpp(grid)
    defects = [float(np.max(-gp)), float(np.max(gpp))]

    c1, c2 = law.a4_constants()
    m0 = law.m0 if isinstance(law, BlendedLaw) else np.inf
    low = grid[grid <= m0]
    if low.size:
        x = low * law.gp(low)
        defects.append(float(np.max(c1 - x) / c1))
        defects.append(float(np.max(x - c2) / c2))

    if isinstance(law, BlendedLaw):
        if beta is None:
            beta = law.alpha
        high = np.geomspace(law.m1, 1e8 * max(p0, law.m1), n_grid)
        pg = high * law.gp(high)
        gval = law.g(high)
        defects.append(float(np.max(beta * pg - gval) / np.max(np.abs(gval))))
        defects.append(float(np.max(gval - law.alpha * pg) / np.max(np.abs(gval))))
    return max(defects)
