"""Isothermal ideal gas mixtures with Maxwell-Stefan diffusion.

Library layout:

* :mod:`msmix.numerics` - bracketed root finding, small dense solves,
  symmetric eigenvalue bounds;
* :mod:`msmix.gibbs` / :mod:`msmix.thermo` - per-species Gibbs laws and the
  mixture state functions (pressure, potentials, free energy, Hessian);
* :mod:`msmix.chart` - the pressure-parametrized change of variables
  rho <-> (s, w) and the monotone pressure-of-density map;
* :mod:`msmix.transport` - friction laws, the singular flux matrix and its
  generalized inverse, Onsager operators, dissipation certificates;
* :mod:`msmix.sim1d` - 1D finite-volume simulator with an energy audit;
* :mod:`msmix.cli` - the ``msmix`` command line (run / verify / chart).

The hot kernels run on a compiled extension when it is built, with a pure
numpy fallback selected automatically at import (see ``msmix.backend_name``).
"""

from ._backend import backend_name
from .gibbs import BlendedLaw, LogLaw
from .thermo import SpeciesSet

__version__ = "0.1.0"

__all__ = ["BlendedLaw", "LogLaw", "SpeciesSet", "backend_name", "__version__"]
