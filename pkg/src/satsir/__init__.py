"""Analysis toolkit for an SIR model with saturated incidence and saturated treatment.

Typical use::

    from satsir import ModelParams, equilibrium_report
    params = ModelParams(b=0.2, delta=0.01, gamma=0.01, q=0.98, m_prime=0.7,
                         beta=0.2, alpha=0.4, beta2=0.1, alpha2=10)
    equilibrium_report(params).case
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .equilibria import (
    BifurcationType,
    ExistenceCase,
    Region,
    a3_subregion,
    bifurcation_type,
    equilibrium_report,
    quadratic_coeffs,
    thresholds,
)
from .model import ModelParams, ParameterError, StateSI, jacobian, load_params, r0, r0_star, vector_field
from .stability import center_manifold, char_poly, classify_dfe, classify_endemic, s_indicator
from .hopf import locate_hopf, lyapunov_coefficient
from .integrate import detect_cycle, integrate, verify_invariant_region
