"""Tail calculus for Levy measures, nonlocal symbols and transition
densities, jump Monte Carlo, and a spectral parabolic solver."""

__version__ = "0.1.0"

from .errors import (ConfigError, DomainError, LevykitError,  # noqa: F401
                     ToleranceError)
from .measures import (Anisotropic, IsotropicUnimodal,  # noqa: F401
                       MeasureSpec, RadialAngular, RadialStable,
                       load_measure, nondegeneracy, rescale, reflect,
                       symmetrize, tail_mass, truncated_moments, w_profile)
from .profiles import RadialProfile  # noqa: F401
