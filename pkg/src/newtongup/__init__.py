"""Linear-order gravitational corrections to the position-momentum uncertainty relation.

The package is organised bottom-up:

``constants``  unit system (MeV, fm, hbar = c = 1) and two-body bookkeeping
``spectra``    radial s-states, matrix elements, finite-difference eigensolver
``resolvent``  reduced Green's function sums and first-order corrections
``gup``        generalized uncertainty relation, minimum length / momentum
``coulomb``    hydrogen-like atom case study (gamma coefficient)
``oracle``     nonperturbative cross-checks of the linear-order results
"""

from newtongup.constants import CODATA, PhysicalConstants, TwoBodySystem
from newtongup.errors import (
    DegenerateConfigurationError,
    DomainError,
    GupError,
    NumericError,
    PreconditionError,
    ScenarioError,
)

__version__ = "0.1.0"

__all__ = [
    "CODATA",
    "PhysicalConstants",
    "TwoBodySystem",
    "GupError",
    "DomainError",
    "PreconditionError",
    "NumericError",
    "DegenerateConfigurationError",
    "ScenarioError",
]
