"""Clifford analysis in superspace.

Subpackages and modules:

- ``algebra``: exact superfunctions (bodies, Grassmann and Clifford-Weyl parts)
- ``operators``: Dirac operators, Hermitian structures, kernels
- ``distributions``: finite parts, spherical means, level-set distributions
- ``integration``: super domain and surface integrals, integral formulas
- ``spinor``: spinor representation and the holomorphy test
- ``cli``: parser, verification suites and the ``superclifford`` command
"""

from .algebra import Dims, GaussQ, Scalar, SuperExpr
from .integration import IntegralResult, PhaseFunction, QuadratureSpec

__all__ = ["Dims", "GaussQ", "Scalar", "SuperExpr", "PhaseFunction", "QuadratureSpec", "IntegralResult"]
__version__ = "0.1.0"
