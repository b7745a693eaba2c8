"""Complex geodesics, left inverses, spherical representations and
pluricomplex Poisson kernels on strongly linearly convex domains."""

from lempertkit.core import (
    HardyMap,
    DiscAutomorphism,
    StolzRegion,
    hermitian_inner,
    bilinear_inner,
    poincare_distance,
    poisson_kernel,
    parabolic_automorphism,
    winding_number,
    angular_limit,
)
from lempertkit.domains import DomainSpec, NontangentialRegion
from lempertkit.geodesics import (
    GeodesicPair,
    LeftInverse,
    SolverConfig,
    StationaryProblem,
    solve_stationary,
)

__version__ = "0.1.0"
