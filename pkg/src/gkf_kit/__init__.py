"""Expected Euler characteristics of excursion sets of Gaussian-related fields.

The kinematic formula splits E[chi(M cap y^{-1} D)] into Lipschitz-Killing
curvatures of the parameter space (:mod:`gkf_kit.lkc`) and Gaussian
Minkowski functionals of the domain D (:mod:`gkf_kit.gmf`), combined in
:mod:`gkf_kit.gkf`.  Monte Carlo oracles (:mod:`gkf_kit.tube_oracle`) and
field simulation (:mod:`gkf_kit.field_sim`, :mod:`gkf_kit.euler_char`)
check the closed forms independently.
"""

__version__ = "0.1.0"

from .errors import GkfError  # noqa: E402
from .gkf import FAMILIES, GkfResult, ec_density, expected_euler_char, family_gmf, sup_tail_approx  # noqa: E402
from .gmf import (BallComplement, Cone2, FRegion, GmfSeries, HalfSpace, Implicit,  # noqa: E402
                  NoncentralBallComplement)
from .lkc import LkcVector, lkc_box, lkc_catalog, lkc_flat_torus2  # noqa: E402

__all__ = [
    "__version__", "GkfError", "FAMILIES", "GkfResult", "ec_density", "expected_euler_char",
    "family_gmf", "sup_tail_approx", "BallComplement", "Cone2", "FRegion", "GmfSeries",
    "HalfSpace", "Implicit", "NoncentralBallComplement", "LkcVector", "lkc_box",
    "lkc_catalog", "lkc_flat_torus2",
]
