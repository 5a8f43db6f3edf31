"""Desk-scale laboratory for a 2D wave / Klein-Gordon system with
null-form couplings: exact operator identities, weighted energies,
nonlinear evolution, fixed-point contraction measurement, and decay fits.
"""

__version__ = "0.1.0"

from .grid import Field2D, Grid2D, RegionMask, l2_norm, spatial_derivative, sup_norm
from .nullforms import Couplings, Jet1, coupled_source, ghost_derivative, q0, q_ab
from .state import EvolState, Trajectory

__all__ = [
    "Grid2D", "Field2D", "RegionMask", "spatial_derivative", "l2_norm", "sup_norm",
    "Jet1", "Couplings", "q0", "q_ab", "coupled_source", "ghost_derivative",
    "EvolState", "Trajectory", "__version__",
]
