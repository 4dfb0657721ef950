"""Equilibria, stability and solution-count maps for a planar tensegrity mechanism."""
from .model import Configuration, Geometry, Loading, NodeCoordinates, potential_energy, gradient, hessian
from .dksp import Equilibrium, classify_stability, solve_dksp, stable_count
from .special import solve_symmetric, solve_unloaded
from .freelength import solve_freelength
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Configuration", "Equilibrium", "Geometry", "Loading", "NodeCoordinates",
    "classify_stability", "gradient", "hessian", "potential_energy", "solve_dksp",
    "solve_freelength", "solve_symmetric", "solve_unloaded", "stable_count",
]
