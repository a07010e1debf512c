"""Grain-boundary networks with dynamic lattice orientations and triple-junction drag."""
from ._backend import BACKEND
from .geometry import AnchorSet, angle_condition, equilateral_anchors, fermat_point
from .single_junction import JunctionState, SimConfig, Trajectory, energy, integrate, rhs

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AnchorSet",
    "JunctionState",
    "SimConfig",
    "Trajectory",
    "angle_condition",
    "energy",
    "equilateral_anchors",
    "fermat_point",
    "integrate",
    "rhs",
]
