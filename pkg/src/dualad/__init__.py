"""Dual-layer driving planner and closed-loop simulator.

Bottom layer: rule-based motion planners (car-following, lattice, Frenet
sampling). Upper layer: a reasoner that reads a rule-based text rendering
of the scene and caps the planner's desired speed, only ever downward.
"""

__version__ = "0.1.0"

from .geom import (CartesianPose, FrenetPose, OrientedBox, ReferencePath,
                   boxes_collide, to_cartesian, to_frenet)

__all__ = [
    "CartesianPose",
    "FrenetPose",
    "OrientedBox",
    "ReferencePath",
    "boxes_collide",
    "to_cartesian",
    "to_frenet",
    "__version__",
]
