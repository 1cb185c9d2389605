"""Hybrid numerical-asymptotic BEM for 2D multiple-obstacle acoustic scattering.

A large sound-soft convex polygon is discretized with an oscillatory
(HNA) hp boundary-element space, small nearby sound-soft obstacles with a
standard hp space, and the two are coupled through an interaction operator.
"""

from .geometry import ConvexPolygon, Scene, SmallObstacle, build_polygon
from .config import SolverConfig

__all__ = [
    "ConvexPolygon",
    "Scene",
    "SmallObstacle",
    "SolverConfig",
    "build_polygon",
]
