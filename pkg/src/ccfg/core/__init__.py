"""Planar geometry and contact-mechanics primitives shared by the whole toolkit."""

from .hull import convex_hull, noisy_convex_hull
from .mechanics import (FrictionResidual, TorqueConeResult,
                        friction_complementarity_residual, torque_cone_check)
from .polygon import PolygonModel
from .pose import (PlanarPose, cross2, hand_normal, hand_tangent, rotate,
                   rotation, wrap_angle)
from .world import (GRAVITY_ACCEL, GravityParams, HandModel, Wall, WorldModel,
                    gravity_torque)
from .wrench import CopResult, Wrench2, center_of_pressure, transform_torque

__all__ = [
    "CopResult",
    "FrictionResidual",
    "GRAVITY_ACCEL",
    "GravityParams",
    "HandModel",
    "PlanarPose",
    "PolygonModel",
    "TorqueConeResult",
    "Wall",
    "WorldModel",
    "Wrench2",
    "center_of_pressure",
    "convex_hull",
    "cross2",
    "friction_complementarity_residual",
    "gravity_torque",
    "hand_normal",
    "hand_tangent",
    "noisy_convex_hull",
    "rotate",
    "rotation",
    "torque_cone_check",
    "transform_torque",
    "wrap_angle",
]
