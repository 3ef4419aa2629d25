"""Estimation stack: friction cones, contact classification, kinematics."""

from .classify import (ContactConfiguration, EstimateView, Flush, LabelFilter,
                       ObjectLineHandPoint, ObjectPointHandLine, PointOnLine,
                       WallContact, classify_ground, classify_hand,
                       classify_slip, classify_wall, flush_vs_point_likelihood,
                       from_sim_truth, point_feasibility)
from .friction import (ConeConstraint, ViolationReport, WrenchConeEstimate,
                       check_violation, ingest, new_cone_estimate)

__all__ = [
    "ConeConstraint",
    "ContactConfiguration",
    "EstimateView",
    "Flush",
    "LabelFilter",
    "ObjectLineHandPoint",
    "ObjectPointHandLine",
    "PointOnLine",
    "ViolationReport",
    "WallContact",
    "WrenchConeEstimate",
    "check_violation",
    "classify_ground",
    "classify_hand",
    "classify_slip",
    "classify_wall",
    "flush_vs_point_likelihood",
    "from_sim_truth",
    "ingest",
    "new_cone_estimate",
    "point_feasibility",
]
