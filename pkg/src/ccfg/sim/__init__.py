"""Quasi-static contact simulator."""

from .engine import step
from .measure import MeasurementFrame, Observation, synthesize_measurements
from .modes import ContactModeHypothesis, HandContact, enumerate_modes
from .resolve import ContactForce, ModeSolution, resolve_mode
from .world import SimWorld

__all__ = [
    "ContactForce",
    "ContactModeHypothesis",
    "HandContact",
    "MeasurementFrame",
    "ModeSolution",
    "Observation",
    "SimWorld",
    "enumerate_modes",
    "resolve_mode",
    "step",
    "synthesize_measurements",
]
