"""Generic sliding-window nonlinear least-squares machinery."""

from .solver import Factor, FactorGraph, SolveReport, Variable, jacobian_check

__all__ = ["Factor", "FactorGraph", "SolveReport", "Variable", "jacobian_check"]
