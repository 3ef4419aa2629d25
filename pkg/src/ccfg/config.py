"""Tunable defaults for the simulator, estimators, classifier, and controller.

Every constant that shapes runtime behavior lives here so scenario files can
override them in one place and tests can pin them explicitly.
"""

import math
from dataclasses import dataclass, field, fields, replace


def _apply_overrides(cls, d: dict):
    known = {f.name for f in fields(cls)}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    return cls(**d)


@dataclass(frozen=True)
class NoiseConfig:
    """Measurement noise, all standard deviations of zero-mean Gaussians."""

    sigma_force: float = 0.1        # N, per force component
    sigma_torque: float = 0.01      # N*m
    sigma_hand_pos: float = 1e-4    # m, hand proprioception
    sigma_hand_angle: float = 1e-4  # rad
    sigma_vision: float = 5e-3      # m, per vertex coordinate
    vision_period: int = 10         # steps between vision frames

    @staticmethod
    def from_json(d: dict) -> "NoiseConfig":
        return _apply_overrides(NoiseConfig, d)

    def scaled(self, factor: float) -> "NoiseConfig":
        return replace(self,
                       sigma_force=self.sigma_force * factor,
                       sigma_torque=self.sigma_torque * factor,
                       sigma_hand_pos=self.sigma_hand_pos * factor,
                       sigma_hand_angle=self.sigma_hand_angle * factor,
                       sigma_vision=self.sigma_vision * factor)

    @property
    def noise_free(self) -> bool:
        return (self.sigma_force == 0 and self.sigma_torque == 0
                and self.sigma_hand_pos == 0 and self.sigma_hand_angle == 0
                and self.sigma_vision == 0)


ZERO_NOISE = NoiseConfig(0.0, 0.0, 0.0, 0.0, 0.0, 10)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01                 # s per step
    activation_band: float = 1e-3    # m; contacts closer than this are candidates
    force_bound: float = 1e5         # N; beyond this a mode counts as jammed
    balance_tol: float = 1e-6        # N / N*m residual allowed in statics
    comp_tol: float = 1e-8           # complementarity tolerance

    @staticmethod
    def from_json(d: dict) -> "SimConfig":
        return _apply_overrides(SimConfig, d)


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 25
    lambda0: float = 1e-4
    lambda_up: float = 10.0
    lambda_down: float = 10.0
    cost_tol: float = 1e-10    # relative cost decrease
    step_tol: float = 1e-12    # step infinity-norm
    divergence_factor: float = 1e3
    dense_limit: int = 200     # below this many scalar variables use dense solve

    @staticmethod
    def from_json(d: dict) -> "SolverOptions":
        return _apply_overrides(SolverOptions, d)


@dataclass(frozen=True)
class EstimatorWeights:
    """Residual standard deviations used to weight each factor family."""

    contact: float = 1e-4          # m
    sticking: float = 1e-4         # m
    torque_balance: float = 1e-3   # N*m
    cop: float = 1e-3              # m
    vision: float = 5e-3           # m
    geometric: float = 1e-6        # m
    reg_position: float = 1e-2     # m per step
    reg_angle: float = 1e-2        # rad per step
    gravity_prior: float = 50.0    # N*m, weak zero prior on (alpha, beta)

    @staticmethod
    def from_json(d: dict) -> "EstimatorWeights":
        return _apply_overrides(EstimatorWeights, d)


@dataclass(frozen=True)
class EstimatorConfig:
    weights: EstimatorWeights = field(default_factory=EstimatorWeights)
    solver: SolverOptions = field(default_factory=SolverOptions)
    horizon: int = 50              # active time-indexed frames in the window
    warmup_vision_frames: int = 3  # vision frames pooled before warm start

    @staticmethod
    def from_json(d: dict) -> "EstimatorConfig":
        d = dict(d)
        weights = EstimatorWeights.from_json(d.pop("weights", {}))
        solver = SolverOptions.from_json(d.pop("solver", {}))
        base = _apply_overrides(EstimatorConfig, d)
        return replace(base, weights=weights, solver=solver)


@dataclass(frozen=True)
class ClassifierConfig:
    force_threshold: float = 2.5     # N; below this the hand is not in contact
    delta_edge: float = 5e-3         # m; COP-to-hand-endpoint band
    delta_vert: float = 8e-3         # m; COP-to-projected-vertex band
    delta_lowest: float = 5e-3       # m; strictly-lowest-vertex margin
    cop_interior_frac: float = 0.10  # fraction of edge length for flush COP margin
    hysteresis_frames: int = 3       # consecutive frames before a label switches
    history_frames: int = 20         # buffer for flush-vs-point likelihood
    feasibility_frames: int = 10     # frames in the kinematic feasibility fit
    slip_speed_tol: float = 1e-4     # m/s below which contacts count as sticking
    cop_sigma: float = 2e-3          # m; expected COP measurement scatter
    slip_boundary_band: float = 0.3  # N; cone-boundary proximity for slip labels

    @staticmethod
    def from_json(d: dict) -> "ClassifierConfig":
        return _apply_overrides(ClassifierConfig, d)


@dataclass(frozen=True)
class FrictionEstConfig:
    buffer_size: int = 2000
    min_samples: int = 20
    max_constraints: int = 8
    violation_sigma_factor: float = 3.0  # wall test fires above b_j + factor*sigma_F

    @staticmethod
    def from_json(d: dict) -> "FrictionEstConfig":
        return _apply_overrides(FrictionEstConfig, d)


@dataclass(frozen=True)
class ControllerConfig:
    alpha_0: float = 1e-2                    # regularization weight on ||dx_tar||^2
    alpha_dir: float = 1.0                   # weight per admissible-direction cost
    beta: float = 0.3                        # setpoint-error gain per step
    gamma: float = 1.0                       # predicted-wrench scaling per row
    epsilon_margin: float = 0.2              # N*m torque-cone safety margin
    slack_penalty_factor: float = 1e6        # times alpha_0
    max_step_pos: float = 2e-3               # m per control step
    max_step_angle: float = math.radians(0.5)
    min_icr_separation: float = 5e-3         # m between pivot contacts
    stale_frames: int = 5

    @staticmethod
    def from_json(d: dict) -> "ControllerConfig":
        return _apply_overrides(ControllerConfig, d)
