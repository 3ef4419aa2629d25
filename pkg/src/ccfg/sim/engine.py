"""One quasi-static timestep: resolve the mode, advance, synthesize sensors."""

from typing import Optional, Union

import numpy as np

from ..config import NoiseConfig, SimConfig
from ..core import PlanarPose
from ..core.mechanics import friction_complementarity_residual
from .measure import MeasurementFrame, synthesize_measurements
from .resolve import ModeSolution, resolve_mode
from .world import SimWorld


def step(sw: SimWorld, impedance_target: PlanarPose, dt: float = 0.01,
         rng: Union[int, np.random.Generator, None] = None,
         noise: Optional[NoiseConfig] = None,
         vision_period: int = 10,
         config: Optional[SimConfig] = None):
    """Advance the plant by one impedance command.

    Returns the new state and its measurement frame.  The returned state
    satisfies static balance to 1e-6, friction complementarity to 1e-8 and
    penetrates nothing deeper than 1e-9.
    """
    cfg = config or SimConfig()
    depth = sw.penetration_depth()
    if depth < -1e-9:
        raise ValueError(f"current state penetrates by {-depth:g} m; "
                         "step requires a non-penetrating state")
    sol = resolve_mode(sw, impedance_target, config=cfg)

    assert sol.residual_norm <= cfg.balance_tol, \
        f"balance residual {sol.residual_norm:g} above {cfg.balance_tol:g}"
    for c in sol.contacts:
        r = friction_complementarity_residual(
            c.f_normal, c.f_tangent, -c.slip / dt, mu=_mu_for(sw, c.iface))
        assert r.cone_violation <= 1e-6 + 1e-6 * abs(c.f_normal), \
            f"cone violated at {c.iface}: {r.cone_violation:g}"
        if c.label.startswith("slide"):
            assert r.comp_violation <= cfg.comp_tol, \
                f"complementarity violated at {c.iface}: {r.comp_violation:g}"

    new_world = sw.with_poses(
        sol.object_pose, sol.hand_pose,
        t_index=sw.t_index + 1,
        hand_wrench=sol.hand_wrench,
        env_wrench=sol.env_wrench,
        contact_label=sol.hypothesis.to_json(),
    )
    assert new_world.penetration_depth() >= -1e-9

    frame = synthesize_measurements(new_world, rng, noise, vision_period, dt)
    return new_world, frame


def _mu_for(sw: SimWorld, iface: str) -> float:
    if iface == "hand":
        return sw.mu_hand
    if iface == "ground":
        return sw.mu_ground
    return sw.mu_wall
