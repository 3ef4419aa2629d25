"""Per-frame contact classification from tactile measurements.

Maps a measured hand wrench plus the previous kinematic estimate to a guess of
the contact configuration: what the hand touches (nothing, a face flush, a
hand endpoint on an object face, an object vertex on the hand line), what the
ground touches (a vertex or a whole face), whether a wall is engaged, and
whether each interface sticks or slides. The downstream estimator uses these
labels to pick which kinematic factors to add, so the classifier prefers
being conservative and debounced over being fast.

Hand-side decisions run on the measured center of pressure along the hand
line. Ground-side decisions use the estimated polygon's lowest vertices and a
weightless center of pressure on the bottom edge. Wall detection compares the
measured wrench against the frozen ground-phase wrench cone; a significant
violation means some force besides ground friction has appeared.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..config import ClassifierConfig
from ..core import (PlanarPose, Wrench2, center_of_pressure, cross2,
                    hand_normal, hand_tangent)
from ..errors import DegenerateForce, InsufficientHistory
from .friction import WrenchConeEstimate, check_violation

# Hand poses closer than these between frames count as stationary.
STATIONARY_ANGLE_TOL = 1e-3


# -- label types --------------------------------------------------------------

@dataclass(frozen=True)
class Flush:
    """Whole face against the opposing line (hand or ground)."""
    face: int

    def to_json(self):
        return {"kind": "flush", "face": self.face}


@dataclass(frozen=True)
class ObjectLineHandPoint:
    """A hand endpoint pressing the interior of an object face."""
    endpoint: int  # +1 or -1 along the hand tangent

    def to_json(self):
        return {"kind": "object_line_hand_point", "endpoint": self.endpoint}


@dataclass(frozen=True)
class ObjectPointHandLine:
    """An object vertex against the interior of the hand line."""
    vertex: int

    def to_json(self):
        return {"kind": "object_point_hand_line", "vertex": self.vertex}


@dataclass(frozen=True)
class PointOnLine:
    """A single object vertex on the ground line."""
    vertex: int

    def to_json(self):
        return {"kind": "point_on_line", "vertex": self.vertex}


@dataclass(frozen=True)
class WallContact:
    wall_id: int
    vertex: int

    def to_json(self):
        return {"kind": "wall", "wall_id": self.wall_id, "vertex": self.vertex}


def _label_json(label):
    return None if label is None else label.to_json()


@dataclass(frozen=True)
class ContactConfiguration:
    hand_geometry: object          # None | Flush | ObjectLineHandPoint | ObjectPointHandLine
    ground_geometry: object        # PointOnLine | Flush
    wall_contact: Optional[WallContact]
    hand_slip: str                 # "stick" | "slide_pos" | "slide_neg"
    ground_slip: str

    def to_json(self):
        return {"hand_geometry": _label_json(self.hand_geometry),
                "ground_geometry": _label_json(self.ground_geometry),
                "wall_contact": _label_json(self.wall_contact),
                "hand_slip": self.hand_slip,
                "ground_slip": self.ground_slip}


@dataclass(frozen=True)
class EstimateView:
    """The slice of a kinematic estimate the classifier needs.

    vertices are the estimated object vertices in the world frame, CCW; walls
    are the world's wall planes (empty tuple when the scene has none).
    """

    vertices: np.ndarray
    ground_height: float
    hand_half_length: float
    walls: tuple = ()


# -- hand geometry -------------------------------------------------------------

def _face_normals(vertices: np.ndarray) -> np.ndarray:
    nxt = np.roll(vertices, -1, axis=0)
    edges = nxt - vertices
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    return np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lengths[:, None]


def _hand_cop_offset(w_meas: Wrench2, hand_pose: PlanarPose,
                     half_length: float) -> float:
    t_hat = hand_tangent(hand_pose.angle)
    center = hand_pose.position
    tip_a = center - half_length * t_hat
    tip_b = center + half_length * t_hat
    cop = center_of_pressure(tip_a, tip_b, w_meas)
    return float(t_hat @ (cop.point - center))


def point_feasibility(history: Sequence, config: Optional[ClassifierConfig]
                      = None) -> float:
    """RMS residual of one least-squares fit of a fixed world point that lies
    on the hand line and explains the measured COP in every frame.

    The model is linear in the point, so a single Gauss-Newton step solves it
    exactly. history holds (hand_pose, cop_offset) pairs.
    """
    cfg = config or ClassifierConfig()
    frames = list(history)[-cfg.feasibility_frames:]
    rows, rhs = [], []
    for pose, s in frames:
        t_hat = hand_tangent(pose.angle)
        n_hat = hand_normal(pose.angle)
        c = pose.position
        rows.append(n_hat)
        rhs.append(float(n_hat @ c))
        rows.append(t_hat)
        rhs.append(float(t_hat @ c) + float(s))
    A = np.array(rows)
    b = np.array(rhs)
    p, *_ = np.linalg.lstsq(A, b, rcond=None)
    r = A @ p - b
    return float(np.sqrt(np.mean(r ** 2)))


def flush_feasibility(history: Sequence, face_normal: np.ndarray,
                      half_length: float,
                      config: Optional[ClassifierConfig] = None) -> float:
    """RMS misalignment of the hand line with a candidate flush face, scaled
    by the hand half-length so it compares against point residuals in meters."""
    cfg = config or ClassifierConfig()
    frames = list(history)[-cfg.feasibility_frames:]
    devs = []
    for pose, _s in frames:
        n_hat = hand_normal(pose.angle)
        cosang = float(np.clip(-(n_hat @ face_normal), -1.0, 1.0))
        devs.append(math.acos(cosang))
    return float(np.sqrt(np.mean(np.square(devs)))) * half_length


def classify_hand(w_meas: Wrench2, hand_pose: PlanarPose, view: EstimateView,
                  config: Optional[ClassifierConfig] = None,
                  history: Optional[Sequence] = None):
    """Decision cascade for the hand-side contact geometry.

    Force below threshold means no contact; a COP at a hand endpoint means the
    endpoint presses an object face; a COP at a projected object vertex whose
    fixed-point fit beats the flush fit means that vertex rides the hand line;
    anything else is flush against the most anti-parallel face.
    """
    cfg = config or ClassifierConfig()
    if float(np.hypot(*w_meas.force)) < cfg.force_threshold:
        return None

    normals = _face_normals(view.vertices)
    n_hat = hand_normal(hand_pose.angle)
    flush_face = int(np.argmin(normals @ n_hat))
    flush_ok = float(normals[flush_face] @ n_hat) < -math.cos(0.1)

    try:
        s = _hand_cop_offset(w_meas, hand_pose, view.hand_half_length)
    except DegenerateForce:
        # tangential-only load; no COP to reason from
        if flush_ok:
            return Flush(flush_face)
        return ObjectPointHandLine(_nearest_vertex_to_line(hand_pose, view))

    L = view.hand_half_length
    if abs(s - L) <= cfg.delta_edge or abs(s + L) <= cfg.delta_edge:
        return ObjectLineHandPoint(endpoint=1 if s > 0 else -1)

    t_hat = hand_tangent(hand_pose.angle)
    offsets = (view.vertices - hand_pose.position) @ t_hat
    gaps = np.abs((view.vertices - hand_pose.position) @ n_hat)
    near = np.abs(offsets - s) <= cfg.delta_vert
    if np.any(near):
        candidates = np.nonzero(near)[0]
        vertex = int(candidates[np.argmin(gaps[candidates])])
        accept = True
        if history is not None and len(history) >= 2:
            p_res = point_feasibility(history, cfg)
            f_res = flush_feasibility(history, normals[flush_face], L, cfg)
            accept = p_res <= f_res
        if accept:
            return ObjectPointHandLine(vertex)

    if flush_ok:
        return Flush(flush_face)
    return ObjectPointHandLine(_nearest_vertex_to_line(hand_pose, view))


def _nearest_vertex_to_line(hand_pose: PlanarPose, view: EstimateView) -> int:
    n_hat = hand_normal(hand_pose.angle)
    gaps = np.abs((view.vertices - hand_pose.position) @ n_hat)
    return int(np.argmin(gaps))


# -- ground geometry -----------------------------------------------------------

def classify_ground(view: EstimateView, w_meas: Wrench2,
                    gravity_params=None,
                    config: Optional[ClassifierConfig] = None):
    """Ground-side geometry from the estimated polygon and a weightless COP.

    One vertex strictly lowest keeps the object on a point. A level bottom
    edge is flush only while the weightless center of pressure, computed from
    the hand wrench alone, stays interior to the edge by a margin; otherwise
    the contact is the edge vertex nearest that COP. gravity_params is
    accepted for contract symmetry with the other classifiers; the bottom-edge
    test deliberately ignores gravity.
    """
    cfg = config or ClassifierConfig()
    verts = view.vertices
    ys = verts[:, 1]
    order = np.argsort(ys)
    lowest, second = int(order[0]), int(order[1])
    if ys[second] - ys[lowest] > cfg.delta_lowest:
        return PointOnLine(lowest)

    n = len(verts)
    if (lowest + 1) % n == second:
        face = lowest
    elif (second + 1) % n == lowest:
        face = second
    else:
        # two near-level vertices that do not share an edge: stay on the point
        return PointOnLine(lowest)
    a, b = verts[face], verts[(face + 1) % n]

    F = w_meas.force
    c = w_meas.reference
    h = view.ground_height
    if float(np.hypot(*F)) < 1e-9:
        return Flush(face)
    if abs(F[1]) < 1e-9:
        near = face if abs(a[0] - c[0]) < abs(b[0] - c[0]) else (face + 1) % n
        return PointOnLine(near)

    # torque balance about (x*, h) with ground reaction -F acting there
    x_star = c[0] - ((c[1] - h) * F[0] - w_meas.torque) / F[1]
    x_lo, x_hi = min(a[0], b[0]), max(a[0], b[0])
    margin = cfg.cop_interior_frac * (x_hi - x_lo)
    if x_lo + margin <= x_star <= x_hi - margin:
        return Flush(face)
    near = face if abs(a[0] - x_star) < abs(b[0] - x_star) else (face + 1) % n
    return PointOnLine(near)


# -- wall detection ------------------------------------------------------------

def classify_wall(w_meas: Wrench2, ground_cone: WrenchConeEstimate,
                  walls_active: bool, view: EstimateView,
                  sigma_force: float = 0.1,
                  significance_factor: float = 3.0) -> Optional[WallContact]:
    """Wall contact iff the measured wrench leaves the frozen ground cone by
    more than the noise-scaled significance threshold."""
    if not walls_active or not view.walls:
        return None
    report = check_violation(ground_cone, w_meas)
    if report.max_violation <= significance_factor * sigma_force:
        return None
    best = None
    for wid, wall in enumerate(view.walls):
        dist = np.abs(view.vertices[:, 0] - wall.x)
        v = int(np.argmin(dist))
        if best is None or dist[v] < best[0]:
            best = (float(dist[v]), wid, v)
    return WallContact(wall_id=best[1], vertex=best[2])


# -- slip labels ---------------------------------------------------------------

def classify_slip(cone: Optional[WrenchConeEstimate], w_meas: Wrench2,
                  rel_tangential_speed: float,
                  config: Optional[ClassifierConfig] = None) -> str:
    """Slide labels need both measured relative motion and a load near the
    friction-cone boundary; everything else is sticking."""
    cfg = config or ClassifierConfig()
    if abs(rel_tangential_speed) < cfg.slip_speed_tol:
        return "stick"
    if cone is not None and cone.ready:
        v = check_violation(cone, w_meas).max_violation
        if v < -cfg.slip_boundary_band:
            return "stick"
    return "slide_pos" if rel_tangential_speed > 0 else "slide_neg"


# -- flush vs point likelihood ---------------------------------------------------

def flush_vs_point_likelihood(history: Sequence, view: EstimateView,
                              config: Optional[ClassifierConfig] = None) -> float:
    """Log-likelihood ratio; positive favors an object vertex on the hand line.

    Point contact pins the COP to one world point, so its tracking error
    against the best estimated vertex stays at noise level even as the hand
    moves. Flush contact lets pressure redistribute, so the COP wanders while
    the hand is stationary and tracks no vertex.
    """
    cfg = config or ClassifierConfig()
    frames = list(history)
    if len(frames) < cfg.history_frames:
        raise InsufficientHistory(
            f"need {cfg.history_frames} frames, got {len(frames)}")

    poses = [p for p, _ in frames]
    s = np.array([float(v) for _, v in frames])

    still = []
    for k in range(1, len(poses)):
        dp = np.hypot(*(poses[k].position - poses[k - 1].position))
        da = abs(poses[k].angle - poses[k - 1].angle)
        if dp < cfg.slip_speed_tol and da < STATIONARY_ANGLE_TOL:
            still.append(k)
    v_still = float(np.var(s[still])) if len(still) >= 3 else cfg.cop_sigma ** 2

    v_vertex = math.inf
    for v in view.vertices:
        errs = []
        for (pose, sk) in frames:
            t_hat = hand_tangent(pose.angle)
            errs.append(float(t_hat @ (v - pose.position)) - float(sk))
        v_vertex = min(v_vertex, float(np.mean(np.square(errs))))

    floor = (0.1 * cfg.cop_sigma) ** 2
    return 0.5 * len(frames) * math.log(max(v_still, floor)
                                        / max(v_vertex, floor))


# -- debouncing ----------------------------------------------------------------

class LabelFilter:
    """Per-field hysteresis: a changed label must persist for a run of frames
    before it is emitted, suppressing single-frame chatter."""

    FIELDS = ("hand_geometry", "ground_geometry", "wall_contact",
              "hand_slip", "ground_slip")

    def __init__(self, config: Optional[ClassifierConfig] = None):
        self.config = config or ClassifierConfig()
        self.emitted: Optional[ContactConfiguration] = None
        self._pending = {f: (None, 0) for f in self.FIELDS}

    def update(self, raw: ContactConfiguration) -> ContactConfiguration:
        if self.emitted is None:
            self.emitted = raw
            return raw
        out = {}
        for f in self.FIELDS:
            new = getattr(raw, f)
            cur = getattr(self.emitted, f)
            if new == cur:
                self._pending[f] = (None, 0)
                out[f] = cur
                continue
            cand, count = self._pending[f]
            count = count + 1 if new == cand else 1
            if count >= self.config.hysteresis_frames:
                self._pending[f] = (None, 0)
                out[f] = new
            else:
                self._pending[f] = (new, count)
                out[f] = cur
        self.emitted = ContactConfiguration(**out)
        return self.emitted


# -- sim truth adapter -----------------------------------------------------------

def from_sim_truth(label: dict, view: EstimateView) -> ContactConfiguration:
    """Map a simulator truth label record onto a ContactConfiguration so
    predictions and truth share one vocabulary for confusion matrices."""

    def slip_of(name: str) -> str:
        if name.startswith("slide_pos"):
            return "slide_pos"
        if name.startswith("slide_neg"):
            return "slide_neg"
        return "stick"

    hand_geometry = None
    hand_slip = "stick"
    if label and label.get("hand") and label["hand"] != "no_contact":
        hand_slip = slip_of(label["hand"])
        hc = label.get("hand_contact") or {}
        kind = hc.get("kind")
        if kind == "tip":
            hand_geometry = ObjectLineHandPoint(int(hc.get("tip", 1)) or 1)
        elif kind == "vertex":
            hand_geometry = ObjectPointHandLine(int(hc.get("vertex", 0)))
        else:
            # flush and transitional two-point contacts share the flush shape
            hand_geometry = Flush(int(hc.get("face", 0)))

    active = [(int(v), lab) for v, lab in (label or {}).get("ground", [])
              if lab != "separate"]
    if len(active) >= 2:
        verts = sorted(v for v, _ in active)
        n = len(view.vertices)
        face = verts[-1] if verts[0] == 0 and verts[-1] == n - 1 else verts[0]
        ground_geometry = Flush(face)
    elif len(active) == 1:
        ground_geometry = PointOnLine(active[0][0])
    else:
        ground_geometry = PointOnLine(int(np.argmin(view.vertices[:, 1])))
    ground_slip = slip_of(active[0][1]) if active else "stick"

    wall_contact = None
    for wid, v, lab in (label or {}).get("walls", []):
        if lab != "separate":
            wall_contact = WallContact(int(wid), int(v))
            break

    return ContactConfiguration(hand_geometry, ground_geometry, wall_contact,
                                hand_slip, ground_slip)
