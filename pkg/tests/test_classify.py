"""Contact classification: hand/ground/wall labels, likelihoods, debouncing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccfg.config import ClassifierConfig
from ccfg.core import (HandModel, PlanarPose, PolygonModel, Wall, WorldModel,
                       Wrench2, hand_normal, hand_tangent)
from ccfg.errors import InsufficientHistory
from ccfg.estimator import (ContactConfiguration, EstimateView, Flush,
                            LabelFilter, ObjectLineHandPoint,
                            ObjectPointHandLine, PointOnLine, WallContact,
                            classify_ground, classify_hand, classify_slip,
                            classify_wall, flush_vs_point_likelihood,
                            from_sim_truth, ingest, new_cone_estimate)
from ccfg.estimator.friction import ConeConstraint, WrenchConeEstimate
from ccfg.sim import SimWorld, step

BOX = PolygonModel([[-0.06, -0.04], [0.06, -0.04], [0.06, 0.04], [-0.06, 0.04]])
HALF_LEN = 0.05


def box_view(object_pose=PlanarPose([0.0, 0.04], 0.0), walls=()):
    R = object_pose.rotation
    verts = BOX.vertices @ R.T + object_pose.position
    return EstimateView(vertices=verts, ground_height=0.0,
                        hand_half_length=HALF_LEN, walls=tuple(walls))


def hand_wrench_at(point, force, hand_pose):
    """Wrench the hand applies through a single contact point, measured about
    the hand center."""
    r = np.asarray(point, dtype=float) - hand_pose.position
    tau = r[0] * force[1] - r[1] * force[0]
    return Wrench2(force, tau, hand_pose.position)


def flat_world(hand_pose):
    return SimWorld(polygon=BOX, object_pose=PlanarPose([0.0, 0.04], 0.0),
                    hand_pose=hand_pose, hand=HandModel(half_length=HALF_LEN),
                    world=WorldModel(ground_height=0.0),
                    mass=0.5, com=np.zeros(2), mu_hand=0.9, mu_ground=0.25,
                    mu_wall=0.3, stiffness=np.array([600.0, 600.0, 20.0]))


def test_low_force_means_no_hand_contact():
    pose = PlanarPose([0.0, 0.08], 0.0)
    w = hand_wrench_at([0.0, 0.08], [0.0, -1.0], pose)
    assert classify_hand(w, pose, box_view()) is None


def test_cop_at_hand_endpoint_is_endpoint_contact():
    pose = PlanarPose([-0.1049, 0.08], 0.0)
    # only the +1 tip reaches over the face; all force goes through it
    tip = pose.position + HALF_LEN * hand_tangent(pose.angle)
    w = hand_wrench_at(tip, [0.0, -4.0], pose)
    label = classify_hand(w, pose, box_view())
    assert label == ObjectLineHandPoint(endpoint=1)


def test_centered_flat_press_is_flush_top_face():
    pose = PlanarPose([0.0, 0.08], 0.0)
    w = hand_wrench_at([0.0, 0.08], [0.0, -4.0], pose)
    assert classify_hand(w, pose, box_view()) == Flush(face=2)


def test_vertex_under_tilted_hand_matches_sim_truth():
    # Hand tilted nose-down to the right; its supporting contact on the box is
    # the top-right corner, which rides the hand interior.
    theta = -0.25
    t_hat = hand_tangent(theta)
    corner = np.array([0.06, 0.08])
    center = corner - 0.01 * t_hat
    sw = flat_world(PlanarPose(center, theta))
    target = PlanarPose(center + 6e-3 * hand_normal(theta), theta)
    sw, frame = step(sw, target)

    truth = frame.truth_label
    assert truth["hand_contact"]["kind"] == "vertex"
    assert truth["hand_contact"]["vertex"] == 2

    label = classify_hand(frame.wrench_meas, frame.hand_pose_meas, box_view())
    assert label == ObjectPointHandLine(vertex=2)

    # with a stationary pressing history the point fit still beats flush
    s = float(t_hat @ (corner - frame.hand_pose_meas.position))
    history = [(frame.hand_pose_meas, s)] * 12
    label = classify_hand(frame.wrench_meas, frame.hand_pose_meas, box_view(),
                          history=history)
    assert label == ObjectPointHandLine(vertex=2)


def test_ground_point_when_one_vertex_clearly_lowest():
    view = box_view(PlanarPose([0.0, 0.07], 0.35))
    w = Wrench2([0.0, -3.0], 0.0, [0.0, 0.12])
    assert classify_ground(view, w) == PointOnLine(vertex=0)


def test_ground_flush_under_centered_push():
    pose = PlanarPose([0.0, 0.08], 0.0)
    w = hand_wrench_at([0.0, 0.08], [0.0, -3.0], pose)
    assert classify_ground(box_view(), w) == Flush(face=0)


def test_ground_point_under_far_offset_push():
    # weightless COP lands at the push line x = 0.10, beyond the right edge
    pose = PlanarPose([0.10, 0.08], 0.0)
    w = Wrench2([0.0, -3.0], 0.0, pose.position)
    assert classify_ground(box_view(), w) == PointOnLine(vertex=1)
    # same magnitude from far left picks the other edge vertex
    w = Wrench2([0.0, -3.0], 0.0, [-0.10, 0.08])
    assert classify_ground(box_view(), w) == PointOnLine(vertex=0)


def test_wall_gate_closed_or_no_walls_returns_none():
    est = new_cone_estimate("ground", HALF_LEN)
    w = Wrench2([5.0, -3.0], 0.0)
    assert classify_wall(w, est, walls_active=False, view=box_view()) is None
    # gate short-circuits before any readiness check
    assert classify_wall(w, est, walls_active=True, view=box_view()) is None


def test_wall_detected_within_three_steps_of_truth():
    wall = Wall(0.12, -1)
    sw = SimWorld(polygon=BOX, object_pose=PlanarPose([0.0, 0.04], 0.0),
                  hand_pose=PlanarPose([0.0, 0.12], 0.0),
                  hand=HandModel(half_length=HALF_LEN),
                  world=WorldModel(ground_height=0.0, walls=(wall,)),
                  mass=0.5, com=np.zeros(2), mu_hand=0.9, mu_ground=0.25,
                  mu_wall=0.3, stiffness=np.array([600.0, 600.0, 20.0]))

    # settle onto the top face before pressing: a one-step plunge from 40 mm
    # above has no contact mode to catch it
    sw, _ = step(sw, PlanarPose([0.0, 0.0805], 0.0))

    cone = new_cone_estimate("ground", HALF_LEN)
    truth_step = None
    flagged_step = None
    for k in range(40):
        target = PlanarPose([0.002 * k, 0.076], 0.0)
        sw, frame = step(sw, target)
        walls_active = k > 22
        cone = ingest(cone, frame.wrench_meas, "ground",
                      external_contact_allowed=walls_active)
        view = EstimateView(vertices=sw.vertices_world(), ground_height=0.0,
                            hand_half_length=HALF_LEN, walls=(wall,))
        hit = classify_wall(frame.wrench_meas, cone, walls_active, view)
        truly_on = any(lab != "separate"
                       for *_, lab in frame.truth_label["walls"])
        if truly_on and truth_step is None:
            truth_step = k
        if walls_active and truth_step is None:
            assert hit is None, f"false wall alarm at step {k}"
        if hit is not None and flagged_step is None:
            flagged_step = k
            assert hit.wall_id == 0
    assert truth_step is not None, "drag never reached the wall"
    assert flagged_step is not None, "wall contact never flagged"
    assert abs(flagged_step - truth_step) <= 3


def test_likelihood_point_trace_positive():
    p = np.array([0.02, 0.05])
    history = []
    for k in range(25):
        theta = 0.4 * k / 25
        s = 0.015 + 0.0008 * k
        center = p - s * hand_tangent(theta)
        history.append((PlanarPose(center, theta), s))
    verts = np.array([[0.02, 0.05], [0.08, -0.01], [-0.05, -0.02]])
    view = EstimateView(verts, 0.0, HALF_LEN)
    assert flush_vs_point_likelihood(history, view) > 5.0


def test_likelihood_flush_trace_negative():
    rng = np.random.default_rng(2)
    pose = PlanarPose([0.0, 0.08], 0.0)
    history = [(pose, float(rng.uniform(-0.02, 0.02))) for _ in range(25)]
    assert flush_vs_point_likelihood(history, box_view()) < -5.0


def test_likelihood_needs_history():
    pose = PlanarPose([0.0, 0.08], 0.0)
    with pytest.raises(InsufficientHistory):
        flush_vs_point_likelihood([(pose, 0.0)] * 5, box_view())


def test_slip_labels_need_motion_and_boundary_load():
    cone = WrenchConeEstimate(
        context="hand", scale_length=HALF_LEN,
        constraints=(ConeConstraint(np.array([1.0, 0.0, 0.0])),),
        sample_count=50)
    interior = Wrench2([-1.0, 5.0], 0.0)
    boundary = Wrench2([-0.1, 5.0], 0.0)
    assert classify_slip(cone, boundary, 0.0) == "stick"
    assert classify_slip(cone, interior, 3e-3) == "stick"
    assert classify_slip(cone, boundary, 3e-3) == "slide_pos"
    assert classify_slip(cone, boundary, -3e-3) == "slide_neg"
    assert classify_slip(None, boundary, 3e-3) == "slide_pos"


def test_label_filter_debounces_single_frame_blips():
    filt = LabelFilter(ClassifierConfig(hysteresis_frames=3))
    a = ContactConfiguration(Flush(2), Flush(0), None, "stick", "stick")
    b = ContactConfiguration(None, Flush(0), WallContact(0, 1), "stick",
                             "slide_pos")
    assert filt.update(a) == a
    assert filt.update(b) == a          # 1st discrepant frame
    assert filt.update(a) == a          # blip cancelled
    assert filt.update(b) == a
    assert filt.update(b) == a
    out = filt.update(b)                # 3rd consecutive: switches
    assert out == b


def test_label_filter_fields_switch_independently():
    filt = LabelFilter(ClassifierConfig(hysteresis_frames=2))
    a = ContactConfiguration(Flush(2), Flush(0), None, "stick", "stick")
    c = ContactConfiguration(Flush(2), Flush(0), WallContact(0, 1),
                             "slide_neg", "stick")
    filt.update(a)
    filt.update(c)
    out = filt.update(c)
    assert out.wall_contact == WallContact(0, 1)
    assert out.hand_slip == "slide_neg"
    assert out.hand_geometry == Flush(2)


def test_from_sim_truth_mapping():
    view = box_view()
    label = {"hand": "slide_neg_point",
             "hand_contact": {"kind": "tip", "face": 2, "tip": -1},
             "ground": [[0, "stick"], [1, "stick"]],
             "walls": [[0, 1, "slide_pos"]]}
    cfg = from_sim_truth(label, view)
    assert cfg.hand_geometry == ObjectLineHandPoint(endpoint=-1)
    assert cfg.ground_geometry == Flush(face=0)
    assert cfg.wall_contact == WallContact(0, 1)
    assert cfg.hand_slip == "slide_neg"
    assert cfg.ground_slip == "stick"

    quiet = {"hand": "no_contact", "hand_contact": None,
             "ground": [[0, "separate"], [1, "separate"]], "walls": []}
    cfg = from_sim_truth(quiet, view)
    assert cfg.hand_geometry is None
    assert cfg.wall_contact is None
    assert isinstance(cfg.ground_geometry, PointOnLine)


@settings(max_examples=80, deadline=None)
@given(fx=st.floats(-8, 8), fy=st.floats(-8, 0.0), tau=st.floats(-0.3, 0.3),
       thr_lo=st.floats(0.5, 4.0), bump=st.floats(0.0, 4.0))
def test_force_threshold_monotone(fx, fy, tau, thr_lo, bump):
    pose = PlanarPose([0.0, 0.08], 0.0)
    w = Wrench2([fx, fy], tau, pose.position)
    lo = classify_hand(w, pose, box_view(),
                       ClassifierConfig(force_threshold=thr_lo))
    hi = classify_hand(w, pose, box_view(),
                       ClassifierConfig(force_threshold=thr_lo + bump))
    if lo is None:
        assert hi is None
