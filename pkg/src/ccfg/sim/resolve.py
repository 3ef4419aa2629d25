"""Quasi-static step resolution.

Each mode hypothesis fixes which contacts are active and how they behave
(stick, slide with a given sign).  That turns one simulation step into a
square root-finding problem:

unknowns   object pose delta (3), hand pose delta (3), one (f_n, f_t) pair
           per active contact point
equations  hand force/torque balance against the impedance spring (3),
           object force/torque balance including gravity (3), and two rows
           per active contact: stick pins the contact point, slide keeps the
           gap closed and ties f_t to -s * mu * f_n

The system is solved by Newton iteration with analytic Jacobians.  A face
seated on the hand enters as two point contacts at the overlap patch ends,
which reproduces the patch torque limits through f_n >= 0 at both ends.  The
tangential split between two collinear stick points is statically
indeterminate and wrench-neutral, so the solver takes the minimum-norm
solution and the report redistributes the total proportionally to the
normal forces.

Among the hypotheses that survive all feasibility checks the resolver picks
the one with minimal slip dissipation (sum of squared tangential relative
displacements), breaking ties toward more sticking contacts and then by
enumeration order.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from ..config import SimConfig
from ..core import PlanarPose, Wrench2, cross2, wrap_angle
from ..errors import JammedConfiguration, NoFeasibleMode
from .modes import ContactModeHypothesis, enumerate_modes
from .world import SimWorld

_HAND_LINE = 0
_TIP_FACE = 1
_ENV = 2


@dataclass
class _Contact:
    ctype: int
    mode: str                  # stick / slide_pos / slide_neg
    s: int                     # slide sign, 0 for stick
    mu: float
    iface: str                 # "hand" | "ground" | "wall{k}"
    p_obj: np.ndarray          # object-frame anchor (material point)
    t0: float = 0.0            # hand-frame tangential coordinate of hand anchor
    # tip-on-face extras
    face: int = -1
    a_obj: Optional[np.ndarray] = None    # face base vertex, object frame
    e_obj: Optional[np.ndarray] = None    # face direction, unit, object frame
    n_obj: Optional[np.ndarray] = None    # face outward normal, object frame
    face_len: float = 0.0
    s_start: float = 0.0                  # tip coordinate along face at start
    # environment extras
    n_fix: Optional[np.ndarray] = None
    t_fix: Optional[np.ndarray] = None
    level: float = 0.0                    # n_fix . u at contact
    pin_t: float = 0.0                    # t_fix . u at start


@dataclass(frozen=True)
class ContactForce:
    """One resolved contact point, world frame, force acting on the object."""

    iface: str
    label: str
    point: tuple
    force: tuple
    f_normal: float
    f_tangent: float
    slip: float


@dataclass(frozen=True)
class ModeSolution:
    hypothesis: ContactModeHypothesis
    object_pose: PlanarPose
    hand_pose: PlanarPose
    contacts: tuple
    hand_wrench: Wrench2
    env_wrench: Wrench2
    dissipation: float
    residual_norm: float
    trials: int


@dataclass
class _Trial:
    index: int
    hyp: ContactModeHypothesis
    feasible: bool
    reason: str
    dissipation: float = math.inf
    stick_count: int = 0
    solution: Optional[dict] = None
    contacts: Optional[list] = None


def _build_contacts(sw: SimWorld, hyp: ContactModeHypothesis) -> list:
    out = []
    verts_w = sw.vertices_world()
    t_hat = sw.hand_tangent()
    n_hat = sw.hand_normal()
    center = sw.hand_pose.position
    R = sw.object_pose.rotation

    def sign_of(label):
        return {"stick": 0, "slide_pos": 1, "slide_neg": -1}[label]

    def face_record(j, t0, label, s_label):
        """Hand material point at coordinate t0 riding on object face j.

        Slide labels are defined along the hand tangent; the face tangent may
        run the other way, so the internal sign carries the frame flip.
        """
        a, b = sw.polygon.face_endpoints(j)
        edge = b - a
        length = float(np.hypot(*edge))
        e_obj = edge / length
        n_obj = sw.polygon.normals[j]
        pt_w = center + t0 * t_hat
        a_w = sw.object_pose.transform(a)
        e_w = R @ e_obj
        s_start = float(e_w @ (pt_w - a_w))
        s_clamped = min(max(s_start, 0.0), length)
        p_pin = a + s_clamped * e_obj
        flip = 1 if float(e_w @ t_hat) >= 0.0 else -1
        return _Contact(_TIP_FACE, label, s_label * flip, sw.mu_hand,
                        "hand", p_pin, t0=t0, face=j, a_obj=np.array(a),
                        e_obj=e_obj, n_obj=np.array(n_obj),
                        face_len=length, s_start=s_start)

    hc = hyp.hand_contact
    if hyp.hand_label != "none":
        s = sign_of(hyp.hand_label)
        if hc.kind == "vertex":
            p = sw.polygon.vertices[hc.vertex]
            t0 = float((verts_w[hc.vertex] - center) @ t_hat)
            out.append(_Contact(_HAND_LINE, hyp.hand_label, s, sw.mu_hand,
                                "hand", np.array(p), t0=t0))
        elif hc.kind == "flush":
            if s == 0:
                # sticking patch: pin the object material at both patch ends
                for t_star, ox, oy in hc.anchors:
                    out.append(_Contact(_HAND_LINE, hyp.hand_label, 0,
                                        sw.mu_hand, "hand",
                                        np.array([ox, oy]), t0=float(t_star)))
            else:
                # sliding patch: the face glides under fixed hand coordinates
                for t_star, _, _ in hc.anchors:
                    out.append(face_record(hc.face, float(t_star),
                                           hyp.hand_label, s))
        elif hc.kind == "pair":
            # slide-only support pair: each patch end is either a hand tip
            # riding the face or a face corner riding the hand line
            if hc.tip != 0:
                out.append(face_record(hc.face, hc.tip * sw.hand.half_length,
                                       hyp.hand_label, s))
                corners = (hc.vertex,)
            else:
                corners = (hc.face, (hc.face + 1) % len(sw.polygon.vertices))
            for vi in corners:
                p = sw.polygon.vertices[vi]
                t0 = float((verts_w[vi] - center) @ t_hat)
                out.append(_Contact(_HAND_LINE, hyp.hand_label, s, sw.mu_hand,
                                    "hand", np.array(p), t0=t0))
        else:  # hand tip riding an object face
            out.append(face_record(hc.face, hc.tip * sw.hand.half_length,
                                   hyp.hand_label, s))

    for v, label in hyp.ground:
        if label == "separate":
            continue
        out.append(_Contact(_ENV, label, sign_of(label), sw.mu_ground,
                            "ground", np.array(sw.polygon.vertices[v]),
                            n_fix=np.array([0.0, 1.0]),
                            t_fix=np.array([1.0, 0.0]),
                            level=sw.world.ground_height,
                            pin_t=float(verts_w[v, 0])))
    for k, v, label in hyp.walls:
        if label == "separate":
            continue
        wall = sw.world.walls[k]
        out.append(_Contact(_ENV, label, sign_of(label), sw.mu_wall,
                            f"wall{k}", np.array(sw.polygon.vertices[v]),
                            n_fix=np.array([float(wall.facing), 0.0]),
                            t_fix=np.array([0.0, 1.0]),
                            level=float(wall.facing * wall.x),
                            pin_t=float(verts_w[v, 1])))
    return out


def _residual_jacobian(z, sw, target, contacts):
    """Assemble the square Newton system at iterate z."""
    n = len(contacts)
    m = 6 + 2 * n
    R = np.zeros(m)
    J = np.zeros((m, m))

    rox, roy = sw.object_pose.position
    tho = sw.object_pose.angle
    rhx, rhy = sw.hand_pose.position
    thh = sw.hand_pose.angle
    kx, ky, kth = sw.stiffness
    mg = sw.mass * sw.world.gravity

    dox, doy, po = z[0], z[1], z[2]
    dhx, dhy, ph = z[3], z[4], z[5]

    co, so = math.cos(tho + po), math.sin(tho + po)
    ox, oy = rox + dox, roy + doy
    ch, sh = math.cos(thh + ph), math.sin(thh + ph)
    hx, hy = rhx + dhx, rhy + dhy
    # hand tangent, normal and their angle derivatives
    tx, ty = ch, sh
    nx, ny = sh, -ch
    dtx, dty = -sh, ch          # d tangent / d ph
    dnx, dny = ch, sh           # d normal / d ph

    def obj_pt(p):
        px, py = p
        wx = co * px - so * py
        wy = so * px + co * py
        return ox + wx, oy + wy, -wy, wx   # point and d/dpo (perp of R p)

    # gravity torque about object origin
    gx = co * sw.com[0] - so * sw.com[1]
    gy = so * sw.com[0] + co * sw.com[1]
    R[1] -= mg
    R[2] += -mg * gx
    J[2, 2] += -mg * (-gy)

    # impedance spring on the hand
    tar_p = target.position
    R[3] = kx * (tar_p[0] - hx)
    R[4] = ky * (tar_p[1] - hy)
    R[5] = kth * wrap_angle(target.angle - thh - ph)
    J[3, 3] = -kx
    J[4, 4] = -ky
    J[5, 5] = -kth

    for i, c in enumerate(contacts):
        fi = 6 + 2 * i
        ri = 6 + 2 * i
        fn, ft = z[fi], z[fi + 1]

        if c.ctype == _HAND_LINE:
            ux, uy, dux, duy = obj_pt(c.p_obj)
            mx = hx + c.t0 * tx
            my = hy + c.t0 * ty
            dmx, dmy = c.t0 * dtx, c.t0 * dty      # d m / d ph
            Fx = fn * nx + ft * tx
            Fy = fn * ny + ft * ty
            dFx = fn * dnx + ft * dtx              # d F / d ph
            dFy = fn * dny + ft * dty
            # object balance
            R[0] += Fx
            R[1] += Fy
            J[0, fi] += nx;  J[0, fi + 1] += tx
            J[1, fi] += ny;  J[1, fi + 1] += ty
            J[0, 5] += dFx
            J[1, 5] += dFy
            ax, ay = ux - ox, uy - oy
            R[2] += ax * Fy - ay * Fx
            J[2, 2] += dux * Fy - duy * Fx
            J[2, 5] += ax * dFy - ay * dFx
            J[2, fi] += ax * ny - ay * nx
            J[2, fi + 1] += ax * ty - ay * tx
            # hand balance (reaction)
            R[3] -= Fx
            R[4] -= Fy
            J[3, fi] -= nx;  J[3, fi + 1] -= tx
            J[4, fi] -= ny;  J[4, fi + 1] -= ty
            J[3, 5] -= dFx
            J[4, 5] -= dFy
            bx, by = ux - hx, uy - hy
            R[5] -= bx * Fy - by * Fx
            J[5, 0] -= Fy;         J[5, 1] -= -Fx
            J[5, 2] -= dux * Fy - duy * Fx
            J[5, 3] -= -Fy;        J[5, 4] -= Fx
            J[5, 5] -= bx * dFy - by * dFx
            J[5, fi] -= bx * ny - by * nx
            J[5, fi + 1] -= bx * ty - by * tx
            if c.s == 0:
                R[ri] = ux - mx
                R[ri + 1] = uy - my
                J[ri, 0] = 1.0;      J[ri, 2] = dux
                J[ri, 3] = -1.0;     J[ri, 5] = -dmx
                J[ri + 1, 1] = 1.0;  J[ri + 1, 2] = duy
                J[ri + 1, 4] = -1.0; J[ri + 1, 5] = -dmy
            else:
                relx, rely = ux - hx, uy - hy
                R[ri] = nx * relx + ny * rely
                J[ri, 0] = nx;   J[ri, 1] = ny
                J[ri, 2] = nx * dux + ny * duy
                J[ri, 3] = -nx;  J[ri, 4] = -ny
                J[ri, 5] = dnx * relx + dny * rely
                R[ri + 1] = ft + c.s * c.mu * fn
                J[ri + 1, fi] = c.s * c.mu
                J[ri + 1, fi + 1] = 1.0

        elif c.ctype == _TIP_FACE:
            # force acts at the hand tip, directions from the object face
            nfx = co * c.n_obj[0] - so * c.n_obj[1]
            nfy = so * c.n_obj[0] + co * c.n_obj[1]
            tfx = co * c.e_obj[0] - so * c.e_obj[1]
            tfy = so * c.e_obj[0] + co * c.e_obj[1]
            dnfx, dnfy = -nfy, nfx                 # d n_f / d po
            dtfx, dtfy = -tfy, tfx
            mx = hx + c.t0 * tx
            my = hy + c.t0 * ty
            dmx, dmy = c.t0 * dtx, c.t0 * dty
            Fx = -fn * nfx + ft * tfx
            Fy = -fn * nfy + ft * tfy
            dFx = -fn * dnfx + ft * dtfx           # d F / d po
            dFy = -fn * dnfy + ft * dtfy
            R[0] += Fx
            R[1] += Fy
            J[0, 2] += dFx
            J[1, 2] += dFy
            J[0, fi] += -nfx;  J[0, fi + 1] += tfx
            J[1, fi] += -nfy;  J[1, fi + 1] += tfy
            ax, ay = mx - ox, my - oy
            R[2] += ax * Fy - ay * Fx
            # d a / d z: ddo = -I, ddh = I, dph = dm
            J[2, 0] += -Fy;        J[2, 1] += Fx
            J[2, 3] += Fy;         J[2, 4] += -Fx
            J[2, 5] += dmx * Fy - dmy * Fx
            J[2, 2] += ax * dFy - ay * dFx
            J[2, fi] += ax * (-nfy) - ay * (-nfx)
            J[2, fi + 1] += ax * tfy - ay * tfx
            R[3] -= Fx
            R[4] -= Fy
            J[3, 2] -= dFx
            J[4, 2] -= dFy
            J[3, fi] -= -nfx;  J[3, fi + 1] -= tfx
            J[4, fi] -= -nfy;  J[4, fi + 1] -= tfy
            bx, by = c.t0 * tx, c.t0 * ty
            R[5] -= bx * Fy - by * Fx
            J[5, 5] -= dmx * Fy - dmy * Fx
            J[5, 2] -= bx * dFy - by * dFx
            J[5, fi] -= bx * (-nfy) - by * (-nfx)
            J[5, fi + 1] -= bx * tfy - by * tfx
            if c.s == 0:
                ux, uy, dux, duy = obj_pt(c.p_obj)
                R[ri] = ux - mx
                R[ri + 1] = uy - my
                J[ri, 0] = 1.0;      J[ri, 2] = dux
                J[ri, 3] = -1.0;     J[ri, 5] = -dmx
                J[ri + 1, 1] = 1.0;  J[ri + 1, 2] = duy
                J[ri + 1, 4] = -1.0; J[ri + 1, 5] = -dmy
            else:
                uax, uay, duax, duay = obj_pt(c.a_obj)
                relx, rely = mx - uax, my - uay
                R[ri] = nfx * relx + nfy * rely
                J[ri, 0] = -nfx;  J[ri, 1] = -nfy
                J[ri, 2] = dnfx * relx + dnfy * rely + nfx * (-duax) + nfy * (-duay)
                J[ri, 3] = nfx;   J[ri, 4] = nfy
                J[ri, 5] = nfx * dmx + nfy * dmy
                R[ri + 1] = ft + c.s * c.mu * fn
                J[ri + 1, fi] = c.s * c.mu
                J[ri + 1, fi + 1] = 1.0

        else:  # environment vertex
            ux, uy, dux, duy = obj_pt(c.p_obj)
            nfx, nfy = c.n_fix
            tfx, tfy = c.t_fix
            Fx = fn * nfx + ft * tfx
            Fy = fn * nfy + ft * tfy
            R[0] += Fx
            R[1] += Fy
            J[0, fi] += nfx;  J[0, fi + 1] += tfx
            J[1, fi] += nfy;  J[1, fi + 1] += tfy
            ax, ay = ux - ox, uy - oy
            R[2] += ax * Fy - ay * Fx
            J[2, 2] += dux * Fy - duy * Fx
            J[2, fi] += ax * nfy - ay * nfx
            J[2, fi + 1] += ax * tfy - ay * tfx
            if c.s == 0:
                R[ri] = nfx * ux + nfy * uy - c.level
                J[ri, 0] = nfx;  J[ri, 1] = nfy
                J[ri, 2] = nfx * dux + nfy * duy
                R[ri + 1] = tfx * ux + tfy * uy - c.pin_t
                J[ri + 1, 0] = tfx;  J[ri + 1, 1] = tfy
                J[ri + 1, 2] = tfx * dux + tfy * duy
            else:
                R[ri] = nfx * ux + nfy * uy - c.level
                J[ri, 0] = nfx;  J[ri, 1] = nfy
                J[ri, 2] = nfx * dux + nfy * duy
                R[ri + 1] = ft + c.s * c.mu * fn
                J[ri + 1, fi] = c.s * c.mu
                J[ri + 1, fi + 1] = 1.0

    return R, J


def _rank_deficient(contacts) -> bool:
    """True when the force split carries a wrench-neutral null space.

    All contact points of one interface lie on a single line (the hand
    segment, the ground, or a wall face), so two stick contacts on the same
    interface make the tangential split indeterminate.
    """
    seen = set()
    for c in contacts:
        if c.s == 0:
            if c.iface in seen:
                return True
            seen.add(c.iface)
    return False


def _newton(z, sw, target, contacts, tol=1e-10, max_iter=40, min_norm=False):
    """Newton iteration on the stacked balance/constraint system.

    With min_norm the step comes from gelsy (the tangential force split
    between two collinear stick points is wrench neutral, and a plain solve
    would blow up along that null space); otherwise an LU solve with a
    fallback to gelsy on singular or exploding steps.
    """
    for _ in range(max_iter):
        R, J = _residual_jacobian(z, sw, target, contacts)
        res = float(np.abs(R).max())
        if not math.isfinite(res):
            return z, math.inf
        if res <= tol:
            return z, res
        if min_norm:
            dz = scipy.linalg.lstsq(J, -R, lapack_driver="gelsy",
                                    check_finite=False)[0]
        else:
            try:
                dz = np.linalg.solve(J, -R)
            except np.linalg.LinAlgError:
                dz = scipy.linalg.lstsq(J, -R, lapack_driver="gelsy",
                                        check_finite=False)[0]
            else:
                big = float(np.abs(dz).max())
                if not math.isfinite(big) or big > 1e8:
                    dz = scipy.linalg.lstsq(J, -R, lapack_driver="gelsy",
                                            check_finite=False)[0]
        if not np.all(np.isfinite(dz)) or float(np.abs(dz[:6]).max()) > 0.5:
            return z, math.inf
        z = z + dz
    R, _ = _residual_jacobian(z, sw, target, contacts)
    res = float(np.abs(R).max())
    return z, (res if math.isfinite(res) else math.inf)


def _segment_face_crossing(sw: SimWorld) -> bool:
    """True if the hand segment properly crosses any polygon face."""
    tip_a, tip_b = sw.hand_tips()
    verts = sw.vertices_world()
    n = len(verts)
    for j in range(n):
        a, b = verts[j], verts[(j + 1) % n]
        d1 = cross2(b - a, tip_a - a)
        d2 = cross2(b - a, tip_b - a)
        d3 = cross2(tip_b - tip_a, a - tip_a)
        d4 = cross2(tip_b - tip_a, b - tip_a)
        if d1 * d2 < -1e-18 and d3 * d4 < -1e-18:
            # proper crossing; grazing within tolerance does not count
            if min(abs(d1), abs(d2)) > 1e-9 * max(1.0, float(np.hypot(*(b - a)))):
                return True
    return False


def _check_trial(sw, target, hyp, contacts, z, res, cfg):
    """Feasibility screening of a converged hypothesis solve."""
    if res > 1e-9:
        return False, "no_converge", None

    do = z[0:2]
    po = z[2]
    dh = z[3:5]
    ph = z[5]
    obj_pose = PlanarPose(sw.object_pose.position + do, sw.object_pose.angle + po)
    hand_pose = PlanarPose(sw.hand_pose.position + dh, sw.hand_pose.angle + ph)
    end = sw.with_poses(obj_pose, hand_pose)

    forces = [(z[6 + 2 * i], z[7 + 2 * i]) for i in range(len(contacts))]
    for fn, ft in forces:
        if fn < -1e-9:
            return False, "negative_normal", None

    # slips, extents, per-interface aggregation
    t_hat = end.hand_tangent()
    n_hat = end.hand_normal()
    center = end.hand_pose.position
    Rm = end.object_pose.rotation
    groups = {}
    totals = {}
    slips = []
    for i, c in enumerate(contacts):
        fn, ft = forces[i]
        tot = totals.setdefault(c.iface, [0.0, 0.0])
        tot[0] += fn
        tot[1] += ft
        if c.ctype == _HAND_LINE:
            u = end.object_pose.transform(c.p_obj)
            mpt = center + c.t0 * t_hat
            slip = float(t_hat @ (u - mpt))
            tang = float(t_hat @ (u - center))
            if abs(tang) > sw.hand.half_length + 1e-9:
                return False, "off_segment", None
        elif c.ctype == _TIP_FACE:
            mpt = center + c.t0 * t_hat
            a_w = end.object_pose.transform(c.a_obj)
            e_w = Rm @ c.e_obj
            s_end = float(e_w @ (mpt - a_w))
            if not (-1e-9 <= s_end <= c.face_len + 1e-9):
                return False, "off_face", None
            slip = -(s_end - c.s_start)
        else:
            u = end.object_pose.transform(c.p_obj)
            slip = float(c.t_fix @ u) - c.pin_t
        slips.append(slip)
        if c.s != 0 and slip * c.s < -1e-9:
            return False, "slip_direction", None
        if c.s == 0:
            groups.setdefault(c.iface, []).append(i)

    # the bound applies to what each interface transmits as a whole: a flush
    # patch is two anchor points sharing one physical contact
    for fn_sum, ft_sum in totals.values():
        if max(abs(fn_sum), abs(ft_sum)) > cfg.force_bound:
            return False, "force_bound", None

    for iface, idxs in groups.items():
        fn_sum = sum(forces[i][0] for i in idxs)
        ft_sum = sum(forces[i][1] for i in idxs)
        mu = contacts[idxs[0]].mu
        if abs(ft_sum) > mu * fn_sum + 1e-9:
            return False, "cone", None

    # flush patch must keep positive overlap
    hc = hyp.hand_contact
    if hc is not None and hc.kind == "flush":
        a, b = sw.polygon.face_endpoints(hc.face)
        ta = float(t_hat @ (end.object_pose.transform(a) - center))
        tb = float(t_hat @ (end.object_pose.transform(b) - center))
        lo, hi = min(ta, tb), max(ta, tb)
        if min(hi, sw.hand.half_length) - max(lo, -sw.hand.half_length) <= 1e-9:
            return False, "patch_gone", None

    if end.penetration_depth() < -1e-9:
        return False, "penetration", None
    for tip in end.hand_tips():
        tip_obj = Rm.T @ (tip - end.object_pose.position)
        if np.all(sw.polygon.all_face_residuals(tip_obj) < -1e-9):
            return False, "tip_inside", None
    if _segment_face_crossing(end):
        return False, "segment_crossing", None

    # proportional tangential re-split inside stick groups (wrench neutral)
    report = [list(f) for f in forces]
    for iface, idxs in groups.items():
        if len(idxs) < 2:
            continue
        fn_sum = sum(forces[i][0] for i in idxs)
        ft_sum = sum(forces[i][1] for i in idxs)
        if fn_sum > 1e-12:
            for i in idxs:
                report[i][1] = ft_sum * forces[i][0] / fn_sum

    dissipation = float(sum(
        slips[i] ** 2 for i, c in enumerate(contacts) if c.s != 0))

    sol = {
        "object_pose": obj_pose,
        "hand_pose": hand_pose,
        "forces": report,
        "slips": slips,
        "end": end,
        "residual": res,
    }
    return True, "", sol | {"dissipation": dissipation}


def _finish(sw, hyp, contacts, sol, trials) -> ModeSolution:
    end = sol["end"]
    t_hat = end.hand_tangent()
    n_hat = end.hand_normal()
    center = end.hand_pose.position
    Rm = end.object_pose.rotation

    records = []
    hand_F = np.zeros(2)
    hand_tau = 0.0
    env_F = np.zeros(2)
    env_tau = 0.0
    for i, c in enumerate(contacts):
        fn, ft = sol["forces"][i]
        if c.ctype == _HAND_LINE:
            point = end.object_pose.transform(c.p_obj)
            F = fn * n_hat + ft * t_hat
        elif c.ctype == _TIP_FACE:
            point = center + c.t0 * t_hat
            n_f = Rm @ c.n_obj
            t_f = Rm @ c.e_obj
            F = -fn * n_f + ft * t_f
        else:
            point = end.object_pose.transform(c.p_obj)
            F = fn * c.n_fix + ft * c.t_fix
        records.append(ContactForce(
            iface=c.iface, label=c.mode, point=tuple(point), force=tuple(F),
            f_normal=float(fn), f_tangent=float(ft), slip=float(sol["slips"][i])))
        if c.iface == "hand":
            hand_F += F
            hand_tau += cross2(point - center, F)
        else:
            env_F += F
            env_tau += cross2(point - center, F)

    return ModeSolution(
        hypothesis=hyp,
        object_pose=sol["object_pose"],
        hand_pose=sol["hand_pose"],
        contacts=tuple(records),
        hand_wrench=Wrench2(hand_F, hand_tau, center),
        env_wrench=Wrench2(env_F, env_tau, center),
        dissipation=sol["dissipation"],
        residual_norm=sol["residual"],
        trials=trials,
    )


def resolve_mode(sw: SimWorld, target: PlanarPose, hypotheses=None,
                 config: Optional[SimConfig] = None) -> ModeSolution:
    """Pick and solve the contact mode for one impedance target."""
    cfg = config or SimConfig()
    expandable = hypotheses is None
    if hypotheses is None:
        hypotheses = enumerate_modes(sw, cfg.activation_band)

    trials = []

    def run_trial(idx, hyp):
        contacts = _build_contacts(sw, hyp)
        z0 = np.zeros(6 + 2 * len(contacts))
        z, res = _newton(z0, sw, target, contacts,
                         min_norm=_rank_deficient(contacts))
        ok, reason, sol = _check_trial(sw, target, hyp, contacts, z, res, cfg)
        tr = _Trial(idx, hyp, ok, reason)
        if ok:
            tr.dissipation = sol["dissipation"]
            tr.stick_count = hyp.stick_count()
            tr.solution = sol
            tr.contacts = contacts
        trials.append(tr)

    for idx, hyp in enumerate(hypotheses):
        run_trial(idx, hyp)

    feasible = [t for t in trials if t.feasible]
    if not feasible and expandable:
        # a flush candidate may have suppressed the very point-slide label the
        # command needs (e.g. the hand rotating off a face it started flush
        # with), so retry with the full label set before giving up
        seen = {repr(h.to_json()) for h in hypotheses}
        count = len(hypotheses)
        extra = [h for h in enumerate_modes(sw, cfg.activation_band,
                                            suppress_overlaps=False)
                 if repr(h.to_json()) not in seen]
        for hyp in extra:
            run_trial(count, hyp)
            count += 1
        feasible = [t for t in trials if t.feasible]
        seen.update(repr(h.to_json()) for h in extra)

    if not feasible and expandable:
        # the proximity band only sees contacts that are already close, but a
        # single command may sweep across one (drag ending against a wall, a
        # plunge onto the object): widen the band to the commanded reach so
        # those crossings get candidates; the force-sign and penetration
        # screens still reject anything the motion cannot actually touch
        dp = float(np.linalg.norm(target.position - sw.hand_pose.position))
        dth = abs(wrap_angle(target.angle - sw.hand_pose.angle))
        verts = sw.vertices_world()
        radius = float(np.max(np.linalg.norm(
            verts - verts.mean(axis=0), axis=1)))
        reach = dp + dth * (sw.hand.half_length + 2.0 * radius)
        if reach > 0.0:
            wide = [h for h in enumerate_modes(
                        sw, cfg.activation_band + reach,
                        suppress_overlaps=False)
                    if repr(h.to_json()) not in seen]
            for hyp in wide:
                run_trial(count, hyp)
                count += 1
            feasible = [t for t in trials if t.feasible]

    if not feasible:
        diag = [{"mode": t.hyp.to_json(), "reason": t.reason} for t in trials]
        if any(t.reason == "force_bound" for t in trials):
            raise JammedConfiguration(
                f"all {len(trials)} mode hypotheses infeasible, contact force "
                f"bound {cfg.force_bound:g} N exceeded", diagnostics=diag)
        raise NoFeasibleMode(
            f"no feasible contact mode among {len(trials)} hypotheses",
            diagnostics=diag)

    best_d = min(t.dissipation for t in feasible)
    short = [t for t in feasible if t.dissipation <= best_d + 1e-13]
    short.sort(key=lambda t: (-t.stick_count, t.index))
    chosen = short[0]
    return _finish(sw, chosen.hyp, chosen.contacts, chosen.solution, len(trials))
