"""Convex hulls of noisy planar point sets.

The exact hull of noisy samples of a convex shape sprouts spurious vertices on
every noise bump. noisy_convex_hull removes them by peeling hull vertices that
sit within a noise band of the chord joining their neighbors, where the band is
fitted from the hull itself. All decisions depend only on the exact hull's
vertex set, never on interior points, so adding interior points can never
change the output.
"""

import numpy as np

from ..errors import TooFewPoints
from .pose import cross2

MIN_POINTS = 8
# Upper clip on the fitted noise band, as a fraction of the hull diameter.
# Keeps genuinely polygonal corners from being peeled when the median vertex
# height is large (few-vertex hulls).
BAND_DIAMETER_CAP = 0.02


def convex_hull(points) -> np.ndarray:
    """Strict convex hull (collinear points dropped), counterclockwise.

    Andrew's monotone chain over the lexicographically sorted unique points.
    Degenerate inputs yield fewer than 3 vertices.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts.copy()

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and cross2(chain[-1] - chain[-2], p - chain[-2]) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _vertex_heights(ring: np.ndarray) -> np.ndarray:
    """Perpendicular distance of each ring vertex to its neighbors' chord."""
    prev = np.roll(ring, 1, axis=0)
    nxt = np.roll(ring, -1, axis=0)
    chord = nxt - prev
    lengths = np.hypot(chord[:, 0], chord[:, 1])
    out = np.empty(len(ring))
    for i in range(len(ring)):
        if lengths[i] < 1e-15:
            out[i] = 0.0
        else:
            # CCW ring: the vertex pokes outward (to the right) of prev->next.
            out[i] = cross2(ring[i] - prev[i], chord[i]) / lengths[i]
    return out


def _covered(ring: np.ndarray, targets: np.ndarray, margin: float) -> bool:
    """True when every target point lies in the ring inflated outward by margin."""
    nxt = np.roll(ring, -1, axis=0)
    edges = nxt - ring
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    # Outward normals of a CCW ring.
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lengths[:, None]
    offsets = np.einsum("ij,ij->i", normals, ring)
    dist = targets @ normals.T - offsets[None, :]
    return bool(np.all(dist.max(axis=1) <= margin + 1e-12))


def noisy_convex_hull(points, inlier_fraction: float = 0.95) -> np.ndarray:
    """Convex hull of noisy samples, with noise-scale vertices peeled away.

    The band is 2x the median perpendicular height of the exact hull's vertices
    over their neighbor chords, capped at a small fraction of the hull
    diameter. Vertices shorter than the band are peeled greedily (shortest
    first) as long as every exact-hull vertex stays within one band of the
    peeled hull. Since any input point is a convex combination of the exact
    hull's vertices and the inflated hull is convex, that acceptance rule keeps
    every input point inside the returned hull inflated by the fitted band, so
    the realized inlier fraction is 1.0 and dominates any requested
    inlier_fraction.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    if len(pts) < MIN_POINTS:
        raise TooFewPoints(f"need at least {MIN_POINTS} points, got {len(pts)}")
    if not (0.0 < inlier_fraction <= 1.0):
        raise ValueError("inlier_fraction must be in (0, 1]")

    hull = convex_hull(pts)
    if len(hull) <= 3:
        return hull

    heights = _vertex_heights(hull)
    diameter = 0.0
    for i in range(len(hull)):
        d = np.hypot(*(hull - hull[i]).T).max()
        diameter = max(diameter, float(d))
    band = min(2.0 * float(np.median(heights)), BAND_DIAMETER_CAP * diameter)
    if band <= 0.0:
        return hull

    ring = [hull[i] for i in range(len(hull))]
    blocked = set()
    while len(ring) > 3:
        arr = np.array(ring)
        h = _vertex_heights(arr)
        order = np.argsort(h, kind="stable")
        peeled = False
        for i in order:
            if h[i] >= band or tuple(ring[i]) in blocked:
                continue
            candidate = np.array(ring[:i] + ring[i + 1:])
            if _covered(candidate, hull, band):
                del ring[i]
                peeled = True
                break
            blocked.add(tuple(ring[i]))
        if not peeled:
            break
    return np.array(ring)
