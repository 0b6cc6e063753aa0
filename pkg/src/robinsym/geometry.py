"""
Planar boundary reconstruction and cell clipping.

Every domain is reduced to a set of closed rings (counter-clockwise outer
boundaries, clockwise holes). Disks are traced through their exact crossings
with the grid lines, masks through a marching-squares contour of the cell
indicator. Each grid cell touched by the boundary is clipped against the
rings, giving its covered area and the open length of each of its faces.
"""
from __future__ import annotations

import math

import numpy as np

_EPS = 1e-12


def signed_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * math.fsum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def _dedupe(ring: np.ndarray, tol: float) -> np.ndarray:
    d = np.linalg.norm(ring - np.roll(ring, 1, axis=0), axis=1)
    return ring[d > tol]


def orient_ccw(ring) -> np.ndarray:
    ring = np.asarray(ring, dtype=float)
    if len(ring) > 1 and np.allclose(ring[0], ring[-1]):
        ring = ring[:-1]
    return ring if signed_area(ring) > 0 else ring[::-1].copy()


def circle_ring(center, radius: float, x0: float, y0: float, h: float) -> np.ndarray:
    """Crossings of a circle with the grid lines ``x0 + j h``, ``y0 + i h``, in angular order.

    Consecutive crossings lie in a common cell, so the chords joining them
    form the marching-squares boundary with exact edge intersections.
    """
    cx, cy = center
    pts = []
    for lo, c_along, c_other, swap in ((x0, cx, cy, False), (y0, cy, cx, True)):
        j0 = math.ceil((c_along - radius - lo) / h)
        j1 = math.floor((c_along + radius - lo) / h)
        lines = lo + h * np.arange(j0, j1 + 1)
        half = np.sqrt(np.maximum(radius**2 - (lines - c_along) ** 2, 0.0))
        for sgn in (1.0, -1.0):
            other = c_other + sgn * half
            if swap:
                pts.append(np.column_stack([other, lines]))
            else:
                pts.append(np.column_stack([lines, other]))
    pts = np.concatenate(pts)
    ang = np.arctan2(pts[:, 1] - cy, pts[:, 0] - cx)
    ring = pts[np.argsort(ang, kind="stable")]
    ring = _dedupe(ring, 1e-9 * h)
    if len(ring) < 3:
        raise ValueError("disk is too small for the grid spacing")
    return ring


def mask_rings(mask: np.ndarray, x0: float, y0: float, h: float) -> list[np.ndarray]:
    """Marching-squares contour at level 1/2 of a cell indicator.

    Cell ``(i, j)`` has its center at ``(x0 + (j + 1/2) h, y0 + (i + 1/2) h)``.
    """
    from skimage import measure

    padded = np.pad(np.asarray(mask, dtype=float), 1)
    rings = []
    for c in measure.find_contours(padded, 0.5):
        # contour coordinates are (row, col) in padded center units
        xy = np.column_stack([x0 + (c[:, 1] - 0.5) * h, y0 + (c[:, 0] - 0.5) * h])
        xy = _dedupe(xy[:-1] if np.allclose(xy[0], xy[-1]) else xy, 1e-12 * h)
        if len(xy) >= 3:
            rings.append(xy)
    return orient_by_nesting(rings)


def orient_by_nesting(rings: list[np.ndarray]) -> list[np.ndarray]:
    """Outer boundaries counter-clockwise, holes clockwise (by even-odd depth)."""
    out = []
    for k, ring in enumerate(rings):
        others = [r for m, r in enumerate(rings) if m != k]
        depth = 0
        if others:
            px, py = ring[:1, 0], ring[:1, 1]
            depth = sum(bool(points_inside([r], px, py)[0]) for r in others)
        ccw = orient_ccw(ring)
        out.append(ccw if depth % 2 == 0 else ccw[::-1].copy())
    return out


def points_inside(rings: list[np.ndarray], px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """Even-odd point-in-region test, vectorized over points."""
    inside = np.zeros(px.shape, dtype=bool)
    for ring in rings:
        xa, ya = ring[:, 0], ring[:, 1]
        xb, yb = np.roll(xa, -1), np.roll(ya, -1)
        for k in range(len(ring)):
            if ya[k] == yb[k]:
                continue
            crosses = (ya[k] > py) != (yb[k] > py)
            xint = xa[k] + (py - ya[k]) * (xb[k] - xa[k]) / (yb[k] - ya[k])
            inside ^= crosses & (px < xint)
    return inside


def lattice_inside(rings: list[np.ndarray], xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Even-odd test on the lattice ``xs x ys`` by scanlines; shape ``(len(ys), len(xs))``."""
    a = np.concatenate(rings)
    b = np.concatenate([np.roll(r, -1, axis=0) for r in rings])
    sloped = a[:, 1] != b[:, 1]
    a, b = a[sloped], b[sloped]
    out = np.zeros((len(ys), len(xs)), dtype=bool)
    for i, y in enumerate(ys):
        hit = (a[:, 1] > y) != (b[:, 1] > y)
        if not hit.any():
            continue
        ah, bh = a[hit], b[hit]
        xint = np.sort(ah[:, 0] + (y - ah[:, 1]) * (bh[:, 0] - ah[:, 0]) / (bh[:, 1] - ah[:, 1]))
        # crossings strictly to the right of each point
        right = len(xint) - np.searchsorted(xint, xs, side="right")
        out[i] = right % 2 == 1
    return out


def split_boundary(rings: list[np.ndarray], x0: float, y0: float, h: float):
    """Cut every ring edge at the grid lines.

    Returns arrays ``(row, col, nx, ny, length, mx, my)``, one entry per piece.
    The outward normal of a CCW edge ``(dx, dy)`` is ``(dy, -dx)``; each piece
    is assigned to the cell on its inner side, which settles pieces lying
    exactly on a grid line.
    """
    out = []
    for ring in rings:
        a = ring
        b = np.roll(ring, -1, axis=0)
        for (ax, ay), (bx, by) in zip(a, b):
            dx, dy = bx - ax, by - ay
            length = math.hypot(dx, dy)
            if length == 0:
                continue
            ts = [0.0, 1.0]
            for lo, pa, d in ((x0, ax, dx), (y0, ay, dy)):
                if d != 0:
                    k0, k1 = sorted(((pa - lo) / h, (pa + d - lo) / h))
                    for k in range(math.ceil(k0), math.floor(k1) + 1):
                        t = (lo + k * h - pa) / d
                        if 0.0 < t < 1.0:
                            ts.append(t)
            ts = np.unique(ts)
            nx, ny = dy / length, -dx / length
            for t0, t1 in zip(ts[:-1], ts[1:]):
                piece = (t1 - t0) * length
                if piece <= _EPS * h:
                    continue
                tm = 0.5 * (t0 + t1)
                mx, my = ax + tm * dx, ay + tm * dy
                col = math.floor((mx - 1e-7 * h * nx - x0) / h)
                row = math.floor((my - 1e-7 * h * ny - y0) / h)
                out.append((row, col, nx, ny, piece, mx, my))
    if not out:
        raise ValueError("domain boundary is empty")
    arr = np.array(out, dtype=float)
    return (
        arr[:, 0].astype(int),
        arr[:, 1].astype(int),
        arr[:, 2],
        arr[:, 3],
        arr[:, 4],
        arr[:, 5],
        arr[:, 6],
    )


def _clip_halfplane(poly, inside, intersect):
    out = []
    n = len(poly)
    for k in range(n):
        cur, prev = poly[k], poly[k - 1]
        cin, pin = inside(cur), inside(prev)
        if cin:
            if not pin:
                out.append(intersect(prev, cur))
            out.append(cur)
        elif pin:
            out.append(intersect(prev, cur))
    return out


def _clip_x(ring, xa, xb):
    # drop vertices whose two edges stay strictly on one outer side; they
    # cannot contribute to the clipped polygon
    side = np.where(ring[:, 0] < xa, -1, np.where(ring[:, 0] > xb, 1, 0))
    redundant = (side != 0) & (side == np.roll(side, 1)) & (side == np.roll(side, -1))
    poly = [tuple(p) for p in ring[~redundant]]
    for inside, c in ((lambda p: p[0] >= xa, xa), (lambda p: p[0] <= xb, xb)):
        if not poly:
            break
        poly = _clip_halfplane(
            poly, inside, lambda p, q, c=c: (c, p[1] + (q[1] - p[1]) * (c - p[0]) / (q[0] - p[0]))
        )
    return poly


def _clip_y(poly, ya, yb):
    for inside, c in ((lambda p: p[1] >= ya, ya), (lambda p: p[1] <= yb, yb)):
        if not poly:
            break
        poly = _clip_halfplane(
            poly, inside, lambda p, q, c=c: (p[0] + (q[0] - p[0]) * (c - p[1]) / (q[1] - p[1]), c)
        )
    return poly


def column_coverage(rings, xa: float, h: float, ys):
    """Covered area and face openings for the cells ``[xa, xa+h] x [y, y+h]``, ``y in ys``.

    Openings come back as ``(west, east, south, north)`` lengths. Edges of the
    clipped polygon running along a face are summed with the orientation that
    leaves the region on their left, so holes and the degenerate
    back-and-forth edges Sutherland-Hodgman leaves behind cancel out.
    """
    xb = xa + h
    tol = 1e-9 * h
    columns = [_clip_x(r, xa, xb) for r in rings]
    results = []
    for ya in ys:
        yb = ya + h
        area = 0.0
        west = east = south = north = 0.0
        for col in columns:
            if len(col) < 3:
                continue
            poly = _clip_y(col, ya, yb)
            if len(poly) < 3:
                continue
            p = np.asarray(poly)
            area += signed_area(p)
            q = np.roll(p, -1, axis=0)
            for (px, py), (qx, qy) in zip(p, q):
                if abs(px - xb) < tol and abs(qx - xb) < tol:
                    east += qy - py
                elif abs(px - xa) < tol and abs(qx - xa) < tol:
                    west += py - qy
                elif abs(py - ya) < tol and abs(qy - ya) < tol:
                    south += qx - px
                elif abs(py - yb) < tol and abs(qy - yb) < tol:
                    north += px - qx
        area = min(max(area, 0.0), h * h)
        results.append((area, tuple(min(max(v, 0.0), h) for v in (west, east, south, north))))
    return results
