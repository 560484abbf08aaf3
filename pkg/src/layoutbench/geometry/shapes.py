"""Polygon constructors and path-to-area expansion.

Polygons are (n, 2) float arrays of vertices in meters, implicitly
closed, with at least 3 distinct finite vertices.
"""

from __future__ import annotations

import math

import numpy as np

from layoutbench.errors import LayoutBenchError

Point = tuple[float, float]


class InvalidN(LayoutBenchError):
    pass


class InvalidRadius(LayoutBenchError):
    pass


class DegeneratePath(LayoutBenchError):
    pass


def as_polygon(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("polygon needs an (n>=3, 2) vertex array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("polygon vertices must be finite")
    return pts


def polygon_area(points: np.ndarray) -> float:
    """Signed shoelace area (positive for counterclockwise rings)."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_centroid(points: np.ndarray) -> Point:
    x, y = points[:, 0], points[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * np.sum(cross)
    if abs(area) < 1e-30:
        return (float(np.mean(x)), float(np.mean(y)))
    cx = float(np.sum((x + xn) * cross) / (6.0 * area))
    cy = float(np.sum((y + yn) * cross) / (6.0 * area))
    return (cx, cy)


def rectangle(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    return np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], dtype=float)


def rectangle_centered(center: Point, width: float, height: float) -> np.ndarray:
    cx, cy = center
    return rectangle(cx - width / 2, cy - height / 2, cx + width / 2, cy + height / 2)


def regular_polygon(n: int, edge: float, center: Point = (0.0, 0.0)) -> np.ndarray:
    """Regular n-gon with the given edge length, first vertex apex-up.

    Circumradius R = edge / (2 sin(pi/n)).
    """
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise InvalidN(f"need an integer n >= 3, got {n!r}")
    if edge <= 0:
        raise InvalidN("edge length must be positive")
    radius = edge / (2.0 * math.sin(math.pi / n))
    angles = math.pi / 2 + 2.0 * math.pi * np.arange(n) / n
    return np.column_stack(
        (center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles))
    )


def _arc_segments(radius: float, max_chord_error: float) -> int:
    """Segments for a full circle so neighbouring vertices are at most
    max_chord_error apart; floor of 8 when the bound saturates."""
    ratio = min(1.0, max_chord_error / (2.0 * radius))
    theta = 2.0 * math.asin(ratio)
    return max(8, math.ceil(2.0 * math.pi / theta))


def circle(
    radius: float, center: Point = (0.0, 0.0), max_chord_error: float = 1e-5
) -> np.ndarray:
    """Inscribed polygon approximation of a circle.

    Vertex spacing keeps every chord at most max_chord_error long (the
    sagitta is then far below that bound).
    """
    if radius <= 0:
        raise InvalidRadius(f"radius must be positive, got {radius}")
    if max_chord_error <= 0:
        raise InvalidRadius("max_chord_error must be positive")
    n = _arc_segments(radius, max_chord_error)
    angles = 2.0 * math.pi * np.arange(n) / n
    return np.column_stack(
        (center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles))
    )


def ellipse(
    semi_x: float,
    semi_y: float,
    center: Point = (0.0, 0.0),
    max_chord_error: float = 1e-5,
) -> np.ndarray:
    if semi_x <= 0 or semi_y <= 0:
        raise InvalidRadius("ellipse semi-axes must be positive")
    n = _arc_segments(max(semi_x, semi_y), max_chord_error)
    angles = 2.0 * math.pi * np.arange(n) / n
    return np.column_stack(
        (center[0] + semi_x * np.cos(angles), center[1] + semi_y * np.sin(angles))
    )


def annulus(
    outer_radius: float,
    inner_radius: float,
    center: Point = (0.0, 0.0),
    max_chord_error: float = 1e-5,
) -> list[np.ndarray]:
    """Ring with a hole, returned as two C-shaped halves.

    Splitting keeps each ring simple and below the GDSII per-record
    vertex budget even at fine chord tolerances.
    """
    if not 0 < inner_radius < outer_radius:
        raise InvalidRadius("need 0 < inner_radius < outer_radius")
    n_out = _arc_segments(outer_radius, max_chord_error)
    n_out += n_out % 2  # even so the halves split cleanly
    n_in = _arc_segments(inner_radius, max_chord_error)
    n_in += n_in % 2
    halves = []
    for start in (0.0, math.pi):
        a_out = start + math.pi * np.arange(n_out // 2 + 1) / (n_out // 2)
        a_in = start + math.pi * np.arange(n_in // 2 + 1)[::-1] / (n_in // 2)
        outer = np.column_stack(
            (center[0] + outer_radius * np.cos(a_out), center[1] + outer_radius * np.sin(a_out))
        )
        inner = np.column_stack(
            (center[0] + inner_radius * np.cos(a_in), center[1] + inner_radius * np.sin(a_in))
        )
        halves.append(np.vstack((outer, inner)))
    return halves


def rounded_rectangle(
    width: float,
    height: float,
    corner_radius: float,
    center: Point = (0.0, 0.0),
    max_chord_error: float = 1e-5,
) -> np.ndarray:
    if corner_radius <= 0 or 2 * corner_radius > min(width, height):
        raise InvalidRadius("corner radius must fit twice into both sides")
    n_quarter = max(2, _arc_segments(corner_radius, max_chord_error) // 4)
    cx, cy = center
    hx, hy = width / 2 - corner_radius, height / 2 - corner_radius
    corners = [(cx + hx, cy + hy), (cx - hx, cy + hy), (cx - hx, cy - hy), (cx + hx, cy - hy)]
    pts = []
    for idx, (ax, ay) in enumerate(corners):
        start = idx * math.pi / 2
        angles = start + math.pi / 2 * np.arange(n_quarter + 1) / n_quarter
        pts.append(
            np.column_stack(
                (ax + corner_radius * np.cos(angles), ay + corner_radius * np.sin(angles))
            )
        )
    return np.vstack(pts)


def cross(total_size: float, arm_width: float, center: Point = (0.0, 0.0)) -> np.ndarray:
    """Plus-sign polygon with equal overall length and width."""
    if not 0 < arm_width < total_size:
        raise ValueError("need 0 < arm_width < total_size")
    h = total_size / 2.0
    w = arm_width / 2.0
    cx, cy = center
    pts = [
        (w, h), (-w, h), (-w, w), (-h, w), (-h, -w), (-w, -w),
        (-w, -h), (w, -h), (w, -w), (h, -w), (h, w), (w, w),
    ]
    return np.array([(cx + x, cy + y) for x, y in pts], dtype=float)


_CAP_ARC_SEGMENTS = 16


def expand_path(points, width: float, pathtype: int = 0) -> list[np.ndarray]:
    """Expand a centerline into area polygons of the given total width.

    Returns one quad per segment plus join wedges (mitered up to a miter
    limit of 2, beveled beyond) and end caps: pathtype 0 flush, 1
    semicircular (16-segment arcs), 2 extended square by width/2.  The
    pieces overlap at joins; rasterization unions them.
    """
    if width <= 0:
        raise DegeneratePath("path width must be positive")
    if pathtype not in (0, 1, 2):
        raise ValueError("pathtype must be 0, 1 or 2")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegeneratePath("path needs an (n, 2) point array")
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    pts = pts[keep]
    if len(pts) < 2:
        raise DegeneratePath("path has no extent after removing repeated points")

    half = width / 2.0
    dirs = pts[1:] - pts[:-1]
    lengths = np.hypot(dirs[:, 0], dirs[:, 1])
    dirs = dirs / lengths[:, None]
    normals = np.column_stack((-dirs[:, 1], dirs[:, 0]))

    polys: list[np.ndarray] = []
    for i in range(len(dirs)):
        a, b = pts[i], pts[i + 1]
        n = normals[i] * half
        polys.append(np.array([a + n, b + n, b - n, a - n]))

    for i in range(len(dirs) - 1):  # joins at interior vertices
        p = pts[i + 1]
        da, db = dirs[i], dirs[i + 1]
        na, nb = normals[i], normals[i + 1]
        turn = da[0] * db[1] - da[1] * db[0]
        if abs(turn) < 1e-12:
            continue  # collinear, segment quads already meet
        s = -1.0 if turn > 0 else 1.0  # outer side of the bend
        ea = p + s * half * na  # outer corner of segment i's end
        eb = p + s * half * nb  # outer corner of segment i+1's start
        denom = 1.0 + float(na @ nb)
        if denom > 1e-12:
            q = p + s * half * (na + nb) / denom
            if np.hypot(*(q - p)) <= 2.0 * half:  # miter limit 2
                polys.append(np.array([p, ea, q, eb]))
                continue
        polys.append(np.array([p, ea, eb]))

    if pathtype == 1:
        for p, outward in ((pts[0], -dirs[0]), (pts[-1], dirs[-1])):
            base = math.atan2(outward[1], outward[0]) - math.pi / 2
            angles = base + math.pi * np.arange(_CAP_ARC_SEGMENTS + 1) / _CAP_ARC_SEGMENTS
            arc = np.column_stack(
                (p[0] + half * np.cos(angles), p[1] + half * np.sin(angles))
            )
            polys.append(arc)
    elif pathtype == 2:
        for p, outward in ((pts[0], -dirs[0]), (pts[-1], dirs[-1])):
            n = np.array([-outward[1], outward[0]]) * half
            o = outward * half
            polys.append(np.array([p + n, p + n + o, p - n + o, p - n]))
    return polys
