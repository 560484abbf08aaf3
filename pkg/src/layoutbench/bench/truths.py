"""Ground-truth libraries for the 25 benchmark tasks.

Each builder returns a Library in database units of 1 nm (0.5 nm for
the pillar-array chip, whose row shift needs the finer grid).  Shapes
come from the geometry constructors and land on the integer grid by
rounding, well below any scoring tolerance.
"""

from __future__ import annotations

import math

import numpy as np

from layoutbench.gdsii.model import Element, Library, Structure, aref, boundary, path, text
from layoutbench.geometry.shapes import (
    annulus,
    circle,
    cross,
    ellipse,
    rectangle,
    regular_polygon,
    rounded_rectangle,
)

MM = 1_000_000  # db units (nm) per millimeter
UM = 1_000
CHORD_MM = int(0.01 * MM)  # smoothness used for millimeter-scale arcs
CHORD_UM = 500  # and for micrometer-scale arcs (0.5 um)

UNITS_NM = {"user_unit_per_db_unit": 1e-3, "meters_per_db_unit": 1e-9}


def _poly(layer: int, datatype: int, pts: np.ndarray) -> Element:
    return boundary(layer, datatype, np.round(pts).astype(np.int64).tolist())


def _rect(layer: int, datatype: int, x0, y0, x1, y1) -> Element:
    return _poly(layer, datatype, rectangle(x0, y0, x1, y1))


def _lib(elements, name="BENCH", structures=None, **units) -> Library:
    units = units or UNITS_NM
    if structures is None:
        structures = (Structure("TOP", tuple(elements)),)
    return Library(name=name, structures=tuple(structures), **units)


def circle_truth() -> Library:
    return _lib([_poly(0, 0, circle(10 * MM, (0, 0), CHORD_MM))])


def donut_truth() -> Library:
    halves = annulus(10 * MM, 5 * MM, (0, 0), CHORD_MM)
    return _lib([_poly(0, 0, h) for h in halves])


def oval_truth() -> Library:
    return _lib([_poly(0, 0, ellipse(10 * MM, 6.5 * MM, (0, 0), CHORD_MM))])


def square_truth() -> Library:
    # lower right corner at the origin
    return _lib([_rect(0, 0, -10 * MM, 0, 0, 10 * MM)])


def triangle_truth() -> Library:
    return _lib([_poly(0, 0, regular_polygon(3, 10 * MM))])


def grid_truth() -> Library:
    # 5 um pitch mesh of 0.5 um lines over 200 x 400 um, lines centered
    # on the pitch positions, the whole pattern offset by (100, 800) nm.
    ox, oy = 100, 800
    w, h, pitch, half = 200 * UM, 400 * UM, 5 * UM, 250
    elements = []
    for i in range(w // pitch + 1):
        x = i * pitch
        elements.append(_rect(1, 4, ox + x - half, oy, ox + x + half, oy + h))
    for j in range(h // pitch + 1):
        y = j * pitch
        elements.append(_rect(1, 4, ox, oy + y - half, ox + w, oy + y + half))
    return _lib(elements)


def heptagon_truth() -> Library:
    return _lib([_poly(0, 0, regular_polygon(7, 10 * MM))])


def octagon_truth() -> Library:
    return _lib([_poly(0, 0, regular_polygon(8, 10 * MM))])


def trapezoid_truths() -> list[Library]:
    up = np.array([(-10 * MM, -4 * MM), (10 * MM, -4 * MM), (5 * MM, 4 * MM), (-5 * MM, 4 * MM)])
    down = up * np.array([1, -1])
    return [_lib([_poly(0, 0, up)]), _lib([_poly(0, 0, down[::-1])])]


def hexagon_truth() -> Library:
    return _lib([_poly(0, 0, regular_polygon(6, 10 * MM))])


def pentagon_truth() -> Library:
    return _lib([_poly(0, 0, regular_polygon(5, 10 * MM))])


def text_truth() -> Library:
    return _lib([text(1, 0, (0, 0), "Hello, GDS!")])


def arrow_truths() -> list[Library]:
    # 10 mm long, head 3 mm long and 6 mm wide, body 2 mm wide (1/3).
    def arrow(dy):
        body = _rect(0, 0, 0, -1 * MM + dy, 7 * MM, 1 * MM + dy)
        head = _poly(
            0,
            0,
            np.array([(7 * MM, -3 * MM + dy), (10 * MM, dy), (7 * MM, 3 * MM + dy)]),
        )
        return _lib([body, head])

    return [arrow(0), arrow(3 * MM)]  # centerline on y=0, or bbox corner at origin


def square_array_truth() -> Library:
    unit = Structure("UNIT", (_rect(0, 0, 0, 0, 5 * MM, 5 * MM),))
    origin = (-180 * MM, -180 * MM)
    top = Structure(
        "TOP",
        (
            aref(
                "UNIT",
                origin,
                columns=10,
                rows=10,
                col_vector_end=(origin[0] + 200 * MM, origin[1]),
                row_vector_end=(origin[0], origin[1] + 200 * MM),
            ),
        ),
    )
    return _lib(None, structures=(unit, top))


def serpentine_truth() -> Library:
    pts = [(0, 0)]
    x = y = 0
    moves = ["U", "R", "D", "R"] * 4  # 16 segments, 15 turns
    for move in moves:
        if move == "U":
            y += 50 * UM
        elif move == "D":
            y -= 50 * UM
        else:
            x += 50 * UM
        pts.append((x, y))
    return _lib([path(2, 6, pts, width=1 * UM, pathtype=0)])


def rounded_square_truths() -> list[Library]:
    centered = rounded_rectangle(10 * MM, 10 * MM, 1 * MM, (0, 0), CHORD_MM)
    cornered = centered + np.array([5 * MM, 5 * MM])
    return [_lib([_poly(0, 0, centered)]), _lib([_poly(0, 0, cornered)])]


def spiral_truth() -> Library:
    t = np.linspace(0.0, 6 * math.pi, 400)
    r = np.exp(-0.1 * t) * UM
    pts = np.column_stack((r * np.cos(t), r * np.sin(t)))
    return _lib([path(0, 0, np.round(pts).astype(np.int64).tolist(), width=1 * UM)])


def basic_layout_truth() -> Library:
    return _lib(
        [
            _rect(0, 0, -5 * UM, -2500, 5 * UM, 2500),  # active 10 x 5 um
            _rect(1, 0, -500, -3500, 500, 3500),  # gate crossing vertically
            _rect(2, 0, -2500, -500, -1500, 500),  # contacts 1 um from gate
            _rect(2, 0, 1500, -500, 2500, 500),
        ]
    )


def rectangle_with_text_truth() -> Library:
    return _lib(
        [
            _rect(0, 0, -15 * MM, -5 * MM, 15 * MM, 5 * MM),
            text(1, 0, (0, 0), "IBM Research"),
        ]
    )


def microfluidic_chip_truth() -> Library:
    return _lib(
        [
            _rect(0, 0, -15 * MM, -10 * MM, 15 * MM, 10 * MM),  # bulk
            _poly(2, 0, circle(2 * MM, (-10 * MM, 0), CHORD_MM)),  # vias
            _poly(2, 0, circle(2 * MM, (10 * MM, 0), CHORD_MM)),
            _rect(3, 0, -10 * MM, -MM // 2, 10 * MM, MM // 2),  # channel
        ]
    )


VIA_CENTERS_UM = ((50, 150), (550, 150))


def via_connection_truth() -> Library:
    elements = []
    for cx, cy in VIA_CENTERS_UM:
        elements.append(_poly(2, 0, circle(10 * UM, (cx * UM, cy * UM), CHORD_UM)))
    elements.append(_rect(3, 0, 0, 130 * UM, 600 * UM, 170 * UM))
    for cx, cy in VIA_CENTERS_UM:
        elements.append(_poly(4, 0, circle(30 * UM, (cx * UM, cy * UM), CHORD_UM)))
    return _lib(elements)


def fiducial_circle_truth() -> Library:
    elements = [_poly(0, 0, circle(int(1.6 * MM), (0, 0), CHORD_MM))]
    pitch = 200 * UM
    reach = int(1.45 * MM)  # marks plus labels stay inside the circle
    cols = [i for i in range(-7, 8)]
    rows = [j for j in range(-7, 8)]
    kept = [
        (i, j)
        for j in rows
        for i in cols
        if math.hypot(i * pitch, j * pitch) <= reach
    ]
    for i, j in kept:
        elements.append(_poly(1, 0, cross(100 * UM, 20 * UM, (i * pitch, j * pitch))))
    top_row = max(j for _, j in kept)
    left_col = min(i for i, _ in kept)
    for i, j in kept:
        label = f"{chr(ord('A') + top_row - j)}{i - left_col + 1}"
        elements.append(text(2, 0, (i * pitch + 30 * UM, j * pitch + 30 * UM), label))
    return _lib(elements)


def complex_layout_truth() -> Library:
    elements = []
    for x0 in (0, 25 * UM, 50 * UM):
        elements.append(_rect(0, 0, x0, 0, x0 + 20 * UM, 5 * UM))
    for xc in (10 * UM, 35 * UM, 60 * UM):  # verticals over each active center
        elements.append(_rect(1, 0, xc - 250, -2 * UM, xc + 250, 7 * UM))
    for yc in (-1 * UM, 6 * UM):  # horizontals closing the grid
        elements.append(_rect(1, 0, 5 * UM, yc - 250, 65 * UM, yc + 250))
    for xc in (10 * UM, 35 * UM, 60 * UM):  # contacts at gate/active crossings
        elements.append(_rect(2, 0, xc - 500, 2 * UM, xc + 500, 3 * UM))
    return _lib(elements)


# Pillar-array chip: 0.5 nm grid so a 0.1 row-shift of the 625 nm pitch
# (62.5 nm) stays on integer coordinates.
DLD_UNITS = {"user_unit_per_db_unit": 5e-4, "meters_per_db_unit": 5e-10}
_DB2 = 2  # db units per nm on the 0.5 nm grid


def dld_chip_truth() -> Library:
    um = 1000 * _DB2
    pitch = 625 * _DB2
    pillar_r = 200 * _DB2
    rows, cols = 80, 30
    chan_half_y = 10 * um
    chan_x = 25 * um
    pillar = Structure(
        "PILLAR", (_poly(1, 0, circle(pillar_r, (0, 0), 100 * _DB2)),)
    )
    elements = [
        _rect(0, 0, -chan_x, -chan_half_y, chan_x, chan_half_y),  # channel
        _rect(0, 0, -75 * um, -10 * um, -25 * um, 10 * um),  # buses
        _rect(0, 0, 25 * um, -10 * um, 75 * um, 10 * um),
        _poly(0, 0, circle(20 * um, (-95 * um, 0), um // 2)),  # inlet/outlet
        _poly(0, 0, circle(20 * um, (95 * um, 0), um // 2)),
    ]
    y_first = -(cols - 1) * pitch // 2
    for k in range(rows):
        x = -chan_x + pitch // 2 + k * pitch
        shift = (k % 10) * (pitch // 10)
        origin = (x, y_first + shift)
        elements.append(
            aref(
                "PILLAR",
                origin,
                columns=cols,
                rows=1,
                col_vector_end=(origin[0], origin[1] + cols * pitch),
                row_vector_end=(origin[0] + pitch, origin[1]),
            )
        )
    top = Structure("TOP", tuple(elements))
    return _lib(None, structures=(pillar, top), **DLD_UNITS)


def finfet_truth() -> Library:
    return _lib(
        [
            _rect(0, 0, -500, -50, 500, 50),  # fin 1.0 x 0.1 um
            _rect(1, 0, -50, -150, 50, 150),  # gate, 0.1 um long
            _rect(2, 0, -700, -150, -300, 150),  # source
            _rect(2, 0, 300, -150, 700, 150),  # drain
        ]
    )
