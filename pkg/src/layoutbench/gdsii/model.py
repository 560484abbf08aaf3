"""In-memory GDSII document tree.

All types are immutable values after construction; coordinates are
integer database units until flattening converts them to meters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from layoutbench.errors import LayoutBenchError

INT32_MAX = 2**31 - 1
MAX_NAME_BYTES = 32

Timestamp = tuple[int, int, int, int, int, int]
DEFAULT_TIMESTAMP: Timestamp = (2024, 1, 1, 0, 0, 0)


class NameTooLong(LayoutBenchError):
    pass


class CoordinateOverflow(LayoutBenchError):
    pass


@dataclass(frozen=True)
class Element:
    """One structure element; `variant` selects which fields are meaningful.

    Coordinates are (x, y) integer pairs in database units.  Boundary
    rings are stored closed (first point repeated at the end).  Aref xy
    holds exactly three points: origin, column-vector end, row-vector
    end.
    """

    variant: str  # "boundary" | "path" | "text" | "sref" | "aref"
    layer: int = 0
    datatype: int = 0  # texttype for text elements
    xy: tuple[tuple[int, int], ...] = ()
    width: int = 0
    pathtype: int = 0
    string: str = ""
    ref_name: str = ""
    magnification: float = 1.0
    angle_degrees: float = 0.0
    reflect_x: bool = False
    columns: int = 0
    rows: int = 0

    def __post_init__(self):
        if self.variant not in ("boundary", "path", "text", "sref", "aref"):
            raise ValueError(f"unknown element variant {self.variant!r}")
        if self.layer < 0 or self.datatype < 0:
            raise ValueError("layer and datatype/texttype must be >= 0")
        if self.variant == "boundary":
            if len(self.xy) < 4 or self.xy[0] != self.xy[-1]:
                raise ValueError("boundary xy must be a closed ring with >= 4 stored points")
        elif self.variant == "path":
            if len(self.xy) < 2:
                raise ValueError("path needs at least 2 points")
            if self.pathtype not in (0, 1, 2):
                raise ValueError("pathtype must be 0, 1 or 2")
        elif self.variant == "sref":
            if len(self.xy) != 1 or not self.ref_name:
                raise ValueError("sref needs a referenced name and one origin point")
        elif self.variant == "aref":
            if len(self.xy) != 3 or not self.ref_name:
                raise ValueError("aref needs a referenced name and exactly 3 xy points")
            if self.columns < 1 or self.rows < 1:
                raise ValueError("aref needs columns >= 1 and rows >= 1")
        elif self.variant == "text":
            if len(self.xy) != 1:
                raise ValueError("text needs exactly one position")


def boundary(layer: int, datatype: int, points: list[tuple[int, int]]) -> Element:
    """Build a boundary from an open vertex list, closing the ring."""
    pts = [(int(x), int(y)) for x, y in points]
    if pts and pts[0] != pts[-1]:
        pts.append(pts[0])
    return Element(variant="boundary", layer=layer, datatype=datatype, xy=tuple(pts))


def path(
    layer: int,
    datatype: int,
    points: list[tuple[int, int]],
    width: int,
    pathtype: int = 0,
) -> Element:
    pts = tuple((int(x), int(y)) for x, y in points)
    return Element(
        variant="path", layer=layer, datatype=datatype, xy=pts, width=int(width), pathtype=pathtype
    )


def text(layer: int, texttype: int, position: tuple[int, int], string: str) -> Element:
    return Element(
        variant="text",
        layer=layer,
        datatype=texttype,
        xy=((int(position[0]), int(position[1])),),
        string=string,
    )


def sref(
    ref_name: str,
    origin: tuple[int, int],
    magnification: float = 1.0,
    angle_degrees: float = 0.0,
    reflect_x: bool = False,
) -> Element:
    return Element(
        variant="sref",
        ref_name=ref_name,
        xy=((int(origin[0]), int(origin[1])),),
        magnification=magnification,
        angle_degrees=angle_degrees,
        reflect_x=reflect_x,
    )


def aref(
    ref_name: str,
    origin: tuple[int, int],
    columns: int,
    rows: int,
    col_vector_end: tuple[int, int],
    row_vector_end: tuple[int, int],
    magnification: float = 1.0,
    angle_degrees: float = 0.0,
    reflect_x: bool = False,
) -> Element:
    pts = (
        (int(origin[0]), int(origin[1])),
        (int(col_vector_end[0]), int(col_vector_end[1])),
        (int(row_vector_end[0]), int(row_vector_end[1])),
    )
    return Element(
        variant="aref",
        ref_name=ref_name,
        xy=pts,
        columns=columns,
        rows=rows,
        magnification=magnification,
        angle_degrees=angle_degrees,
        reflect_x=reflect_x,
    )


@dataclass(frozen=True)
class Structure:
    name: str
    elements: tuple[Element, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("structure name must be nonempty")
        if len(self.name.encode("ascii", "replace")) > MAX_NAME_BYTES:
            raise NameTooLong(f"structure name {self.name!r} exceeds {MAX_NAME_BYTES} bytes")


@dataclass(frozen=True)
class Library:
    """Parsed GDSII document with physical units.

    `user_unit_per_db_unit` is the dimensionless UNITS first value;
    `meters_per_db_unit` is the physical size of one database unit.
    """

    name: str
    user_unit_per_db_unit: float
    meters_per_db_unit: float
    structures: tuple[Structure, ...] = ()
    timestamps: tuple[Timestamp, Timestamp] = (DEFAULT_TIMESTAMP, DEFAULT_TIMESTAMP)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.meters_per_db_unit <= 0 or self.user_unit_per_db_unit <= 0:
            raise ValueError("units must be positive")
        names = [s.name for s in self.structures]
        if len(names) != len(set(names)):
            raise ValueError("structure names must be unique within a library")

    def structure(self, name: str) -> Optional[Structure]:
        for s in self.structures:
            if s.name == name:
                return s
        return None
