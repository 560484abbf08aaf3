"""Reference resolution: expand a Library into per-layer polygons in meters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from layoutbench.errors import LayoutBenchError
from layoutbench.gdsii.model import Element, Library, Structure
from layoutbench.geometry.shapes import DegeneratePath, expand_path

LayerKey = tuple[int, int]


class CyclicReference(LayoutBenchError):
    pass


class DanglingReference(LayoutBenchError):
    pass


class AmbiguousTop(LayoutBenchError):
    pass


@dataclass(frozen=True)
class TextLabel:
    string: str
    position: tuple[float, float]  # meters
    layer: int


@dataclass(frozen=True)
class FlatLayout:
    """Reference-free polygon soup in physical meters.

    ``layers`` maps (layer, datatype) to a list of (n, 2) float arrays,
    each an open ring (closing edge implied).  Treat instances as
    immutable; helpers below return new layouts.
    """

    layers: dict[LayerKey, list[np.ndarray]] = field(default_factory=dict)
    texts: tuple[TextLabel, ...] = ()
    degenerate_count: int = 0

    def polygon_count(self) -> int:
        return sum(len(polys) for polys in self.layers.values())

    def is_empty(self) -> bool:
        return self.polygon_count() == 0 and not self.texts

    def layer_keys(self) -> list[LayerKey]:
        return sorted(self.layers)


def from_polygons(
    layers: dict[LayerKey, list], texts: tuple[TextLabel, ...] = ()
) -> FlatLayout:
    """Build a layout from raw vertex lists (meters); mainly for tests."""
    out: dict[LayerKey, list[np.ndarray]] = {}
    for key, polys in layers.items():
        out[key] = [np.asarray(p, dtype=float) for p in polys]
    return FlatLayout(layers=out, texts=tuple(texts))


@dataclass(frozen=True)
class _Affine:
    # p' = linear @ p + offset
    linear: tuple[tuple[float, float], tuple[float, float]]
    offset: tuple[float, float]

    def apply(self, pts: np.ndarray) -> np.ndarray:
        m = np.array(self.linear)
        return pts @ m.T + np.array(self.offset)

    def apply_point(self, p: tuple[float, float]) -> tuple[float, float]:
        (a, b), (c, d) = self.linear
        return (a * p[0] + b * p[1] + self.offset[0], c * p[0] + d * p[1] + self.offset[1])

    def then(self, outer: "_Affine") -> "_Affine":
        (a, b), (c, d) = outer.linear
        (e, f), (g, h) = self.linear
        lin = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        off = outer.apply_point(self.offset)
        return _Affine(lin, off)

    def scale_factor(self) -> float:
        (a, b), (c, d) = self.linear
        return math.sqrt(abs(a * d - b * c))


_IDENTITY = _Affine(((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))


def _placement(el: Element, origin: tuple[float, float]) -> _Affine:
    """Reference transform: reflection, then magnification, then rotation,
    then translation to the placement origin."""
    angle = math.radians(el.angle_degrees)
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    m = el.magnification
    ry = -1.0 if el.reflect_x else 1.0
    # R(angle) @ diag(m, m*ry)
    lin = ((cos_a * m, -sin_a * m * ry), (sin_a * m, cos_a * m * ry))
    return _Affine(lin, origin)


def _clean_ring(pts: np.ndarray) -> Optional[np.ndarray]:
    """Drop consecutive duplicates and the closing point; None if < 3 left."""
    if len(pts) and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    if len(pts) == 0:
        return None
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    pts = pts[keep]
    if len(pts) >= 2 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    if len(np.unique(pts, axis=0)) < 3:
        return None
    return pts


def flatten(lib: Library, top: str = "auto") -> FlatLayout:
    """Expand all cell references of the chosen top structure.

    ``top="auto"`` selects the unique structure not referenced by any
    other.  Coordinates come out in meters.
    """
    by_name = {s.name: s for s in lib.structures}
    if not lib.structures:
        return FlatLayout()
    if top == "auto":
        referenced = {
            el.ref_name
            for s in lib.structures
            for el in s.elements
            if el.variant in ("sref", "aref")
        }
        tops = [s.name for s in lib.structures if s.name not in referenced]
        if len(tops) == 1:
            top = tops[0]
        elif not tops:
            raise CyclicReference("every structure is referenced; reference graph has a cycle")
        else:
            raise AmbiguousTop(f"multiple top candidates: {sorted(tops)}")
    elif top not in by_name:
        raise DanglingReference(f"top structure {top!r} not in library")

    scale = lib.meters_per_db_unit
    layers: dict[LayerKey, list[np.ndarray]] = {}
    texts: list[TextLabel] = []
    degenerate = 0

    def emit(struct: Structure, xf: _Affine, stack: tuple[str, ...]):
        nonlocal degenerate
        for el in struct.elements:
            if el.variant == "boundary":
                ring = _clean_ring(xf.apply(np.array(el.xy, dtype=float)))
                if ring is None:
                    degenerate += 1
                else:
                    layers.setdefault((el.layer, el.datatype), []).append(ring * scale)
            elif el.variant == "path":
                pts = xf.apply(np.array(el.xy, dtype=float)) * scale
                width = abs(el.width) * xf.scale_factor() * scale
                try:
                    polys = expand_path(pts, width, el.pathtype)
                except DegeneratePath:
                    degenerate += 1
                    continue
                layers.setdefault((el.layer, el.datatype), []).extend(polys)
            elif el.variant == "text":
                pos = xf.apply_point((float(el.xy[0][0]), float(el.xy[0][1])))
                texts.append(
                    TextLabel(el.string, (pos[0] * scale, pos[1] * scale), el.layer)
                )
            elif el.variant in ("sref", "aref"):
                child = by_name.get(el.ref_name)
                if child is None:
                    raise DanglingReference(f"reference to unknown structure {el.ref_name!r}")
                if el.ref_name in stack:
                    raise CyclicReference(
                        " -> ".join(stack + (el.ref_name,))
                    )
                if el.variant == "sref":
                    origins = [np.array(el.xy[0], dtype=float)]
                else:
                    o = np.array(el.xy[0], dtype=float)
                    col_step = (np.array(el.xy[1], dtype=float) - o) / el.columns
                    row_step = (np.array(el.xy[2], dtype=float) - o) / el.rows
                    origins = [
                        o + i * col_step + j * row_step
                        for j in range(el.rows)
                        for i in range(el.columns)
                    ]
                for origin in origins:
                    place = _placement(el, (origin[0], origin[1])).then(xf)
                    emit(child, place, stack + (el.ref_name,))

    emit(by_name[top], _IDENTITY, (top,))
    return FlatLayout(layers=layers, texts=tuple(texts), degenerate_count=degenerate)


def scale_layout(
    layout: FlatLayout, factor: float, about: tuple[float, float] = (0.0, 0.0)
) -> FlatLayout:
    """Uniformly scale all coordinates about a point."""
    anchor = np.array(about)
    layers = {
        key: [(poly - anchor) * factor + anchor for poly in polys]
        for key, polys in layout.layers.items()
    }
    texts = tuple(
        TextLabel(
            t.string,
            tuple((np.array(t.position) - anchor) * factor + anchor),
            t.layer,
        )
        for t in layout.texts
    )
    return FlatLayout(layers=layers, texts=texts, degenerate_count=layout.degenerate_count)


def translate_layout(layout: FlatLayout, delta: tuple[float, float]) -> FlatLayout:
    offset = np.array(delta)
    layers = {
        key: [poly + offset for poly in polys] for key, polys in layout.layers.items()
    }
    texts = tuple(
        TextLabel(t.string, (t.position[0] + delta[0], t.position[1] + delta[1]), t.layer)
        for t in layout.texts
    )
    return FlatLayout(layers=layers, texts=texts, degenerate_count=layout.degenerate_count)


def drop_layer(layout: FlatLayout, key: LayerKey) -> FlatLayout:
    """Remove one polygon layer; used by mutation tests and overrides."""
    layers = {k: list(v) for k, v in layout.layers.items() if k != key}
    return FlatLayout(layers=layers, texts=layout.texts, degenerate_count=layout.degenerate_count)
