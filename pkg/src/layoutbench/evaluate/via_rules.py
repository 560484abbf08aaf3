"""Geometric rule checks for via-connection layouts.

Encodes the requirements that make a via stack manufacturable: round
vias of the right size, metal wide enough to cover them, pads centered
on vias with margin over the metal, and vias kept clear of the metal
ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from layoutbench.errors import LayoutBenchError
from layoutbench.gdsii.flatten import FlatLayout
from layoutbench.geometry.raster import make_frame, rasterize_polygons
from layoutbench.geometry.shapes import circle, polygon_centroid

Point = tuple[float, float]


class MissingLayer(LayoutBenchError):
    pass


@dataclass(frozen=True)
class ViaRuleSet:
    """All lengths in meters; layer fields are GDS layer numbers."""

    via_radius: float
    pad_radius: float
    metal_width: float
    metal_length: float
    via_centers: tuple[Point, Point]
    pad_margin: float
    via_edge_space: float
    via_layer: int = 2
    metal_layer: int = 3
    pad_layer: int = 4
    circularity_limit: float = 0.05  # max vertex radial deviation / via_radius
    coverage_min: float = 0.999
    tolerance: float = 0.005  # relative slack absorbing arc discretization

    def __post_init__(self):
        for name in ("via_radius", "pad_radius", "metal_width", "metal_length",
                     "pad_margin", "via_edge_space"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.via_centers[0] == self.via_centers[1]:
            raise ValueError("via centers must be distinct")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    measured: float = float("nan")
    required: float = float("nan")


def _layer_polygons(layout: FlatLayout, layer: int) -> list[np.ndarray]:
    polys = []
    for (num, _), items in layout.layers.items():
        if num == layer:
            polys.extend(items)
    return polys


def _nearest_polygon(polys: list[np.ndarray], point: Point) -> Optional[np.ndarray]:
    best, best_dist = None, math.inf
    for poly in polys:
        d = math.dist(polygon_centroid(poly), point)
        if d < best_dist:
            best, best_dist = poly, d
    return best


def _projected_extent(polys: list[np.ndarray], direction: np.ndarray) -> tuple[float, float]:
    lo, hi = math.inf, -math.inf
    for poly in polys:
        proj = poly @ direction
        lo = min(lo, float(proj.min()))
        hi = max(hi, float(proj.max()))
    return lo, hi


def check_via_rules(layout: FlatLayout, rules: ViaRuleSet) -> list[Violation]:
    """Run all checks; returns one violation per failed check, empty when clean."""
    vias = _layer_polygons(layout, rules.via_layer)
    metals = _layer_polygons(layout, rules.metal_layer)
    pads = _layer_polygons(layout, rules.pad_layer)
    for name, polys, layer in (
        ("via", vias, rules.via_layer),
        ("metal", metals, rules.metal_layer),
        ("pad", pads, rules.pad_layer),
    ):
        if not polys:
            raise MissingLayer(f"{name} layer {layer} has no polygons")

    slack = 1.0 - rules.tolerance
    violations: list[Violation] = []

    c0 = np.array(rules.via_centers[0], dtype=float)
    c1 = np.array(rules.via_centers[1], dtype=float)
    axis = c1 - c0
    axis /= np.linalg.norm(axis)
    cross_dir = np.array([-axis[1], axis[0]])

    # (a) each via is a circle of the required radius
    for idx, center in enumerate(rules.via_centers):
        poly = _nearest_polygon(vias, center)
        centroid = polygon_centroid(poly)
        radii = np.hypot(poly[:, 0] - centroid[0], poly[:, 1] - centroid[1])
        deviation = float(np.max(np.abs(radii - rules.via_radius))) / rules.via_radius
        if deviation > rules.circularity_limit:
            violations.append(
                Violation(
                    "via_shape",
                    f"via {idx + 1} deviates from a radius-{rules.via_radius:g} circle",
                    measured=deviation,
                    required=rules.circularity_limit,
                )
            )

    # (b) metal fully covers each via disk
    for idx, center in enumerate(rules.via_centers):
        disk = circle(rules.via_radius, center, max_chord_error=rules.via_radius / 64)
        box = (
            center[0] - rules.via_radius,
            center[1] - rules.via_radius,
            center[0] + rules.via_radius,
            center[1] + rules.via_radius,
        )
        frame = make_frame(box, long_axis=256)
        disk_mask = rasterize_polygons([disk], frame)
        metal_mask = rasterize_polygons(metals, frame)
        disk_pixels = disk_mask.count()
        covered = int(np.count_nonzero(disk_mask.bits & metal_mask.bits))
        coverage = covered / disk_pixels if disk_pixels else 1.0
        if coverage < rules.coverage_min:
            violations.append(
                Violation(
                    "via_coverage",
                    f"metal covers only part of via {idx + 1}",
                    measured=coverage,
                    required=rules.coverage_min,
                )
            )

    # (c) metal width at least the via diameter
    metal_cross_lo, metal_cross_hi = _projected_extent(metals, cross_dir)
    metal_width = metal_cross_hi - metal_cross_lo
    if metal_width < 2 * rules.via_radius * slack:
        violations.append(
            Violation(
                "metal_width",
                "metal narrower than the via diameter",
                measured=metal_width,
                required=2 * rules.via_radius,
            )
        )

    # (d) pads concentric with vias
    for idx, center in enumerate(rules.via_centers):
        pad = _nearest_polygon(pads, center)
        offset = math.dist(polygon_centroid(pad), center)
        if offset > 0.05 * rules.pad_radius:
            violations.append(
                Violation(
                    "pad_concentricity",
                    f"pad {idx + 1} center is off its via center",
                    measured=offset,
                    required=0.05 * rules.pad_radius,
                )
            )

    # (e) pad sticks out past the metal edge by at least the margin
    for idx, center in enumerate(rules.via_centers):
        pad = _nearest_polygon(pads, center)
        pad_lo, pad_hi = _projected_extent([pad], cross_dir)
        margin = min(pad_hi - metal_cross_hi, metal_cross_lo - pad_lo)
        if margin < rules.pad_margin * slack:
            violations.append(
                Violation(
                    "pad_margin",
                    f"margin between metal edge and pad {idx + 1} too small",
                    measured=margin,
                    required=rules.pad_margin,
                )
            )

    # (f) via centers clear of the metal end edges
    metal_axis_lo, metal_axis_hi = _projected_extent(metals, axis)
    for idx, center in enumerate(rules.via_centers):
        along = float(np.array(center) @ axis)
        space = min(along - metal_axis_lo, metal_axis_hi - along)
        if space < rules.via_edge_space * slack:
            violations.append(
                Violation(
                    "via_edge_spacing",
                    f"via {idx + 1} too close to a metal end edge",
                    measured=space,
                    required=rules.via_edge_space,
                )
            )

    return violations
