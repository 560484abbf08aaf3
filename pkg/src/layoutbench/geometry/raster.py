"""Scanline rasterization and mask similarity scoring.

Masks are boolean grids with row 0 at the bottom; a pixel is set when
its center lies inside a polygon under the even-odd rule, with the
union taken across polygons of a layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional

import numpy as np

from layoutbench.errors import LayoutBenchError

if TYPE_CHECKING:  # layouts are used duck-typed to avoid an import cycle
    from layoutbench.gdsii.flatten import FlatLayout, LayerKey

DEFAULT_LONG_AXIS = 2048
DEFAULT_PAD_FRACTION = 0.02


class EmptyFrame(LayoutBenchError):
    pass


class FrameMismatch(LayoutBenchError):
    pass


@dataclass(frozen=True)
class RasterMask:
    width: int
    height: int
    origin: tuple[float, float]  # lower-left corner, meters
    pixel_size: float  # meters per pixel
    bits: np.ndarray  # bool, shape (height, width), row 0 at the bottom

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise EmptyFrame(f"{self.width}x{self.height} raster frame")
        if self.pixel_size <= 0:
            raise EmptyFrame("pixel size must be positive")

    def same_frame(self, other: "RasterMask") -> bool:
        return (
            self.width == other.width
            and self.height == other.height
            and self.origin == other.origin
            and self.pixel_size == other.pixel_size
        )

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))


@dataclass(frozen=True)
class Frame:
    """Raster geometry without bits; pass to rasterize for each layer."""

    width: int
    height: int
    origin: tuple[float, float]
    pixel_size: float


Box = tuple[float, float, float, float]  # xmin, ymin, xmax, ymax


def bounding_box(layout: FlatLayout) -> Optional[Box]:
    """Min/max over all polygon vertices across layers; None when empty."""
    xmin = ymin = np.inf
    xmax = ymax = -np.inf
    found = False
    for polys in layout.layers.values():
        for poly in polys:
            if len(poly) == 0:
                continue
            found = True
            xmin = min(xmin, float(poly[:, 0].min()))
            xmax = max(xmax, float(poly[:, 0].max()))
            ymin = min(ymin, float(poly[:, 1].min()))
            ymax = max(ymax, float(poly[:, 1].max()))
    return (xmin, ymin, xmax, ymax) if found else None


def merge_boxes(boxes: Iterable[Optional[Box]]) -> Optional[Box]:
    acc: Optional[Box] = None
    for box in boxes:
        if box is None:
            continue
        if acc is None:
            acc = box
        else:
            acc = (
                min(acc[0], box[0]),
                min(acc[1], box[1]),
                max(acc[2], box[2]),
                max(acc[3], box[3]),
            )
    return acc


def make_frame(
    box: Box,
    long_axis: int = DEFAULT_LONG_AXIS,
    pad_fraction: float = DEFAULT_PAD_FRACTION,
) -> Frame:
    """Frame covering the box padded per side, square pixels, the longer
    padded extent mapped to ``long_axis`` pixels."""
    if long_axis < 1:
        raise EmptyFrame("long_axis must be >= 1")
    xmin, ymin, xmax, ymax = box
    w = xmax - xmin
    h = ymax - ymin
    longest = max(w, h)
    if longest <= 0:
        longest = max(abs(xmax), abs(ymax), 1e-9)  # point-like content
    pad = pad_fraction * longest
    w_pad, h_pad = w + 2 * pad, h + 2 * pad
    pixel = max(w_pad, h_pad) / long_axis
    width = max(1, int(np.ceil(w_pad / pixel - 1e-9)))
    height = max(1, int(np.ceil(h_pad / pixel - 1e-9)))
    return Frame(width, height, (xmin - pad, ymin - pad), pixel)


def _fill_even_odd(bits: np.ndarray, poly: np.ndarray, origin, pixel: float) -> None:
    """XOR one polygon into bits restricted to its row window, then OR."""
    height, width = bits.shape
    x0, y0 = origin
    xs, ys = poly[:, 0], poly[:, 1]
    xe, ye = np.roll(xs, -1), np.roll(ys, -1)

    ymin = np.minimum(ys, ye)
    ymax = np.maximum(ys, ye)
    r0 = np.ceil((ymin - y0) / pixel - 0.5).astype(np.int64)
    r1 = np.ceil((ymax - y0) / pixel - 0.5).astype(np.int64)
    np.clip(r0, 0, height, out=r0)
    np.clip(r1, 0, height, out=r1)
    counts = r1 - r0
    keep = counts > 0
    if not np.any(keep):
        return
    xs, ys, xe, ye = xs[keep], ys[keep], xe[keep], ye[keep]
    r0, counts = r0[keep], counts[keep]

    total = int(counts.sum())
    edge_of = np.repeat(np.arange(len(counts)), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    rows = r0[edge_of] + offsets
    yc = y0 + (rows + 0.5) * pixel
    t = (yc - ys[edge_of]) / (ye[edge_of] - ys[edge_of])
    x_cross = xs[edge_of] + t * (xe[edge_of] - xs[edge_of])
    # first pixel column whose center lies strictly right of the crossing
    cols = np.floor((x_cross - x0) / pixel - 0.5).astype(np.int64) + 1
    np.clip(cols, 0, width, out=cols)

    row_lo = int(rows.min())
    row_hi = int(rows.max()) + 1
    acc = np.zeros((row_hi - row_lo, width + 1), dtype=np.int32)
    np.add.at(acc, (rows - row_lo, cols), 1)
    parity = np.cumsum(acc[:, :width], axis=1) & 1
    bits[row_lo:row_hi] |= parity.astype(bool)


def rasterize(layout: FlatLayout, layer: LayerKey, frame: Frame) -> RasterMask:
    """Rasterize one layer of a layout into the given frame."""
    bits = np.zeros((frame.height, frame.width), dtype=bool)
    for poly in layout.layers.get(layer, ()):
        _fill_even_odd(bits, poly, frame.origin, frame.pixel_size)
    return RasterMask(frame.width, frame.height, frame.origin, frame.pixel_size, bits)


def rasterize_polygons(polys: Iterable[np.ndarray], frame: Frame) -> RasterMask:
    bits = np.zeros((frame.height, frame.width), dtype=bool)
    for poly in polys:
        _fill_even_odd(bits, poly, frame.origin, frame.pixel_size)
    return RasterMask(frame.width, frame.height, frame.origin, frame.pixel_size, bits)


def layer_iou(a: RasterMask, b: RasterMask) -> float:
    """Intersection over union; 1.0 when both masks are empty."""
    if not a.same_frame(b):
        raise FrameMismatch("masks rasterized into different frames")
    union = int(np.count_nonzero(a.bits | b.bits))
    if union == 0:
        return 1.0
    inter = int(np.count_nonzero(a.bits & b.bits))
    return inter / union
