"""Deterministic PNG export for masks and layer overlays.

A small self-contained encoder keeps report bytes stable across runs:
fixed zlib level, no ancillary chunks, no timestamps.
"""

from __future__ import annotations

import struct
import zlib
from typing import TYPE_CHECKING

import numpy as np

from layoutbench.geometry.raster import (
    Frame,
    RasterMask,
    bounding_box,
    make_frame,
    rasterize,
)

if TYPE_CHECKING:
    from layoutbench.gdsii.flatten import FlatLayout

_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# Color coding: via layer yellow, metal blue, pad red; other layers take
# colors from the cycle below in ascending layer order.
FIXED_LAYER_COLORS = {2: (255, 221, 0), 3: (45, 95, 220), 4: (220, 45, 45)}
COLOR_CYCLE = [
    (70, 70, 70),
    (0, 150, 90),
    (170, 0, 170),
    (240, 130, 0),
    (0, 150, 160),
    (130, 90, 40),
    (60, 60, 180),
    (150, 150, 0),
]
BACKGROUND = (255, 255, 255)


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload))
    )


def _encode(img: np.ndarray, color_type: int, palette: bytes = b"") -> bytes:
    height, width = img.shape
    ihdr = struct.pack(">IIBBBBB", width, height, 8, color_type, 0, 0, 0)
    raw = b"".join(b"\x00" + img[row].tobytes() for row in range(height))
    out = _SIGNATURE + _chunk(b"IHDR", ihdr)
    if palette:
        out += _chunk(b"PLTE", palette)
    out += _chunk(b"IDAT", zlib.compress(raw, 9))
    out += _chunk(b"IEND", b"")
    return out


def mask_to_png(mask: RasterMask) -> bytes:
    """8-bit grayscale image, set pixels black on white, top row first."""
    img = np.where(mask.bits[::-1], 0, 255).astype(np.uint8)
    return _encode(img, color_type=0)


def layer_palette(layer_numbers: list[int]) -> dict[int, tuple[int, int, int]]:
    colors: dict[int, tuple[int, int, int]] = {}
    cycle = iter(COLOR_CYCLE * (len(layer_numbers) // len(COLOR_CYCLE) + 1))
    for layer in sorted(layer_numbers):
        colors[layer] = FIXED_LAYER_COLORS.get(layer) or next(cycle)
    return colors


def render_layout_png(layout: FlatLayout, long_axis: int = 512) -> bytes:
    """Indexed-color composite of all polygon layers of a layout.

    Layers draw in ascending (layer, datatype) order, later over
    earlier.  An empty layout renders as a small blank image.
    """
    box = bounding_box(layout)
    if box is None:
        blank = np.zeros((32, 32), dtype=np.uint8)
        return _encode(blank, color_type=3, palette=bytes(BACKGROUND))
    frame = make_frame(box, long_axis=long_axis)
    keys = layout.layer_keys()
    colors = layer_palette(sorted({layer for layer, _ in keys}))
    index = np.zeros((frame.height, frame.width), dtype=np.uint8)
    palette = [BACKGROUND]
    layer_index: dict[int, int] = {}
    for layer in sorted({k[0] for k in keys}):
        layer_index[layer] = len(palette)
        palette.append(colors[layer])
    for key in keys:
        mask = rasterize(layout, key, frame)
        index[mask.bits] = layer_index[key[0]]
    flat_palette = bytes(c for rgb in palette for c in rgb)
    return _encode(index[::-1], color_type=3, palette=flat_palette)


def frame_to_png(masks: dict[int, RasterMask], frame: Frame) -> bytes:
    """Composite pre-rasterized per-layer masks sharing one frame."""
    colors = layer_palette(sorted(masks))
    index = np.zeros((frame.height, frame.width), dtype=np.uint8)
    palette = [BACKGROUND]
    for layer in sorted(masks):
        palette.append(colors[layer])
        index[masks[layer].bits] = len(palette) - 1
    flat_palette = bytes(c for rgb in palette for c in rgb)
    return _encode(index[::-1], color_type=3, palette=flat_palette)
