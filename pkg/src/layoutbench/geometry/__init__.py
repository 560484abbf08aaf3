from layoutbench.geometry.shapes import (
    DegeneratePath,
    InvalidN,
    InvalidRadius,
    annulus,
    as_polygon,
    circle,
    cross,
    ellipse,
    expand_path,
    polygon_area,
    polygon_centroid,
    rectangle,
    rectangle_centered,
    regular_polygon,
    rounded_rectangle,
)
from layoutbench.geometry.raster import (
    EmptyFrame,
    Frame,
    FrameMismatch,
    RasterMask,
    bounding_box,
    layer_iou,
    make_frame,
    merge_boxes,
    rasterize,
    rasterize_polygons,
)
from layoutbench.geometry.png import layer_palette, mask_to_png, render_layout_png

__all__ = [
    "DegeneratePath",
    "EmptyFrame",
    "Frame",
    "FrameMismatch",
    "InvalidN",
    "InvalidRadius",
    "RasterMask",
    "annulus",
    "as_polygon",
    "bounding_box",
    "circle",
    "cross",
    "ellipse",
    "expand_path",
    "layer_iou",
    "layer_palette",
    "make_frame",
    "mask_to_png",
    "merge_boxes",
    "polygon_area",
    "polygon_centroid",
    "rasterize",
    "rasterize_polygons",
    "rectangle",
    "rectangle_centered",
    "regular_polygon",
    "render_layout_png",
    "rounded_rectangle",
]
