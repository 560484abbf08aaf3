import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from layoutbench.gdsii.flatten import from_polygons, translate_layout
from layoutbench.geometry.raster import (
    EmptyFrame,
    Frame,
    FrameMismatch,
    bounding_box,
    layer_iou,
    make_frame,
    merge_boxes,
    rasterize,
    rasterize_polygons,
)
from layoutbench.geometry.shapes import rectangle
from layoutbench.geometry.png import mask_to_png, render_layout_png


def _rect_layout(x0, y0, x1, y1, key=(0, 0)):
    return from_polygons({key: [rectangle(x0, y0, x1, y1)]})


def test_grid_aligned_rectangle_exact_pixel_count():
    # frame: 16x16 pixels of size 1 over [0,16)^2; rectangle on pixel borders
    frame = Frame(width=16, height=16, origin=(0.0, 0.0), pixel_size=1.0)
    mask = rasterize(_rect_layout(2.0, 3.0, 10.0, 9.0), (0, 0), frame)
    assert mask.count() == 8 * 6


def test_half_pixel_shift_changes_no_more_than_one_row_and_column():
    frame = Frame(width=16, height=16, origin=(0.0, 0.0), pixel_size=1.0)
    base = rasterize(_rect_layout(2.0, 3.0, 10.0, 9.0), (0, 0), frame)
    shifted = rasterize(_rect_layout(2.5, 3.5, 10.5, 9.5), (0, 0), frame)
    assert abs(shifted.count() - base.count()) <= 8 + 6 + 1


def test_empty_layer_rasterizes_clear():
    frame = Frame(width=8, height=8, origin=(0.0, 0.0), pixel_size=1.0)
    mask = rasterize(from_polygons({}), (0, 0), frame)
    assert mask.count() == 0


def test_even_odd_rule_subtracts_hole():
    outer = rectangle(0.0, 0.0, 10.0, 10.0)
    inner = rectangle(3.0, 3.0, 7.0, 7.0)
    keyhole = np.vstack([outer, outer[:1], inner[::-1], inner[-1:][::-1]])
    frame = Frame(width=10, height=10, origin=(0.0, 0.0), pixel_size=1.0)
    mask = rasterize_polygons([keyhole], frame)
    assert mask.count() == 100 - 16
    # union semantics across separate polygons: no subtraction
    both = rasterize_polygons([outer, inner], frame)
    assert both.count() == 100


def test_self_overlapping_single_ring_cancels():
    outer = rectangle(0.0, 0.0, 10.0, 10.0)
    inner = rectangle(3.0, 3.0, 7.0, 7.0)
    frame = Frame(width=10, height=10, origin=(0.0, 0.0), pixel_size=1.0)
    ring = np.vstack([outer, inner])  # one ring visiting both loops
    mask = rasterize_polygons([ring], frame)
    assert bool(mask.bits[5, 5]) is False  # hole region cleared by parity


def test_iou_identical_and_disjoint():
    frame = Frame(width=32, height=32, origin=(0.0, 0.0), pixel_size=1.0)
    a = rasterize(_rect_layout(1.0, 1.0, 9.0, 9.0), (0, 0), frame)
    b = rasterize(_rect_layout(20.0, 20.0, 28.0, 28.0), (0, 0), frame)
    assert layer_iou(a, a) == 1.0
    assert layer_iou(a, b) == 0.0


def test_iou_vacuous_match_for_empty_masks():
    frame = Frame(width=8, height=8, origin=(0.0, 0.0), pixel_size=1.0)
    empty = rasterize(from_polygons({}), (0, 0), frame)
    assert layer_iou(empty, empty) == 1.0


def test_iou_offset_squares_is_one_third():
    # unit squares offset by half a side: intersection 0.5, union 1.5
    layout_a = _rect_layout(0.0, 0.0, 1.0, 1.0)
    layout_b = _rect_layout(0.5, 0.0, 1.5, 1.0)
    box = merge_boxes([bounding_box(layout_a), bounding_box(layout_b)])
    frame = make_frame(box, long_axis=2048)
    a = rasterize(layout_a, (0, 0), frame)
    b = rasterize(layout_b, (0, 0), frame)
    analytic = 0.5 / 1.5
    per_shape_perimeter = 4.0
    tolerance = 2 * per_shape_perimeter * frame.pixel_size / 1.5
    assert layer_iou(a, b) == pytest.approx(analytic, abs=tolerance)


def test_iou_symmetry_and_frame_mismatch():
    frame = Frame(width=16, height=16, origin=(0.0, 0.0), pixel_size=1.0)
    other = Frame(width=16, height=16, origin=(1.0, 0.0), pixel_size=1.0)
    a = rasterize(_rect_layout(0.0, 0.0, 5.0, 5.0), (0, 0), frame)
    b = rasterize(_rect_layout(2.0, 2.0, 9.0, 9.0), (0, 0), frame)
    c = rasterize(_rect_layout(2.0, 2.0, 9.0, 9.0), (0, 0), other)
    assert layer_iou(a, b) == layer_iou(b, a)
    with pytest.raises(FrameMismatch):
        layer_iou(a, c)


def test_iou_translation_invariance_with_cotranslated_frames():
    layout_a = _rect_layout(0.0, 0.0, 3.0, 2.0)
    layout_b = _rect_layout(1.0, 0.5, 4.0, 2.5)
    delta = (17.25, -4.5)
    box = merge_boxes([bounding_box(layout_a), bounding_box(layout_b)])
    frame = make_frame(box, long_axis=512)
    moved_a = translate_layout(layout_a, delta)
    moved_b = translate_layout(layout_b, delta)
    moved_frame = Frame(
        frame.width,
        frame.height,
        (frame.origin[0] + delta[0], frame.origin[1] + delta[1]),
        frame.pixel_size,
    )
    iou_before = layer_iou(
        rasterize(layout_a, (0, 0), frame), rasterize(layout_b, (0, 0), frame)
    )
    iou_after = layer_iou(
        rasterize(moved_a, (0, 0), moved_frame), rasterize(moved_b, (0, 0), moved_frame)
    )
    assert iou_after == pytest.approx(iou_before, abs=1e-12)


def test_rasterize_monotone_in_polygons():
    frame = Frame(width=64, height=64, origin=(0.0, 0.0), pixel_size=1.0)
    one = rasterize_polygons([rectangle(1, 1, 20, 20)], frame)
    two = rasterize_polygons([rectangle(1, 1, 20, 20), rectangle(10, 10, 40, 40)], frame)
    assert np.all(two.bits[one.bits])


def test_make_frame_padding_and_long_axis():
    frame = make_frame((0.0, 0.0, 10.0, 4.0), long_axis=100, pad_fraction=0.02)
    assert max(frame.width, frame.height) == 100
    assert frame.origin[0] == pytest.approx(-0.2)
    assert frame.origin[1] == pytest.approx(-0.2)
    assert frame.pixel_size == pytest.approx(10.4 / 100)


def test_empty_frame_rejected():
    from layoutbench.geometry.raster import RasterMask

    with pytest.raises(EmptyFrame):
        RasterMask(width=0, height=4, origin=(0.0, 0.0), pixel_size=1.0, bits=np.zeros((4, 0), bool))
    with pytest.raises(EmptyFrame):
        make_frame((0.0, 0.0, 1.0, 1.0), long_axis=0)


def test_bounding_box_examples():
    layout = _rect_layout(-5e-3, -5e-3, 5e-3, 5e-3)
    assert bounding_box(layout) == pytest.approx((-5e-3, -5e-3, 5e-3, 5e-3))
    assert bounding_box(from_polygons({})) is None


def test_png_exports_are_deterministic():
    layout = from_polygons(
        {(0, 0): [rectangle(0, 0, 4, 4)], (2, 0): [rectangle(1, 1, 3, 3)]}
    )
    frame = Frame(width=8, height=8, origin=(0.0, 0.0), pixel_size=1.0)
    mask = rasterize(layout, (0, 0), frame)
    assert mask_to_png(mask) == mask_to_png(mask)
    png_a = render_layout_png(layout, long_axis=64)
    png_b = render_layout_png(layout, long_axis=64)
    assert png_a == png_b
    assert png_a.startswith(b"\x89PNG")


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 12), st.integers(0, 12), st.integers(1, 4), st.integers(1, 4),
    st.integers(0, 12), st.integers(0, 12), st.integers(1, 4), st.integers(1, 4),
)
def test_axis_aligned_iou_matches_analytic(x0, y0, w0, h0, x1, y1, w1, h1):
    frame = Frame(width=20, height=20, origin=(0.0, 0.0), pixel_size=1.0)
    rect_a = (float(x0), float(y0), float(x0 + w0), float(y0 + h0))
    rect_b = (float(x1), float(y1), float(x1 + w1), float(y1 + h1))
    a = rasterize(_rect_layout(*rect_a), (0, 0), frame)
    b = rasterize(_rect_layout(*rect_b), (0, 0), frame)
    ix = max(0.0, min(rect_a[2], rect_b[2]) - max(rect_a[0], rect_b[0]))
    iy = max(0.0, min(rect_a[3], rect_b[3]) - max(rect_a[1], rect_b[1]))
    inter = ix * iy
    union = w0 * h0 + w1 * h1 - inter
    assert layer_iou(a, b) == pytest.approx(inter / union)
