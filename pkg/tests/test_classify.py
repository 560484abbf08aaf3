import math

import pytest

from layoutbench.evaluate.classify import (
    EmptyLayout,
    classify,
    compare_texts,
    detect_scale,
)
from layoutbench.evaluate.verdicts import CATEGORY_RANK, EvalOptions, Verdict
from layoutbench.gdsii.flatten import (
    TextLabel,
    drop_layer,
    from_polygons,
    scale_layout,
    translate_layout,
)
from layoutbench.geometry.shapes import regular_polygon

from helpers import with_resolution


class FailedOutcome:
    status = "timeout"


def _fast(task_map, task_id, pixels=512):
    return with_resolution(task_map[task_id], pixels)


def test_identity_is_correct(task_map, ok_outcome):
    for task_id in ("Circle", "Hexagon", "MicrofluidicChip", "Text"):
        task = _fast(task_map, task_id)
        verdict = classify(ok_outcome, task.ground_truth_layouts[0], task)
        assert verdict.category == "correct", task_id
        assert all(v == 1.0 for v in verdict.per_layer_scores.values())


def test_unit_ignored_circle_is_scaling_error(task_map, ok_outcome):
    # a 10 um circle where 10 mm was requested: coordinates 1e-3 too small
    task = _fast(task_map, "Circle")
    candidate = scale_layout(task.ground_truth_layouts[0], 1e-3)
    verdict = classify(ok_outcome, candidate, task)
    assert verdict.category == "scaling_error"
    assert verdict.best_scale == pytest.approx(1e3)


def test_scale_coherence_across_hypotheses(task_map, ok_outcome):
    task = _fast(task_map, "Pentagon")
    truth = task.ground_truth_layouts[0]
    for s in task.eval_options.scale_hypotheses:
        if s == 1.0:
            continue
        verdict = classify(ok_outcome, scale_layout(truth, 1.0 / s), task)
        assert verdict.category == "scaling_error"
        assert verdict.best_scale == pytest.approx(s)


def test_uniform_x2_is_not_a_hypothesis(task_map, ok_outcome):
    task = _fast(task_map, "Square")
    candidate = scale_layout(task.ground_truth_layouts[0], 2.0)
    verdict = classify(ok_outcome, candidate, task)
    assert verdict.category in ("partially_correct", "shape_error")
    assert verdict.best_scale == 1.0


def test_hexagon_truth_vs_triangle_is_shape_error(task_map, ok_outcome):
    task = _fast(task_map, "Hexagon")
    triangle = from_polygons({(0, 0): [regular_polygon(3, 10e-3)]})
    verdict = classify(ok_outcome, triangle, task)
    assert verdict.category == "shape_error"


def test_layer_deletion_is_partially_correct(task_map, ok_outcome):
    task = _fast(task_map, "MicrofluidicChip")
    candidate = drop_layer(task.ground_truth_layouts[0], (3, 0))
    verdict = classify(ok_outcome, candidate, task)
    assert verdict.category == "partially_correct"
    assert verdict.per_layer_scores["3/0"] == 0.0


def test_runtime_error_for_failed_or_missing_outcome(task_map):
    task = _fast(task_map, "Circle")
    truth = task.ground_truth_layouts[0]
    assert classify(FailedOutcome(), truth, task).category == "runtime_error"
    assert classify(None, None, task).category == "runtime_error"

    class Ok:
        status = "ok"

    assert classify(Ok(), None, task).category == "runtime_error"


def test_monotone_degradation(task_map, ok_outcome):
    task = _fast(task_map, "FinFET")
    truth = task.ground_truth_layouts[0]
    base = classify(ok_outcome, truth, task)
    degraded = classify(ok_outcome, drop_layer(truth, (2, 0)), task)
    assert CATEGORY_RANK[degraded.category] > CATEGORY_RANK[base.category]


def test_extra_layers_reduce_confidence_not_category(task_map, ok_outcome):
    task = _fast(task_map, "Square")
    truth = task.ground_truth_layouts[0]
    extra = dict(truth.layers)
    extra[(9, 0)] = [regular_polygon(4, 1e-3, center=(0.05, 0.05))]
    candidate = from_polygons(extra)
    verdict = classify(ok_outcome, candidate, task)
    assert verdict.category == "correct"
    assert verdict.confidence < 1.0


def test_multi_ground_truth_accepts_alternate(task_map, ok_outcome):
    task = _fast(task_map, "Trapezoid")
    assert len(task.ground_truth_layouts) == 2
    for idx, truth in enumerate(task.ground_truth_layouts):
        verdict = classify(ok_outcome, truth, task)
        assert verdict.category == "correct"
        assert verdict.matched_ground_truth == idx


def test_determinism(task_map, ok_outcome):
    task = _fast(task_map, "Donut")
    candidate = scale_layout(task.ground_truth_layouts[0], 1e-3)
    a = classify(ok_outcome, candidate, task)
    b = classify(ok_outcome, candidate, task)
    assert a == b


def test_allow_translation_recenters_candidate(task_map, ok_outcome):
    task = _fast(task_map, "Triangle")
    truth = task.ground_truth_layouts[0]
    moved = translate_layout(truth, (0.25, -0.125))
    strict = classify(ok_outcome, moved, task)
    assert strict.category in ("shape_error", "partially_correct")
    relaxed_opts = task.eval_options.replaced(allow_translation=True)
    relaxed = classify(ok_outcome, moved, task, relaxed_opts)
    assert relaxed.category == "correct"


# --- detect_scale ----------------------------------------------------------


def test_detect_scale_identity(task_map):
    task = _fast(task_map, "Oval")
    truth = task.ground_truth_layouts[0]
    scan = detect_scale(truth, truth, task.eval_options)
    assert scan.best_scale == 1.0
    assert min(scan.best_scores().values()) == 1.0


def test_detect_scale_requires_polygons(task_map):
    task = task_map["Oval"]
    with pytest.raises(EmptyLayout):
        detect_scale(from_polygons({}), task.ground_truth_layouts[0], task.eval_options)


# --- compare_texts ---------------------------------------------------------


def _label(string, x=0.0, y=0.0, layer=1):
    return TextLabel(string, (x, y), layer)


def test_texts_identical_sets_match():
    texts = (_label("a"), _label("b", 1e-3))
    report = compare_texts(texts, texts, tolerance=1e-6)
    assert report.all_truth_matched()
    assert not report.unmatched_candidate


def test_missing_label_reported_truth_side():
    truth = (_label("IBM Research"),)
    report = compare_texts((), truth, tolerance=1e-6)
    assert report.unmatched_truth == truth


def test_offset_beyond_tolerance_unmatched():
    truth = (_label("x", 0.0, 0.0),)
    candidate = (_label("x", 2.1e-3, 0.0),)
    report = compare_texts(candidate, truth, tolerance=1e-3)
    assert report.unmatched_truth == truth
    assert report.unmatched_candidate == candidate
    # within tolerance it matches
    near = (_label("x", 0.4e-3, 0.0),)
    assert compare_texts(near, truth, tolerance=1e-3).all_truth_matched()


def test_layer_mismatch_blocks_text_match():
    truth = (_label("x", layer=1),)
    candidate = (_label("x", layer=2),)
    assert not compare_texts(candidate, truth, tolerance=1.0).all_truth_matched()


def test_text_task_missing_text_not_correct(task_map, ok_outcome):
    task = _fast(task_map, "Text")
    verdict = classify(ok_outcome, from_polygons({}), task)
    assert verdict.category != "correct"


# --- options validation ----------------------------------------------------


def test_eval_options_validation():
    with pytest.raises(ValueError):
        EvalOptions(theta_correct=0.4, theta_partial=0.5)
    with pytest.raises(ValueError):
        EvalOptions(scale_hypotheses=(1e3, 1e-3))
    with pytest.raises(ValueError):
        Verdict(category="nonsense")
    with pytest.raises(ValueError):
        Verdict(category="scaling_error", best_scale=1.0)
