"""Automated verdict decision tree over execution outcome and geometry.

Replaces the human categorization step with raster IoU scoring, a
unit-confusion scale sweep, and structural text comparison.  Every
acceptable ground truth of a task is scored and the best outcome kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from layoutbench.errors import LayoutBenchError
from layoutbench.gdsii.flatten import (
    FlatLayout,
    LayerKey,
    TextLabel,
    scale_layout,
    translate_layout,
)
from layoutbench.geometry.raster import (
    bounding_box,
    layer_iou,
    make_frame,
    merge_boxes,
    rasterize,
)
from layoutbench.evaluate.verdicts import CATEGORY_RANK, EvalOptions, Verdict


class EmptyLayout(LayoutBenchError):
    pass


@dataclass(frozen=True)
class TextMatchReport:
    matched: tuple[tuple[TextLabel, TextLabel], ...]
    unmatched_truth: tuple[TextLabel, ...]
    unmatched_candidate: tuple[TextLabel, ...]

    def all_truth_matched(self) -> bool:
        return not self.unmatched_truth


def compare_texts(
    candidate_texts: Sequence[TextLabel],
    truth_texts: Sequence[TextLabel],
    tolerance: float,
) -> TextMatchReport:
    """Greedy match on string and layer equality plus position tolerance."""
    remaining = list(candidate_texts)
    matched = []
    unmatched_truth = []
    for truth in truth_texts:
        hit = None
        for cand in remaining:
            if cand.string != truth.string or cand.layer != truth.layer:
                continue
            if math.dist(cand.position, truth.position) <= tolerance:
                hit = cand
                break
        if hit is None:
            unmatched_truth.append(truth)
        else:
            remaining.remove(hit)
            matched.append((truth, hit))
    return TextMatchReport(tuple(matched), tuple(unmatched_truth), tuple(remaining))


@dataclass(frozen=True)
class ScaleScan:
    best_scale: float
    scores: dict[float, dict[LayerKey, float]]  # per hypothesis, per required layer

    def best_scores(self) -> dict[LayerKey, float]:
        return self.scores[self.best_scale]


def _nearest_hypothesis(ratio: float, hypotheses: Sequence[float]) -> float:
    return min(hypotheses, key=lambda s: abs(math.log(s) - math.log(ratio)))


def _apply_scale(
    candidate: FlatLayout, scale: float, truth_box, allow_translation: bool
) -> FlatLayout:
    if allow_translation:
        box = bounding_box(candidate)
        center = ((box[0] + box[2]) / 2, (box[1] + box[3]) / 2)
        scaled = scale_layout(candidate, scale, about=center)
        truth_center = ((truth_box[0] + truth_box[2]) / 2, (truth_box[1] + truth_box[3]) / 2)
        return translate_layout(
            scaled, (truth_center[0] - center[0], truth_center[1] - center[1])
        )
    return scale_layout(candidate, scale)


def _score_at_scale(
    candidate: FlatLayout,
    truth: FlatLayout,
    required: Sequence[LayerKey],
    scale: float,
    opts: EvalOptions,
) -> dict[LayerKey, float]:
    truth_box = bounding_box(truth)
    moved = _apply_scale(candidate, scale, truth_box, opts.allow_translation)
    box = merge_boxes([truth_box, bounding_box(moved)])
    frame = make_frame(box, long_axis=opts.raster_long_axis)
    scores = {}
    for key in required:
        scores[key] = layer_iou(rasterize(moved, key, frame), rasterize(truth, key, frame))
    return scores


def detect_scale(
    candidate: FlatLayout, truth: FlatLayout, opts: EvalOptions
) -> ScaleScan:
    """Sweep the unit-confusion hypotheses and keep the one maximizing
    the minimum required-layer IoU, ties broken toward scale 1."""
    if candidate.polygon_count() == 0 or truth.polygon_count() == 0:
        raise EmptyLayout("scale detection needs polygons on both sides")
    required = sorted(truth.layers)
    hypotheses = set(opts.scale_hypotheses)
    cand_box = bounding_box(candidate)
    truth_box = bounding_box(truth)
    cand_diag = math.dist(cand_box[:2], cand_box[2:])
    truth_diag = math.dist(truth_box[:2], truth_box[2:])
    if cand_diag > 0 and truth_diag > 0:
        hypotheses.add(_nearest_hypothesis(truth_diag / cand_diag, opts.scale_hypotheses))
    scores = {
        s: _score_at_scale(candidate, truth, required, s, opts) for s in sorted(hypotheses)
    }

    def rating(s: float):
        per_layer = scores[s]
        worst = min(per_layer.values()) if per_layer else 0.0
        return (worst, s == 1.0, -abs(math.log(s)))

    best = max(sorted(scores), key=rating)
    return ScaleScan(best_scale=best, scores=scores)


def _score_key(key: LayerKey) -> str:
    return f"{key[0]}/{key[1]}"


def _text_layers(truth: FlatLayout) -> set[int]:
    return {t.layer for t in truth.texts}


def _thresholds(
    required: Sequence[LayerKey], truth: FlatLayout, opts: EvalOptions
) -> dict[LayerKey, float]:
    relief_layers = _text_layers(truth)
    return {
        key: opts.theta_correct * (opts.text_relief if key[0] in relief_layers else 1.0)
        for key in required
    }


def _text_tolerance(truth: FlatLayout, opts: EvalOptions) -> float:
    if opts.text_tolerance is not None:
        return opts.text_tolerance
    box = bounding_box(truth)
    if box is None:
        return 1e-3  # no polygons to set a scale; fall back to 1 mm
    return max(1e-12, 0.02 * math.dist(box[:2], box[2:]))


@dataclass(frozen=True)
class _SingleResult:
    category: str
    best_scale: float
    scores: dict[LayerKey, float]
    evidence: str
    text_report: Optional[TextMatchReport]


def _classify_against(
    candidate: FlatLayout, truth: FlatLayout, opts: EvalOptions
) -> _SingleResult:
    required = sorted(truth.layers)
    thresholds = _thresholds(required, truth, opts)
    tol = _text_tolerance(truth, opts)
    truth_box = bounding_box(truth)

    def texts_at(scale: float) -> TextMatchReport:
        if scale == 1.0 and not opts.allow_translation:
            cand_texts = candidate.texts
        else:
            moved = _apply_scale(candidate, scale, truth_box, opts.allow_translation)
            cand_texts = moved.texts
        return compare_texts(cand_texts, truth.texts, tol)

    def geometry_passes(scores: dict[LayerKey, float]) -> bool:
        return all(scores[key] >= thresholds[key] for key in required)

    have_polygons = candidate.polygon_count() > 0 and truth.polygon_count() > 0

    if required and candidate.polygon_count() == 0:
        scores_at_1 = {key: 0.0 for key in required}
    elif required:
        scores_at_1 = _score_at_scale(candidate, truth, required, 1.0, opts)
    else:
        scores_at_1 = {}

    report_at_1 = texts_at(1.0)
    if geometry_passes(scores_at_1) and report_at_1.all_truth_matched():
        return _SingleResult("correct", 1.0, scores_at_1, "all layers and texts match", report_at_1)

    scan = None
    if have_polygons and required:
        scan = detect_scale(candidate, truth, opts)
        for scale in sorted(scan.scores, key=lambda s: abs(math.log(s))):
            if scale == 1.0:
                continue
            if geometry_passes(scan.scores[scale]) and texts_at(scale).all_truth_matched():
                return _SingleResult(
                    "scaling_error",
                    scale,
                    scan.scores[scale],
                    f"layers match after scaling candidate by {scale:g}",
                    texts_at(scale),
                )

    if scan is not None:
        best_scale = scan.best_scale
        best_scores = scan.best_scores()
    else:
        best_scale = 1.0
        best_scores = scores_at_1

    if required:
        mean_iou = float(np.mean([best_scores[k] for k in required]))
        passing = [k for k in required if best_scores[k] >= thresholds[k]]
        if mean_iou >= opts.theta_partial or (passing and len(passing) < len(required)):
            return _SingleResult(
                "partially_correct",
                best_scale,
                best_scores,
                f"mean IoU {mean_iou:.3f} at scale {best_scale:g}; "
                f"{len(passing)}/{len(required)} layers pass",
                texts_at(best_scale),
            )
    return _SingleResult(
        "shape_error",
        best_scale,
        best_scores,
        "geometry does not match at any unit hypothesis",
        report_at_1,
    )


def classify(
    outcome,
    candidate: Optional[FlatLayout],
    task,
    opts: Optional[EvalOptions] = None,
) -> Verdict:
    """Five-category verdict for one run of one task.

    ``outcome`` is the sandbox execution outcome (duck-typed: only
    ``status`` is read); ``candidate`` is the flattened layout when the
    run produced a parseable artifact, else None.  ``task`` provides
    ``ground_truth_layouts`` and ``eval_options``.
    """
    opts = opts or task.eval_options
    if outcome is None or getattr(outcome, "status", "spawn_failure") != "ok" or candidate is None:
        status = getattr(outcome, "status", "missing") if outcome is not None else "missing"
        return Verdict(
            category="runtime_error",
            per_layer_scores={},
            evidence=f"no parseable layout (execution status: {status})",
        )

    results = [
        _classify_against(candidate, truth, opts) for truth in task.ground_truth_layouts
    ]
    best_index = min(
        range(len(results)),
        key=lambda i: (
            CATEGORY_RANK[results[i].category],
            -(min(results[i].scores.values()) if results[i].scores else 0.0),
        ),
    )
    best = results[best_index]
    truth = task.ground_truth_layouts[best_index]

    confidence = 1.0
    extra_layers = set(candidate.layers) - set(truth.layers)
    if extra_layers:
        confidence -= 0.1 * len(extra_layers)
    if best.text_report is not None and best.text_report.unmatched_candidate:
        confidence -= 0.1
    confidence = min(1.0, max(0.0, confidence))

    evidence = best.evidence
    if extra_layers:
        evidence += f"; extra layers {sorted(extra_layers)}"
    if best.text_report is not None and best.text_report.unmatched_truth:
        missing = [t.string for t in best.text_report.unmatched_truth]
        evidence += f"; missing texts {missing}"

    return Verdict(
        category=best.category,
        best_scale=best.best_scale,
        per_layer_scores={_score_key(k): v for k, v in sorted(best.scores.items())},
        matched_ground_truth=best_index,
        evidence=evidence,
        confidence=confidence,
    )
