"""Verdict taxonomy and evaluation options."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

CATEGORIES = (
    "correct",
    "scaling_error",
    "partially_correct",
    "shape_error",
    "runtime_error",
)

# Ordering used when several acceptable ground truths give different
# outcomes and the best is kept; lower is better.
CATEGORY_RANK = {
    "correct": 0,
    "scaling_error": 1,
    "partially_correct": 2,
    "shape_error": 3,
    "runtime_error": 4,
}

DEFAULT_SCALE_HYPOTHESES = (1e-6, 1e-3, 1.0, 1e3, 1e6)


@dataclass(frozen=True)
class Verdict:
    category: str
    best_scale: float = 1.0
    per_layer_scores: Mapping[str, float] = field(default_factory=dict)
    matched_ground_truth: int = -1
    evidence: str = ""
    confidence: float = 1.0

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown verdict category {self.category!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be within [0, 1]")
        if self.category == "scaling_error" and self.best_scale == 1.0:
            raise ValueError("scaling_error requires best_scale != 1")


@dataclass(frozen=True)
class EvalOptions:
    """Operating points for the automated verdict decision tree.

    The unit-confusion hypotheses cover model habits of drawing in
    millimeters, nanometers or meters when micrometers were meant:
    factors 1e3, 1e-3 and 1e6 relative to the intended unit, plus the
    identity and its inverse.
    """

    theta_correct: float = 0.95
    theta_partial: float = 0.50
    scale_hypotheses: tuple[float, ...] = DEFAULT_SCALE_HYPOTHESES
    allow_translation: bool = False
    text_relief: float = 0.7
    raster_long_axis: int = 2048
    text_tolerance: Optional[float] = None  # meters; None derives from the truth extent

    def __post_init__(self):
        if not 0.0 < self.theta_partial < self.theta_correct <= 1.0:
            raise ValueError("need 0 < theta_partial < theta_correct <= 1")
        if 1.0 not in self.scale_hypotheses:
            raise ValueError("scale hypotheses must include 1")
        if self.raster_long_axis < 16:
            raise ValueError("raster_long_axis too small to score anything")

    def replaced(self, **kwargs) -> "EvalOptions":
        from dataclasses import replace

        return replace(self, **kwargs)
