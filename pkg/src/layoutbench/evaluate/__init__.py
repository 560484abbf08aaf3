from layoutbench.evaluate.verdicts import (
    CATEGORIES,
    CATEGORY_RANK,
    DEFAULT_SCALE_HYPOTHESES,
    EvalOptions,
    Verdict,
)
from layoutbench.evaluate.classify import (
    EmptyLayout,
    ScaleScan,
    TextMatchReport,
    classify,
    compare_texts,
    detect_scale,
)
from layoutbench.evaluate.via_rules import MissingLayer, ViaRuleSet, Violation, check_via_rules

__all__ = [
    "CATEGORIES",
    "CATEGORY_RANK",
    "DEFAULT_SCALE_HYPOTHESES",
    "EmptyLayout",
    "EvalOptions",
    "MissingLayer",
    "ScaleScan",
    "TextMatchReport",
    "Verdict",
    "ViaRuleSet",
    "Violation",
    "check_via_rules",
    "classify",
    "compare_texts",
    "detect_scale",
]
