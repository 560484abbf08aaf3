"""Layout-generation benchmark harness.

Parses and writes GDSII streams, runs model-generated layout code in a
sandbox, scores the resulting geometry against ground truths, and
orchestrates pooled multi-model generation with an assessor pass.
"""

__version__ = "0.1.0"
