"""Shared exception base so the CLI can distinguish harness faults from data."""


class LayoutBenchError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LayoutBenchError):
    """Invalid or incomplete run configuration; the message is actionable."""
