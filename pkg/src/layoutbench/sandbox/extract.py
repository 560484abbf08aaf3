"""Pull runnable source out of model responses and strip blocked lines."""

from __future__ import annotations

import re
from dataclasses import dataclass

from layoutbench.errors import LayoutBenchError

# The interactive viewer call has no display in the runtime environment;
# removing those lines instead of failing the run keeps scoring fair.
DEFAULT_BLOCKLIST = ("LayoutViewer",)

_TAGGED = re.compile(r"```python[ \t]*\r?\n(.*?)```", re.DOTALL | re.IGNORECASE)
_ANY_FENCE = re.compile(r"```[a-zA-Z0-9_+-]*[ \t]*\r?\n(.*?)```", re.DOTALL)


class NoCodeBlock(LayoutBenchError):
    pass


@dataclass(frozen=True)
class ExtractedCode:
    source: str
    warnings: tuple[str, ...] = ()


def extract_code(response: str) -> ExtractedCode:
    """Return the first python-tagged fenced block.

    Falls back to an untagged fence (with a warning) when no tagged
    block exists; extra blocks beyond the first are ignored with a
    warning.  Raises NoCodeBlock when there is no fence at all.
    """
    tagged = _TAGGED.findall(response)
    if tagged:
        warnings = ()
        if len(tagged) > 1:
            warnings = (f"MultipleBlocks: {len(tagged)} python blocks, first taken",)
        return ExtractedCode(tagged[0], warnings)
    fences = _ANY_FENCE.findall(response)
    if fences:
        warnings = ["untagged code fence used"]
        if len(fences) > 1:
            warnings.append(f"MultipleBlocks: {len(fences)} fences, first taken")
        return ExtractedCode(fences[0], tuple(warnings))
    raise NoCodeBlock("response contains no fenced code block")


@dataclass(frozen=True)
class SanitizedCode:
    source: str
    hits: tuple[str, ...]  # removed lines, verbatim


def sanitize(source: str, blocklist=DEFAULT_BLOCKLIST) -> SanitizedCode:
    """Remove every line matching a blocklist pattern.

    Patterns are regular expressions searched per line.  Kept lines are
    byte-identical and stay in order, so the result is idempotent.
    """
    patterns = [re.compile(p) for p in blocklist]
    kept: list[str] = []
    hits: list[str] = []
    for line in source.splitlines(keepends=True):
        if any(p.search(line) for p in patterns):
            hits.append(line.rstrip("\r\n"))
        else:
            kept.append(line)
    return SanitizedCode("".join(kept), tuple(hits))
