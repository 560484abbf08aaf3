"""Aggregation of run records into category distributions, with the
human-review override channel applied before counting."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from layoutbench.errors import LayoutBenchError
from layoutbench.evaluate.verdicts import CATEGORIES
from layoutbench.bench.matrix import ResultSet, RunRecord


class UnknownOverrideKey(LayoutBenchError):
    pass


@dataclass(frozen=True)
class Override:
    task_id: str
    mode: str
    backend_id: str
    run_index: int
    category: str
    note: str = ""

    def key(self):
        return (self.task_id, self.mode, self.backend_id, self.run_index)


@dataclass(frozen=True)
class OverrideFile:
    entries: tuple[Override, ...] = ()


def load_overrides(path: Path) -> OverrideFile:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = []
    for item in raw.get("overrides", raw if isinstance(raw, list) else []):
        if item["category"] not in CATEGORIES:
            raise ValueError(f"override category {item['category']!r} unknown")
        entries.append(
            Override(
                task_id=item["task"],
                mode=item["mode"],
                backend_id=item["backend"],
                run_index=int(item["run"]),
                category=item["category"],
                note=item.get("note", ""),
            )
        )
    return OverrideFile(tuple(entries))


Cell = tuple[str, str, str]  # (task_category, backend_id, mode)


@dataclass
class CategoryTable:
    """Per (task category, backend, mode): verdict counts and fractions."""

    counts: dict[Cell, Counter] = field(default_factory=dict)

    def total(self, cell: Cell) -> int:
        return sum(self.counts[cell].values())

    def fraction(self, cell: Cell, category: str) -> float:
        total = self.total(cell)
        return self.counts[cell][category] / total if total else 0.0

    def cells(self) -> list[Cell]:
        return sorted(self.counts)

    def grand_total(self) -> int:
        return sum(self.total(cell) for cell in self.counts)

    def rows(self) -> list[dict]:
        out = []
        for cell in self.cells():
            task_category, backend, mode = cell
            row = {
                "task_category": task_category,
                "backend": backend,
                "mode": mode,
                "total": self.total(cell),
            }
            for category in CATEGORIES:
                row[category] = self.counts[cell][category]
                row[f"frac_{category}"] = round(self.fraction(cell, category), 6)
            out.append(row)
        return out


def aggregate(results: ResultSet, overrides: OverrideFile | None = None) -> CategoryTable:
    """Count verdicts per cell; overrides replace categories, never totals."""
    override_map: dict[tuple, Override] = {}
    if overrides is not None:
        known = results.keys()
        for entry in overrides.entries:
            if entry.key() not in known:
                raise UnknownOverrideKey(f"override key {entry.key()} not in results")
            override_map[entry.key()] = entry

    table = CategoryTable()
    for record in results.records:
        category = record.category
        hit = override_map.get(record.key().as_tuple())
        if hit is not None:
            category = hit.category
        cell = (record.task_category, record.backend_id, record.mode)
        table.counts.setdefault(cell, Counter())[category] += 1
    return table


def records_by_task(results: ResultSet) -> dict[str, list[RunRecord]]:
    grouped: dict[str, list[RunRecord]] = {}
    for record in results.records:
        grouped.setdefault(record.task_id, []).append(record)
    for records in grouped.values():
        records.sort(key=lambda r: (r.mode, r.backend_id, r.run_index))
    return grouped
