"""Report bundle: delimited summary, stacked-bar data, and an HTML page
mirroring the per-task grids of ground truths and run renders."""

from __future__ import annotations

import csv
import html
import json
from pathlib import Path
from typing import Sequence

from layoutbench.evaluate.verdicts import CATEGORIES
from layoutbench.geometry.png import render_layout_png
from layoutbench.bench.aggregate import CategoryTable, records_by_task
from layoutbench.bench.matrix import ResultSet, RunRecord
from layoutbench.bench.tasks import TaskSpec

_CATEGORY_BADGE = {
    "correct": "#2e7d32",
    "scaling_error": "#f9a825",
    "partially_correct": "#ef6c00",
    "shape_error": "#c62828",
    "runtime_error": "#6a1b9a",
}

_STYLE = """
body { font-family: sans-serif; margin: 1.5em; }
table.grid { border-collapse: collapse; margin-bottom: 2em; }
table.grid td, table.grid th { border: 1px solid #ccc; padding: 4px; vertical-align: top; }
img.render { max-width: 160px; max-height: 160px; }
.badge { color: white; padding: 1px 6px; border-radius: 3px; font-size: 0.8em; }
pre.err { max-width: 24em; white-space: pre-wrap; font-size: 0.7em; color: #800; }
.prompt { max-width: 60em; color: #444; font-size: 0.9em; white-space: pre-wrap; }
"""


def _write_summary_csv(path: Path, table: CategoryTable) -> None:
    rows = table.rows()
    fields = ["task_category", "backend", "mode", "total"]
    fields += list(CATEGORIES) + [f"frac_{c}" for c in CATEGORIES]
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def _write_bars_json(path: Path, table: CategoryTable) -> None:
    payload = {"categories": list(CATEGORIES), "cells": table.rows()}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _badge(category: str) -> str:
    color = _CATEGORY_BADGE.get(category, "#555")
    return f'<span class="badge" style="background:{color}">{html.escape(category)}</span>'


def _run_cell(record: RunRecord) -> str:
    parts = [f"<div>{html.escape(record.backend_id)} r{record.run_index}</div>"]
    parts.append(_badge(record.category))
    if record.category == "scaling_error":
        parts.append(f"<div>scale {record.best_scale:g}</div>")
    if record.render_path:
        parts.append(f'<div><img class="render" src="../{record.render_path}"></div>')
    elif record.category == "runtime_error":
        tail = record.stderr_tail.strip()[-400:]
        parts.append(f'<pre class="err">{html.escape(tail) or "(no stderr)"}</pre>')
    return "\n".join(parts)


def _task_section(
    task: TaskSpec, records: Sequence[RunRecord], truth_files: Sequence[str]
) -> str:
    out = [f"<h2>{html.escape(task.id)} <small>({html.escape(task.category)})</small></h2>"]
    out.append(f'<div class="prompt">{html.escape(task.prompt)}</div>')
    out.append('<table class="grid"><tr><th>Ground truth</th>')
    for mode in ("baseline", "solomon"):
        if any(r.mode == mode for r in records):
            out.append(f"<th>{mode} runs</th>")
    out.append("</tr><tr><td>")
    for rel in truth_files:
        out.append(f'<img class="render" src="{html.escape(rel)}">')
    out.append("</td>")
    for mode in ("baseline", "solomon"):
        cells = [r for r in records if r.mode == mode]
        if not cells:
            continue
        out.append("<td><table><tr>")
        for i, record in enumerate(cells):
            if i and i % 5 == 0:
                out.append("</tr><tr>")
            out.append(f"<td>{_run_cell(record)}</td>")
        out.append("</tr></table></td>")
    out.append("</tr></table>")
    return "\n".join(out)


def render_report(
    results: ResultSet,
    table: CategoryTable,
    out_dir: Path,
    tasks: Sequence[TaskSpec],
) -> Path:
    """Write the report bundle under ``out_dir/report``.

    Output bytes depend only on the inputs, so a replayed run renders an
    identical bundle.
    """
    out_dir = Path(out_dir)
    report_dir = out_dir / "report"
    truth_dir = report_dir / "truth"
    truth_dir.mkdir(parents=True, exist_ok=True)

    _write_summary_csv(report_dir / "summary.csv", table)
    _write_bars_json(report_dir / "stacked_bars.json", table)

    grouped = records_by_task(results)
    sections = []
    for task in tasks:
        records = grouped.get(task.id, [])
        truth_files = []
        for idx, layout in enumerate(task.ground_truth_layouts):
            name = f"{task.id}-{idx}.png"
            (truth_dir / name).write_bytes(render_layout_png(layout))
            truth_files.append(f"truth/{name}")
        sections.append(_task_section(task, records, truth_files))

    summary_rows = "".join(
        "<tr>" + "".join(
            f"<td>{html.escape(str(row[k]))}</td>"
            for k in ("task_category", "backend", "mode", "total", *CATEGORIES)
        ) + "</tr>"
        for row in table.rows()
    )
    page = (
        "<!DOCTYPE html><html><head><meta charset='utf-8'>"
        f"<title>layout benchmark report</title><style>{_STYLE}</style></head><body>"
        "<h1>Layout benchmark report</h1>"
        f"<p>{len(results.records)} run records over {len(tasks)} tasks.</p>"
        "<h2>Category distribution</h2>"
        "<table class='grid'><tr><th>task category</th><th>backend</th><th>mode</th>"
        "<th>total</th>"
        + "".join(f"<th>{c}</th>" for c in CATEGORIES)
        + "</tr>"
        + summary_rows
        + "</table>"
        + "\n".join(sections)
        + "</body></html>\n"
    )
    (report_dir / "index.html").write_text(page, encoding="utf-8")
    return report_dir / "index.html"
