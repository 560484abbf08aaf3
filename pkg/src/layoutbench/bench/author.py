"""Authoring script for the committed task manifest and ground truths.

Regenerates the data shipped under ``layoutbench/tasks`` so fixtures
stay auditable: ``python -m layoutbench.bench.author --out <dir>``.
Written files are byte-stable thanks to the fixed authoring clock.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import Callable

from layoutbench.gdsii.model import Library
from layoutbench.gdsii.stream import write_gdsii
from layoutbench.bench import truths

AUTHORING_TIMESTAMP = (2024, 1, 1, 0, 0, 0)

VIA_RULES_UM = {
    "via_radius": 10e-6,
    "pad_radius": 30e-6,
    "metal_width": 40e-6,
    "metal_length": 600e-6,
    "via_centers": [[50e-6, 150e-6], [550e-6, 150e-6]],
    "pad_margin": 10e-6,
    "via_edge_space": 50e-6,
    "via_layer": 2,
    "metal_layer": 3,
    "pad_layer": 4,
}

PROMPTS = {
    "Circle": "Write a Python code to generate GDSII for a circle on layer 0, radius = 10 mm, center at 0,0.",
    "Donut": "Generate a donut shape with 10 mm outer radius and 5 mm inner radius. Make the circle smoother by setting max distance between point 0.01mm.",
    "Oval": "Generate an oval with major axis of 20 mm, minor axis of 13 mm, on layer 0, center at 0,0.",
    "Square": "Generate a square with width 10 mm, put lower right corner of the square at 0,0.",
    "Triangle": "Generate a triangle with each edge 10 mm, center at 0,0.",
    "Grid": "Draw the GDSII for a grid: Grid on Layer 1, DATATYPE 4, 5 µm grid, and total width is 200 µm and height is 400 µm, placed at coordinates (100,800) nanometers.",
    "Heptagon": "Generate a Heptagon with each edge 10 mm, center at 0,0.",
    "Octagon": "Generate an Octagon with each edge 10 mm, center at 0,0.",
    "Trapezoid": "Generate a Trapezoid with upper edge 10 mm, lower edge 20 mm, height 8 mm, center at 0,0.",
    "Hexagon": "Generate a regular hexagon with each edge 10 mm, center at 0,0.",
    "Pentagon": "Generate a regular pentagon with each edge 10 mm, center at 0,0.",
    "Text": 'Generate a GDS file with the text "Hello, GDS!" centered at (0,0), with a height of 5 mm, on layer 1.',
    "Arrow": "Generate an Arrow pointing to the right with length 10 mm, make the body 1/3 width of the head, start at 0,0.",
    "SquareArray": "Generate a square array with 5*5 mm square, for 10 columns and 10 rows, each 20 mm apart, the lower left corner of the upper right square is at 0,0.",
    "Serpentine": "Generate a serpentine pattern with a path width of 1 µm, 15 turns, each segment being 50 µm long and tall, starting at (0,0), on layer 2, datatype 6.",
    "RoundedSquare": "Draw a 10*10 mm square, and do corner rounding for each corner with r=1 mm.",
    "Spiral": "Generate a Parametric spiral with r(t) = e^(-0.1t), for 0 <= t <= 6pi, line width 1.",
    "BasicLayout": "1. Draw a rectangular active region with dimensions 10 µm x 5 µm.\n2. Place a polysilicon gate that crosses the active region vertically at its center, with a width of 1 µm.\n3. Add two square contact holes, each 1 µm x 1 µm, positioned 1 µm away from the gate on either side along the active region.",
    "RectangleWithText": 'Generate a GDS with a 30*10 mm rectangle on layer 0 with a text "IBM Research" at the center of the rectangle. Put the text on layer 1.',
    "MicrofluidicChip": "Draw a design of a microfluidic chip. On layer 0, it is the bulk of the chip. It is a 30 * 20 mm rectangle. On layer 2 (via level), draw two circular vias, with 2 mm radius, and 20 mm apart horizontally. On layer 3 (channel level), draw a rectangular shaped channel (width = 1 mm) that connects the two vias at their center.",
    "ViaConnection": "Create a design with three layers: via layer (yellow), metal layer (blue), and pad layer (red). The via radius is 10 units, pad radius is 30 units, and metal connection width is 40 units with a total length of 600 units. Position the first via at (50, 150) and the second via at (550, 150). Ensure the metal connection fully covers the vias and leaves a margin of 10 units between the edge of the metal and the pads. Leave a space of 50 units between the vias and the edges of the metal connection.",
    "FiducialCircle": 'Draw a 3.2 mm circle, with fiducial marks inside. The fiducial marks should be a "+" sign, with equal length and width. Each marker should be 200 um apart. There will be annotations next to each marker. Row: A -> Z, column: start from 1.',
    "ComplexLayout": "1. Draw three rectangular active regions with dimensions 20 µm x 5 µm, positioned horizontally with 5 µm spacing between them.\n2. Create a complex polysilicon gate pattern consisting of multiple vertical and horizontal lines, with widths of 0.5 µm, forming a grid-like structure.\n3. Add several contact holes (each 1 µm x 1 µm) positioned at the intersections of the polysilicon gate pattern and the active regions.",
    "DLDChip": "Draw a deterministic lateral displacement chip - include channel that can hold the array has gap size = 225 nm, circular pillar size = 400 nm, width = 30 pillars, row shift fraction = 0.1, add an inlet and outlet 40 µm diameter before and after the channel, use a 20*50 µm bus to connect the inlet and outlet to the channel.",
    "FinFET": "Draw a FinFET with the following specifications:\n- Fin width: 0.1 µm\n- Fin height: 0.2 µm\n- Fin length: 1.0 µm\n- Gate length: 0.1 µm\n- Source/drain length: 0.4 µm\n- Source/drain extension beyond the fin: 0.2 µm\nUse separate layers for the fin, gate, and source/drain regions.",
}


def _single(builder: Callable[[], Library]) -> Callable[[], list[Library]]:
    return lambda: [builder()]


# id -> (category, builder returning the acceptable ground truths, extras)
TASK_TABLE: dict[str, tuple[str, Callable[[], list[Library]], dict]] = {
    "Circle": ("basic_shapes_1", _single(truths.circle_truth), {}),
    "Donut": ("basic_shapes_1", _single(truths.donut_truth), {}),
    "Oval": ("basic_shapes_1", _single(truths.oval_truth), {}),
    "Square": ("basic_shapes_1", _single(truths.square_truth), {}),
    "Triangle": ("basic_shapes_1", _single(truths.triangle_truth), {}),
    "Grid": (
        "basic_shapes_1",
        _single(truths.grid_truth),
        {"notes": "line width not given by the prompt; 0.5 um mesh lines chosen"},
    ),
    "Heptagon": ("basic_shapes_2", _single(truths.heptagon_truth), {}),
    "Octagon": ("basic_shapes_2", _single(truths.octagon_truth), {}),
    "Trapezoid": (
        "basic_shapes_2",
        truths.trapezoid_truths,
        {"notes": "both vertical orientations accepted"},
    ),
    "Hexagon": ("basic_shapes_2", _single(truths.hexagon_truth), {}),
    "Pentagon": ("basic_shapes_2", _single(truths.pentagon_truth), {}),
    "Text": ("basic_shapes_2", _single(truths.text_truth), {}),
    "Arrow": (
        "advanced_shapes",
        truths.arrow_truths,
        {"notes": "start point read as either the tail midpoint or the bounding-box corner"},
    ),
    "SquareArray": ("advanced_shapes", _single(truths.square_array_truth), {}),
    "Serpentine": ("advanced_shapes", _single(truths.serpentine_truth), {}),
    "RoundedSquare": (
        "advanced_shapes",
        truths.rounded_square_truths,
        {"notes": "accepted centered at the origin or with the corner at the origin"},
    ),
    "Spiral": (
        "advanced_shapes",
        _single(truths.spiral_truth),
        {"notes": "radii and width read in default micrometers"},
    ),
    "BasicLayout": ("advanced_shapes", _single(truths.basic_layout_truth), {}),
    "RectangleWithText": ("complex_structures", _single(truths.rectangle_with_text_truth), {}),
    "MicrofluidicChip": ("complex_structures", _single(truths.microfluidic_chip_truth), {}),
    "ViaConnection": (
        "complex_structures",
        _single(truths.via_connection_truth),
        {"via_rules": VIA_RULES_UM},
    ),
    "FiducialCircle": (
        "complex_structures",
        _single(truths.fiducial_circle_truth),
        {
            "eval": {"theta_correct": 0.85},
            "low_confidence": True,
            "notes": "marker count, size and labeling origin pinned by this manifest",
        },
    ),
    "ComplexLayout": (
        "complex_structures",
        _single(truths.complex_layout_truth),
        {
            "eval": {"theta_correct": 0.85},
            "low_confidence": True,
            "notes": "one defensible reading of the grid-like gate pattern",
        },
    ),
    "DLDChip": (
        "complex_structures",
        _single(truths.dld_chip_truth),
        {
            "eval": {"theta_correct": 0.85},
            "low_confidence": True,
            "notes": "gap 225 nm, pillar 400 nm, 30-pillar width, 0.1 row shift, "
            "40 um ports, 20x50 um buses; channel sized to hold the shifted array",
        },
    ),
    "FinFET": ("complex_structures", _single(truths.finfet_truth), {}),
}


def write_task_data(out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    gds_dir = out_dir / "gds"
    gds_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"tasks": []}
    for task_id, (category, builder, extras) in TASK_TABLE.items():
        libraries = builder()
        files = []
        for idx, lib in enumerate(libraries):
            name = f"{task_id}.gds" if idx == 0 else f"{task_id}-alt{idx}.gds"
            (gds_dir / name).write_bytes(write_gdsii(lib, clock=lambda: AUTHORING_TIMESTAMP))
            files.append(f"gds/{name}")
        entry = {
            "id": task_id,
            "category": category,
            "prompt": PROMPTS[task_id],
            "ground_truths": files,
        }
        entry.update(extras)
        manifest["tasks"].append(entry)
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    return manifest_path


def default_task_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "tasks"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Regenerate task manifest and ground truths")
    parser.add_argument("--out", type=Path, default=default_task_dir())
    args = parser.parse_args(argv)
    manifest = write_task_data(args.out)
    print(f"wrote {manifest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
