"""Acceptance criteria, one test per criterion, each printing a
pass/fail line.  Budgets and tolerances are asserted, not aspirational.
"""

import functools
import json
import math
import os
import random
import time
from pathlib import Path

import numpy as np
import pytest

from layoutbench.evaluate.classify import classify
from layoutbench.evaluate.via_rules import check_via_rules
from layoutbench.gdsii.flatten import drop_layer, from_polygons, scale_layout
from layoutbench.gdsii.model import Library, Structure, aref, boundary, path, sref, text
from layoutbench.gdsii.real64 import decode_real64, encode_real64
from layoutbench.gdsii.stream import parse_gdsii, write_gdsii
from layoutbench.geometry.raster import (
    Frame,
    bounding_box,
    layer_iou,
    make_frame,
    merge_boxes,
    rasterize,
)
from layoutbench.geometry.shapes import rectangle, regular_polygon
from layoutbench.llm.backends import BackendConfig, LiveBackend, ReplayStore
from layoutbench.llm.types import digest, normalize_request
from layoutbench.sandbox.extract import sanitize
from layoutbench.sandbox.run import ExecutionLimits, execute, execute_many
from layoutbench.bench.aggregate import aggregate
from layoutbench.bench.matrix import load_results, run_matrix
from layoutbench.bench.report import render_report
from layoutbench.bench.tasks import load_tasks
from layoutbench.flow.assessor import build_assessor_prompt
from layoutbench.flow.pipeline import build_generator_request, generate_pool
from layoutbench.flow.thoughts import SteeringConfig

from helpers import gds_writer_code, response_with_code, with_resolution


def criterion(number, name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE {number} [{name}]: FAIL")
                raise
            print(f"\nACCEPTANCE {number} [{name}]: PASS")

        return wrapper

    return decorate


# --- 1: GDSII codec ---------------------------------------------------------


def _random_library(rng: random.Random) -> Library:
    def pt():
        return (rng.randint(-10**7, 10**7), rng.randint(-10**7, 10**7))

    names = [f"S{i}" for i in range(rng.randint(1, 3))]
    structures = []
    for idx, name in enumerate(names):
        elements = []
        for _ in range(rng.randint(0, 4)):
            kind = rng.choice(["boundary", "path", "text", "ref"])
            if kind == "boundary":
                pts = {pt() for _ in range(rng.randint(3, 7))}
                while len(pts) < 3:
                    pts.add(pt())
                elements.append(boundary(rng.randint(0, 255), rng.randint(0, 255), sorted(pts)))
            elif kind == "path":
                elements.append(
                    path(
                        rng.randint(0, 255),
                        rng.randint(0, 255),
                        [pt() for _ in range(rng.randint(2, 5))],
                        width=rng.randint(1, 10**6),
                        pathtype=rng.choice([0, 1, 2]),
                    )
                )
            elif kind == "text":
                elements.append(
                    text(rng.randint(0, 255), rng.randint(0, 255), pt(), f"label {rng.random():.6f}")
                )
            elif idx > 0:
                target = rng.choice(names[:idx])
                if rng.random() < 0.5:
                    elements.append(
                        sref(target, pt(), rng.choice([1.0, 2.0]), rng.choice([0.0, 90.0]), rng.random() < 0.5)
                    )
                else:
                    elements.append(
                        aref(target, pt(), rng.randint(1, 4), rng.randint(1, 4), pt(), pt())
                    )
        structures.append(Structure(name, tuple(elements)))
    return Library(
        name=f"LIB{rng.randint(0, 999)}",
        user_unit_per_db_unit=rng.choice([1e-3, 1.0]),
        meters_per_db_unit=rng.choice([1e-9, 1e-6]),
        structures=tuple(structures),
        timestamps=((2024, 1, 1, 0, 0, 0), (2024, 5, 6, 7, 8, 9)),
    )


@criterion(1, "gdsii codec round-trip")
def test_criterion_1_codec(task_dir):
    start = time.monotonic()
    rng = random.Random(20240101)
    for _ in range(1000):
        lib = _random_library(rng)
        data = write_gdsii(lib)
        parsed = parse_gdsii(data)
        assert parsed == lib
        assert write_gdsii(parsed) == data

    for gds in sorted((task_dir / "gds").glob("*.gds")):
        blob = gds.read_bytes()
        assert write_gdsii(parse_gdsii(blob)) == blob, gds.name

    for value in (0.0, 1.0, -1.0, 1e-3, -1e-3, 1e-6, -1e-6, 1e-9, -1e-9):
        assert decode_real64(encode_real64(value)) == value
    for _ in range(20000):
        value = rng.uniform(-1.0, 1.0) * 10.0 ** rng.randint(-60, 60)
        if value == 0.0:
            continue
        got = decode_real64(encode_real64(value))
        assert math.isclose(got, value, rel_tol=2.0**-55)

    elapsed = time.monotonic() - start
    assert elapsed < 30.0, f"codec criterion took {elapsed:.1f}s"


# --- 2: geometry oracle ------------------------------------------------------


@criterion(2, "geometry oracle")
def test_criterion_2_geometry():
    start = time.monotonic()

    def rect_pair_iou(a, b):
        la = from_polygons({(0, 0): [rectangle(*a)]})
        lb = from_polygons({(0, 0): [rectangle(*b)]})
        box = merge_boxes([bounding_box(la), bounding_box(lb)])
        frame = make_frame(box)  # default resolution
        ma = rasterize(la, (0, 0), frame)
        mb = rasterize(lb, (0, 0), frame)
        ix = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
        iy = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
        inter = ix * iy
        area_a = (a[2] - a[0]) * (a[3] - a[1])
        area_b = (b[2] - b[0]) * (b[3] - b[1])
        union = area_a + area_b - inter
        perimeter = 2 * (a[2] - a[0] + a[3] - a[1]) + 2 * (b[2] - b[0] + b[3] - b[1])
        tol = 2.0 * perimeter * frame.pixel_size / union
        return layer_iou(ma, mb), inter / union, tol

    pairs = [
        ((0.0, 0.0, 1.0, 1.0), (0.5, 0.0, 1.5, 1.0)),  # offset squares: 1/3
        ((0.0, 0.0, 2.0, 1.0), (0.0, 0.0, 2.0, 1.0)),
        ((0.0, 0.0, 2.0, 2.0), (1.0, 1.0, 3.0, 3.0)),
        ((0.0, 0.0, 4.0, 1.0), (2.0, 0.25, 6.0, 0.75)),
        ((-1.0, -1.0, 1.0, 1.0), (0.0, -2.0, 3.0, 0.5)),
    ]
    for a, b in pairs:
        got, analytic, tol = rect_pair_iou(a, b)
        assert abs(got - analytic) <= tol, (a, b, got, analytic, tol)
    got, analytic, _ = rect_pair_iou(*pairs[0])
    assert analytic == pytest.approx(1.0 / 3.0)

    from mpmath import mp, mpf, pi, sin

    mp.dps = 50
    for n in range(3, 41):
        poly = regular_polygon(n, edge=10e-3)
        oracle = float(mpf(10e-3) / (2 * sin(pi / n)))
        radii = np.hypot(poly[:, 0], poly[:, 1])
        assert np.allclose(radii, oracle, rtol=1e-12, atol=0)

    elapsed = time.monotonic() - start
    assert elapsed < 30.0, f"geometry criterion took {elapsed:.1f}s"


# --- 3: evaluator identity and mutation suite --------------------------------


@criterion(3, "evaluator identity and mutations")
def test_criterion_3_evaluator(task_dir, ok_outcome):
    start = time.monotonic()
    tasks = load_tasks(task_dir, validate=False)
    failures = []

    for task in tasks:
        for idx, truth in enumerate(task.ground_truth_layouts):
            verdict = classify(ok_outcome, truth, task)
            if verdict.category != "correct":
                failures.append((task.id, f"identity[{idx}]", verdict.category))

    polygon_only = [
        t for t in tasks
        if all(g.polygon_count() > 0 and not g.texts for g in t.ground_truth_layouts)
    ]
    assert len(polygon_only) == 22  # all but the three text-bearing tasks
    for task in polygon_only:
        truth = task.ground_truth_layouts[0]
        for factor in (1e-3, 1e3, 1e6):
            verdict = classify(ok_outcome, scale_layout(truth, factor), task)
            expected_scale = 1.0 / factor
            if verdict.category != "scaling_error" or not math.isclose(
                verdict.best_scale, expected_scale, rel_tol=1e-9
            ):
                failures.append((task.id, f"scale x{factor:g}", verdict.category))

    multi_layer = [
        t for t in polygon_only if len(t.ground_truth_layouts[0].layers) >= 2
    ]
    assert len(multi_layer) >= 5
    for task in multi_layer:
        truth = task.ground_truth_layouts[0]
        victim = sorted(truth.layers)[-1]
        verdict = classify(ok_outcome, drop_layer(truth, victim), task)
        if verdict.category != "partially_correct":
            failures.append((task.id, f"delete {victim}", verdict.category))

    hexagon = next(t for t in tasks if t.id == "Hexagon")
    triangle = from_polygons({(0, 0): [regular_polygon(3, 10e-3)]})
    verdict = classify(ok_outcome, triangle, hexagon)
    if verdict.category != "shape_error":
        failures.append(("Hexagon", "triangle substitution", verdict.category))

    class Timeout:
        status = "timeout"

    for task in tasks[:3]:
        verdict = classify(Timeout(), None, task)
        if verdict.category != "runtime_error":
            failures.append((task.id, "timeout", verdict.category))

    assert not failures, f"mutation cases misclassified: {failures}"
    elapsed = time.monotonic() - start
    assert elapsed < 300.0, f"evaluator criterion took {elapsed:.1f}s"


# --- 4: via rule checker ------------------------------------------------------


@criterion(4, "via rule checker")
def test_criterion_4_via_rules(task_map):
    from layoutbench.geometry.shapes import circle as mk_circle

    task = task_map["ViaConnection"]
    rules = task.via_rules
    assert rules is not None
    assert check_via_rules(task.ground_truth_layouts[0], rules) == []

    um = 1e-6

    def build(via_radius=10 * um, square=False, metal=(0, 130 * um, 600 * um, 170 * um),
              pad_shift=(0.0, 0.0)):
        vias, pads = [], []
        for cx, cy in rules.via_centers:
            if square:
                vias.append(rectangle(cx - via_radius, cy - via_radius,
                                      cx + via_radius, cy + via_radius))
            else:
                vias.append(mk_circle(via_radius, (cx, cy), 0.5 * um))
            pads.append(mk_circle(30 * um, (cx + pad_shift[0], cy + pad_shift[1]), 0.5 * um))
        return from_polygons({(2, 0): vias, (3, 0): [rectangle(*metal)], (4, 0): pads})

    cases = [
        ("narrow metal", build(metal=(0, 142.5 * um, 600 * um, 157.5 * um)),
         {"via_coverage", "metal_width"}),
        ("square vias", build(square=True), {"via_shape"}),
        ("pad off center", build(pad_shift=(5 * um, 0.0)), {"pad_concentricity"}),
        ("margin shrink", build(metal=(0, 125 * um, 600 * um, 175 * um)), {"pad_margin"}),
    ]
    for name, layout, expected in cases:
        codes = {v.code for v in check_via_rules(layout, rules)}
        assert codes == expected, (name, codes, expected)


# --- 5: protocol arithmetic on replay fixtures --------------------------------


def _prime_generator_store(store, tasks, configs, runs, steering, response_for):
    for cfg in configs:
        for task in tasks:
            for run in range(runs):
                request = build_generator_request(task, cfg, run, steering)
                store.put(
                    digest(request),
                    normalize_request(request),
                    {"text": response_for(task), "token_usage": {"prompt": 1, "completion": 1},
                     "latency_s": 0.0},
                )


@criterion(5, "protocol arithmetic on replay fixtures")
def test_criterion_5_protocol(task_dir, tasks, tmp_path):
    start = time.monotonic()
    fast_tasks = [with_resolution(t, 256) for t in tasks]
    steering = SteeringConfig()
    limits = ExecutionLimits(timeout_s=30.0, memory_bytes=None)

    def response_for(task):
        payload = (task_dir / task.ground_truth_files[0]).read_bytes()
        return response_with_code(gds_writer_code(payload))

    # baseline: B=2 backends, 5 runs each
    base_store = ReplayStore(tmp_path / "store-base")
    base_cfgs = [
        BackendConfig(id=f"model-{c}", kind="live", base_url="", model="m")
        for c in "ab"
    ]
    _prime_generator_store(base_store, fast_tasks, base_cfgs, 5, steering, response_for)
    base_backends = [
        LiveBackend(cfg, replay=True, store=base_store) for cfg in base_cfgs
    ]
    out_base = tmp_path / "out-base"
    results = run_matrix(
        fast_tasks, base_backends, mode="baseline", out_dir=out_base,
        runs_per_backend=5, limits=limits,
    )
    assert len(results.records) == 25 * len(base_cfgs) * 5
    assert all(r.category == "correct" for r in results.records)

    # solomon: 4 generators x 5 runs = pool of 20, one assessor
    solo_store = ReplayStore(tmp_path / "store-solo")
    gen_cfgs = [
        BackendConfig(id=f"gen-{c}", kind="live", base_url="", model="m")
        for c in "abcd"
    ]
    assessor_cfg = BackendConfig(id="judge", kind="live", base_url="", model="m")
    _prime_generator_store(solo_store, fast_tasks, gen_cfgs, 5, steering, response_for)
    # derive the assessor requests from replayed pools, then store responses
    priming_backends = [LiveBackend(cfg, replay=True, store=solo_store) for cfg in gen_cfgs]
    for task in fast_tasks:
        pool = generate_pool(
            task, priming_backends, 5, steering, limits,
            tmp_path / "prime" / task.id, render=False,
        )
        assert len(pool.thoughts) == 20
        request = build_assessor_prompt(task, pool, steering, assessor_cfg)
        solo_store.put(
            digest(request), normalize_request(request),
            {"text": response_for(task), "token_usage": {"prompt": 1, "completion": 1},
             "latency_s": 0.0},
        )

    out_solo = tmp_path / "out-solo"
    solo_backends = [LiveBackend(cfg, replay=True, store=solo_store) for cfg in gen_cfgs]
    assessor = LiveBackend(assessor_cfg, replay=True, store=solo_store)
    solo_results = run_matrix(
        fast_tasks, solo_backends, mode="solomon", out_dir=out_solo,
        runs_per_backend=5, assessors=[assessor], limits=limits,
    )
    assert len(solo_results.records) == 25  # one refined record per (task, assessor)
    assert all(r.pool_size == 20 for r in solo_results.records)

    # aggregation conserves counts
    table = aggregate(results)
    assert table.grand_total() == len(results.records)
    solo_table = aggregate(solo_results)
    assert solo_table.grand_total() == len(solo_results.records)

    # report bytes identical across two invocations
    render_report(results, table, out_base, fast_tasks)
    snapshot = {
        p.relative_to(out_base): p.read_bytes()
        for p in sorted((out_base / "report").rglob("*")) if p.is_file()
    }
    render_report(results, table, out_base, fast_tasks)
    again = {
        p.relative_to(out_base): p.read_bytes()
        for p in sorted((out_base / "report").rglob("*")) if p.is_file()
    }
    assert snapshot == again

    # resume: a rerun over the same output directory executes nothing new
    resumed = run_matrix(
        fast_tasks, base_backends, mode="baseline", out_dir=out_base,
        runs_per_backend=5, limits=limits,
    )
    assert len(resumed.records) == len(results.records)
    assert load_results(out_base).keys() == results.keys()

    elapsed = time.monotonic() - start
    assert elapsed < 300.0, f"protocol criterion took {elapsed:.1f}s"


# --- 6: sandbox ---------------------------------------------------------------


@criterion(6, "sandbox sanitizer, timeout, isolation")
def test_criterion_6_sandbox(tmp_path):
    rng = random.Random(7)
    lines = []
    for i in range(400):
        if rng.random() < 0.3:
            lines.append(f"gdspy.LayoutViewer(cells=[c{i}])")
        else:
            lines.append(f"value_{i} = {i}")
    source = "\n".join(lines) + "\n"
    cleaned = sanitize(source)
    assert "LayoutViewer" not in cleaned.source
    assert len(cleaned.hits) == sum("LayoutViewer" in l for l in lines)
    twice = sanitize(cleaned.source)
    assert twice.source == cleaned.source and twice.hits == ()

    limits = ExecutionLimits(timeout_s=2.0, memory_bytes=None)
    outcome = execute("while True:\n    pass\n", limits, tmp_path / "spin")
    assert outcome.status == "timeout"
    assert 0.9 * 2.0 <= outcome.duration_s <= 1.1 * 2.0 + 0.5

    jobs = []
    for i in range(100):
        src = (
            f"open('marker_{i}.txt', 'w').write('x')\n"
            "import glob\n"
            "print(sorted(glob.glob('marker_*.txt')))\n"
        )
        jobs.append((src, tmp_path / "iso" / f"w{i}"))
    outcomes = execute_many(jobs, ExecutionLimits(timeout_s=30.0, memory_bytes=None), max_workers=8)
    for i, outcome in enumerate(outcomes):
        assert outcome.stdout.strip() == f"['marker_{i}.txt']", f"trial {i} contaminated"


# --- 7: live smoke (non-gating) -----------------------------------------------


@pytest.mark.skipif(
    not os.environ.get("LAYOUTBENCH_LIVE_BACKENDS"),
    reason="live smoke runs only with LAYOUTBENCH_LIVE_BACKENDS pointing at a backends config",
)
@criterion(7, "live smoke")
def test_criterion_7_live_smoke(task_map, tmp_path):
    from layoutbench.evaluate.verdicts import CATEGORIES
    from layoutbench.llm.backends import build_backend, load_backends_config
    from layoutbench.flow.pipeline import run_baseline

    config_path = Path(os.environ["LAYOUTBENCH_LIVE_BACKENDS"])
    bc = load_backends_config(config_path)
    store = ReplayStore(tmp_path / "replay-store")
    backend_id = bc.generators[0]
    live = build_backend(bc.backends[backend_id], record=True, store=store)
    task = with_resolution(task_map["Circle"], 512)
    limits = ExecutionLimits(timeout_s=120.0)
    thoughts = run_baseline(task, live, 1, SteeringConfig(), limits, tmp_path / "work")
    assert len(thoughts) == 1
    assert thoughts[0].verdict.category in CATEGORIES

    replayer = build_backend(bc.backends[backend_id], replay=True, store=store)
    replayed = run_baseline(task, replayer, 1, SteeringConfig(), limits, tmp_path / "work2")
    assert replayed[0].verdict.category == thoughts[0].verdict.category
