"""Shared test utilities: independent oracle encoders and fixture builders."""

from __future__ import annotations

import base64
import struct
from dataclasses import replace

from layoutbench.bench.tasks import TaskSpec


def ieee_to_excess64(value: float) -> bytes:
    """Independent excess-64 encoder working on the raw IEEE-754 bits.

    Used as the oracle for the package codec; the construction (field
    surgery on the double) shares nothing with the package's
    frexp-based implementation.
    """
    if value == 0.0:
        return b"\x00" * 8
    bits = struct.unpack(">Q", struct.pack(">d", value))[0]
    sign = bits >> 63
    exp2 = ((bits >> 52) & 0x7FF) - 1023
    mantissa = (bits & 0xFFFFFFFFFFFFF) | (1 << 52)  # 53 significant bits
    exp16 = 65 + (exp2 >> 2)
    mantissa <<= exp2 % 4
    word = (sign << 63) | (exp16 << 56) | mantissa
    return struct.pack(">Q", word)


def excess64_to_ieee(data: bytes) -> float:
    """Independent decoder: direct base-16 positional evaluation."""
    if data == b"\x00" * 8:
        return 0.0
    sign = -1.0 if data[0] & 0x80 else 1.0
    exponent = (data[0] & 0x7F) - 64
    mantissa = 0.0
    for i, byte in enumerate(data[1:]):
        mantissa += byte / 256.0 ** (i + 1)
    return sign * mantissa * 16.0**exponent


def _rec(rtype: int, dtype: int, payload: bytes = b"") -> bytes:
    return struct.pack(">HBB", 4 + len(payload), rtype, dtype) + payload


def reference_tool_stream(
    polygon_db=((0, 0), (10_000_000, 0), (10_000_000, 10_000_000), (0, 10_000_000)),
    layer: int = 0,
    with_label: bool = False,
    with_unknown_record: bool = False,
) -> bytes:
    """Byte stream laid out the way the gdspy writer emits it.

    Mirrors that writer's record sequence (HEADER 600, BGNLIB, LIBNAME,
    UNITS of 1e-3/1e-9, BGNSTR/STRNAME, BOUNDARY with the ring closed,
    ENDSTR, ENDLIB) so the parser is exercised against an independently
    authored layout of the stream.
    """
    out = bytearray()
    out += _rec(0x00, 0x02, struct.pack(">h", 600))
    stamps = struct.pack(">12h", 2024, 1, 1, 0, 0, 0, 2024, 1, 1, 0, 0, 0)
    out += _rec(0x01, 0x02, stamps)
    out += _rec(0x02, 0x06, b"library\x00")
    out += _rec(0x03, 0x05, ieee_to_excess64(1e-3) + ieee_to_excess64(1e-9))
    out += _rec(0x05, 0x02, stamps)
    out += _rec(0x06, 0x06, b"main\x00\x00")
    out += _rec(0x08, 0x00)  # BOUNDARY
    out += _rec(0x0D, 0x02, struct.pack(">h", layer))
    out += _rec(0x0E, 0x02, struct.pack(">h", 0))
    ring = list(polygon_db) + [polygon_db[0]]
    flat = [c for pt in ring for c in pt]
    out += _rec(0x10, 0x03, struct.pack(f">{len(flat)}i", *flat))
    out += _rec(0x11, 0x00)  # ENDEL
    if with_label:
        out += _rec(0x0C, 0x00)  # TEXT
        out += _rec(0x0D, 0x02, struct.pack(">h", 1))
        out += _rec(0x16, 0x02, struct.pack(">h", 0))
        out += _rec(0x17, 0x01, struct.pack(">H", 0x0005))  # PRESENTATION
        out += _rec(0x10, 0x03, struct.pack(">2i", 0, 0))
        out += _rec(0x19, 0x06, b"hi\x00\x00")
        out += _rec(0x11, 0x00)
    if with_unknown_record:
        out += _rec(0x22, 0x02, struct.pack(">h", 3))  # GENERATIONS, unsupported
    out += _rec(0x07, 0x00)  # ENDSTR
    out += _rec(0x04, 0x00)  # ENDLIB
    return bytes(out)


def response_with_code(code: str) -> str:
    return f"Thinking through the task step by step.\n\n```python\n{code}\n```\n"


def gds_writer_code(gds_bytes: bytes, name: str = "out.gds") -> str:
    """Generated-code stand-in that recreates a known byte payload."""
    blob = base64.b64encode(gds_bytes).decode("ascii")
    return (
        "import base64\n"
        f"data = base64.b64decode('{blob}')\n"
        f"with open('{name}', 'wb') as fh:\n"
        "    fh.write(data)\n"
    )


def correct_response_for(task_dir, task: TaskSpec) -> str:
    payload = (task_dir / task.ground_truth_files[0]).read_bytes()
    return response_with_code(gds_writer_code(payload))


BROKEN_RESPONSE = response_with_code("import gdspy\ngdspy.LayoutViewer()\nraise SystemExit(3)\n")
PROSE_RESPONSE = "I considered the task but cannot produce code right now."


def with_resolution(task: TaskSpec, pixels: int) -> TaskSpec:
    return replace(task, eval_options=task.eval_options.replaced(raster_long_axis=pixels))
