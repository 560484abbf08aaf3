"""GDSII binary stream reader and canonical writer.

Record framing: uint16 big-endian total length (including the 4-byte
header), uint8 record type, uint8 data type.  The writer emits a fixed
record ordering so that byte-level round trips are testable; the reader
accepts any conforming stream and skips unknown record types with a
recorded warning.
"""

from __future__ import annotations

import struct
from typing import Callable, Optional

from layoutbench.errors import LayoutBenchError
from layoutbench.gdsii import records as rec
from layoutbench.gdsii.model import (
    CoordinateOverflow,
    Element,
    INT32_MAX,
    Library,
    NameTooLong,
    Structure,
    Timestamp,
)
from layoutbench.gdsii.real64 import decode_real64, encode_real64

GDS_VERSION = 600


class TruncatedStream(LayoutBenchError):
    pass


class MalformedRecord(LayoutBenchError):
    pass


class MissingUnits(LayoutBenchError):
    pass


def _iter_records(data: bytes):
    """Yield (record_type, data_type, payload) triples."""
    pos = 0
    n = len(data)
    while pos < n:
        if n - pos < 4:
            # Trailing NUL padding to a block boundary is tolerated.
            if data[pos:].count(0) == n - pos:
                return
            raise TruncatedStream(f"dangling {n - pos} bytes at offset {pos}")
        length, rtype, dtype = struct.unpack(">HBB", data[pos : pos + 4])
        if length == 0 and rtype == 0 and dtype == 0:
            return  # NUL padding after ENDLIB
        if length < 4:
            raise MalformedRecord(f"record length {length} at offset {pos} is below header size")
        if pos + length > n:
            raise TruncatedStream(
                f"record at offset {pos} declares {length} bytes but only {n - pos} remain"
            )
        yield rtype, dtype, data[pos + 4 : pos + length]
        pos += length


def _check_dtype(rtype: int, dtype: int) -> None:
    expected = rec.EXPECTED_DATA_TYPE.get(rtype)
    if expected is not None and dtype != expected:
        name = rec.RECORD_NAMES.get(rtype, hex(rtype))
        raise MalformedRecord(f"{name} carries data type {dtype}, expected {expected}")


def _ascii(payload: bytes) -> str:
    return payload.rstrip(b"\x00").decode("ascii", "replace")


def _int16s(payload: bytes) -> tuple[int, ...]:
    if len(payload) % 2:
        raise MalformedRecord("odd int16 payload length")
    return struct.unpack(f">{len(payload) // 2}h", payload)


def _int32s(payload: bytes) -> tuple[int, ...]:
    if len(payload) % 4:
        raise MalformedRecord("int32 payload length not a multiple of 4")
    return struct.unpack(f">{len(payload) // 4}i", payload)


def _xy_pairs(payload: bytes) -> tuple[tuple[int, int], ...]:
    values = _int32s(payload)
    if len(values) % 2:
        raise MalformedRecord("XY record holds an odd number of coordinates")
    return tuple((values[i], values[i + 1]) for i in range(0, len(values), 2))


_ELEMENT_STARTERS = {
    rec.BOUNDARY: "boundary",
    rec.PATH: "path",
    rec.TEXT: "text",
    rec.SREF: "sref",
    rec.AREF: "aref",
}


def parse_gdsii(data: bytes) -> Library:
    """Decode a GDSII stream into a Library.

    Unknown record types are skipped and noted in ``Library.warnings``.
    Raises TruncatedStream, MalformedRecord or MissingUnits.
    """
    warnings: list[str] = []
    lib_name = "LIB"
    units: Optional[tuple[float, float]] = None
    timestamps: tuple[Timestamp, Timestamp] = ((1970, 1, 1, 0, 0, 0),) * 2
    structures: list[Structure] = []
    cur_struct_name: Optional[str] = None
    cur_elements: list[Element] = []
    cur: Optional[dict] = None  # accumulator for the element being parsed
    saw_endlib = False

    for rtype, dtype, payload in _iter_records(data):
        if saw_endlib:
            warnings.append(f"record {rec.RECORD_NAMES.get(rtype, hex(rtype))} after ENDLIB ignored")
            continue
        _check_dtype(rtype, dtype)

        if rtype == rec.HEADER:
            continue
        if rtype == rec.BGNLIB:
            stamps = _int16s(payload)
            if len(stamps) >= 12:
                timestamps = (tuple(stamps[0:6]), tuple(stamps[6:12]))  # type: ignore[assignment]
            continue
        if rtype == rec.LIBNAME:
            lib_name = _ascii(payload)
            continue
        if rtype == rec.UNITS:
            if len(payload) != 16:
                raise MalformedRecord("UNITS payload must be 16 bytes")
            units = (decode_real64(payload[:8]), decode_real64(payload[8:]))
            continue
        if rtype == rec.ENDLIB:
            saw_endlib = True
            continue

        if rtype == rec.BGNSTR:
            if units is None:
                raise MissingUnits("structure begins before any UNITS record")
            cur_struct_name = None
            cur_elements = []
            continue
        if rtype == rec.STRNAME:
            cur_struct_name = _ascii(payload)
            continue
        if rtype == rec.ENDSTR:
            if cur_struct_name is None:
                raise MalformedRecord("structure ended without a STRNAME")
            structures.append(Structure(name=cur_struct_name, elements=tuple(cur_elements)))
            cur_struct_name = None
            cur_elements = []
            continue

        if rtype in _ELEMENT_STARTERS:
            cur = {"variant": _ELEMENT_STARTERS[rtype]}
            continue

        if rtype == rec.ENDEL:
            if cur is None:
                raise MalformedRecord("ENDEL outside an element")
            cur_elements.append(_finish_element(cur, warnings))
            cur = None
            continue

        if cur is not None:
            if rtype == rec.LAYER:
                cur["layer"] = _int16s(payload)[0]
            elif rtype in (rec.DATATYPE, rec.TEXTTYPE):
                cur["datatype"] = _int16s(payload)[0]
            elif rtype == rec.WIDTH:
                cur["width"] = _int32s(payload)[0]
            elif rtype == rec.PATHTYPE:
                cur["pathtype"] = _int16s(payload)[0]
            elif rtype == rec.XY:
                cur["xy"] = _xy_pairs(payload)
            elif rtype == rec.SNAME:
                cur["ref_name"] = _ascii(payload)
            elif rtype == rec.COLROW:
                cols, rows = _int16s(payload)[:2]
                cur["columns"], cur["rows"] = cols, rows
            elif rtype == rec.STRANS:
                bits = struct.unpack(">H", payload)[0]
                cur["reflect_x"] = bool(bits & 0x8000)
            elif rtype == rec.MAG:
                cur["magnification"] = decode_real64(payload)
            elif rtype == rec.ANGLE:
                cur["angle_degrees"] = decode_real64(payload)
            elif rtype == rec.STRING:
                cur["string"] = _ascii(payload)
            elif rtype == rec.PRESENTATION:
                pass  # recognized, not retained
            else:
                warnings.append(
                    f"unknown record type 0x{rtype:02x} inside element skipped"
                )
            continue

        name = rec.RECORD_NAMES.get(rtype)
        if name is None:
            warnings.append(f"unknown record type 0x{rtype:02x} skipped")
        else:
            warnings.append(f"{name} record outside any element skipped")

    if not saw_endlib:
        raise TruncatedStream("stream ended without ENDLIB")
    if units is None:
        raise MissingUnits("no UNITS record in stream")
    return Library(
        name=lib_name,
        user_unit_per_db_unit=units[0],
        meters_per_db_unit=units[1],
        structures=tuple(structures),
        timestamps=timestamps,
        warnings=tuple(warnings),
    )


def _finish_element(cur: dict, warnings: list[str]) -> Element:
    variant = cur.pop("variant")
    xy = cur.get("xy", ())
    if variant == "boundary" and len(xy) >= 3 and xy[0] != xy[-1]:
        warnings.append("boundary ring not closed in stream; closing point added")
        cur["xy"] = tuple(xy) + (xy[0],)
    try:
        return Element(variant=variant, **cur)
    except (ValueError, TypeError) as exc:
        raise MalformedRecord(f"invalid {variant} element: {exc}") from exc


# --- writer ---------------------------------------------------------------


def _record(rtype: int, dtype: int, payload: bytes = b"") -> bytes:
    return struct.pack(">HBB", 4 + len(payload), rtype, dtype) + payload


def _ascii_record(rtype: int, value: str) -> bytes:
    raw = value.encode("ascii")
    if len(raw) % 2:
        raw += b"\x00"
    return _record(rtype, rec.DT_ASCII, raw)


def _xy_record(points) -> bytes:
    flat = []
    for x, y in points:
        for c in (x, y):
            if abs(c) > INT32_MAX:
                raise CoordinateOverflow(f"coordinate {c} exceeds the int32 range")
            flat.append(c)
    return _record(rec.XY, rec.DT_INT32, struct.pack(f">{len(flat)}i", *flat))


def _int16_record(rtype: int, *values: int) -> bytes:
    return _record(rtype, rec.DT_INT16, struct.pack(f">{len(values)}h", *values))


def _strans_block(el: Element) -> bytes:
    if not (el.reflect_x or el.magnification != 1.0 or el.angle_degrees != 0.0):
        return b""
    out = _record(rec.STRANS, rec.DT_BITARRAY, struct.pack(">H", 0x8000 if el.reflect_x else 0))
    if el.magnification != 1.0:
        out += _record(rec.MAG, rec.DT_REAL64, encode_real64(el.magnification))
    if el.angle_degrees != 0.0:
        out += _record(rec.ANGLE, rec.DT_REAL64, encode_real64(el.angle_degrees))
    return out


def _element_bytes(el: Element) -> bytes:
    if el.variant == "boundary":
        return (
            _record(rec.BOUNDARY, rec.DT_NONE)
            + _int16_record(rec.LAYER, el.layer)
            + _int16_record(rec.DATATYPE, el.datatype)
            + _xy_record(el.xy)
            + _record(rec.ENDEL, rec.DT_NONE)
        )
    if el.variant == "path":
        if abs(el.width) > INT32_MAX:
            raise CoordinateOverflow(f"path width {el.width} exceeds the int32 range")
        return (
            _record(rec.PATH, rec.DT_NONE)
            + _int16_record(rec.LAYER, el.layer)
            + _int16_record(rec.DATATYPE, el.datatype)
            + _int16_record(rec.PATHTYPE, el.pathtype)
            + _record(rec.WIDTH, rec.DT_INT32, struct.pack(">i", el.width))
            + _xy_record(el.xy)
            + _record(rec.ENDEL, rec.DT_NONE)
        )
    if el.variant == "text":
        return (
            _record(rec.TEXT, rec.DT_NONE)
            + _int16_record(rec.LAYER, el.layer)
            + _int16_record(rec.TEXTTYPE, el.datatype)
            + _xy_record(el.xy)
            + _ascii_record(rec.STRING, el.string)
            + _record(rec.ENDEL, rec.DT_NONE)
        )
    if el.variant == "sref":
        return (
            _record(rec.SREF, rec.DT_NONE)
            + _ascii_record(rec.SNAME, el.ref_name)
            + _strans_block(el)
            + _xy_record(el.xy)
            + _record(rec.ENDEL, rec.DT_NONE)
        )
    if el.variant == "aref":
        return (
            _record(rec.AREF, rec.DT_NONE)
            + _ascii_record(rec.SNAME, el.ref_name)
            + _strans_block(el)
            + _int16_record(rec.COLROW, el.columns, el.rows)
            + _xy_record(el.xy)
            + _record(rec.ENDEL, rec.DT_NONE)
        )
    raise ValueError(f"unknown element variant {el.variant!r}")


def write_gdsii(lib: Library, clock: Optional[Callable[[], Timestamp]] = None) -> bytes:
    """Serialize a Library in canonical form.

    Record order is fixed (UNITS directly after BGNLIB/LIBNAME; element
    records as LAYER, DATATYPE/TEXTTYPE, PATHTYPE, WIDTH, XY) so that
    ``write(parse(b)) == b`` for any canonical stream.  Timestamps come
    from ``clock`` when given, otherwise the library's stored values are
    preserved, keeping ``parse(write(lib)) == lib``.
    """
    if len(lib.name.encode("ascii", "replace")) > 256:
        raise NameTooLong("library name exceeds 256 bytes")
    if clock is not None:
        now = clock()
        stamps = (now, now)
    else:
        stamps = lib.timestamps
    out = bytearray()
    out += _record(rec.HEADER, rec.DT_INT16, struct.pack(">h", GDS_VERSION))
    out += _record(rec.BGNLIB, rec.DT_INT16, struct.pack(">12h", *stamps[0], *stamps[1]))
    out += _ascii_record(rec.LIBNAME, lib.name)
    out += _record(
        rec.UNITS,
        rec.DT_REAL64,
        encode_real64(lib.user_unit_per_db_unit) + encode_real64(lib.meters_per_db_unit),
    )
    for st in lib.structures:
        if len(st.name.encode("ascii", "replace")) > 32:
            raise NameTooLong(f"structure name {st.name!r} exceeds 32 bytes")
        out += _record(rec.BGNSTR, rec.DT_INT16, struct.pack(">12h", *stamps[0], *stamps[1]))
        out += _ascii_record(rec.STRNAME, st.name)
        for el in st.elements:
            out += _element_bytes(el)
        out += _record(rec.ENDSTR, rec.DT_NONE)
    out += _record(rec.ENDLIB, rec.DT_NONE)
    return bytes(out)
