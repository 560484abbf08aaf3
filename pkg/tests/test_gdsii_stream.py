import struct

import pytest
from hypothesis import given, settings, strategies as st

from layoutbench.gdsii.model import (
    CoordinateOverflow,
    Library,
    NameTooLong,
    Structure,
    aref,
    boundary,
    path,
    sref,
    text,
)
from layoutbench.gdsii.stream import (
    MalformedRecord,
    MissingUnits,
    TruncatedStream,
    parse_gdsii,
    write_gdsii,
)

from helpers import reference_tool_stream


def minimal_library() -> Library:
    return Library(
        name="LIB",
        user_unit_per_db_unit=1e-3,
        meters_per_db_unit=1e-9,
        structures=(Structure("EMPTY"),),
    )


def test_minimal_file_round_trip():
    lib = minimal_library()
    parsed = parse_gdsii(write_gdsii(lib))
    assert parsed == lib
    assert len(parsed.structures) == 1
    assert parsed.structures[0].elements == ()


def test_canonical_write_is_idempotent():
    lib = minimal_library()
    first = write_gdsii(lib)
    assert write_gdsii(parse_gdsii(first)) == first


def test_reference_tool_units():
    lib = parse_gdsii(reference_tool_stream())
    assert lib.meters_per_db_unit == pytest.approx(1e-9, rel=2**-55)
    assert lib.user_unit_per_db_unit == pytest.approx(1e-3, rel=2**-55)
    assert lib.structures[0].elements[0].variant == "boundary"


def test_reference_tool_stream_reserializes_stably():
    stream = reference_tool_stream(with_label=True)
    lib = parse_gdsii(stream)
    assert parse_gdsii(write_gdsii(lib)) == lib
    texts = [el for el in lib.structures[0].elements if el.variant == "text"]
    assert texts and texts[0].string == "hi"


def test_unknown_record_skipped_with_warning():
    lib = parse_gdsii(reference_tool_stream(with_unknown_record=True))
    assert any("unknown record" in w for w in lib.warnings)


def test_truncated_stream_raises():
    data = write_gdsii(minimal_library())
    with pytest.raises(TruncatedStream):
        parse_gdsii(data[:-2])
    with pytest.raises(TruncatedStream):
        parse_gdsii(data[: len(data) // 2 + 1])


def test_missing_units_raises():
    # drop the UNITS record (20 bytes starting after LIBNAME)
    data = write_gdsii(minimal_library())
    idx = data.find(struct.pack(">HBB", 20, 0x03, 0x05))
    assert idx > 0
    with pytest.raises(MissingUnits):
        parse_gdsii(data[:idx] + data[idx + 20 :])


def test_wrong_data_type_is_malformed():
    data = bytearray(write_gdsii(minimal_library()))
    idx = data.index(struct.pack(">HBB", 20, 0x03, 0x05))
    data[idx + 3] = 0x02  # UNITS with int16 payload marker
    with pytest.raises(MalformedRecord):
        parse_gdsii(bytes(data))


def test_coordinate_overflow_rejected():
    el = boundary(0, 0, [(0, 0), (2**31, 0), (0, 5)])
    lib = Library("L", 1e-3, 1e-9, (Structure("S", (el,)),))
    with pytest.raises(CoordinateOverflow):
        write_gdsii(lib)


def test_structure_name_length_enforced():
    with pytest.raises(NameTooLong):
        Structure("X" * 33)


def test_timestamps_preserved_without_clock_and_stamped_with_clock():
    lib = minimal_library()
    assert parse_gdsii(write_gdsii(lib)).timestamps == lib.timestamps
    stamped = parse_gdsii(write_gdsii(lib, clock=lambda: (2030, 6, 1, 12, 0, 0)))
    assert stamped.timestamps == ((2030, 6, 1, 12, 0, 0),) * 2


def test_all_element_variants_round_trip():
    elements = (
        boundary(5, 7, [(0, 0), (10, 0), (10, 10), (0, 10)]),
        path(2, 6, [(0, 0), (100, 0), (100, 100)], width=10, pathtype=2),
        text(1, 0, (5, 5), "label text"),
    )
    refs = (
        sref("CHILD", (50, 50), magnification=2.0, angle_degrees=90.0, reflect_x=True),
        aref("CHILD", (0, 0), 3, 2, (300, 0), (0, 200), angle_degrees=45.0),
    )
    lib = Library(
        "L",
        1e-3,
        1e-9,
        (Structure("CHILD", elements), Structure("TOP", refs)),
    )
    assert parse_gdsii(write_gdsii(lib)) == lib


# --- randomized round-trip property ---------------------------------------

_coord = st.integers(min_value=-(10**8), max_value=10**8)
_point = st.tuples(_coord, _coord)
_name = st.text(
    alphabet=st.sampled_from("ABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789"), min_size=1, max_size=12
)


@st.composite
def _element(draw, ref_names):
    kind = draw(st.sampled_from(["boundary", "path", "text", "sref", "aref"]))
    layer = draw(st.integers(min_value=0, max_value=255))
    dt = draw(st.integers(min_value=0, max_value=255))
    if kind == "boundary":
        pts = draw(st.lists(_point, min_size=3, max_size=8, unique=True))
        return boundary(layer, dt, pts)
    if kind == "path":
        pts = draw(st.lists(_point, min_size=2, max_size=6))
        width = draw(st.integers(min_value=1, max_value=10**6))
        return path(layer, dt, pts, width, draw(st.sampled_from([0, 1, 2])))
    if kind == "text":
        return text(layer, dt, draw(_point), draw(st.text(alphabet=st.characters(min_codepoint=32, max_codepoint=126), max_size=20)))
    mag = draw(st.sampled_from([1.0, 0.5, 2.0, 3.25]))
    angle = draw(st.sampled_from([0.0, 45.0, 90.0, 270.0]))
    reflect = draw(st.booleans())
    name = draw(st.sampled_from(ref_names))
    if kind == "sref":
        return sref(name, draw(_point), mag, angle, reflect)
    cols = draw(st.integers(min_value=1, max_value=5))
    rows = draw(st.integers(min_value=1, max_value=5))
    return aref(name, draw(_point), cols, rows, draw(_point), draw(_point), mag, angle, reflect)


@st.composite
def libraries(draw):
    names = draw(st.lists(_name, min_size=1, max_size=4, unique=True))
    structures = []
    for name in names:
        elements = draw(st.lists(_element(ref_names=names), max_size=5))
        structures.append(Structure(name, tuple(elements)))
    return Library(
        name=draw(_name),
        user_unit_per_db_unit=draw(st.sampled_from([1e-3, 1.0, 1e-4])),
        meters_per_db_unit=draw(st.sampled_from([1e-9, 1e-6, 5e-10])),
        structures=tuple(structures),
        timestamps=((2024, 1, 1, 0, 0, 0), (2024, 1, 2, 3, 4, 5)),
    )


@settings(max_examples=120, deadline=None)
@given(libraries())
def test_random_library_round_trips(lib):
    data = write_gdsii(lib)
    parsed = parse_gdsii(data)
    assert parsed == lib
    assert write_gdsii(parsed) == data
