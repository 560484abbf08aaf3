from layoutbench.gdsii.model import (
    CoordinateOverflow,
    Element,
    Library,
    NameTooLong,
    Structure,
    aref,
    boundary,
    path,
    sref,
    text,
)
from layoutbench.gdsii.real64 import OutOfRange, decode_real64, encode_real64
from layoutbench.gdsii.stream import (
    MalformedRecord,
    MissingUnits,
    TruncatedStream,
    parse_gdsii,
    write_gdsii,
)
from layoutbench.gdsii.flatten import (
    AmbiguousTop,
    CyclicReference,
    DanglingReference,
    FlatLayout,
    TextLabel,
    drop_layer,
    flatten,
    from_polygons,
    scale_layout,
    translate_layout,
)

__all__ = [
    "AmbiguousTop",
    "CoordinateOverflow",
    "CyclicReference",
    "DanglingReference",
    "Element",
    "FlatLayout",
    "Library",
    "MalformedRecord",
    "MissingUnits",
    "NameTooLong",
    "OutOfRange",
    "Structure",
    "TextLabel",
    "TruncatedStream",
    "aref",
    "boundary",
    "decode_real64",
    "drop_layer",
    "encode_real64",
    "flatten",
    "from_polygons",
    "parse_gdsii",
    "path",
    "scale_layout",
    "sref",
    "text",
    "translate_layout",
    "write_gdsii",
]
