"""GDSII record and data-type identifiers."""

# Record types (first header byte after the length field).
HEADER = 0x00
BGNLIB = 0x01
LIBNAME = 0x02
UNITS = 0x03
ENDLIB = 0x04
BGNSTR = 0x05
STRNAME = 0x06
ENDSTR = 0x07
BOUNDARY = 0x08
PATH = 0x09
SREF = 0x0A
AREF = 0x0B
TEXT = 0x0C
LAYER = 0x0D
DATATYPE = 0x0E
WIDTH = 0x0F
XY = 0x10
ENDEL = 0x11
SNAME = 0x12
COLROW = 0x13
TEXTTYPE = 0x16
PRESENTATION = 0x17
STRING = 0x19
STRANS = 0x1A
MAG = 0x1B
ANGLE = 0x1C
PATHTYPE = 0x21

# Data types (second header byte).
DT_NONE = 0x00
DT_BITARRAY = 0x01
DT_INT16 = 0x02
DT_INT32 = 0x03
DT_REAL32 = 0x04
DT_REAL64 = 0x05
DT_ASCII = 0x06

# Expected data type per supported record, used to reject malformed streams.
EXPECTED_DATA_TYPE = {
    HEADER: DT_INT16,
    BGNLIB: DT_INT16,
    LIBNAME: DT_ASCII,
    UNITS: DT_REAL64,
    ENDLIB: DT_NONE,
    BGNSTR: DT_INT16,
    STRNAME: DT_ASCII,
    ENDSTR: DT_NONE,
    BOUNDARY: DT_NONE,
    PATH: DT_NONE,
    SREF: DT_NONE,
    AREF: DT_NONE,
    TEXT: DT_NONE,
    LAYER: DT_INT16,
    DATATYPE: DT_INT16,
    WIDTH: DT_INT32,
    XY: DT_INT32,
    ENDEL: DT_NONE,
    SNAME: DT_ASCII,
    COLROW: DT_INT16,
    TEXTTYPE: DT_INT16,
    PRESENTATION: DT_BITARRAY,
    STRING: DT_ASCII,
    STRANS: DT_BITARRAY,
    MAG: DT_REAL64,
    ANGLE: DT_REAL64,
    PATHTYPE: DT_INT16,
}

RECORD_NAMES = {
    HEADER: "HEADER",
    BGNLIB: "BGNLIB",
    LIBNAME: "LIBNAME",
    UNITS: "UNITS",
    ENDLIB: "ENDLIB",
    BGNSTR: "BGNSTR",
    STRNAME: "STRNAME",
    ENDSTR: "ENDSTR",
    BOUNDARY: "BOUNDARY",
    PATH: "PATH",
    SREF: "SREF",
    AREF: "AREF",
    TEXT: "TEXT",
    LAYER: "LAYER",
    DATATYPE: "DATATYPE",
    WIDTH: "WIDTH",
    XY: "XY",
    ENDEL: "ENDEL",
    SNAME: "SNAME",
    COLROW: "COLROW",
    TEXTTYPE: "TEXTTYPE",
    PRESENTATION: "PRESENTATION",
    STRING: "STRING",
    STRANS: "STRANS",
    MAG: "MAG",
    ANGLE: "ANGLE",
    PATHTYPE: "PATHTYPE",
}
