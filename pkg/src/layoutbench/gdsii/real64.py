"""Excess-64 8-byte real codec.

Layout (big-endian): 1 sign bit, 7-bit base-16 exponent biased by 64,
56-bit mantissa.  Value = sign * mantissa * 16**(exponent-64) / 2**56,
normalized so the mantissa lies in [1/16, 1) unless the value is zero
(all-zero bit pattern).
"""

import math

from layoutbench.errors import LayoutBenchError

_MANTISSA_BITS = 56
_EXP_BIAS = 64
_MAX_MAGNITUDE = 16.0 ** 63


class OutOfRange(LayoutBenchError):
    """Magnitude not representable in the 7-bit base-16 exponent range."""


def decode_real64(data: bytes) -> float:
    """Decode exactly 8 bytes into a float. Every bit pattern decodes."""
    if len(data) != 8:
        raise ValueError(f"excess-64 real must be 8 bytes, got {len(data)}")
    mantissa = int.from_bytes(data[1:], "big")
    if mantissa == 0:
        return 0.0
    exponent = data[0] & 0x7F
    sign = -1.0 if data[0] & 0x80 else 1.0
    # mantissa * 16**(exp-64) / 2**56, with exact power-of-two scaling.
    value = math.ldexp(mantissa, 4 * (exponent - _EXP_BIAS) - _MANTISSA_BITS)
    return sign * value


def encode_real64(value: float) -> bytes:
    """Encode a float into normalized excess-64 form.

    Exact whenever the float's 53-bit significand fits the 56-bit
    mantissa field, which holds for every finite double in range; the
    round trip decode(encode(x)) == x is therefore bit-faithful.
    """
    if value == 0.0:
        return b"\x00" * 8
    if math.isnan(value) or math.isinf(value):
        raise OutOfRange(f"cannot encode {value!r}")
    sign = 0x80 if value < 0.0 else 0x00
    magnitude = abs(value)
    _, exp2 = math.frexp(magnitude)  # magnitude = m2 * 2**exp2, m2 in [0.5, 1)
    exp16 = -(-exp2 // 4)  # ceil: smallest e with magnitude/16**e < 1
    mantissa = int(round(math.ldexp(magnitude, _MANTISSA_BITS - 4 * exp16)))
    if mantissa >= 1 << _MANTISSA_BITS:  # rounding carried past the top digit
        mantissa >>= 4
        exp16 += 1
    biased = exp16 + _EXP_BIAS
    if not 0 <= biased <= 0x7F:
        raise OutOfRange(f"{value!r} outside excess-64 exponent range")
    return bytes([sign | biased]) + mantissa.to_bytes(7, "big")
