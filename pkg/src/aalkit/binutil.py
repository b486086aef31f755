"""Small helpers shared by the binary parsers (class files and DEX)."""

from __future__ import annotations


def decode_mutf8(data: bytes) -> str:
    """Decode modified UTF-8 (JVM/DEX string encoding).

    Differences from standard UTF-8: U+0000 is the two-byte form C0 80,
    and supplementary characters appear as CESU-8 surrogate pairs. Names
    in practice are ASCII; the slow path handles the rest.
    """
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        pass
    out: list[str] = []
    i, n = 0, len(data)
    while i < n:
        b = data[i]
        if b < 0x80:
            out.append(chr(b))
            i += 1
        elif b & 0xE0 == 0xC0:
            if i + 1 >= n:
                raise ValueError("truncated MUTF-8 sequence")
            out.append(chr(((b & 0x1F) << 6) | (data[i + 1] & 0x3F)))
            i += 2
        elif b & 0xF0 == 0xE0:
            if i + 2 >= n:
                raise ValueError("truncated MUTF-8 sequence")
            out.append(
                chr(((b & 0x0F) << 12) | ((data[i + 1] & 0x3F) << 6) | (data[i + 2] & 0x3F))
            )
            i += 3
        else:
            raise ValueError(f"invalid MUTF-8 byte {b:#x}")
    # surrogatepass round trip merges CESU-8 surrogate pairs
    return "".join(out).encode("utf-16", "surrogatepass").decode("utf-16")


def encode_mutf8(text: str) -> bytes:
    """Inverse of :func:`decode_mutf8` (used by tests and fixtures)."""
    out = bytearray()
    for ch in text:
        cp = ord(ch)
        if cp == 0:
            out += b"\xc0\x80"
        elif cp < 0x80:
            out.append(cp)
        elif cp < 0x800:
            out += bytes((0xC0 | (cp >> 6), 0x80 | (cp & 0x3F)))
        elif cp < 0x10000:
            out += bytes((0xE0 | (cp >> 12), 0x80 | ((cp >> 6) & 0x3F), 0x80 | (cp & 0x3F)))
        else:
            cp -= 0x10000
            for half in (0xD800 | (cp >> 10), 0xDC00 | (cp & 0x3FF)):
                out += bytes(
                    (0xE0 | (half >> 12), 0x80 | ((half >> 6) & 0x3F), 0x80 | (half & 0x3F))
                )
    return bytes(out)


def read_uleb128(data: bytes, offset: int) -> tuple[int, int]:
    """Read one unsigned LEB128 value; return (value, next_offset)."""
    value = 0
    shift = 0
    while True:
        if offset >= len(data):
            raise ValueError("truncated uleb128")
        byte = data[offset]
        offset += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, offset
        shift += 7
        if shift > 35:
            raise ValueError("uleb128 too long")


def encode_uleb128(value: int) -> bytes:
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)
