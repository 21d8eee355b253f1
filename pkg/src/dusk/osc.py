"""Minimal OSC 1.0 binary codec: messages, bundles, type tags i/f/s.

Everything is big-endian and 4-byte aligned. The parser is defensive: any
malformed input raises OscParseError with the byte offset of the problem,
never any other exception, so it can sit directly on a UDP socket.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

IMMEDIATELY = 1  # OSC time tag meaning "now"

MAX_BUNDLE_DEPTH = 16

OscArg = int | float | str


class OscParseError(ValueError):
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class OscMessage:
    address: str
    args: tuple[OscArg, ...] = ()

    def typetags(self) -> str:
        tags = []
        for a in self.args:
            if isinstance(a, bool):
                raise TypeError("booleans are not encodable")
            if isinstance(a, int):
                tags.append("i")
            elif isinstance(a, float):
                tags.append("f")
            elif isinstance(a, str):
                tags.append("s")
            else:
                raise TypeError(f"unsupported argument type: {type(a).__name__}")
        return "".join(tags)


def _pad(n: int) -> int:
    return (n + 3) & ~3


def _encode_string(s: str) -> bytes:
    raw = s.encode("ascii") + b"\x00"
    return raw + b"\x00" * (_pad(len(raw)) - len(raw))


def encode_message(msg: OscMessage) -> bytes:
    if not msg.address.startswith("/"):
        raise ValueError(f"address must start with '/': {msg.address!r}")
    out = _encode_string(msg.address)
    out += _encode_string("," + msg.typetags())
    for a in msg.args:
        if isinstance(a, int):
            if not -(2**31) <= a < 2**31:
                raise ValueError(f"int32 out of range: {a}")
            out += struct.pack(">i", a)
        elif isinstance(a, float):
            out += struct.pack(">f", a)
        else:
            out += _encode_string(a)
    return out


def encode_bundle(elements: list[OscMessage | bytes], timetag: int = IMMEDIATELY) -> bytes:
    """Bundle of messages and/or pre-encoded sub-bundles."""
    out = _encode_string("#bundle") + struct.pack(">Q", timetag)
    for el in elements:
        raw = el if isinstance(el, bytes) else encode_message(el)
        out += struct.pack(">i", len(raw)) + raw
    return out


def _read_string(data: bytes, offset: int, end: int) -> tuple[str, int]:
    terminator = data.find(b"\x00", offset, end)
    if terminator < 0:
        raise OscParseError("unterminated string", offset)
    try:
        s = data[offset:terminator].decode("ascii")
    except UnicodeDecodeError:
        raise OscParseError("non-ascii bytes in string", offset) from None
    new_offset = offset + _pad(terminator - offset + 1)
    if new_offset > end:
        raise OscParseError("string padding runs past end of element", offset)
    return s, new_offset


def _parse_message(data: bytes, start: int, end: int) -> OscMessage:
    address, offset = _read_string(data, start, end)
    if not address.startswith("/"):
        raise OscParseError(f"address must start with '/', got {address!r}", start)
    tags_at = offset
    tags, offset = _read_string(data, offset, end)
    if not tags.startswith(","):
        raise OscParseError(f"type tag string must start with ',', got {tags!r}", tags_at)
    args: list[OscArg] = []
    for tag in tags[1:]:
        if tag == "i":
            if offset + 4 > end:
                raise OscParseError("truncated int32 argument", offset)
            args.append(struct.unpack_from(">i", data, offset)[0])
            offset += 4
        elif tag == "f":
            if offset + 4 > end:
                raise OscParseError("truncated float32 argument", offset)
            args.append(struct.unpack_from(">f", data, offset)[0])
            offset += 4
        elif tag == "s":
            s, offset = _read_string(data, offset, end)
            args.append(s)
        else:
            raise OscParseError(f"unsupported type tag {tag!r}", offset)
    if offset != end:
        raise OscParseError("trailing bytes after message arguments", offset)
    return OscMessage(address=address, args=tuple(args))


def _parse_element(data: bytes, start: int, end: int, depth: int, out: list[OscMessage]) -> None:
    if depth > MAX_BUNDLE_DEPTH:
        raise OscParseError("bundle nesting too deep", start)
    if end - start == 0:
        raise OscParseError("empty element", start)
    if (end - start) % 4 != 0:
        raise OscParseError(f"element length {end - start} not a multiple of 4", start)
    if data[start:start + 8] == b"#bundle\x00":
        offset = start + 8
        if offset + 8 > end:
            raise OscParseError("truncated bundle time tag", offset)
        offset += 8  # time tags are accepted and ignored; delivery is immediate
        while offset < end:
            size = struct.unpack_from(">i", data, offset)[0]
            offset += 4
            if size <= 0 or size % 4 != 0:
                raise OscParseError(f"bad bundle element size {size}", offset - 4)
            if offset + size > end:
                raise OscParseError("bundle element runs past end of packet", offset - 4)
            _parse_element(data, offset, offset + size, depth + 1, out)
            offset += size
    else:
        out.append(_parse_message(data, start, end))


def parse_packet(data: bytes) -> list[OscMessage]:
    """All messages in a packet, bundles flattened in order.

    An empty bundle yields an empty list; any structural problem raises
    OscParseError (with byte offset) and nothing else.
    """
    out: list[OscMessage] = []
    _parse_element(bytes(data), 0, len(data), 0, out)
    return out


def float_args_finite(msg: OscMessage) -> bool:
    return all(math.isfinite(a) for a in msg.args if isinstance(a, float))
