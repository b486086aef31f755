"""Assemble class files byte-by-byte for parser oracle tests.

The builder is deliberately independent of the parser under test: it
serializes a declarative member list straight to the class-file wire
format, so "build then parse" round trips check the parser against the
format specification rather than against itself.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field


ACC_PUBLIC = 0x0001
ACC_PRIVATE = 0x0002
ACC_PROTECTED = 0x0004
ACC_STATIC = 0x0008
ACC_FINAL = 0x0010
ACC_SUPER = 0x0020
ACC_BRIDGE = 0x0040
ACC_VARARGS = 0x0080
ACC_INTERFACE = 0x0200
ACC_ABSTRACT = 0x0400
ACC_SYNTHETIC = 0x1000
ACC_ANNOTATION = 0x2000
ACC_ENUM = 0x4000


@dataclass
class ConstantPool:
    entries: list[bytes] = field(default_factory=list)
    _utf8: dict[str, int] = field(default_factory=dict)
    _classes: dict[str, int] = field(default_factory=dict)

    def utf8(self, text: str) -> int:
        index = self._utf8.get(text)
        if index is None:
            data = text.encode("utf-8")
            self.entries.append(struct.pack(">BH", 1, len(data)) + data)
            index = len(self.entries)
            self._utf8[text] = index
        return index

    def class_info(self, internal_name: str) -> int:
        index = self._classes.get(internal_name)
        if index is None:
            name_index = self.utf8(internal_name)
            self.entries.append(struct.pack(">BH", 7, name_index))
            index = len(self.entries)
            self._classes[internal_name] = index
        return index

    def long_const(self, value: int) -> int:
        """A Long entry; occupies two pool slots (exercises pool skipping)."""
        self.entries.append(struct.pack(">Bq", 5, value))
        self.entries.append(b"")  # phantom second slot
        return len(self.entries) - 1

    def render(self) -> bytes:
        return struct.pack(">H", len(self.entries) + 1) + b"".join(self.entries)


def build_class(
    internal_name: str,
    *,
    fields: list[tuple[str, str, int]] = (),
    methods: list[tuple[str, str, int]] = (),
    access: int = ACC_PUBLIC | ACC_SUPER,
    super_name: str = "java/lang/Object",
    major: int = 52,
    minor: int = 0,
    with_long_constant: bool = False,
) -> bytes:
    """Serialize one class. Members are (name, descriptor, access) triples."""
    pool = ConstantPool()
    this_index = pool.class_info(internal_name)
    super_index = pool.class_info(super_name) if super_name else 0
    if with_long_constant:
        pool.long_const(0x1234_5678_9ABC_DEF0)

    def member(name: str, descriptor: str, flags: int) -> bytes:
        return struct.pack(
            ">HHHH", flags, pool.utf8(name), pool.utf8(descriptor), 0
        )

    field_blobs = [member(*f) for f in fields]
    method_blobs = [member(*m) for m in methods]

    out = bytearray()
    out += struct.pack(">IHH", 0xCAFEBABE, minor, major)
    out += pool.render()
    out += struct.pack(">HHH", access, this_index, super_index)
    out += struct.pack(">H", 0)  # interfaces
    out += struct.pack(">H", len(field_blobs)) + b"".join(field_blobs)
    out += struct.pack(">H", len(method_blobs)) + b"".join(method_blobs)
    out += struct.pack(">H", 0)  # attributes
    return bytes(out)
