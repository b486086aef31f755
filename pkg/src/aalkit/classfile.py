"""Minimal compiled class-file reader.

Decodes exactly what identity extraction needs: the constant pool (names
only), this-class, access flags, and the field/method tables. Attributes
(Code, Signature, annotations) are skipped: stub archives carry no bodies
and identities use erased descriptors only.

Class initializers are dropped here. Methods flagged synthetic+bridge
collapse into a matching non-bridge declaration when one exists (identity
ignores return types, so covariant bridges never create a second entry).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from aalkit.binutil import decode_mutf8
from aalkit.errors import ClassFileError, MalformedDescriptorError
from aalkit.model import TypeName, jni_method_descriptor, jni_type_to_typename

MAGIC = 0xCAFEBABE
MIN_MAJOR = 45  # JDK 1.1
MAX_MAJOR = 69  # the latest documented release

ACC_PUBLIC = 0x0001
ACC_PRIVATE = 0x0002
ACC_PROTECTED = 0x0004
ACC_STATIC = 0x0008
ACC_FINAL = 0x0010
ACC_BRIDGE = 0x0040
ACC_VARARGS = 0x0080
ACC_INTERFACE = 0x0200
ACC_ABSTRACT = 0x0400
ACC_SYNTHETIC = 0x1000
ACC_ANNOTATION = 0x2000
ACC_ENUM = 0x4000

CONST_UTF8 = 1
CONST_CLASS = 7

# tag -> byte size of the fixed payload (Utf8 handled separately)
_POOL_SIZES = {
    3: 4,  # Integer
    4: 4,  # Float
    5: 8,  # Long (two pool slots)
    6: 8,  # Double (two pool slots)
    7: 2,  # Class
    8: 2,  # String
    9: 4,  # Fieldref
    10: 4,  # Methodref
    11: 4,  # InterfaceMethodref
    12: 4,  # NameAndType
    15: 3,  # MethodHandle
    16: 2,  # MethodType
    17: 4,  # Dynamic
    18: 4,  # InvokeDynamic
    19: 2,  # Module
    20: 2,  # Package
}


@dataclass(frozen=True)
class FieldInfo:
    name: str
    type: TypeName
    flags: int


@dataclass(frozen=True)
class MethodInfo:
    name: str
    params: tuple[TypeName, ...]
    returns: TypeName
    flags: int

    @property
    def is_bridge(self) -> bool:
        return bool(self.flags & ACC_BRIDGE and self.flags & ACC_SYNTHETIC)


@dataclass(frozen=True)
class ParsedClass:
    class_name: str
    access_flags: int
    fields: tuple[FieldInfo, ...]
    methods: tuple[MethodInfo, ...]


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise ClassFileError(f"truncated class file at offset {self.pos}")
        values = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return values

    def u2(self) -> int:
        return self.take(">H")[0]

    def u4(self) -> int:
        return self.take(">I")[0]

    def skip(self, count: int) -> None:
        if self.pos + count > len(self.data):
            raise ClassFileError(f"truncated class file at offset {self.pos}")
        self.pos += count

    def bytes(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise ClassFileError(f"truncated class file at offset {self.pos}")
        out = self.data[self.pos : self.pos + count]
        self.pos += count
        return out


def _read_pool(r: _Reader) -> tuple[dict[int, str], dict[int, int]]:
    """Return (utf8 strings, class-entry name indexes), keyed by pool index."""
    count = r.u2()
    utf8: dict[int, str] = {}
    classes: dict[int, int] = {}
    index = 1
    while index < count:
        (tag,) = r.take(">B")
        if tag == CONST_UTF8:
            length = r.u2()
            try:
                utf8[index] = decode_mutf8(r.bytes(length))
            except ValueError as exc:
                raise ClassFileError(f"bad UTF-8 pool entry #{index}: {exc}") from None
        elif tag == CONST_CLASS:
            classes[index] = r.u2()
        elif tag in _POOL_SIZES:
            r.skip(_POOL_SIZES[tag])
        else:
            raise ClassFileError(f"unknown constant pool tag {tag} at entry #{index}")
        index += 2 if tag in (5, 6) else 1
    return utf8, classes


def _skip_attributes(r: _Reader) -> None:
    for _ in range(r.u2()):
        r.u2()
        r.skip(r.u4())


def parse_classfile(data: bytes) -> ParsedClass:
    r = _Reader(data)
    if r.u4() != MAGIC:
        raise ClassFileError("bad magic: not a class file")
    _minor = r.u2()
    major = r.u2()
    if not MIN_MAJOR <= major <= MAX_MAJOR:
        raise ClassFileError(f"unsupported class file version {major}")
    utf8, classes = _read_pool(r)

    def utf8_at(index: int, what: str) -> str:
        value = utf8.get(index)
        if value is None:
            raise ClassFileError(f"unresolvable {what} index {index}")
        return value

    access_flags = r.u2()
    this_class = r.u2()
    name_index = classes.get(this_class)
    if name_index is None:
        raise ClassFileError(f"this_class index {this_class} is not a class entry")
    class_name = utf8_at(name_index, "class name").replace("/", ".")
    r.u2()  # super_class
    r.skip(2 * r.u2())  # interfaces

    fields: list[FieldInfo] = []
    for _ in range(r.u2()):
        flags = r.u2()
        name = utf8_at(r.u2(), "field name")
        desc = utf8_at(r.u2(), "field descriptor")
        _skip_attributes(r)
        try:
            fields.append(FieldInfo(name, jni_type_to_typename(desc), flags))
        except MalformedDescriptorError as exc:
            raise ClassFileError(f"field {name}: {exc}") from None

    methods: list[MethodInfo] = []
    for _ in range(r.u2()):
        flags = r.u2()
        name = utf8_at(r.u2(), "method name")
        desc = utf8_at(r.u2(), "method descriptor")
        _skip_attributes(r)
        if name == "<clinit>":
            continue
        try:
            params, returns = jni_method_descriptor(desc)
        except MalformedDescriptorError as exc:
            raise ClassFileError(f"method {name}: {exc}") from None
        methods.append(MethodInfo(name, params, returns, flags))

    return ParsedClass(
        class_name=class_name,
        access_flags=access_flags,
        fields=tuple(fields),
        methods=tuple(_collapse_bridges(methods)),
    )


def _collapse_bridges(methods: list[MethodInfo]) -> list[MethodInfo]:
    """One entry per (name, params): prefer a non-bridge declaration."""
    chosen: dict[tuple[str, tuple[TypeName, ...]], int] = {}
    out: list[MethodInfo] = []
    for method in methods:
        key = (method.name, method.params)
        at = chosen.get(key)
        if at is None:
            chosen[key] = len(out)
            out.append(method)
        elif out[at].is_bridge and not method.is_bridge:
            out[at] = method
    return out


def visibility_of(flags: int) -> str:
    if flags & ACC_PUBLIC:
        return "public"
    if flags & ACC_PROTECTED:
        return "protected"
    if flags & ACC_PRIVATE:
        return "private"
    return "package"
