"""DEX file reader: reference tables, defined classes, reflection scan.

Usage extraction is table driven: the ``field_ids``/``method_ids`` tables
enumerate every member a DEX can reference, so a member is "used" when it
appears there and its defining type is not one of the file's own
``class_defs``. Parameter lists arrive pre-erased (descriptors), so the
identities are directly comparable with list snapshots.

Reflection detection walks code bodies with a flow-insensitive pairing:
string constants and class constants seen anywhere in a body combine with
the reflection lookup calls invoked in that same body (``Class.forName``,
``getMethod``/``getDeclaredField``/... on a class object). Method
candidates keep an unresolved parameter marker (``params=None``); callers
match them against list snapshots by class and name.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from aalkit.binutil import decode_mutf8, read_uleb128
from aalkit.errors import DexError, MalformedDescriptorError
from aalkit.model import (
    ApiRef,
    Kind,
    TypeName,
    jni_type_to_typename,
)

ENDIAN_CONSTANT = 0x12345678
REVERSE_ENDIAN_CONSTANT = 0x78563412
NO_INDEX = 0xFFFFFFFF
_MAGIC_RE = re.compile(rb"dex\n(\d{3})\x00")

_IDENTIFIER_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*\Z")
_CLASS_STRING_RE = re.compile(r"[A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)+\Z")


def _insn_units_table() -> list[int]:
    units = [1] * 256
    table = {
        2: [0x02, 0x05, 0x08, 0x13, 0x15, 0x16, 0x19, 0x1A, 0x1C, 0x1F, 0x20,
            0x22, 0x23, 0x29, 0xFE, 0xFF],
        3: [0x03, 0x06, 0x09, 0x14, 0x17, 0x1B, 0x24, 0x25, 0x26, 0x2A, 0x2B,
            0x2C, 0xFC, 0xFD],
        4: [0xFA, 0xFB],
        5: [0x18],
    }
    for size, ops in table.items():
        for op in ops:
            units[op] = size
    for lo, hi, size in (
        (0x2D, 0x31, 2),  # cmp
        (0x32, 0x3D, 2),  # if-test / if-testz
        (0x44, 0x51, 2),  # aget / aput
        (0x52, 0x5F, 2),  # iget / iput
        (0x60, 0x6D, 2),  # sget / sput
        (0x6E, 0x72, 3),  # invoke-kind
        (0x74, 0x78, 3),  # invoke-kind/range
        (0x90, 0xAF, 2),  # binop
        (0xD0, 0xD7, 2),  # binop/lit16
        (0xD8, 0xE2, 2),  # binop/lit8
    ):
        for op in range(lo, hi + 1):
            units[op] = size
    return units


_INSN_UNITS = _insn_units_table()

_OP_CONST_STRING = 0x1A
_OP_CONST_STRING_JUMBO = 0x1B
_OP_CONST_CLASS = 0x1C
_INVOKE_OPS = frozenset(range(0x6E, 0x73)) | frozenset(range(0x74, 0x79))


class LookupKind(Enum):
    CLASS = "class"
    METHOD = "method"
    FIELD = "field"
    CTOR = "constructor"


_REFLECTION_LOOKUPS = {
    ("java.lang.Class", "forName"): LookupKind.CLASS,
    ("java.lang.ClassLoader", "loadClass"): LookupKind.CLASS,
    ("java.lang.Class", "getMethod"): LookupKind.METHOD,
    ("java.lang.Class", "getDeclaredMethod"): LookupKind.METHOD,
    ("java.lang.Class", "getField"): LookupKind.FIELD,
    ("java.lang.Class", "getDeclaredField"): LookupKind.FIELD,
    ("java.lang.Class", "getConstructor"): LookupKind.CTOR,
    ("java.lang.Class", "getDeclaredConstructor"): LookupKind.CTOR,
}


@dataclass(frozen=True)
class ReflectedApi:
    """A reflection-lookup candidate; ``params=None`` marks an unresolved
    parameter list (match against snapshots by class and name)."""

    kind: Kind
    class_name: str
    member: str = ""
    params: tuple[TypeName, ...] | None = None


@dataclass(frozen=True)
class DexRefs:
    """External references harvested from one DEX file."""

    defined_classes: frozenset[str]
    fields: frozenset[ApiRef]
    methods: frozenset[ApiRef]


class DexFile:
    """Decoded index tables of one DEX file; sections load eagerly."""

    def __init__(self, data: bytes, diagnostics: list[str] | None = None):
        self.data = data
        self.diagnostics = diagnostics
        if len(data) < 0x70:
            raise DexError("file shorter than a DEX header")
        m = _MAGIC_RE.match(data[:8])
        if not m:
            raise DexError("bad magic: not a DEX file")
        self.version = int(m.group(1))
        endian = self._u4(40)
        if endian == REVERSE_ENDIAN_CONSTANT:
            raise DexError("big-endian DEX files are not supported")
        if endian != ENDIAN_CONSTANT:
            raise DexError(f"bad endian tag {endian:#x}")
        header_size = self._u4(36)
        if header_size < 0x70:
            raise DexError(f"implausible header size {header_size}")

        self._strings = self._load_strings(*self._section(56, 4, "string_ids"))
        self._type_descs = [
            self._string_at(self._u4(off), "type descriptor")
            for off in self._item_offsets(64, 4, "type_ids")
        ]
        self._protos = [
            self._load_proto(off) for off in self._item_offsets(72, 12, "proto_ids")
        ]
        self._field_ids = [
            struct.unpack_from("<HHI", data, off)
            for off in self._item_offsets(80, 8, "field_ids")
        ]
        self._method_ids = [
            struct.unpack_from("<HHI", data, off)
            for off in self._item_offsets(88, 8, "method_ids")
        ]
        self._class_defs = [
            struct.unpack_from("<IIIIIIII", data, off)
            for off in self._item_offsets(96, 32, "class_defs")
        ]
        for class_idx, *_rest in self._class_defs:
            self._type_desc(class_idx, "class_def")

    # ---- low-level access -------------------------------------------------

    def _u4(self, offset: int) -> int:
        return struct.unpack_from("<I", self.data, offset)[0]

    def _section(self, header_off: int, item_size: int, what: str) -> tuple[int, int]:
        size = self._u4(header_off)
        off = self._u4(header_off + 4)
        end = off + size * item_size
        if size and (off < 0x70 or end > len(self.data)):
            raise DexError(f"{what} section out of bounds ({off:#x}+{size}*{item_size})")
        return size, off

    def _item_offsets(self, header_off: int, item_size: int, what: str) -> Iterator[int]:
        size, off = self._section(header_off, item_size, what)
        return iter(range(off, off + size * item_size, item_size))

    def _load_strings(self, size: int, off: int) -> list[str]:
        strings = []
        for i in range(size):
            data_off = self._u4(off + 4 * i)
            if data_off >= len(self.data):
                raise DexError(f"string_data offset out of bounds for string #{i}")
            _utf16_len, start = read_uleb128(self.data, data_off)
            end = self.data.find(b"\x00", start)
            if end < 0:
                raise DexError(f"unterminated string data for string #{i}")
            try:
                strings.append(decode_mutf8(self.data[start:end]))
            except ValueError as exc:
                raise DexError(f"bad string data for string #{i}: {exc}") from None
        return strings

    def _string_at(self, idx: int, what: str) -> str:
        if idx >= len(self._strings):
            raise DexError(f"{what} string index {idx} out of range")
        return self._strings[idx]

    def _type_desc(self, idx: int, what: str) -> str:
        if idx >= len(self._type_descs):
            raise DexError(f"{what} type index {idx} out of range")
        return self._type_descs[idx]

    def _load_proto(self, off: int) -> tuple[int, int]:
        _shorty_idx, _ret_idx, params_off = struct.unpack_from("<III", self.data, off)
        return _ret_idx, params_off

    def _proto_params(self, proto_idx: int) -> tuple[TypeName, ...]:
        if proto_idx >= len(self._protos):
            raise DexError(f"proto index {proto_idx} out of range")
        _ret, params_off = self._protos[proto_idx]
        if params_off == 0:
            return ()
        if params_off + 4 > len(self.data):
            raise DexError(f"type_list offset {params_off:#x} out of bounds")
        count = self._u4(params_off)
        end = params_off + 4 + 2 * count
        if end > len(self.data):
            raise DexError(f"type_list at {params_off:#x} out of bounds")
        out = []
        for i in range(count):
            idx = struct.unpack_from("<H", self.data, params_off + 4 + 2 * i)[0]
            out.append(self._type_of(self._type_desc(idx, "parameter")))
        return tuple(out)

    def _type_of(self, desc: str) -> TypeName:
        try:
            return jni_type_to_typename(desc)
        except MalformedDescriptorError as exc:
            raise DexError(str(exc)) from None

    def _class_name_of(self, type_idx: int, what: str) -> str | None:
        """Dotted class name, or None for array/primitive defining types."""
        desc = self._type_desc(type_idx, what)
        if not desc.startswith("L"):
            return None
        return self._type_of(desc).base

    # ---- public views ------------------------------------------------------

    def defined_classes(self) -> frozenset[str]:
        out = set()
        for class_idx, *_ in self._class_defs:
            name = self._class_name_of(class_idx, "class_def")
            if name is not None:
                out.add(name)
        return frozenset(out)

    def field_refs(self) -> set[tuple[str, ApiRef]]:
        """All field references as (declaring class, identity) pairs."""
        out = set()
        for class_idx, type_idx, name_idx in self._field_ids:
            owner = self._class_name_of(class_idx, "field_id")
            if owner is None:
                self._diag("skipping field reference on array/primitive type")
                continue
            name = self._string_at(name_idx, "field name")
            self._type_desc(type_idx, "field type")  # bounds check only
            try:
                out.add((owner, ApiRef(Kind.FIELD, owner, name)))
            except ValueError as exc:
                self._diag(f"skipping unrepresentable field {owner}.{name}: {exc}")
        return out

    def method_refs(self) -> set[tuple[str, ApiRef]]:
        """All method references as (declaring class, identity) pairs;
        class initializers are never reported."""
        out = set()
        for class_idx, proto_idx, name_idx in self._method_ids:
            owner = self._class_name_of(class_idx, "method_id")
            if owner is None:
                self._diag("skipping method reference on array/primitive type")
                continue
            name = self._string_at(name_idx, "method name")
            if name == "<clinit>":
                continue
            try:
                out.add((owner, ApiRef(Kind.METHOD, owner, name, self._proto_params(proto_idx))))
            except ValueError as exc:
                self._diag(f"skipping unrepresentable method {owner}.{name}: {exc}")
        return out

    def _diag(self, message: str) -> None:
        if self.diagnostics is not None:
            self.diagnostics.append(message)

    # ---- code bodies -------------------------------------------------------

    def iter_code_offsets(self) -> Iterator[int]:
        for *_head, class_data_off, _static_values in self._class_defs:
            if class_data_off == 0:
                continue
            try:
                yield from self._walk_class_data(class_data_off)
            except (ValueError, DexError) as exc:
                self._diag(f"skipping class data at {class_data_off:#x}: {exc}")

    def _walk_class_data(self, off: int) -> Iterator[int]:
        data = self.data
        static_fields, off = read_uleb128(data, off)
        instance_fields, off = read_uleb128(data, off)
        direct_methods, off = read_uleb128(data, off)
        virtual_methods, off = read_uleb128(data, off)
        for _ in range(static_fields + instance_fields):
            _idx, off = read_uleb128(data, off)
            _access, off = read_uleb128(data, off)
        for _ in range(direct_methods + virtual_methods):
            _idx, off = read_uleb128(data, off)
            _access, off = read_uleb128(data, off)
            code_off, off = read_uleb128(data, off)
            if code_off:
                yield code_off

    def _body_events(self, code_off: int):
        """(string idxs, const-class type idxs, invoked method idxs) of a body."""
        data = self.data
        if code_off + 16 > len(data):
            raise DexError(f"code item at {code_off:#x} out of bounds")
        insns_units = struct.unpack_from("<I", data, code_off + 12)[0]
        insns_off = code_off + 16
        if insns_off + 2 * insns_units > len(data):
            raise DexError(f"instructions at {insns_off:#x} out of bounds")
        strings: set[int] = set()
        classes: set[int] = set()
        invokes: set[int] = set()
        pos = 0
        while pos < insns_units:
            unit = struct.unpack_from("<H", data, insns_off + 2 * pos)[0]
            op = unit & 0xFF
            ident = unit >> 8
            if op == 0x00 and ident in (1, 2, 3):
                if pos + 2 > insns_units:
                    raise DexError("truncated payload instruction")
                arg = struct.unpack_from("<H", data, insns_off + 2 * (pos + 1))[0]
                if ident == 1:
                    units = arg * 2 + 4
                elif ident == 2:
                    units = arg * 4 + 2
                else:
                    if pos + 4 > insns_units:
                        raise DexError("truncated fill-array payload")
                    count = struct.unpack_from("<I", data, insns_off + 2 * (pos + 2))[0]
                    units = (count * arg + 1) // 2 + 4
            else:
                units = _INSN_UNITS[op]
                if op == _OP_CONST_STRING:
                    strings.add(struct.unpack_from("<H", data, insns_off + 2 * pos + 2)[0])
                elif op == _OP_CONST_STRING_JUMBO:
                    strings.add(struct.unpack_from("<I", data, insns_off + 2 * pos + 2)[0])
                elif op == _OP_CONST_CLASS:
                    classes.add(struct.unpack_from("<H", data, insns_off + 2 * pos + 2)[0])
                elif op in _INVOKE_OPS:
                    invokes.add(struct.unpack_from("<H", data, insns_off + 2 * pos + 2)[0])
            if units <= 0 or pos + units > insns_units:
                raise DexError(f"instruction walk escaped the body at unit {pos}")
            pos += units
        return strings, classes, invokes


def parse_dex_references(
    data: bytes, diagnostics: list[str] | None = None
) -> DexRefs:
    """Harvest the external field/method references of one DEX file."""
    dex = DexFile(data, diagnostics)
    defined = dex.defined_classes()
    fields = frozenset(api for owner, api in dex.field_refs() if owner not in defined)
    methods = frozenset(api for owner, api in dex.method_refs() if owner not in defined)
    return DexRefs(defined_classes=defined, fields=fields, methods=methods)


def detect_reflection(
    data: bytes | DexFile, diagnostics: list[str] | None = None
) -> set[ReflectedApi]:
    """Flow-insensitive reflection pairing over every method body."""
    dex = data if isinstance(data, DexFile) else DexFile(data, diagnostics)
    out: set[ReflectedApi] = set()
    for code_off in dex.iter_code_offsets():
        try:
            string_idxs, class_idxs, invoke_idxs = dex._body_events(code_off)
        except DexError as exc:
            dex._diag(f"skipping undecodable body at {code_off:#x}: {exc}")
            continue
        if not invoke_idxs:
            continue
        lookups = set()
        for idx in invoke_idxs:
            if idx >= len(dex._method_ids):
                continue
            class_idx, _proto, name_idx = dex._method_ids[idx]
            owner = dex._class_name_of(class_idx, "invoke target")
            if owner is None:
                continue
            kind = _REFLECTION_LOOKUPS.get((owner, dex._string_at(name_idx, "method name")))
            if kind is not None:
                lookups.add(kind)
        if not lookups:
            continue
        strings = {dex._string_at(i, "const-string") for i in string_idxs}
        class_names = {s for s in strings if _CLASS_STRING_RE.match(s)}
        member_names = {s for s in strings if _IDENTIFIER_RE.match(s)}
        receivers = set()
        for idx in class_idxs:
            name = dex._class_name_of(idx, "const-class")
            if name is not None:
                receivers.add(name)
        if LookupKind.CLASS in lookups:
            out.update(ReflectedApi(Kind.CLASS, c) for c in class_names)
            receivers |= class_names
        if LookupKind.METHOD in lookups:
            out.update(
                ReflectedApi(Kind.METHOD, c, m)
                for c in receivers
                for m in member_names
            )
        if LookupKind.FIELD in lookups:
            out.update(
                ReflectedApi(Kind.FIELD, c, f)
                for c in receivers
                for f in member_names
            )
        if LookupKind.CTOR in lookups:
            out.update(ReflectedApi(Kind.METHOD, c, "<init>") for c in receivers)
    return out
