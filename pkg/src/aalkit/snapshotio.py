"""Reading and writing the canonical snapshot interchange format.

A canonical file is UTF-8, LF-terminated, and bytewise sorted:

    #aal v1 kind=TXT level=33
    C android.app.Service
    F android.app.Service START_STICKY
    M android.app.Service <init> ()

The writer is bit-exact (same snapshot, same bytes); additional ``#``
lines are skipped on read so sibling formats can extend the envelope.
"""

from __future__ import annotations

import re
from pathlib import Path

from aalkit.errors import DataError
from aalkit.model import AalSnapshot, SourceKind, parse_canonical_line

_HEADER_RE = re.compile(r"#aal v1 kind=([A-Z]+) level=(\d+)\Z")


def format_header(kind: SourceKind, level: int) -> str:
    return f"#aal v1 kind={kind.value} level={level}"


def parse_header(line: str) -> tuple[SourceKind, int]:
    m = _HEADER_RE.match(line)
    if not m:
        raise DataError(f"bad canonical header: {line!r}")
    try:
        kind = SourceKind(m.group(1))
    except ValueError:
        raise DataError(f"unknown source kind {m.group(1)!r}") from None
    return kind, int(m.group(2))


def dumps_snapshot(snapshot: AalSnapshot) -> str:
    lines = [format_header(snapshot.kind, snapshot.api_level)]
    lines.extend(snapshot.sorted_lines())
    return "\n".join(lines) + "\n"


def loads_snapshot(text: str) -> AalSnapshot:
    lines = text.split("\n")
    if not lines or not lines[0].startswith("#aal "):
        raise DataError("missing '#aal v1' header line")
    kind, level = parse_header(lines[0])
    apis = set()
    for raw in lines[1:]:
        if not raw or raw.startswith("#"):
            continue
        apis.add(parse_canonical_line(raw))
    return AalSnapshot(kind=kind, api_level=level, apis=frozenset(apis))


def dump_snapshot(snapshot: AalSnapshot, path: str | Path) -> None:
    Path(path).write_bytes(dumps_snapshot(snapshot).encode("utf-8"))


def load_snapshot(path: str | Path) -> AalSnapshot:
    return loads_snapshot(Path(path).read_bytes().decode("utf-8"))
