"""Extract declared APIs from a stub archive of compiled classes.

Every ``.class`` entry yields one class identity (nested classes are their
own entries), even when it declares no members; the visibility sidecar is
filled from access flags. Entries under ``META-INF/`` and non-class
resources are ignored. A corrupt entry is reported in the diagnostics and
the rest of the archive is still processed.

Default constructors that the compiler emitted into the stubs appear as
``<init>`` methods like any other declared member; no suppression is
attempted. Constant fields inlined into concrete classes are parsed as
declared, with no re-attribution to the interface that defined them.
"""

from __future__ import annotations

import io
import zipfile
from typing import IO, Iterable

from aalkit.errors import ArchiveError, ClassFileError
from aalkit.model import (
    AalSnapshot,
    ApiRef,
    SourceKind,
    SynthesizedFilter,
    class_ref,
    field_ref,
    method_ref,
)
from aalkit.classfile import ParsedClass, parse_classfile, visibility_of


def parse_archive(
    source: bytes | IO[bytes],
    level: int,
    filter_synth: bool = True,
    extra_synth_patterns: Iterable[str] = (),
    diagnostics: list[str] | None = None,
) -> AalSnapshot:
    """Parse a class archive into a snapshot with a visibility sidecar."""
    data = source if isinstance(source, bytes) else source.read()
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise ArchiveError(f"unreadable archive: {exc}") from None

    synth = SynthesizedFilter(extra_synth_patterns) if filter_synth else None
    apis: set[ApiRef] = set()
    visibility: dict[ApiRef, str] = {}

    def add(api: ApiRef, flags: int) -> None:
        if synth is not None and synth(api):
            return
        apis.add(api)
        visibility[api] = visibility_of(flags)

    for name in sorted(archive.namelist()):
        if not name.endswith(".class") or name.startswith("META-INF/"):
            continue
        try:
            parsed = parse_classfile(archive.read(name))
        except (ClassFileError, zipfile.BadZipFile) as exc:
            if diagnostics is not None:
                diagnostics.append(f"{name}: {exc}")
            continue
        _add_class(parsed, add)

    return AalSnapshot(
        kind=SourceKind.JAR,
        api_level=level,
        apis=frozenset(apis),
        visibility=visibility,
    )


def _add_class(parsed: ParsedClass, add) -> None:
    add(class_ref(parsed.class_name), parsed.access_flags)
    for field in parsed.fields:
        add(field_ref(parsed.class_name, field.name), field.flags)
    for method in parsed.methods:
        add(method_ref(parsed.class_name, method.name, method.params), method.flags)
