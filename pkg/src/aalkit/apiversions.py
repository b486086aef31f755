"""Parser for the versions database (``api-versions.xml``).

The document inlines every member under its class and carries lifetime
attributes; method names embed a JNI descriptor:

    <api version="2">
      <class name="android/app/Service" since="1">
        <extends name="android/content/Context"/>
        <method name="getString(I[Ljava/lang/Object;)Ljava/lang/String;"/>
        <field name="START_STICKY" deprecated="30" removed="33"/>
      </class>
    </api>

Parsing yields a raw model with one lifetime per API; availability
snapshots at a given level are then cut with :func:`snapshot_at`, which
keeps an API iff it was introduced at or before the level and not yet
removed (deprecation does not exclude). ``extends``/``implements``
children are retained for diagnostics only; they never create identities.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from aalkit.errors import MalformedDescriptorError, XmlDocumentError
from aalkit.model import (
    AalSnapshot,
    ApiRef,
    Kind,
    Lifetime,
    SourceKind,
    SynthesizedFilter,
    canonical_format,
    class_ref,
    field_ref,
    jni_method_params,
    method_ref,
    parse_canonical_line,
)


@dataclass(frozen=True)
class VersionedModel:
    """All APIs in one versions document, each with its lifetime."""

    entries: Mapping[ApiRef, Lifetime]
    supertypes: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def apis(self) -> frozenset[ApiRef]:
        return frozenset(self.entries)


def _int_attr(elem: ET.Element, name: str, path: str) -> int | None:
    value = elem.get(name)
    if value is None:
        return None
    try:
        return int(value)
    except ValueError:
        raise XmlDocumentError(f"non-integer {name}={value!r}", path) from None


def _lifetime(elem: ET.Element, path: str, default_since: int) -> Lifetime:
    since = _int_attr(elem, "since", path)
    if since is None:
        since = default_since
    try:
        return Lifetime(
            since=since,
            deprecated=_int_attr(elem, "deprecated", path),
            removed=_int_attr(elem, "removed", path),
        )
    except ValueError as exc:
        raise XmlDocumentError(str(exc), path) from None


def parse_api_versions(
    source: str | bytes | IO,
    filter_synth: bool = True,
    extra_synth_patterns: Iterable[str] = (),
    diagnostics: list[str] | None = None,
) -> VersionedModel:
    """Parse a versions document into its raw model."""
    if isinstance(source, (str, bytes)):
        text = source
    else:
        text = source.read()
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise XmlDocumentError(f"document syntax error: {exc}") from None
    if root.tag != "api":
        raise XmlDocumentError(f"expected <api> root element, got <{root.tag}>")

    synth = SynthesizedFilter(extra_synth_patterns) if filter_synth else None
    entries: dict[ApiRef, Lifetime] = {}
    supertypes: dict[str, tuple[str, ...]] = {}

    def add(api: ApiRef, lifetime: Lifetime) -> None:
        if api.member == "<clinit>":
            return
        if synth is not None and synth(api):
            return
        known = entries.get(api)
        if known is not None and known != lifetime and diagnostics is not None:
            diagnostics.append(
                f"duplicate entry {canonical_format(api)!r} with differing lifetimes"
            )
        entries[api] = lifetime

    for index, cls in enumerate(root):
        if cls.tag != "class":
            if diagnostics is not None:
                diagnostics.append(f"skipping unexpected element <{cls.tag}>")
            continue
        raw_name = cls.get("name")
        path = f"api/class[{index}]"
        if not raw_name:
            raise XmlDocumentError("class element without name", path)
        class_name = raw_name.replace("/", ".")
        path = f"api/class[{raw_name}]"
        class_life = _lifetime(cls, path, default_since=1)
        try:
            add(class_ref(class_name), class_life)
        except ValueError as exc:
            raise XmlDocumentError(str(exc), path) from None

        supers: list[str] = []
        for child in cls:
            cpath = f"{path}/{child.tag}[{child.get('name')!r}]"
            cname = child.get("name")
            if child.tag in ("extends", "implements"):
                if cname:
                    supers.append(cname.replace("/", "."))
                continue
            if child.tag not in ("field", "method"):
                if diagnostics is not None:
                    diagnostics.append(f"skipping unexpected element at {cpath}")
                continue
            if not cname:
                raise XmlDocumentError(f"{child.tag} element without name", cpath)
            life = _lifetime(child, cpath, default_since=class_life.since)
            try:
                if child.tag == "field":
                    add(field_ref(class_name, cname), life)
                else:
                    paren = cname.find("(")
                    if paren < 0:
                        raise XmlDocumentError(
                            "method name has no embedded descriptor", cpath
                        )
                    params = jni_method_params(_normalize_descriptor(cname[paren:]))
                    add(method_ref(class_name, cname[:paren], params), life)
            except MalformedDescriptorError as exc:
                raise XmlDocumentError(f"descriptor parse error: {exc}", cpath) from None
            except ValueError as exc:
                raise XmlDocumentError(str(exc), cpath) from None
        if supers:
            supertypes[class_name] = tuple(supers)

    return VersionedModel(entries=entries, supertypes=supertypes)


def _normalize_descriptor(desc: str) -> str:
    # Some vintages omit the return type; parameters alone still identify
    # the method, so default the return to void for descriptor parsing.
    if desc.endswith(")"):
        return desc + "V"
    return desc


def snapshot_at(model: VersionedModel, level: int) -> AalSnapshot:
    """Availability view: introduced at or before ``level``, not removed yet.

    Entries removed at exactly ``level`` are already unavailable there (the
    removal level records the first level without the API). Deprecated
    entries remain included.
    """
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    apis: set[ApiRef] = set()
    lifetime: dict[ApiRef, Lifetime] = {}
    for api, life in model.entries.items():
        if life.since > level:
            continue
        if life.removed is not None and life.removed <= level:
            continue
        apis.add(api)
        lifetime[api] = life
    return AalSnapshot(
        kind=SourceKind.XML, api_level=level, apis=frozenset(apis), lifetime=lifetime
    )


def dumps_lifetime_sidecar(snapshot: AalSnapshot) -> str:
    """Serialize lifetimes as ``<canonical>\\tsince=..[,deprecated=..][,removed=..]``."""
    rows = []
    for api, life in snapshot.lifetime.items():
        parts = [f"since={life.since}"]
        if life.deprecated is not None:
            parts.append(f"deprecated={life.deprecated}")
        if life.removed is not None:
            parts.append(f"removed={life.removed}")
        rows.append(f"{canonical_format(api)}\t{','.join(parts)}")
    return "".join(row + "\n" for row in sorted(rows))


def loads_lifetime_sidecar(text: str) -> Mapping[ApiRef, Lifetime]:
    out: dict[ApiRef, Lifetime] = {}
    for raw in text.split("\n"):
        if not raw or raw.startswith("#"):
            continue
        line, _, payload = raw.partition("\t")
        api = parse_canonical_line(line)
        values: dict[str, int] = {}
        for item in payload.split(","):
            key, _, num = item.partition("=")
            if key and num:
                values[key] = int(num)
        out[api] = Lifetime(
            since=values.get("since", 1),
            deprecated=values.get("deprecated"),
            removed=values.get("removed"),
        )
    return out
