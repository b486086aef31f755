"""APK usage classification against a union of list snapshots.

Every external member reference in the APK's DEX tables is classified:

* ``direct``  - present in the loaded snapshot union;
* ``extra``   - absent from every snapshot but declared under an Android
  ecosystem namespace (``android.*``, ``androidx.*``, ``com.android.*``);
* ``reflect`` - reached through reflection lookups. Field and class
  targets carry a full identity and are reported as found; method targets
  have unresolved parameter lists and are matched against the snapshot
  union by class and name, every matching overload being reported with an
  approximate-match marker.

References into the APK's own classes and JDK-namespace references are
discarded everywhere. ``exclude_prefixes`` drops additional package
subtrees (bundled libraries) from all three sets.
"""

from __future__ import annotations

import io
import re
import zipfile
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from aalkit.dex import DexFile, ReflectedApi, detect_reflection
from aalkit.errors import ArchiveError, DexError
from aalkit.model import (
    AalSnapshot,
    ApiRef,
    Kind,
    NamespaceCategory,
    canonical_format,
    class_ref,
    namespace_category,
)

_DEX_ENTRY_RE = re.compile(r"classes\d*\.dex\Z")

ECOSYSTEM_PREFIXES = ("android.", "androidx.", "com.android.")

APPROX_MARKER = "~class+name"


@dataclass(frozen=True)
class UsageReport:
    """Classified API usage of one APK (counts match one table row)."""

    apk_id: str
    direct: frozenset[ApiRef]
    extra: frozenset[ApiRef]
    reflect: frozenset[ApiRef]
    defined_classes: frozenset[str]
    approx: frozenset[ApiRef] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.extra & self.direct:
            raise ValueError("extra and direct sets overlap")
        for api in self.direct | self.extra:
            if api.class_name in self.defined_classes:
                raise ValueError(
                    f"{canonical_format(api)} is defined by the APK itself"
                )
        if not self.approx <= self.reflect:
            raise ValueError("approx markers must reference reflect members")


def union_of_snapshots(snapshots: Iterable[AalSnapshot]) -> frozenset[ApiRef]:
    out: set[ApiRef] = set()
    for snapshot in snapshots:
        out |= snapshot.apis
    return frozenset(out)


def scan_apk(
    source: bytes | IO[bytes],
    aal_union: frozenset[ApiRef] | set[ApiRef],
    apk_id: str = "apk",
    exclude_prefixes: Iterable[str] = (),
    diagnostics: list[str] | None = None,
) -> UsageReport:
    """Scan every ``classes*.dex`` entry and classify external references."""
    data = source if isinstance(source, bytes) else source.read()
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise ArchiveError(f"unreadable archive: {exc}") from None

    dex_names = sorted(n for n in archive.namelist() if _DEX_ENTRY_RE.match(n))
    if not dex_names:
        raise DexError("no classes*.dex entry in archive")

    defined: set[str] = set()
    member_refs: set[tuple[str, ApiRef]] = set()
    candidates: set[ReflectedApi] = set()
    for name in dex_names:
        try:
            dex = DexFile(archive.read(name), diagnostics)
        except DexError as exc:
            if diagnostics is not None:
                diagnostics.append(f"{name}: {exc}")
            continue
        defined |= dex.defined_classes()
        member_refs |= dex.field_refs()
        member_refs |= dex.method_refs()
        candidates |= detect_reflection(dex, diagnostics)

    excludes = tuple(p if p.endswith(".") else p + "." for p in exclude_prefixes)

    def discarded(class_name: str) -> bool:
        if class_name in defined:
            return True
        if namespace_category(class_name) is NamespaceCategory.JDK:
            return True
        return bool(excludes) and class_name.startswith(excludes)

    direct: set[ApiRef] = set()
    extra: set[ApiRef] = set()
    for owner, api in member_refs:
        if discarded(owner):
            continue
        if api in aal_union:
            direct.add(api)
        elif owner.startswith(ECOSYSTEM_PREFIXES):
            extra.add(api)

    reflect, approx = _resolve_reflection(candidates, aal_union, discarded, diagnostics)
    return UsageReport(
        apk_id=apk_id,
        direct=frozenset(direct),
        extra=frozenset(extra),
        reflect=frozenset(reflect),
        defined_classes=frozenset(defined),
        approx=frozenset(approx),
    )


def _resolve_reflection(
    candidates: set[ReflectedApi],
    aal_union: frozenset[ApiRef] | set[ApiRef],
    discarded,
    diagnostics: list[str] | None,
) -> tuple[set[ApiRef], set[ApiRef]]:
    by_class_name: dict[tuple[str, str], list[ApiRef]] = {}
    for api in aal_union:
        if api.kind is Kind.METHOD:
            by_class_name.setdefault((api.class_name, api.member), []).append(api)

    reflect: set[ApiRef] = set()
    approx: set[ApiRef] = set()
    unmatched = 0
    for cand in candidates:
        if discarded(cand.class_name):
            continue
        try:
            if cand.kind is Kind.CLASS:
                reflect.add(class_ref(cand.class_name))
            elif cand.kind is Kind.FIELD:
                reflect.add(ApiRef(Kind.FIELD, cand.class_name, cand.member))
            elif cand.params is not None:
                reflect.add(ApiRef(Kind.METHOD, cand.class_name, cand.member, cand.params))
            else:
                overloads = by_class_name.get((cand.class_name, cand.member))
                if overloads:
                    reflect.update(overloads)
                    approx.update(overloads)
                else:
                    unmatched += 1
        except ValueError:
            continue  # string constants can spell unrepresentable names
    if unmatched and diagnostics is not None:
        diagnostics.append(
            f"{unmatched} reflected method candidate(s) matched no snapshot API "
            "and were dropped"
        )
    return reflect, approx


def render_usage_report(report: UsageReport) -> str:
    """Sectioned, bytewise-sorted serialization of one usage report."""
    lines = [f"#usage v1 apk={report.apk_id}"]
    for header, apis in (
        ("[direct]", report.direct),
        ("[extra]", report.extra),
        ("[reflect]", report.reflect),
    ):
        lines.append(header)
        rows = []
        for api in apis:
            row = canonical_format(api)
            if header == "[reflect]" and api in report.approx:
                row += f"\t{APPROX_MARKER}"
            rows.append(row)
        lines.extend(sorted(rows))
    return "\n".join(lines) + "\n"
