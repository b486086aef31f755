"""Parser for restriction-flag lists (``hiddenapi-flags.csv``).

Each line is one JNI member signature followed by its flags:

    Landroid/content/Context;->MODE_WORLD_READABLE:I,public-api,sdk
    Landroid/app/Activity;->canStartActivityForResult()Z,max-target-r

Members are mapped to identities through the scanning kernel; the
declaring class of every surviving member is added to the snapshot as a
class identity (which is also why classes with no members can never
appear in this list; a diagnostic records the fact once per parse).

Class initializers are always dropped. Other compiler-synthesized names
(lambda artifacts, synthetic accessors) are dropped by default and kept
with ``filter_synth=False``.
"""

from __future__ import annotations

from typing import IO, Iterable, Mapping

from aalkit import _scan
from aalkit.errors import CsvSignatureError
from aalkit.model import (
    AalSnapshot,
    ApiRef,
    Kind,
    RestrictionPolicy,
    SourceKind,
    SynthesizedFilter,
    TypeName,
    canonical_format,
    class_ref,
    parse_canonical_line,
)

_NOTE_NO_EMPTY_CLASSES = (
    "note: classes without members cannot be represented in a flag list; "
    "the class set is derived from member signatures"
)


def _member_from_signature(sig: str, line_no: int, type_cache: dict) -> ApiRef:
    try:
        kind, class_name, member, raw_params = _scan.parse_member_sig(sig)
    except ValueError as exc:
        raise CsvSignatureError(str(exc), line_no) from None
    try:
        if kind == "F":
            return ApiRef(Kind.FIELD, class_name, member)
        params = type_cache.get(raw_params)
        if params is None:
            params = tuple(TypeName(b, d) for b, d in raw_params)
            type_cache[raw_params] = params
        return ApiRef(Kind.METHOD, class_name, member, params)
    except ValueError as exc:
        raise CsvSignatureError(str(exc), line_no) from None


def parse_csv(
    source: str | IO[str],
    level: int,
    filter_synth: bool = True,
    extra_synth_patterns: Iterable[str] = (),
    diagnostics: list[str] | None = None,
) -> AalSnapshot:
    """Parse a flag list into a snapshot with a policy sidecar."""
    text = source if isinstance(source, str) else source.read()
    synth = SynthesizedFilter(extra_synth_patterns) if filter_synth else None
    flags_by_api: dict[ApiRef, set[str]] = {}
    type_cache: dict = {}

    def diag(message: str) -> None:
        if diagnostics is not None:
            diagnostics.append(message)

    for line_no, raw in enumerate(text.split("\n"), 1):
        line = raw.rstrip("\r")
        if not line or line.startswith("#"):
            continue
        sig, _, flag_part = line.partition(",")
        if not flag_part:
            raise CsvSignatureError("missing flags after signature", line_no)
        flags = flag_part.split(",")
        if any(f == "" for f in flags):
            raise CsvSignatureError("empty flag token", line_no)
        api = _member_from_signature(sig, line_no, type_cache)
        if api.member == "<clinit>":
            continue
        if synth is not None and synth(api):
            continue
        known = flags_by_api.get(api)
        if known is None:
            flags_by_api[api] = set(flags)
        else:
            new = set(flags) - known
            if new:
                diag(
                    f"line {line_no}: duplicate member {canonical_format(api)!r} "
                    f"with conflicting flags; unioned {sorted(new)}"
                )
                known.update(new)

    apis: set[ApiRef] = set(flags_by_api)
    apis.update(class_ref(a.class_name) for a in flags_by_api)
    policy = {api: RestrictionPolicy(frozenset(f)) for api, f in flags_by_api.items()}
    if diagnostics is not None and apis:
        diagnostics.append(_NOTE_NO_EMPTY_CLASSES)
    return AalSnapshot(
        kind=SourceKind.CSV, api_level=level, apis=frozenset(apis), policy=policy
    )


def merge_legacy_lists(sources: Iterable[tuple[str, str]]) -> str:
    """Merge per-policy signature files (the API-level-28 layout) into one
    CSV-format stream.

    ``sources`` yields ``(text, flag)`` pairs: a plain list of member
    signatures and the flag to attach to each. Duplicate members across
    files get the union of their flags. Output lines are sorted bytewise,
    so the merge is deterministic regardless of source order.
    """
    merged: dict[str, set[str]] = {}
    for text, flag in sources:
        for raw in text.split("\n"):
            line = raw.rstrip("\r").strip()
            if not line or line.startswith("#"):
                continue
            merged.setdefault(line, set()).add(flag)
    lines = [f"{sig},{','.join(sorted(flags))}" for sig, flags in merged.items()]
    return "".join(line + "\n" for line in sorted(lines))


def dumps_policy_sidecar(snapshot: AalSnapshot) -> str:
    """Serialize the policy map as ``<canonical line>\\t<flag,flag,...>``."""
    rows = []
    for api, policy in snapshot.policy.items():
        rows.append(f"{canonical_format(api)}\t{','.join(sorted(policy.flags))}")
    return "".join(row + "\n" for row in sorted(rows))


def loads_policy_sidecar(text: str) -> Mapping[ApiRef, RestrictionPolicy]:
    out: dict[ApiRef, RestrictionPolicy] = {}
    for raw in text.split("\n"):
        if not raw or raw.startswith("#"):
            continue
        line, _, flag_part = raw.partition("\t")
        api = parse_canonical_line(line)
        flags = frozenset(f for f in flag_part.split(",") if f)
        existing = out.get(api)
        if existing is not None:
            flags |= existing.flags
        out[api] = RestrictionPolicy(flags)
    return out
