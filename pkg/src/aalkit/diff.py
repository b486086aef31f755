"""Set algebra over snapshots: subset partitions, evolution deltas,
namespace breakdowns, and device-inventory comparison.

All operations are read-only over immutable snapshots, and every report
renderer sorts its rows, so outputs are bytewise deterministic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

from aalkit.errors import DataError, KindMismatchError, LevelMismatchError
from aalkit.model import (
    AalSnapshot,
    ApiRef,
    Kind,
    NamespaceCategory,
    SourceKind,
    VISIBILITIES,
    canonical_format,
    namespace_category,
    parse_canonical_line,
)
from aalkit.snapshotio import format_header, parse_header

_KIND_TITLES = ((Kind.CLASS, "classes"), (Kind.FIELD, "fields"), (Kind.METHOD, "methods"))


@dataclass(frozen=True)
class VennPartition:
    """Disjoint cells of the snapshot union, keyed by membership subset."""

    sources: tuple[str, ...]
    cells: Mapping[frozenset[str], frozenset[ApiRef]]

    def cell(self, *labels: str) -> frozenset[ApiRef]:
        return self.cells.get(frozenset(labels), frozenset())

    def counts(self, kind: Kind | None = None) -> dict[frozenset[str], int]:
        if kind is None:
            return {subset: len(apis) for subset, apis in self.cells.items()}
        return {
            subset: sum(1 for a in apis if a.kind is kind)
            for subset, apis in self.cells.items()
        }

    def source_total(self, label: str, kind: Kind | None = None) -> int:
        """Sum of all cells containing ``label`` (the per-ellipse total)."""
        return sum(
            count
            for subset, count in self.counts(kind).items()
            if label in subset
        )

    def ordered_subsets(self) -> list[frozenset[str]]:
        order = {label: i for i, label in enumerate(self.sources)}
        return sorted(
            self.cells,
            key=lambda s: (len(s), tuple(sorted(order[x] for x in s))),
        )

    def subset_label(self, subset: frozenset[str]) -> str:
        return "+".join(s for s in self.sources if s in subset)


def venn(snapshots: Sequence[tuple[str, AalSnapshot]]) -> VennPartition:
    """Partition the union of 2-6 same-level snapshots by exact membership."""
    if not 2 <= len(snapshots) <= 6:
        raise DataError(f"venn needs 2-6 snapshots, got {len(snapshots)}")
    labels = [label for label, _ in snapshots]
    if len(set(labels)) != len(labels):
        raise DataError(f"duplicate snapshot labels: {labels}")
    levels = {snap.api_level for _, snap in snapshots}
    if len(levels) != 1:
        raise LevelMismatchError(f"snapshots span several API levels: {sorted(levels)}")
    membership: dict[ApiRef, set[str]] = {}
    for label, snap in snapshots:
        for api in snap.apis:
            membership.setdefault(api, set()).add(label)
    cells: dict[frozenset[str], set[ApiRef]] = {}
    for api, present in membership.items():
        cells.setdefault(frozenset(present), set()).add(api)
    return VennPartition(
        sources=tuple(labels),
        cells={subset: frozenset(apis) for subset, apis in cells.items()},
    )


@dataclass(frozen=True)
class EvolutionDelta:
    """Pairwise set difference between two levels of the same list kind."""

    from_level: int
    to_level: int
    added: frozenset[ApiRef]
    removed: frozenset[ApiRef]

    def added_of(self, kind: Kind) -> frozenset[ApiRef]:
        return frozenset(a for a in self.added if a.kind is kind)

    def removed_of(self, kind: Kind) -> frozenset[ApiRef]:
        return frozenset(a for a in self.removed if a.kind is kind)


def evolution(prev: AalSnapshot, next_: AalSnapshot) -> EvolutionDelta:
    if prev.kind is not next_.kind:
        raise KindMismatchError(
            f"cannot diff {prev.kind.value} against {next_.kind.value}"
        )
    if prev.api_level >= next_.api_level:
        raise LevelMismatchError(
            f"from-level {prev.api_level} must precede to-level {next_.api_level}"
        )
    return EvolutionDelta(
        from_level=prev.api_level,
        to_level=next_.api_level,
        added=frozenset(next_.apis - prev.apis),
        removed=frozenset(prev.apis - next_.apis),
    )


@dataclass(frozen=True)
class MemberAttribution:
    """Members of a delta split by whether their class is in the class delta."""

    in_class_delta: frozenset[ApiRef]
    outside: frozenset[ApiRef]

    @property
    def fraction(self) -> float:
        total = len(self.in_class_delta) + len(self.outside)
        return len(self.in_class_delta) / total if total else 0.0


def attribute_members_to_classes(
    members: Iterable[ApiRef], classes: Iterable[ApiRef]
) -> MemberAttribution:
    class_names = {c.class_name for c in classes if c.kind is Kind.CLASS}
    inside, outside = set(), set()
    for member in members:
        if member.kind is Kind.CLASS:
            continue
        (inside if member.class_name in class_names else outside).add(member)
    return MemberAttribution(frozenset(inside), frozenset(outside))


def breakdown(apis: Iterable[ApiRef]) -> dict[NamespaceCategory, int]:
    """Count APIs per namespace category of their declaring class."""
    counts = Counter(namespace_category(a.class_name) for a in apis)
    return {cat: counts.get(cat, 0) for cat in NamespaceCategory if counts.get(cat)}


# ---- device inventories ----------------------------------------------------


@dataclass(frozen=True)
class DeviceInventory:
    """An externally produced on-device reflection dump.

    ``universe`` is the set of classes the dump attempted; comparisons only
    call an API missing when its class is in the universe. When a dump
    carries no explicit universe section, the classes occurring in the
    dump itself are used.
    """

    snapshot: AalSnapshot
    universe: frozenset[str]


@dataclass(frozen=True)
class DeviceComparison:
    missing_per_source: Mapping[str, frozenset[ApiRef]]
    non_aal: frozenset[ApiRef]
    visibility: Mapping[ApiRef, str] = field(default_factory=dict)

    def non_aal_split(self, kind: Kind) -> tuple[int, int]:
        """(public count, total count) of non-AAL members of one kind."""
        members = [a for a in self.non_aal if a.kind is kind]
        public = sum(1 for a in members if self.visibility.get(a) == "public")
        return public, len(members)


def compare_device(
    snapshots: Sequence[tuple[str, AalSnapshot]], inventory: DeviceInventory
) -> DeviceComparison:
    """Missing-per-list and beyond-any-list views of a device dump.

    Only fields and methods are compared; class loadability is what the
    universe section records.
    """
    device = inventory.snapshot
    if device.kind is not SourceKind.DEVICE:
        raise KindMismatchError(f"inventory snapshot has kind {device.kind.value}")
    union: set[ApiRef] = set()
    missing: dict[str, frozenset[ApiRef]] = {}
    for label, snap in snapshots:
        union |= snap.apis
        missing[label] = frozenset(
            api
            for api in snap.apis
            if api.kind is not Kind.CLASS
            and api.class_name in inventory.universe
            and api not in device.apis
        )
    non_aal = frozenset(
        api
        for api in device.apis
        if api.kind is not Kind.CLASS and api not in union
    )
    visibility = {a: v for a, v in device.visibility.items() if a in non_aal}
    return DeviceComparison(
        missing_per_source=missing, non_aal=non_aal, visibility=visibility
    )


def dumps_device_inventory(inventory: DeviceInventory) -> str:
    """Canonical lines with a ``vis=`` column plus a #universe section."""
    snap = inventory.snapshot
    lines = [format_header(snap.kind, snap.api_level)]
    lines.extend(f"#universe {name}" for name in sorted(inventory.universe))
    rows = []
    for api in snap.apis:
        row = canonical_format(api)
        vis = snap.visibility.get(api)
        if vis is not None:
            row += f"\tvis={vis}"
        rows.append(row)
    lines.extend(sorted(rows))
    return "\n".join(lines) + "\n"


def loads_device_inventory(text: str) -> DeviceInventory:
    lines = text.split("\n")
    if not lines or not lines[0].startswith("#aal "):
        raise DataError("missing '#aal v1' header line")
    kind, level = parse_header(lines[0])
    if kind is not SourceKind.DEVICE:
        raise KindMismatchError(f"inventory file has kind {kind.value}")
    universe: set[str] = set()
    apis: set[ApiRef] = set()
    visibility: dict[ApiRef, str] = {}
    for raw in lines[1:]:
        if not raw:
            continue
        if raw.startswith("#universe "):
            universe.add(raw[len("#universe ") :].strip())
            continue
        if raw.startswith("#"):
            continue
        line, _, extra = raw.partition("\t")
        api = parse_canonical_line(line)
        apis.add(api)
        if extra.startswith("vis="):
            value = extra[4:]
            if value not in VISIBILITIES:
                raise DataError(f"invalid visibility {value!r} in inventory")
            visibility[api] = value
    if not universe:
        universe = {a.class_name for a in apis}
    snapshot = AalSnapshot(
        kind=SourceKind.DEVICE,
        api_level=level,
        apis=frozenset(apis),
        visibility=visibility,
    )
    return DeviceInventory(snapshot=snapshot, universe=frozenset(universe))


def load_device_inventory(path: str | Path) -> DeviceInventory:
    return loads_device_inventory(Path(path).read_text(encoding="utf-8"))


# ---- report renderers -------------------------------------------------------


def render_counts_table(snapshots: Sequence[tuple[str, AalSnapshot]]) -> str:
    """One row per source with per-kind totals."""
    lines = ["source\tclasses\tfields\tmethods"]
    for label, snap in snapshots:
        counts = snap.counts()
        lines.append(
            f"{label}\t{counts[Kind.CLASS]}\t{counts[Kind.FIELD]}\t{counts[Kind.METHOD]}"
        )
    return "\n".join(lines) + "\n"


def render_venn(partition: VennPartition, members: bool = False) -> str:
    level_free = "+".join(partition.sources)
    lines = [f"# venn sources={level_free}", "subset\tclasses\tfields\tmethods"]
    for subset in partition.ordered_subsets():
        row = [partition.subset_label(subset)]
        for kind, _ in _KIND_TITLES:
            row.append(str(sum(1 for a in partition.cells[subset] if a.kind is kind)))
        lines.append("\t".join(row))
    if members:
        for subset in partition.ordered_subsets():
            lines.append(f"[{partition.subset_label(subset)}]")
            lines.extend(sorted(canonical_format(a) for a in partition.cells[subset]))
    return "\n".join(lines) + "\n"


def render_evolution(delta: EvolutionDelta, members: bool = False) -> str:
    lines = [
        f"# evolve from={delta.from_level} to={delta.to_level}",
        "kind\tadded\tremoved\tadded_in_added_classes\tremoved_in_removed_classes",
    ]
    added_classes = delta.added_of(Kind.CLASS)
    removed_classes = delta.removed_of(Kind.CLASS)
    for kind, title in _KIND_TITLES:
        added = delta.added_of(kind)
        removed = delta.removed_of(kind)
        if kind is Kind.CLASS:
            in_added = in_removed = ""
        else:
            in_added = str(
                len(attribute_members_to_classes(added, added_classes).in_class_delta)
            )
            in_removed = str(
                len(attribute_members_to_classes(removed, removed_classes).in_class_delta)
            )
        lines.append(f"{title}\t{len(added)}\t{len(removed)}\t{in_added}\t{in_removed}")
    if members:
        lines.append("[added]")
        lines.extend(sorted(canonical_format(a) for a in delta.added))
        lines.append("[removed]")
        lines.extend(sorted(canonical_format(a) for a in delta.removed))
    return "\n".join(lines) + "\n"


def render_breakdown(counts: Mapping[NamespaceCategory, int]) -> str:
    lines = ["category\tcount"]
    for category in NamespaceCategory:
        if counts.get(category):
            lines.append(f"{category.value}\t{counts[category]}")
    return "\n".join(lines) + "\n"


def render_device_comparison(
    comparison: DeviceComparison, members: bool = False
) -> str:
    lines = ["source\tmissing_fields\tmissing_methods"]
    for label in comparison.missing_per_source:
        missing = comparison.missing_per_source[label]
        n_fields = sum(1 for a in missing if a.kind is Kind.FIELD)
        n_methods = sum(1 for a in missing if a.kind is Kind.METHOD)
        lines.append(f"{label}\t{n_fields}\t{n_methods}")
    fp, ft = comparison.non_aal_split(Kind.FIELD)
    mp, mt = comparison.non_aal_split(Kind.METHOD)
    lines.append(f"non_aal_fields\t{fp}/{ft}")
    lines.append(f"non_aal_methods\t{mp}/{mt}")
    if members:
        for label, missing in comparison.missing_per_source.items():
            lines.append(f"[missing {label}]")
            lines.extend(sorted(canonical_format(a) for a in missing))
        lines.append("[non_aal]")
        rows = []
        for api in comparison.non_aal:
            row = canonical_format(api)
            vis = comparison.visibility.get(api)
            if vis is not None:
                row += f"\tvis={vis}"
            rows.append(row)
        lines.extend(sorted(rows))
    return "\n".join(lines) + "\n"
