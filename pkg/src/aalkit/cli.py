"""Command-line interface.

Subcommands bind the parsers, the diff engine, and the APK scanner into
batch workflows. Reports go to stdout (or ``-o``), diagnostics to stderr;
outputs are bytewise deterministic for identical inputs and flags.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from aalkit import apkscan, diff, hiddenapi, jar, snapshotio, txt
from aalkit.apiversions import dumps_lifetime_sidecar, parse_api_versions, snapshot_at
from aalkit.errors import AalkitError

_FORMATS = ("txt", "csv", "xml", "jar")
_EXTENSION_FORMATS = {".txt": "txt", ".csv": "csv", ".xml": "xml", ".jar": "jar"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aalkit",
        description="Parse Android API list files into one canonical model and compare them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse one list file into canonical form")
    p.add_argument("input", type=Path)
    p.add_argument("--format", choices=_FORMATS, help="inferred from the extension when omitted")
    p.add_argument("--level", type=int, help="API level of the list (required)")
    p.add_argument("--no-filter-synth", action="store_true",
                   help="keep compiler-synthesized names (class initializers are always dropped)")
    p.add_argument("--synth-pattern", action="append", default=[], metavar="REGEX",
                   help="extra synthesized-name pattern (repeatable)")
    p.add_argument("--policy-sidecar", type=Path, metavar="PATH",
                   help="also write the restriction-policy sidecar (csv only)")
    p.add_argument("--lifetime-sidecar", type=Path, metavar="PATH",
                   help="also write the lifetime sidecar (xml only)")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("merge-legacy", help="merge per-policy list files (level 28) into one CSV stream")
    p.add_argument("sources", nargs="+", metavar="FLAG=PATH",
                   help="signature file with the flag to attach to each line")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("venn", help="partition 2-6 canonical files by membership subset")
    p.add_argument("inputs", nargs="+", metavar="[LABEL=]PATH")
    p.add_argument("--members", action="store_true", help="list cell members, not just counts")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("evolve", help="added/removed APIs between two canonical files")
    p.add_argument("prev", type=Path)
    p.add_argument("next", type=Path)
    p.add_argument("--members", action="store_true")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("scan", help="classify an APK's API usage against canonical files")
    p.add_argument("apk", type=Path)
    p.add_argument("lists", nargs="+", metavar="AAL", type=Path)
    p.add_argument("--exclude-prefix", action="append", default=[], metavar="PKG",
                   help="drop references under this package prefix (repeatable)")
    p.add_argument("--id", dest="apk_id", help="report identifier (default: APK file name)")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("compare-device", help="compare canonical files against a device inventory")
    p.add_argument("inventory", type=Path)
    p.add_argument("inputs", nargs="+", metavar="[LABEL=]PATH")
    p.add_argument("--members", action="store_true")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("breakdown", help="namespace category counts of a canonical file")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path)

    return parser


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_bytes(text.encode("utf-8"))


def _labeled(args_inputs: list[str]) -> list[tuple[str, Path]]:
    out = []
    for item in args_inputs:
        label, sep, path = item.partition("=")
        if sep:
            out.append((label, Path(path)))
        else:
            out.append((Path(item).stem, Path(item)))
    return out


def _print_diagnostics(diagnostics: list[str]) -> None:
    for line in diagnostics:
        print(f"aalkit: {line}", file=sys.stderr)


def _cmd_parse(args, parser: argparse.ArgumentParser) -> int:
    fmt = args.format or _EXTENSION_FORMATS.get(args.input.suffix.lower())
    if fmt is None:
        parser.error(f"cannot infer format of {args.input}; pass --format")
    if args.level is None:
        parser.error(f"--level is required for {fmt} inputs")
    if args.policy_sidecar and fmt != "csv":
        parser.error("--policy-sidecar applies to csv inputs only")
    if args.lifetime_sidecar and fmt != "xml":
        parser.error("--lifetime-sidecar applies to xml inputs only")
    filter_synth = not args.no_filter_synth
    patterns = args.synth_pattern
    diagnostics: list[str] = []

    if fmt == "txt":
        snapshot = txt.parse_txt(
            args.input.read_text(encoding="utf-8"), args.level,
            filter_synth=filter_synth, extra_synth_patterns=patterns,
            diagnostics=diagnostics,
        )
    elif fmt == "csv":
        snapshot = hiddenapi.parse_csv(
            args.input.read_text(encoding="utf-8"), args.level,
            filter_synth=filter_synth, extra_synth_patterns=patterns,
            diagnostics=diagnostics,
        )
    elif fmt == "xml":
        model = parse_api_versions(
            args.input.read_bytes(), filter_synth=filter_synth,
            extra_synth_patterns=patterns, diagnostics=diagnostics,
        )
        snapshot = snapshot_at(model, args.level)
    else:
        snapshot = jar.parse_archive(
            args.input.read_bytes(), args.level,
            filter_synth=filter_synth, extra_synth_patterns=patterns,
            diagnostics=diagnostics,
        )

    _print_diagnostics(diagnostics)
    if args.policy_sidecar:
        args.policy_sidecar.write_bytes(
            hiddenapi.dumps_policy_sidecar(snapshot).encode("utf-8")
        )
    if args.lifetime_sidecar:
        args.lifetime_sidecar.write_bytes(
            dumps_lifetime_sidecar(snapshot).encode("utf-8")
        )
    _emit(snapshotio.dumps_snapshot(snapshot), args.output)
    return 0


def _cmd_merge_legacy(args, parser: argparse.ArgumentParser) -> int:
    sources = []
    for item in args.sources:
        flag, sep, path = item.partition("=")
        if not sep or not flag or not path:
            parser.error(f"expected FLAG=PATH, got {item!r}")
        sources.append((Path(path).read_text(encoding="utf-8"), flag))
    _emit(hiddenapi.merge_legacy_lists(sources), args.output)
    return 0


def _cmd_venn(args, parser: argparse.ArgumentParser) -> int:
    if len(args.inputs) < 2:
        parser.error("venn needs at least two inputs")
    labeled = [
        (label, snapshotio.load_snapshot(path)) for label, path in _labeled(args.inputs)
    ]
    partition = diff.venn(labeled)
    _emit(diff.render_venn(partition, members=args.members), args.output)
    return 0


def _cmd_evolve(args) -> int:
    prev = snapshotio.load_snapshot(args.prev)
    next_ = snapshotio.load_snapshot(args.next)
    delta = diff.evolution(prev, next_)
    _emit(diff.render_evolution(delta, members=args.members), args.output)
    return 0


def _cmd_scan(args) -> int:
    union = apkscan.union_of_snapshots(
        snapshotio.load_snapshot(path) for path in args.lists
    )
    diagnostics: list[str] = []
    report = apkscan.scan_apk(
        args.apk.read_bytes(),
        union,
        apk_id=args.apk_id or args.apk.name,
        exclude_prefixes=args.exclude_prefix,
        diagnostics=diagnostics,
    )
    _print_diagnostics(diagnostics)
    _emit(apkscan.render_usage_report(report), args.output)
    return 0


def _cmd_compare_device(args) -> int:
    inventory = diff.load_device_inventory(args.inventory)
    labeled = [
        (label, snapshotio.load_snapshot(path)) for label, path in _labeled(args.inputs)
    ]
    comparison = diff.compare_device(labeled, inventory)
    _emit(diff.render_device_comparison(comparison, members=args.members), args.output)
    return 0


def _cmd_breakdown(args) -> int:
    snapshot = snapshotio.load_snapshot(args.input)
    _emit(diff.render_breakdown(diff.breakdown(snapshot.apis)), args.output)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "parse":
            return _cmd_parse(args, parser)
        if args.command == "merge-legacy":
            return _cmd_merge_legacy(args, parser)
        if args.command == "venn":
            return _cmd_venn(args, parser)
        if args.command == "evolve":
            return _cmd_evolve(args)
        if args.command == "scan":
            return _cmd_scan(args)
        if args.command == "compare-device":
            return _cmd_compare_device(args)
        if args.command == "breakdown":
            return _cmd_breakdown(args)
    except (AalkitError, OSError, ValueError) as exc:
        print(f"aalkit: error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
