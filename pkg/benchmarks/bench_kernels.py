#!/usr/bin/env python3
"""Benchmark the signature-scanning kernels: compiled extension vs fallback.

Generates a synthetic workload shaped like a large restriction-flag list
(member signatures plus bare descriptors) and times both implementations
on identical inputs.

    python benchmarks/bench_kernels.py [--items 200000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import random
import time

from aalkit import _scan_py

try:
    from aalkit import _scan_c
except ImportError:
    _scan_c = None

_PACKAGES = ("android/app", "android/content", "android/view", "java/util", "com/android/internal/os")
_CLASSES = ("Activity", "Service", "View", "ArrayList", "BatteryStats$Uid", "Window$Callback")
_MEMBERS = ("onCreate", "getValue", "mFlags", "dispatchTouchEvent", "CREATOR", "setFlags")
_TYPES = ("I", "J", "Z", "Ljava/lang/String;", "[B", "[Ljava/lang/Object;", "Landroid/view/View;")


def make_workload(n: int, seed: int = 7) -> tuple[list[str], list[str], list[str]]:
    rng = random.Random(seed)
    member_sigs = []
    method_descs = []
    field_descs = []
    for _ in range(n):
        cls = f"L{rng.choice(_PACKAGES)}/{rng.choice(_CLASSES)};"
        name = rng.choice(_MEMBERS)
        if rng.random() < 0.5:
            params = "".join(rng.choice(_TYPES) for _ in range(rng.randrange(4)))
            ret = rng.choice(_TYPES + ("V",))
            member_sigs.append(f"{cls}->{name}({params}){ret}")
            method_descs.append(f"({params}){ret}")
        else:
            desc = rng.choice(_TYPES)
            member_sigs.append(f"{cls}->{name}:{desc}")
            field_descs.append(desc)
    return member_sigs, method_descs, field_descs


def bench(fn, items: list[str], repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for item in items:
            fn(item)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--items", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    member_sigs, method_descs, field_descs = make_workload(args.items)
    impls = [("python", _scan_py)]
    if _scan_c is not None:
        impls.append(("cython", _scan_c))
    else:
        print("note: compiled kernel not built; benchmarking the fallback only")

    workloads = [
        ("parse_member_sig", member_sigs),
        ("parse_method_desc", method_descs),
        ("parse_field_desc", field_descs),
    ]
    print(f"{'op':<18}{'impl':<8}{'items':>9}{'secs':>9}{'items/s':>12}  speedup")
    for op, items in workloads:
        base = None
        for label, impl in impls:
            secs = bench(getattr(impl, op), items, args.repeat)
            rate = len(items) / secs if secs else float("inf")
            if base is None:
                base = secs
                speedup = ""
            else:
                speedup = f"x{base / secs:.1f}"
            print(f"{op:<18}{label:<8}{len(items):>9}{secs:>9.3f}{rate:>12.0f}  {speedup}")


if __name__ == "__main__":
    main()
