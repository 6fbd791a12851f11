"""Command-line surface: compute measures, generate instances, run the
benchmark suites, and multiply matrices via the gadget reduction.

Exit codes: 0 success, 2 validation/parse error, 3 oracle budget
exhausted, 4 slab precondition failed, 5 matrix verification failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import adaptive, geom, measures, mmreduce, oracle, sdc
from .errors import (
    BoxdepthError,
    BudgetExceededError,
    ContractViolationError,
    ParseError,
)
from .geom import FULL_COVER, Instance
from .measures import DepthDistribution

ALGOS = ("sdc", "oracle", "profile", "degeneracy", "slab")
MEASURES = ("dd", "klee", "maxdepth", "all")
SUITES = ("scaling", "profile", "degeneracy")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_NOT_SLABS = 4
EXIT_VERIFY = 5

BENCH_HEADER = "algo,measure,n,d,seed,kind,profile,degeneracy,millis,checksum"

# Degeneracy needs the quadratic intersection graph; skip it beyond this n.
_BENCH_DEGENERACY_MAX_N = 4096


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark run; the checksum digests the output vector so
    cross-algorithm agreement is checkable from logs alone."""

    algo: str
    measure: str
    n: int
    d: int
    seed: int
    kind: str
    profile: int | None
    degeneracy: int | None
    millis: float
    checksum: str

    def to_csv(self) -> str:
        p = "" if self.profile is None else str(self.profile)
        k = "" if self.degeneracy is None else str(self.degeneracy)
        return (
            f"{self.algo},{self.measure},{self.n},{self.d},{self.seed},"
            f"{self.kind},{p},{k},{self.millis:.3f},{self.checksum}"
        )


def vector_checksum(values: Iterable[float]) -> str:
    """Digest of a numeric vector at 12 fixed decimals per component."""
    payload = ",".join(f"{float(v):.12f}" for v in values)
    return hashlib.sha256(payload.encode("ascii")).hexdigest()[:16]


def _classify_slabs(instance: Instance):
    slabs = []
    covers = 0
    for i, b in enumerate(instance.boxes):
        axis = geom.slab_axis(b, instance.domain)
        if axis is FULL_COVER:
            covers += 1
        elif axis is None:
            raise ContractViolationError(f"boxes[{i}] is not a slab within the domain")
        else:
            slabs.append(b)
    return slabs, covers


def _slab_dd(instance: Instance) -> DepthDistribution:
    slabs, covers = _classify_slabs(instance)
    local = measures.dd_slabs(slabs, instance.domain)
    full = DepthDistribution(np.zeros(instance.n + 1))
    measures.dd_accumulate(full, local, covers)
    return full


def compute_dd(instance: Instance, algo: str) -> DepthDistribution:
    if algo == "sdc":
        return sdc.sdc_depth_distribution(instance)
    if algo == "oracle":
        return oracle.oracle_dd(instance)
    if algo == "profile":
        return adaptive.dd_profile(instance)
    if algo == "degeneracy":
        return adaptive.dd_degeneracy(instance)
    if algo == "slab":
        return _slab_dd(instance)
    raise ContractViolationError(f"unknown algo {algo!r}")


def compute_klee(instance: Instance, algo: str) -> float:
    if algo == "sdc":
        return sdc.sdc_klee(instance)
    if algo == "oracle":
        return oracle.oracle_klee(instance)
    if algo == "profile":
        return adaptive.klee_profile(instance)
    if algo == "degeneracy":
        return adaptive.klee_degeneracy(instance)
    if algo == "slab":
        slabs, covers = _classify_slabs(instance)
        if covers >= 1:
            return geom.volume(instance.domain)
        return measures.klee_slabs(slabs, instance.domain)
    raise ContractViolationError(f"unknown algo {algo!r}")


def compute_maxdepth(instance: Instance, algo: str) -> int:
    if algo == "sdc":
        return sdc.sdc_max_depth(instance)
    if algo == "oracle":
        return oracle.oracle_max_depth(instance)
    if algo == "profile":
        return adaptive.maxdepth_profile(instance)
    if algo == "degeneracy":
        return adaptive.maxdepth_degeneracy(instance)
    if algo == "slab":
        slabs, covers = _classify_slabs(instance)
        return covers + measures.maxdepth_slabs(slabs, instance.domain)
    raise ContractViolationError(f"unknown algo {algo!r}")


def _measure_payload(instance: Instance, algo: str, measure: str) -> dict:
    if measure == "dd":
        dd = compute_dd(instance, algo)
        return {"v0": dd.v0, "v": dd.values[1:].tolist()}
    if measure == "klee":
        return {"klee": compute_klee(instance, algo)}
    if measure == "maxdepth":
        return {"max_depth": compute_maxdepth(instance, algo)}
    return compute_dd(instance, algo).to_json()


def cmd_compute(args) -> int:
    try:
        instance = geom.read_instance(Path(args.infile).read_bytes())
    except OSError as exc:
        print(f"error: cannot read {args.infile}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        payload = _measure_payload(instance, args.algo, args.measure)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ContractViolationError as exc:
        if args.algo == "slab":
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NOT_SLABS
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(payload) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        instance = geom.generate(args.kind, args.n, args.d, args.seed)
    except BoxdepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    data = geom.write_instance(instance) + b"\n"
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
    return EXIT_OK


def cmd_mm(args) -> int:
    try:
        a = mmreduce.read_matrix_csv(Path(args.a).read_text(encoding="utf-8"))
        b = mmreduce.read_matrix_csv(Path(args.b).read_text(encoding="utf-8"))
        product = mmreduce.product_via_dd(a, b, args.engine)
    except OSError as exc:
        print(f"error: cannot read matrix: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ContractViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    sys.stdout.write(mmreduce.write_matrix_csv(product))
    if args.verify:
        reference = mmreduce.direct_product(a, b)
        err = 0.0
        for prow, rrow in zip(product.entries, reference.entries):
            for p, r in zip(prow, rrow):
                if abs(r) >= 1e-9:
                    err = max(err, abs(p - r) / abs(r))
                else:
                    err = max(err, abs(p - r))
        base, row_stride, col_stride = mmreduce.depth_calibration(a.order)
        print(
            f"verify: max relative error {err:.3e} "
            f"(depth map base={base} row_stride={row_stride} col_stride={col_stride})",
            file=sys.stderr,
        )
        if err > 1e-6:
            return EXIT_VERIFY
    return EXIT_OK


def profile_structured_instance(n: int, d: int, p: int, seed: int) -> Instance:
    """n boxes in ceil(n/p) disjoint strips along axis 0, at most p per
    strip, so the axis-0 profile is about p."""
    rng = random.Random(seed)
    strips = max(1, -(-n // p))
    boxes = []
    for i in range(n):
        t = min(i // p, strips - 1)
        x0, x1 = t / strips, (t + 1) / strips
        lo = [0.0] * d
        hi = [0.0] * d
        a, b = rng.uniform(x0, x1), rng.uniform(x0, x1)
        lo[0], hi[0] = min(a, b), max(a, b)
        for k in range(1, d):
            a, b = rng.random(), rng.random()
            lo[k], hi[k] = min(a, b), max(a, b)
        boxes.append(geom.AxisBox(tuple(lo), tuple(hi)))
    return Instance(d, geom.DomainBox((0.0,) * d, (1.0,) * d), tuple(boxes))


def degeneracy_structured_instance(n: int, d: int, k: int, seed: int) -> Instance:
    """Clusters of k+1 boxes sharing a common point, so the intersection
    graph is near a union of (k+1)-cliques with degeneracy about k."""
    rng = random.Random(seed)
    cluster = k + 1
    clusters = max(1, -(-n // cluster))
    radius = 0.2 / max(1.0, clusters ** (1.0 / d))
    boxes = []
    for i in range(n):
        t = min(i // cluster, clusters - 1)
        crng = random.Random(seed * 1_000_003 + t)
        center = [crng.uniform(radius, 1.0 - radius) for _ in range(d)]
        lo = tuple(c - rng.uniform(0.2, 1.0) * radius for c in center)
        hi = tuple(c + rng.uniform(0.2, 1.0) * radius for c in center)
        boxes.append(geom.AxisBox(lo, hi))
    return Instance(d, geom.DomainBox((0.0,) * d, (1.0,) * d), tuple(boxes))


def _timed_dd(fn, instance) -> tuple[float, DepthDistribution]:
    start = time.perf_counter()
    dd = fn(instance)
    return (time.perf_counter() - start) * 1000.0, dd


def run_scaling_suite(max_n: int, d: int, repeats: int) -> tuple[list[BenchRecord], float]:
    """Time sdc on uniform instances at powers of two; returns the records
    and the fitted log-log slope of median time vs n."""
    ns = []
    n = min(1024, max_n)
    while n <= max_n:
        ns.append(n)
        n *= 2
    sdc.sdc_depth_distribution(geom.generate("uniform", 256, d, seed=987))  # warm caches
    records = []
    medians = []
    for n in ns:
        times = []
        for r in range(repeats):
            instance = geom.generate("uniform", n, d, seed=r)
            millis, dd = _timed_dd(sdc.sdc_depth_distribution, instance)
            times.append(millis)
            records.append(
                BenchRecord(
                    "sdc", "dd", n, d, r, "uniform",
                    adaptive.profile(instance).profile, None,
                    millis, vector_checksum(dd.values),
                )
            )
        medians.append(sorted(times)[len(times) // 2])
    slope = float(np.polyfit(np.log(ns), np.log(medians), 1)[0]) if len(ns) >= 2 else math.nan
    return records, slope


def run_profile_suite(
    n: int, d: int, repeats: int, ps: Sequence[int] = (16, 64, 256, 1024)
) -> list[BenchRecord]:
    records = []
    for p in ps:
        if p > n:
            continue
        for r in range(repeats):
            instance = profile_structured_instance(n, d, p, seed=r)
            millis, dd = _timed_dd(adaptive.dd_profile, instance)
            records.append(
                BenchRecord(
                    "profile", "dd", n, d, r, "profile-structured",
                    adaptive.profile(instance).profile, None,
                    millis, vector_checksum(dd.values),
                )
            )
    return records


def run_degeneracy_suite(
    n: int, d: int, repeats: int, ks: Sequence[int] = (2, 8, 32, 128)
) -> list[BenchRecord]:
    records = []
    for k in ks:
        if k >= n:
            continue
        for r in range(repeats):
            instance = degeneracy_structured_instance(n, d, k, seed=r)
            measured = adaptive.degeneracy_ordering(adaptive.intersection_graph(instance)).k \
                if n <= _BENCH_DEGENERACY_MAX_N else None
            millis, dd = _timed_dd(adaptive.dd_degeneracy, instance)
            records.append(
                BenchRecord(
                    "degeneracy", "dd", n, d, r, "degeneracy-structured",
                    adaptive.profile(instance).profile, measured,
                    millis, vector_checksum(dd.values),
                )
            )
    return records


def cmd_bench(args) -> int:
    print(BENCH_HEADER)
    if args.suite == "scaling":
        records, slope = run_scaling_suite(args.max_n, args.d, args.repeats)
        for rec in records:
            print(rec.to_csv())
        print(f"# loglog_slope={slope:.4f}")
    elif args.suite == "profile":
        for rec in run_profile_suite(args.max_n, args.d, args.repeats):
            print(rec.to_csv())
    else:
        for rec in run_degeneracy_suite(args.max_n, args.d, args.repeats):
            print(rec.to_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxdepth",
        description="Depth distribution, Klee's measure and maximum depth of axis-aligned boxes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="compute measures of an instance file")
    p_compute.add_argument("--in", dest="infile", required=True, help="instance JSON file")
    p_compute.add_argument("--algo", choices=ALGOS, default="sdc")
    p_compute.add_argument("--measure", choices=MEASURES, default="all")
    p_compute.add_argument("--out", help="output file (default stdout)")
    p_compute.set_defaults(func=cmd_compute)

    p_gen = sub.add_parser("generate", help="write a seeded random instance")
    p_gen.add_argument("--kind", choices=geom.GENERATOR_KINDS, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--d", type=int, required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", help="output file (default stdout)")
    p_gen.set_defaults(func=cmd_generate)

    p_bench = sub.add_parser("bench", help="run a benchmark suite, CSV to stdout")
    p_bench.add_argument("--suite", choices=SUITES, required=True)
    p_bench.add_argument("--max-n", dest="max_n", type=int, default=None)
    p_bench.add_argument("--d", type=int, default=2)
    p_bench.add_argument("--repeats", type=int, default=1)
    p_bench.set_defaults(func=cmd_bench)

    p_mm = sub.add_parser("mm", help="multiply matrices via the gadget reduction")
    p_mm.add_argument("--a", required=True, help="left matrix CSV")
    p_mm.add_argument("--b", required=True, help="right matrix CSV")
    p_mm.add_argument("--engine", choices=mmreduce.ENGINES, default="sdc")
    p_mm.add_argument("--verify", action="store_true", help="compare against the direct product")
    p_mm.set_defaults(func=cmd_mm)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "bench" and args.max_n is None:
        args.max_n = {"scaling": 65536, "profile": 16384, "degeneracy": 2048}[args.suite]
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
